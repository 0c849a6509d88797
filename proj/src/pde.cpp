#include "manton/pde.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace manton {

const char* case_name(ModelCase c) {
    switch (c) {
        case ModelCase::A: return "A";
        case ModelCase::B: return "B";
        case ModelCase::Manton: return "Manton";
    }
    return "?";
}

ModelCase parse_case(const std::string& s) {
    if (s == "A" || s == "a") return ModelCase::A;
    if (s == "B" || s == "b") return ModelCase::B;
    if (s == "Manton" || s == "manton") return ModelCase::Manton;
    throw std::invalid_argument("unknown model case '" + s + "'");
}

void ModelParams::validate() const {
    if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
    if (!(lam > 0)) throw std::invalid_argument("lam must be positive");
    if (kappa == 0.0 || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be nonzero");
    if (model_case == ModelCase::A && (jT.j_vec[0] != 0.0 || jT.j_vec[1] != 0.0))
        throw std::invalid_argument("case A has no transport current");
}

void Grid2::validate() const {
    auto pow2 = [](int n) { return n > 0 && (n & (n - 1)) == 0; };
    if (n1 < 32 || n2 < 32 || !pow2(n1) || !pow2(n2)) throw std::invalid_argument("grid sizes must be powers of two >= 32");
    if (!(L1 > 0) || !(L2 > 0)) throw std::invalid_argument("box lengths must be positive");
    if (dt < 0) throw std::invalid_argument("dt must be positive");
}

const char* ansatz_name(Ansatz a) {
    switch (a) {
        case Ansatz::uniform: return "uniform";
        case Ansatz::gaussian_dip: return "gaussian_dip";
        case Ansatz::vortex_pair: return "vortex";
        case Ansatz::localized: return "localized";
    }
    return "?";
}

Ansatz parse_ansatz(const std::string& s) {
    if (s == "uniform") return Ansatz::uniform;
    if (s == "gaussian_dip") return Ansatz::gaussian_dip;
    if (s == "vortex" || s == "vortex_pair") return Ansatz::vortex_pair;
    if (s == "localized") return Ansatz::localized;
    throw std::invalid_argument("unknown ansatz '" + s + "'");
}

void AnsatzSpec::validate(const Grid2& g) const {
    for (int a = 0; a < 2; ++a) {
        const double L = a == 0 ? g.L1 : g.L2;
        const double m = kick[a] * L / (2 * M_PI);
        if (std::abs(m - std::round(m)) > 1e-9) throw InvalidAnsatz("kick must lie on the reciprocal lattice");
    }
    if (kind == Ansatz::gaussian_dip) {
        if (dips.empty()) throw InvalidAnsatz("gaussian_dip needs at least one dip");
        double total = 0.0;
        for (const auto& d : dips) {
            if (d.depth == 0.0 || !std::isfinite(d.depth) || !(d.width[0] > 0) || !(d.width[1] > 0))
                throw InvalidAnsatz("dip depth must be nonzero and widths positive");
            total += std::max(d.depth, 0.0);
        }
        if (!(total < 1.0)) throw InvalidAnsatz("total dip depth must be below 1");
    }
    if (kind == Ansatz::vortex_pair) {
        if (winding == 0) throw InvalidAnsatz("vortex winding must be nonzero");
        if (!(core > 0)) throw InvalidAnsatz("vortex core must be positive");
        if (!(separation > 0) || !(separation < 0.5 * g.L1)) throw InvalidAnsatz("vortex separation must lie in (0, L1/2)");
    }
    if (kind == Ansatz::localized) {
        if (!std::isfinite(amplitude) || !(width > 0) || !std::isfinite(twist))
            throw InvalidAnsatz("localized amplitude/twist must be finite and width positive");
        if (!(8 * width < std::min(g.L1, g.L2))) throw InvalidAnsatz("localized width must be below L/8");
    }
}

namespace {

constexpr cplx kI(0.0, 1.0);

RField rho_of(const CField& phi) {
    RField r(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) r[i] = std::norm(phi[i]);
    return r;
}

double mean(const RField& f) {
    double s = 0.0;
    for (double v : f) s += v;
    return s / static_cast<double>(f.size());
}

// Curly B from rho. Case B goes through the statistical field of its own
// Gauss law and the background shift gamma/2kappa.
RField curly_b(const RField& rho, const ModelParams& p) {
    const double c = p.gamma / (2 * p.kappa);
    RField B(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        switch (p.model_case) {
            case ModelCase::Manton: B[i] = c * (1.0 - rho[i]); break;
            case ModelCase::B: B[i] = -c * rho[i] + c; break;
            case ModelCase::A: B[i] = -c * rho[i]; break;
        }
    }
    return B;
}

// Replace the transverse part of (a1, a2) by the Coulomb potential of B - <B>.
void rebuild_transverse(RField& a1, RField& a2, const RField& B, const Spectral& sp) {
    CField h1 = sp.forward_real(a1), h2 = sp.forward_real(a2), hb = sp.forward_real(B);
    const auto &k1 = sp.k1(), &k2 = sp.k2();
    const int n1 = sp.n1(), n2 = sp.n2();
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const std::size_t m = i * n2 + j;
            const double kk = k1[i] * k1[i] + k2[j] * k2[j];
            if (kk == 0.0) continue;
            const cplx div = k1[i] * h1[m] + k2[j] * h2[m];
            const cplx chi = -hb[m] / kk;
            h1[m] = k1[i] * div / kk - kI * k2[j] * chi;
            h2[m] = k2[j] * div / kk + kI * k1[i] * chi;
        }
    a1 = sp.inverse_real(h1);
    a2 = sp.inverse_real(h2);
}

struct Currents {
    CField D1, D2;
    RField J1, J2;
};

Currents currents(const CField& phi, const RField& a1, const RField& a2, const Spectral& sp) {
    Currents c;
    c.D1 = sp.diff(phi, 0);
    c.D2 = sp.diff(phi, 1);
    c.J1.resize(phi.size());
    c.J2.resize(phi.size());
    for (std::size_t m = 0; m < phi.size(); ++m) {
        c.D1[m] -= kI * a1[m] * phi[m];
        c.D2[m] -= kI * a2[m] * phi[m];
        c.J1[m] = std::imag(std::conj(phi[m]) * c.D1[m]);
        c.J2[m] = std::imag(std::conj(phi[m]) * c.D2[m]);
    }
    return c;
}

// Ampere-Hall solved for the electric field, pointwise.
void electric_field(const RField& B, const RField& J1, const RField& J2, const ModelParams& p, const Spectral& sp,
                    RField& E1, RField& E2) {
    const RField dB1 = sp.diff(B, 0), dB2 = sp.diff(B, 1);
    const double k2 = 2 * p.kappa;
    const auto& jT = p.jT.j_vec;
    E1.resize(B.size());
    E2.resize(B.size());
    for (std::size_t m = 0; m < B.size(); ++m) {
        switch (p.model_case) {
            case ModelCase::Manton:
                E1[m] = (dB1[m] + (J2[m] - jT[1])) / k2;
                E2[m] = (dB2[m] - (J1[m] - jT[0])) / k2;
                break;
            case ModelCase::B: {
                // statistical E from the unshifted law, then the curly shift
                const double e1 = (dB1[m] + J2[m]) / k2, e2 = (dB2[m] - J1[m]) / k2;
                E1[m] = e1 - jT[1] / k2;
                E2[m] = e2 + jT[0] / k2;
                break;
            }
            case ModelCase::A:
                E1[m] = (dB1[m] + J2[m]) / k2;
                E2[m] = (dB2[m] - J1[m]) / k2;
                break;
        }
    }
}

// a_t with lap a_t = div E, zero mean.
RField scalar_potential(const RField& E1, const RField& E2, const Spectral& sp) {
    CField h1 = sp.forward_real(E1), h2 = sp.forward_real(E2);
    const auto &k1 = sp.k1(), &k2 = sp.k2();
    const int n1 = sp.n1(), n2 = sp.n2();
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const std::size_t m = i * n2 + j;
            const double kk = k1[i] * k1[i] + k2[j] * k2[j];
            h1[m] = kk > 0 ? -(kI * k1[i] * h1[m] + kI * k2[j] * h2[m]) / kk : 0.0;
        }
    return sp.inverse_real(h1);
}

RField potential_at(const CField& phi, const RField& a1, const RField& a2, const RField& B, const ModelParams& p,
                    const Spectral& sp) {
    const Currents c = currents(phi, a1, a2, sp);
    RField E1, E2;
    electric_field(B, c.J1, c.J2, p, sp, E1, E2);
    return scalar_potential(E1, E2, sp);
}

// Local phase step exp(-i V tau / gamma) with V from a midpoint predictor.
CField local_step(const CField& phi, const RField& a1, const RField& a2, const RField& rho, const RField& B,
                  const ModelParams& p, const Spectral& sp, double tau) {
    auto apply = [&](const CField& in, const RField& at, double t) {
        CField out(in.size());
        for (std::size_t m = 0; m < in.size(); ++m) {
            const double V = -p.gamma * at[m] - 0.25 * p.lam * (1.0 - rho[m]);
            out[m] = std::polar(1.0, -V * t / p.gamma) * in[m];
        }
        return out;
    };
    const RField at0 = potential_at(phi, a1, a2, B, p, sp);
    const CField q = apply(phi, at0, 0.5 * tau);
    const RField atq = potential_at(q, a1, a2, B, p, sp);
    return apply(phi, atq, tau);
}

// Uniform part of the field: d<a>/dt = -<E> with phi frozen. u = <J> - J^T
// rotates at omega = <rho>/2kappa, and <a> follows from <J> = c - <rho><a>.
void zero_mode_flow(const CField& phi, RField& a1, RField& a2, const ModelParams& p, const Spectral& sp, double tau) {
    const Currents c = currents(phi, a1, a2, sp);
    const RField rho = rho_of(phi);
    const double r = mean(rho);
    const double u1 = mean(c.J1) - p.jT.j_vec[0], u2 = mean(c.J2) - p.jT.j_vec[1];
    const double w = r / (2 * p.kappa) * tau;
    const double v1 = u1 * std::cos(w) + u2 * std::sin(w), v2 = -u1 * std::sin(w) + u2 * std::cos(w);
    const double d1 = (u1 - v1) / r, d2 = (u2 - v2) / r;
    for (std::size_t m = 0; m < a1.size(); ++m) {
        a1[m] += d1;
        a2[m] += d2;
    }
}

CField kinetic_step(const CField& phi, const RField& a1, const RField& a2, const ModelParams& p, const Spectral& sp,
                    double tau, int* iterations) {
    ExpmvInfo info;
    auto H = [&](const CField& v, CField& w) { sp.magnetic_kinetic(a1, a2, v, w); };
    CField out = expmv_lanczos(H, phi, tau / p.gamma, 1e-14, 40, &info);
    if (iterations) *iterations += info.iterations;
    return out;
}

void check_state(const FieldState& s, const Grid2& g) {
    const std::size_t n = g.size();
    if (s.phi.size() != n || s.a1.size() != n || s.a2.size() != n || s.a_t.size() != n)
        throw std::invalid_argument("field arrays do not match the grid size");
}

}  // namespace

Derived2 solve_constraints(FieldState& s, const ModelParams& p, const Grid2& g) {
    p.validate();
    check_state(s, g);
    for (const auto& z : s.phi)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw std::invalid_argument("phi is not finite");
    const Spectral& sp = g.spectral();
    Derived2 d;
    d.rho = rho_of(s.phi);
    d.B = curly_b(d.rho, p);
    d.mean_B = mean(d.B);
    rebuild_transverse(s.a1, s.a2, d.B, sp);
    const Currents c = currents(s.phi, s.a1, s.a2, sp);
    d.J1 = c.J1;
    d.J2 = c.J2;
    electric_field(d.B, d.J1, d.J2, p, sp, d.E1, d.E2);
    d.mean_E = {mean(d.E1), mean(d.E2)};
    s.a_t = scalar_potential(d.E1, d.E2, sp);

    // J_t = Im(Phi* D_t Phi) with D_t Phi from the field equation.
    CField rhs = nls_rhs(s, p, g);
    d.J_t.resize(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
        // i gamma D_t Phi = rhs + gamma a_t Phi
        const cplx Dt = -kI * (rhs[m] + p.gamma * s.a_t[m] * s.phi[m]) / p.gamma;
        d.J_t[m] = std::imag(std::conj(s.phi[m]) * Dt);
    }

    for (std::size_t m = 0; m < g.size(); ++m) {
        const double r = p.model_case == ModelCase::A ? 2 * p.kappa * d.B[m] + p.gamma * d.rho[m]
                                                      : 2 * p.kappa * d.B[m] - p.gamma * (1.0 - d.rho[m]);
        d.gauss_residual = std::max(d.gauss_residual, std::abs(r));
    }
    const RField curl = [&] {
        RField d12 = sp.diff(s.a2, 0), d21 = sp.diff(s.a1, 1), out(g.size());
        for (std::size_t m = 0; m < g.size(); ++m) out[m] = d12[m] - d21[m];
        return out;
    }();
    for (std::size_t m = 0; m < g.size(); ++m)
        d.curl_residual = std::max(d.curl_residual, std::abs(curl[m] - (d.B[m] - d.mean_B)));
    {
        const CField h1 = sp.forward_real(s.a1), h2 = sp.forward_real(s.a2);
        double mx = 0.0;
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j) {
                const std::size_t m = i * g.n2 + j;
                mx = std::max(mx, std::abs(sp.k1()[i] * h1[m] + sp.k2()[j] * h2[m]));
            }
        d.coulomb_residual = mx / static_cast<double>(g.size());
    }
    return d;
}

namespace {

double periodic_gauss(double x, double y, std::array<double, 2> c, double w, const Grid2& g) {
    double v = 0.0;
    for (int m1 = -2; m1 <= 2; ++m1)
        for (int m2 = -2; m2 <= 2; ++m2) {
            const double dx = x - c[0] + m1 * g.L1, dy = y - c[1] + m2 * g.L2;
            v += std::exp(-(dx * dx + dy * dy) / (w * w));
        }
    return v;
}

// Fills phi and a (without the -J^T offset) for the localized ansatz.
void init_localized(FieldState& s, const Grid2& g, const ModelParams& p, const AnsatzSpec& a) {
    const std::size_t n = g.size();
    RField f1(n), g1(n), f2(n);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const double x = g.x1(i), y = g.x2(j);
            const std::size_t m = i * g.n2 + j;
            double u = x - a.center[0];
            u -= g.L1 * std::round(u / g.L1);
            f1[m] = a.amplitude * periodic_gauss(x, y, a.center, a.width, g);
            g1[m] = periodic_gauss(x, y, a.center, 2 * a.width, g);
            f2[m] = a.amplitude * a.twist * u / a.width * periodic_gauss(x, y, a.center, 0.8 * a.width, g);
        }
    const auto& S = g.spectral();
    const RField d1 = S.diff(f2, 0);
    const RField d2f = S.diff(f1, 1), d2g = S.diff(g1, 1);
    RField rho(n);
    auto fill = [&](double c) {
        double P1 = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            rho[m] = 1.0 - 2 * p.kappa / p.gamma * (d1[m] - d2f[m] - c * d2g[m]);
            P1 += rho[m] * (f1[m] + c * g1[m]);
        }
        return P1;
    };
    // int rho a1 is quadratic in c; the secant from c = 0 finds the small root.
    double ca = -0.1, cb = 0.0, fa = fill(ca), fb = fill(cb);
    for (int it = 0; it < 60 && std::abs(fb) > 1e-15 && fb != fa; ++it) {
        const double cc = cb - fb * (cb - ca) / (fb - fa);
        ca = cb;
        fa = fb;
        cb = cc;
        fb = fill(cb);
    }
    fill(cb);
    for (std::size_t m = 0; m < n; ++m) {
        if (!(rho[m] > 0)) throw InvalidAnsatz("localized amplitude too large: density not positive");
        s.phi[m] = std::sqrt(rho[m]) * s.phi[m];
        s.a1[m] = f1[m] + cb * g1[m];
        s.a2[m] = f2[m];
    }
}

}  // namespace

FieldState init_state(const Grid2& g, const ModelParams& p, const AnsatzSpec& a) {
    g.validate();
    p.validate();
    a.validate(g);
    FieldState s;
    const std::size_t n = g.size();
    s.phi.assign(n, 1.0);
    s.a1.assign(n, 0.0);
    s.a2.assign(n, 0.0);
    s.a_t.assign(n, 0.0);
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const double x = g.x1(i), y = g.x2(j);
            cplx v = 1.0;
            if (a.kind == Ansatz::gaussian_dip) {
                double mod = 1.0;
                for (const auto& d : a.dips) {
                    // sum over periodic images keeps the data smooth on the torus
                    const double c = std::cos(d.angle), sn = std::sin(d.angle);
                    double u0 = x - d.center[0], w0 = y - d.center[1];
                    u0 -= g.L1 * std::round(u0 / g.L1);
                    w0 -= g.L2 * std::round(w0 / g.L2);
                    for (int m1 = -2; m1 <= 2; ++m1)
                        for (int m2 = -2; m2 <= 2; ++m2) {
                            const double u = u0 + m1 * g.L1, w = w0 + m2 * g.L2;
                            const double p1 = (c * u + sn * w) / d.width[0], p2 = (-sn * u + c * w) / d.width[1];
                            mod -= d.depth * std::exp(-(p1 * p1 + p2 * p2));
                        }
                }
                v = mod;
            } else if (a.kind == Ansatz::vortex_pair) {
                // Periodic vortex/antivortex pair: phase of theta_1 ratios with
                // the quasi-periodicity factor removed.
                const double z1 = -0.5 * a.separation, z2 = 0.5 * a.separation;
                const double q = std::exp(-M_PI * g.L2 / g.L1);
                auto theta1 = [q](cplx u) {
                    cplx s = 0.0;
                    for (int k = 0; k < 20; ++k)
                        s += (k % 2 ? -2.0 : 2.0) * std::pow(q, (k + 0.5) * (k + 0.5)) * std::sin((2.0 * k + 1.0) * u);
                    return s;
                };
                const cplx zz(x, y);
                const double ph = std::arg(theta1(M_PI * (zz - z1) / g.L1)) - std::arg(theta1(M_PI * (zz - z2) / g.L1)) -
                                  2 * M_PI * (z1 - z2) * y / (g.L1 * g.L2);
                // smooth periodic distance, equal to |x - c| near the core
                auto dist = [&](double cx) {
                    const double u = g.L1 / M_PI * std::sin(M_PI * (x - cx) / g.L1);
                    const double w = g.L2 / M_PI * std::sin(M_PI * y / g.L2);
                    return std::hypot(u, w);
                };
                const int an = std::abs(a.winding);
                const double mod = std::pow(std::tanh(dist(z1) / a.core), an) * std::pow(std::tanh(dist(z2) / a.core), an);
                v = std::polar(mod, a.winding * ph);
            }
            v *= std::polar(1.0, a.kick[0] * x + a.kick[1] * y);
            s.phi[i * g.n2 + j] = v;
        }
    if (a.kind == Ansatz::localized) {
        if (p.model_case == ModelCase::A) throw InvalidAnsatz("localized data needs case B or Manton");
        init_localized(s, g, p, a);
    }
    // The far field carries the transport current: <a> = -J^T.
    if (p.model_case != ModelCase::A) {
        for (double& v : s.a1) v -= p.jT.j_vec[0];
        for (double& v : s.a2) v -= p.jT.j_vec[1];
    }
    solve_constraints(s, p, g);
    return s;
}

std::array<CField, 2> covariant_gradient(const FieldState& s, const Grid2& g) {
    const Currents c = currents(s.phi, s.a1, s.a2, g.spectral());
    return {c.D1, c.D2};
}

CField nls_rhs(const FieldState& s, const ModelParams& p, const Grid2& g) {
    CField out;
    g.spectral().magnetic_kinetic(s.a1, s.a2, s.phi, out);
    for (std::size_t m = 0; m < out.size(); ++m) {
        const double rho = std::norm(s.phi[m]);
        const double V = -p.gamma * s.a_t[m] - 0.25 * p.lam * (1.0 - rho);
        out[m] += V * s.phi[m];
    }
    return out;
}

FieldState step(const FieldState& s, const ModelParams& p, const Grid2& g, StepInfo* info, double dt_override) {
    check_state(s, g);
    const double dt = dt_override != 0.0 ? dt_override : g.step();
    const Spectral& sp = g.spectral();
    int iters = 0;

    RField a1 = s.a1, a2 = s.a2;
    zero_mode_flow(s.phi, a1, a2, p, sp, 0.5 * dt);
    const RField rho0 = rho_of(s.phi);
    const RField B0 = curly_b(rho0, p);
    const CField phi1 = local_step(s.phi, a1, a2, rho0, B0, p, sp, 0.5 * dt);

    // Kinetic step with the vector potential at the predicted midpoint.
    const CField pred = kinetic_step(phi1, a1, a2, p, sp, 0.5 * dt, &iters);
    RField am1 = a1, am2 = a2;
    rebuild_transverse(am1, am2, curly_b(rho_of(pred), p), sp);
    const CField phi2 = kinetic_step(phi1, am1, am2, p, sp, dt, &iters);

    FieldState out;
    out.time = s.time + dt;
    const RField rho2 = rho_of(phi2);
    const RField B2 = curly_b(rho2, p);
    out.a1 = a1;
    out.a2 = a2;
    rebuild_transverse(out.a1, out.a2, B2, sp);
    out.phi = local_step(phi2, out.a1, out.a2, rho2, B2, p, sp, 0.5 * dt);
    zero_mode_flow(out.phi, out.a1, out.a2, p, sp, 0.5 * dt);
    out.a_t = s.a_t;

    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < g.size(); ++m) {
        num += std::norm(out.phi[m] - s.phi[m]);
        den += std::norm(s.phi[m]);
    }
    const double rel = den > 0 ? std::sqrt(num / den) : 0.0;
    if (!(rel <= 0.1)) {
        std::ostringstream os;
        os << "step rejected: relative change " << rel << " exceeds 0.1 at t = " << s.time;
        throw StepRejected(os.str());
    }
    const Derived2 d1 = solve_constraints(out, p, g);
    if (info) {
        info->relative_change = rel;
        info->krylov_iterations = iters;
        FieldState before = s;
        const Derived2 d0 = solve_constraints(before, p, g);
        RField c0 = sp.diff(d0.E2, 0), c0b = sp.diff(d0.E1, 1), c1 = sp.diff(d1.E2, 0), c1b = sp.diff(d1.E1, 1);
        double far = 0.0;
        for (std::size_t m = 0; m < g.size(); ++m) {
            const double curl = 0.5 * ((c0[m] - c0b[m]) + (c1[m] - c1b[m]));
            far = std::max(far, std::abs(curl + (d1.B[m] - d0.B[m]) / dt));
        }
        info->faraday_residual = far;
    }
    return out;
}

double nls_residual(const FieldState& prev, const FieldState& mid, const FieldState& next, const ModelParams& p,
                    const Grid2& g) {
    const double dt2 = next.time - prev.time;
    if (!(dt2 > 0)) throw std::invalid_argument("nls_residual needs increasing times");
    const CField rhs = nls_rhs(mid, p, g);
    CField r(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) r[m] = kI * p.gamma * (next.phi[m] - prev.phi[m]) / dt2 - rhs[m];
    return l2_norm(r, g);
}

FieldState gauge_transform(const FieldState& s, const RField& chi, const Grid2& g) {
    const Spectral& sp = g.spectral();
    FieldState out = s;
    const RField d1 = sp.diff(chi, 0), d2 = sp.diff(chi, 1);
    for (std::size_t m = 0; m < g.size(); ++m) {
        out.phi[m] *= std::polar(1.0, chi[m]);
        out.a1[m] += d1[m];
        out.a2[m] += d2[m];
    }
    return out;
}

namespace {

// f(x) -> f(R^{-1} x) for a quarter turn R about the box center.
template <class F>
F rotate_quarter(const F& f, int n) {
    F out(f.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[i * n + j] = f[j * n + (n - i) % n];
    return out;
}

bool is_roll(double d, double h, int& cells) {
    const double c = d / h;
    cells = static_cast<int>(std::lround(c));
    return std::abs(c - cells) < 1e-12;
}

template <class F>
F roll(const F& f, int n1, int n2, int c1, int c2) {
    F out(f.size());
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            const int si = ((i - c1) % n1 + n1) % n1, sj = ((j - c2) % n2 + n2) % n2;
            out[i * n2 + j] = f[si * n2 + sj];
        }
    return out;
}

template <class F>
F translate(const F& f, const Grid2& g, double d1, double d2) {
    int c1 = 0, c2 = 0;
    if (is_roll(d1, g.h1(), c1) && is_roll(d2, g.h2(), c2)) return roll(f, g.n1, g.n2, c1, c2);
    return g.spectral().shift(f, d1, d2);
}

}  // namespace

FieldState apply_symmetry(const FieldState& s, const VectorField4& gen, double eps, const ModelParams& p,
                          const Grid2& g) {
    return apply_symmetry(s, gen, eps, p, g, MetricSpec::metric_b_transport(p.kappa, p.gamma, p.jT.j_vec));
}

FieldState apply_symmetry(const FieldState& s, const VectorField4& gen, double eps, const ModelParams& p,
                          const Grid2& g, const MetricSpec& metric) {
    check_state(s, g);
    const double t = s.time;
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> U(-0.4, 0.4);
    std::vector<Point4> probe{{t, 0.0, 0.0, 0.0}};
    for (int k = 0; k < 4; ++k) probe.push_back({t, U(rng) * g.L1, U(rng) * g.L2, U(rng)});

    for (const auto& q : probe) {
        const auto J = field_jacobian(gen.eval, q);
        for (int mu = 0; mu < 4; ++mu)
            if (std::abs(J[mu][3]) > 1e-12) throw SymmetryError("generator " + gen.label + " is not xi-preserving");
    }
    const Point4 X0 = gen.at(probe[0]);

    if (std::abs(X0[0]) > 1e-14) {
        // Time translation: must be a constant field (-c, 0, 0, w).
        for (const auto& q : probe) {
            const auto J = field_jacobian(gen.eval, q);
            const Point4 v = gen.at(q);
            double dev = std::abs(v[1]) + std::abs(v[2]);
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) dev += std::abs(J[mu][nu]);
            if (dev > 1e-12) throw SymmetryError("generator " + gen.label + " moves time non-uniformly");
        }
        const double shift = -eps * X0[0];
        const int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(shift) / g.step() - 1e-12)));
        FieldState cur = s;
        for (int k = 0; k < nsteps; ++k) cur = step(cur, p, g, nullptr, shift / nsteps);
        const cplx ph = std::polar(1.0, -p.gamma * eps * X0[3]);
        for (auto& z : cur.phi) z *= ph;
        cur.time = s.time;
        solve_constraints(cur, p, g);
        return cur;
    }

    // Spatial affine part X^x = A x + b at time t.
    const auto J0 = field_jacobian(gen.eval, probe[0]);
    Eigen::Matrix2d A;
    A << J0[1][1], J0[1][2], J0[2][1], J0[2][2];
    const Eigen::Vector2d b(X0[1], X0[2]);
    for (const auto& q : probe) {
        const Point4 v = gen.at(q);
        const Eigen::Vector2d x(q[1], q[2]);
        const Eigen::Vector2d pred = A * x + b;
        if (std::abs(v[0]) > 1e-12) throw SymmetryError("generator " + gen.label + " has a non-uniform time part");
        if (std::abs(v[1] - pred(0)) + std::abs(v[2] - pred(1)) > 1e-10)
            throw SymmetryError("generator " + gen.label + " is not affine in space");
    }
    auto flow = [&](double sigma) {
        Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
        G.topLeftCorner<2, 2>() = sigma * A;
        G.topRightCorner<2, 1>() = sigma * b;
        return Eigen::Matrix3d(G.exp());
    };
    const Eigen::Matrix3d F = flow(eps);
    const Eigen::Matrix2d M = F.topLeftCorner<2, 2>();
    const Eigen::Vector2d d = F.topRightCorner<2, 1>();

    int quarter = -1;
    for (int k = 0; k < 4; ++k) {
        const double th = k * M_PI / 2;
        Eigen::Matrix2d R;
        R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        if ((M - R).cwiseAbs().maxCoeff() < 1e-10) quarter = k;
    }
    if (quarter < 0) throw SymmetryError("only quarter-turn rotations are realized on the grid");
    if (quarter % 2 && (g.n1 != g.n2 || g.L1 != g.L2)) throw SymmetryError("quarter turns need a square box");

    // s-shift along the flow, Delta s(x) = int_0^eps X^s(t, x(sigma)) dsigma.
    static const double gl_x[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                                   0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static const double gl_w[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                                   0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    auto delta_s = [&](const Eigen::Vector2d& x0) {
        double acc = 0.0;
        const int pieces = 16;
        for (int piece = 0; piece < pieces; ++piece) {
            const double a0 = eps * piece / pieces, a1 = eps * (piece + 1) / pieces;
            for (int k = 0; k < 8; ++k) {
                const double sig = 0.5 * (a0 + a1) + 0.5 * (a1 - a0) * gl_x[k];
                const Eigen::Matrix3d Fs = flow(sig);
                const Eigen::Vector2d x = Fs.topLeftCorner<2, 2>() * x0 + Fs.topRightCorner<2, 1>();
                acc += 0.5 * (a1 - a0) * gl_w[k] * gen.at({t, x(0), x(1), 0.0})[3];
            }
        }
        return acc;
    };
    const double s0 = delta_s(Eigen::Vector2d(0, 0));
    const Eigen::Vector2d gs(delta_s(Eigen::Vector2d(1, 0)) - s0, delta_s(Eigen::Vector2d(0, 1)) - s0);
    for (std::size_t k = 1; k < probe.size(); ++k) {
        const Eigen::Vector2d x(probe[k][1], probe[k][2]);
        if (std::abs(delta_s(x) - (s0 + gs.dot(x))) > 1e-9 * (1 + std::abs(s0) + gs.norm() * x.norm()))
            throw SymmetryError("generator " + gen.label + " produces a non-affine phase");
    }
    const Eigen::Matrix2d Minv = M.inverse();
    // -gamma Delta s (F^{-1} y) = chi0 + c.y
    const Eigen::Vector2d c = -p.gamma * Minv.transpose() * gs;
    const double chi0 = -p.gamma * (s0 - gs.dot(Minv * d));

    // Background correction A^ext(y) - M A^ext(M^{-1}(y - d)), constant for the catalog.
    auto aext = [&](const Eigen::Vector2d& y) {
        const auto v = metric.a_ext_i(seed({t, y(0), y(1), 0.0}));
        return Eigen::Vector2d(val(v[0]), val(v[1]));
    };
    auto dA = [&](const Eigen::Vector2d& y) { return Eigen::Vector2d(aext(y) - M * aext(Minv * (y - d))); };
    const Eigen::Vector2d dA0 = dA(Eigen::Vector2d(0, 0));
    for (std::size_t k = 1; k < probe.size(); ++k)
        if ((dA(Eigen::Vector2d(probe[k][1], probe[k][2])) - dA0).norm() > 1e-10)
            throw SymmetryError("background is not invariant up to a constant under " + gen.label);

    FieldState out = s;
    if (quarter % 4 != 0) {
        for (int k = 0; k < quarter; ++k) {
            out.phi = rotate_quarter(out.phi, g.n1);
            RField r1 = rotate_quarter(out.a1, g.n1), r2 = rotate_quarter(out.a2, g.n1);
            out.a1.swap(r1);
            out.a2.swap(r2);
            // vector components rotate with R(90): (a1, a2) -> (-a2, a1)
            for (std::size_t m = 0; m < g.size(); ++m) {
                const double u = out.a1[m], v = out.a2[m];
                out.a1[m] = -v;
                out.a2[m] = u;
            }
        }
    }
    out.phi = translate(out.phi, g, d(0), d(1));
    out.a1 = translate(out.a1, g, d(0), d(1));
    out.a2 = translate(out.a2, g, d(0), d(1));
    const cplx ph = std::polar(1.0, chi0);
    for (std::size_t m = 0; m < g.size(); ++m) {
        out.phi[m] *= ph;
        out.a1[m] += dA0(0) - c(0);
        out.a2[m] += dA0(1) - c(1);
    }
    solve_constraints(out, p, g);
    return out;
}

double l2_norm(const CField& f, const Grid2& g) {
    double s = 0.0;
    for (const auto& z : f) s += std::norm(z);
    return std::sqrt(s * g.cell());
}

double l2_norm(const RField& f, const Grid2& g) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return std::sqrt(s * g.cell());
}

double integral(const RField& f, const Grid2& g) {
    double s = 0.0;
    for (double v : f) s += v;
    return s * g.cell();
}

double max_abs_diff(const RField& a, const RField& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

double max_abs_diff(const CField& a, const CField& b) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

}  // namespace manton
