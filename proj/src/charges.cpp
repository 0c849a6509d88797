#include "manton/charges.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iostream>

namespace manton {

namespace {

struct Snapshot {
    FieldState s;
    Derived2 d;
    std::array<CField, 2> D;  // covariant gradient
};

Snapshot snapshot(const FieldState& in, const ModelParams& p, const Grid2& g) {
    Snapshot out{in, {}, {}};
    out.d = solve_constraints(out.s, p, g);
    out.D = covariant_gradient(out.s, g);
    return out;
}

double cross(double a1, double a2, double b1, double b2) { return a1 * b2 - a2 * b1; }

std::array<double, 2> jvec(const ModelParams& p) { return p.jT.j_vec; }

}  // namespace

ParticleNumber charge_n_forms(const FieldState& s, const ModelParams& p, const Grid2& g) {
    const Snapshot z = snapshot(s, p, g);
    ParticleNumber r;
    double one_minus = 0, flux = 0;
    for (std::size_t m = 0; m < g.size(); ++m) {
        one_minus += 1.0 - z.d.rho[m];
        flux += z.d.B[m];
    }
    r.density_form = p.gamma * p.gamma * one_minus * g.cell();
    r.flux_form = p.gamma * 2.0 * p.kappa * flux * g.cell();
    r.printed_flux_form = p.gamma * flux * g.cell() / (2.0 * p.kappa);
    return r;
}

double charge_n(const FieldState& s, const ModelParams& p, const Grid2& g) {
    return charge_n_forms(s, p, g).density_form;
}

namespace {

std::array<double, 2> momentum(const Snapshot& z, const ModelParams& p, const Grid2& g,
                               std::array<ChargeParts, 2>* parts) {
    const auto J = jvec(p);
    const double t = z.s.time, gm = p.gamma;
    std::array<ChargeParts, 2> q{};
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t m = static_cast<std::size_t>(i) * g.n2 + j;
            const double y1 = g.x1(i) - t * J[0] / gm, y2 = g.x2(j) - t * J[1] / gm;
            const double rho = z.d.rho[m], B = z.d.B[m];
            q[0].matter_term += z.d.J1[m] - J[0] * rho;
            q[1].matter_term += z.d.J2[m] - J[1] * rho;
            q[0].upsilon_term += y2 * B;
            q[1].upsilon_term += -y1 * B;
        }
    for (auto& c : q) {
        c.matter_term *= gm * g.cell();
        c.upsilon_term *= gm * g.cell();
    }
    if (parts) *parts = q;
    return {q[0].total(), q[1].total()};
}

double energy(const Snapshot& z, const ModelParams& p, const Grid2& g, ChargeParts* parts) {
    const auto J = jvec(p);
    const double J2 = J[0] * J[0] + J[1] * J[1];
    const double Lam = p.lam + (p.gamma / p.kappa) * (p.gamma / p.kappa);
    ChargeParts q;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t m = static_cast<std::size_t>(i) * g.n2 + j;
            const double rho = z.d.rho[m];
            q.matter_term += 0.5 * (std::norm(z.D[0][m]) + std::norm(z.D[1][m])) - 0.5 * J2 * rho +
                             Lam / 8.0 * (1.0 - rho) * (1.0 - rho);
            q.upsilon_term += -cross(g.x1(i), g.x2(j), J[0], J[1]) * z.d.B[m];
        }
    q.matter_term *= g.cell();
    q.upsilon_term *= g.cell();
    if (parts) *parts = q;
    return q.total();
}

double hidden_angular(const Snapshot& z, const ModelParams& p, const Grid2& g, ChargeParts* parts) {
    const auto J = jvec(p);
    const double J2 = J[0] * J[0] + J[1] * J[1];
    const double tg = z.s.time / p.gamma;
    ChargeParts q;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t m = static_cast<std::size_t>(i) * g.n2 + j;
            const double x1 = g.x1(i), x2 = g.x2(j), rho = z.d.rho[m];
            q.matter_term += cross(x1, x2, z.d.J1[m] - J[0] * rho, z.d.J2[m] - J[1] * rho) -
                             tg * cross(J[0], J[1], z.d.J1[m], z.d.J2[m]);
            q.upsilon_term += (-0.5 * (x1 * x1 + x2 * x2) + tg * (x1 * J[0] + x2 * J[1]) - 0.5 * tg * tg * J2) *
                              z.d.B[m];
        }
    q.matter_term *= p.gamma * g.cell();
    q.upsilon_term *= p.gamma * g.cell();
    if (parts) *parts = q;
    return q.total();
}

double support_of(const Snapshot& z, const ModelParams& p, const Grid2& g, double rel_tol) {
    const auto J = jvec(p);
    double bmax = 0, jmax = 0;
    std::vector<double> dj(g.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
        dj[m] = std::hypot(z.d.J1[m] - z.d.rho[m] * J[0], z.d.J2[m] - z.d.rho[m] * J[1]);
        bmax = std::max(bmax, std::abs(z.d.B[m]));
        jmax = std::max(jmax, dj[m]);
    }
    double frac = 0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t m = static_cast<std::size_t>(i) * g.n2 + j;
            const bool on = (bmax > 0 && std::abs(z.d.B[m]) > rel_tol * bmax) || (jmax > 0 && dj[m] > rel_tol * jmax);
            if (on)
                frac = std::max(frac, std::max(std::abs(g.x1(i)) / (0.5 * g.L1), std::abs(g.x2(j)) / (0.5 * g.L2)));
        }
    return frac;
}

}  // namespace

std::array<double, 2> charge_p(const FieldState& s, const ModelParams& p, const Grid2& g,
                               std::array<ChargeParts, 2>* parts) {
    return momentum(snapshot(s, p, g), p, g, parts);
}

double charge_h(const FieldState& s, const ModelParams& p, const Grid2& g, ChargeParts* parts) {
    return energy(snapshot(s, p, g), p, g, parts);
}

double charge_m(const FieldState& s, const ModelParams& p, const Grid2& g, ChargeParts* parts) {
    return hidden_angular(snapshot(s, p, g), p, g, parts);
}

double support_fraction(const FieldState& s, const ModelParams& p, const Grid2& g, double rel_tol) {
    return support_of(snapshot(s, p, g), p, g, rel_tol);
}

ChargeReport charges(const FieldState& s, const ModelParams& p, const Grid2& g, bool warn) {
    const Snapshot z = snapshot(s, p, g);
    ChargeReport r;
    r.time = s.time;
    double one_minus = 0, flux = 0;
    for (std::size_t m = 0; m < g.size(); ++m) {
        one_minus += 1.0 - z.d.rho[m];
        flux += z.d.B[m];
    }
    r.n = p.gamma * p.gamma * one_minus * g.cell();
    r.n_flux_form = p.gamma * 2.0 * p.kappa * flux * g.cell();
    r.parts_n = {0.0, r.n_flux_form};
    r.p = momentum(z, p, g, &r.parts_p);
    r.h = energy(z, p, g, &r.parts_h);
    r.m = hidden_angular(z, p, g, &r.parts_m);
    r.support_fraction = support_of(z, p, g, 1e-6);
    if (warn && r.support_fraction >= 0.5)
        std::cerr << "warning: field deviations reach " << r.support_fraction
                  << " of the half box; moment integrals are unreliable\n";
    return r;
}

// ---- Noether route ----

const char* charge_kind_name(ChargeKind k) {
    switch (k) {
        case ChargeKind::n: return "n";
        case ChargeKind::p1: return "p1";
        case ChargeKind::p2: return "p2";
        case ChargeKind::h: return "h";
        case ChargeKind::m: return "m";
    }
    return "?";
}

VectorField4 charge_lift(ChargeKind k, const ModelParams& p) {
    const TransportCurrent jT = TransportCurrent::from(p.gamma, p.jT.j_vec);
    switch (k) {
        case ChargeKind::n: {
            GeneratorParams q;
            q.eta = 1.0;
            return hidden_generator(HiddenKind::vertical, q, p.kappa, p.gamma, jT);
        }
        case ChargeKind::p1: return good_lift_translation({1.0, 0.0}, p.kappa, p.gamma, jT, Orientation::manton);
        case ChargeKind::p2: return good_lift_translation({0.0, 1.0}, p.kappa, p.gamma, jT, Orientation::manton);
        case ChargeKind::h: return good_lift_time(1.0, p.gamma, jT);
        case ChargeKind::m: {
            GeneratorParams q;
            q.omega_rot = 1.0;
            return time_reverse(hidden_generator(HiddenKind::h_rotation, q, p.kappa, p.gamma, jT));
        }
    }
    throw std::invalid_argument("unknown charge kind");
}

VectorField4 hidden_boost_lift(std::array<double, 2> beta, const ModelParams& p) {
    GeneratorParams q;
    q.beta = beta;
    return time_reverse(
        hidden_generator(HiddenKind::h_boost, q, p.kappa, p.gamma, TransportCurrent::from(p.gamma, p.jT.j_vec)));
}

namespace {

double max_abs4(const TensorValue& t) { return t.max_abs(); }

// Gamma^lambda_{mu s} and R_{mu s}, R at a point.
struct Curvature {
    Mat4<double> gamma_s{};  // (lambda, mu)
    Vec4<double> ricci_s{};
    double scalar = 0.0;
};

Curvature curvature(const MetricSpec& m, const Point4& x) {
    Curvature c;
    const TensorValue G = christoffel_at(m, x);
    const TensorValue R = ricci_at(m, x);
    for (int l = 0; l < 4; ++l)
        for (int mu = 0; mu < 4; ++mu) c.gamma_s[l][mu] = G.at({l, mu, S_});
    for (int mu = 0; mu < 4; ++mu) c.ricci_s[mu] = R.at({mu, S_});
    c.scalar = curvature_scalar_at(m, x);
    return c;
}

}  // namespace

NoetherCharge noether_charge(const FieldState& in, const VectorField4& lift, const ModelParams& p, const Grid2& g) {
    const MetricSpec metric = MetricSpec::manton(p.kappa, p.gamma, p.jT.j_vec);
    const double t = in.time;
    // Killing check at a few points of the box, off the time slice too: the
    // expansion is Killing at t = 0 only.
    {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> u1(-0.5 * g.L1, 0.5 * g.L1), u2(-0.5 * g.L2, 0.5 * g.L2);
        for (int k = 0; k < 6; ++k) {
            const Point4 x{t + 0.5 * (k % 3 - 1), u1(rng), u2(rng), 0.3 * k};
            const double scale = 1.0 + std::abs(x[1]) + std::abs(x[2]) + std::abs(x[0]);
            const double r = max_abs4(lie_derivative_metric(metric, lift.eval, x));
            if (!(r < 1e-9 * scale * scale))
                throw NotKilling("lift '" + lift.label + "' is not Killing: residual " + std::to_string(r));
        }
    }
    // Curvature is evaluated per point only when a sample shows it is nonzero.
    bool flat = true;
    for (int k = 0; k < 5; ++k) {
        const Point4 x{t, (k - 2) * 0.2 * g.L1, (2 - k) * 0.15 * g.L2, 0.0};
        const Curvature c = curvature(metric, x);
        double mx = std::abs(c.scalar);
        for (int a = 0; a < 4; ++a) {
            mx = std::max(mx, std::abs(c.ricci_s[a]));
            for (int b = 0; b < 4; ++b) mx = std::max(mx, std::abs(c.gamma_s[a][b]));
        }
        if (mx > 1e-13) flat = false;
    }

    const Snapshot z = snapshot(in, p, g);
    const CField rhs = nls_rhs(z.s, p, g);
    const double gm = p.gamma;
    const std::array<double, 4> jup{gm, p.jT.j_vec[0], p.jT.j_vec[1], 0.0};
    const cplx I(0.0, 1.0);

    NoetherCharge out;
    double horiz = 0, ups = 0, printed_shift = 0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t n = static_cast<std::size_t>(i) * g.n2 + j;
            const Point4 x{t, g.x1(i), g.x2(j), 0.0};
            const JVec sx = seed(x);
            const auto Ai = metric.a_ext_i(sx);
            const double A[3] = {val(metric.a_ext_t(sx)), val(Ai[0]), val(Ai[1])};
            const TensorValue gl = metric_at(metric, x);
            const TensorValue gu = inverse_metric_at(metric, x);
            const Point4 X = lift.at(x);

            const cplx phi = z.s.phi[n];
            const double rho = std::norm(phi);
            // Lifted derivatives with a = A - A^ext: D^lift = D + i A^ext.
            const cplx Dt = -I * (rhs[n] + gm * z.s.a_t[n] * phi) / gm;
            const std::array<cplx, 4> u{Dt + I * A[0] * phi, z.D[0][n] + I * A[1] * phi, z.D[1][n] + I * A[2] * phi,
                                        I * gm * phi};
            Curvature c;
            if (!flat) c = curvature(metric, x);
            // D_mu D_s phi = i gamma D_mu phi - Gamma^l_{mu s} D_l phi.
            std::array<cplx, 4> dds;
            for (int mu = 0; mu < 4; ++mu) {
                dds[mu] = I * gm * u[mu];
                for (int l = 0; l < 4; ++l) dds[mu] -= c.gamma_s[l][mu] * u[l];
            }
            double kin = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) kin += gu(a, b) * std::real(u[a] * std::conj(u[b]));
            // f = dA (curly), f_ti = -E_i, f_12 = B.
            Mat4<double> f{};
            f[0][1] = -z.d.E1[n];
            f[0][2] = -z.d.E2[n];
            f[1][0] = z.d.E1[n];
            f[2][0] = z.d.E2[n];
            f[1][2] = z.d.B[n];
            f[2][1] = -z.d.B[n];
            Mat4<double> fu{};  // f^{rho sigma}
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) {
                    double v = 0;
                    for (int c1 = 0; c1 < 4; ++c1)
                        for (int d1 = 0; d1 < 4; ++d1) v += gu(a, c1) * gu(b, d1) * f[c1][d1];
                    fu[a][b] = v;
                }
            double f2 = 0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) f2 += f[a][b] * fu[a][b];
            std::array<double, 4> jl{};
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) jl[a] += gl(a, b) * jup[b];
            double jj = 0;
            for (int a = 0; a < 4; ++a) jj += jl[a] * jup[a];
            const double U = p.lam / 4.0 * (-0.5 + rho / 3.0 + rho * rho / 6.0);
            const double U_printed = -p.lam / 4.0 * (-0.5 + rho / 3.0 - rho * rho / 6.0);

            std::array<double, 4> th{};
            for (int mu = 0; mu < 4; ++mu) {
                const double gms = gl(mu, S_);
                double v = (2.0 / 3.0) * std::real(std::conj(u[mu]) * u[3]) - (1.0 / 3.0) * std::real(std::conj(phi) * dds[mu]);
                v += rho / 6.0 * (c.ricci_s[mu] - c.scalar / 6.0 * gms);
                v -= gms * kin / 6.0;
                double fmr = 0;  // f_{mu rho} f^rho_s
                for (int r = 0; r < 4; ++r)
                    for (int q = 0; q < 4; ++q) fmr += f[mu][r] * gu(r, q) * f[q][S_];
                v += -0.25 * gms * f2 - fmr;
                v += gms * U;
                v += -jl[mu] * jl[S_] + 0.5 * gms * jj;
                th[mu] = v;
                printed_shift += gms * (U_printed - U) * X[mu];
            }
            const double AX = A[0] * X[T_] + A[1] * X[X1] + A[2] * X[X2];
            const double upsilon = gm * X[S_] + AX;
            horiz += th[T_] * X[T_] + th[X1] * X[X1] + th[X2] * X[X2] - AX / gm * th[S_];
            ups += upsilon / gm * th[S_];
        }
    out.parts = {horiz * g.cell(), ups * g.cell()};
    out.total = out.parts.total();
    out.printed_potential_total = out.total + printed_shift * g.cell();
    return out;
}

double upsilon_constant(ChargeKind k, const ModelParams& p) {
    const auto J = jvec(p);
    switch (k) {
        case ChargeKind::p1: return -J[0];
        case ChargeKind::p2: return -J[1];
        case ChargeKind::h: return -(J[0] * J[0] + J[1] * J[1]) / (2.0 * p.gamma);
        case ChargeKind::m: return 0.0;
        case ChargeKind::n: return 0.0;
    }
    return 0.0;
}

double upsilon_bracket_deviation(ChargeKind k, const ModelParams& p, const Grid2& g, double t) {
    const MetricSpec metric = MetricSpec::manton(p.kappa, p.gamma, p.jT.j_vec);
    const VectorField4 X = charge_lift(k, p);
    const auto J = jvec(p);
    const double J2 = J[0] * J[0] + J[1] * J[1], tg = t / p.gamma, C = upsilon_constant(k, p);
    double dev = 0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const double x1 = g.x1(i), x2 = g.x2(j);
            const double ups = upsilon_of_lift(metric, X, {t, x1, x2, 0.0});
            double curly = 0, scaled = 0;
            switch (k) {
                case ChargeKind::n: curly = 1.0; scaled = ups / p.gamma; break;
                case ChargeKind::p1: curly = x2 - tg * J[1]; break;
                case ChargeKind::p2: curly = -(x1 - tg * J[0]); break;
                case ChargeKind::h: curly = -cross(x1, x2, J[0], J[1]); break;
                case ChargeKind::m: curly = -0.5 * (x1 * x1 + x2 * x2) + tg * (x1 * J[0] + x2 * J[1]) - 0.5 * tg * tg * J2; break;
            }
            if (k == ChargeKind::h) scaled = -2.0 * p.kappa * (ups - C);
            else if (k != ChargeKind::n) scaled = -2.0 * p.kappa / p.gamma * (ups - C);
            dev = std::max(dev, std::abs(curly - scaled));
        }
    return dev;
}

}  // namespace manton
