#include "manton/fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace manton {

const char* tag_name(Tag t) {
    switch (t) {
        case Tag::killing: return "killing";
        case Tag::conformal: return "conformal";
        case Tag::neither: return "neither";
        default: return "unverified";
    }
}

const VectorField4& GeneratorSet::find(const std::string& name) const {
    for (const auto& b : basis)
        if (b.label == name) return b;
    throw std::out_of_range("generator not in set: " + name);
}

void classify(GeneratorSet& set, const std::vector<Point4>& points, double tol) {
    for (auto& X : set.basis) {
        double kres = 0.0, spread = 0.0, f2 = 0.0;
        for (const auto& p : points) {
            const TensorValue L = lie_derivative_metric(set.metric, X.eval, p);
            const TensorValue g = metric_at(set.metric, p);
            const ConformalFit fit = fit_conformal(L, g);
            kres = std::max(kres, L.max_abs());
            spread = std::max(spread, fit.spread);
            f2 += fit.factor * fit.factor;
        }
        X.killing_residual = kres;
        X.conformal_spread = spread;
        X.conformal_factor_rms = points.empty() ? 0.0 : std::sqrt(f2 / points.size());
        X.tag = kres < tol ? Tag::killing : (spread < tol ? Tag::conformal : Tag::neither);
    }
}

namespace {

const Jet kZero(0.0);

JVec make(const Jet& a, const Jet& b, const Jet& c, const Jet& d) { return JVec{a, b, c, d}; }

void require_only(const GeneratorParams& p, std::initializer_list<const char*> allowed, const char* kind) {
    auto allowed_has = [&](const char* name) {
        for (const char* a : allowed)
            if (std::string(a) == name) return true;
        return false;
    };
    auto check = [&](const char* name, bool nonzero) {
        if (nonzero && !allowed_has(name))
            throw ArityError(std::string(kind) + ": parameter '" + name + "' does not belong to this generator");
    };
    check("Gamma", p.Gamma[0] != 0.0 || p.Gamma[1] != 0.0);
    check("beta", p.beta[0] != 0.0 || p.beta[1] != 0.0);
    check("delta", p.delta[0] != 0.0 || p.delta[1] != 0.0);
    check("omega_rot", p.omega_rot != 0.0);
    check("eps", p.eps != 0.0);
    check("chi", p.chi != 0.0);
    check("rho_dil", p.rho_dil != 0.0);
    check("eta", p.eta != 0.0);
}

// Drift isometry d(t,x,s) = (t, x - u t, s + u.x + b t + t c.x) from metric
// B(B, E) onto B(B, 0). Returns the pullback d^* V0 of a field on B(B, 0).
struct Drift {
    std::array<double, 2> u{}, c{};
    double b = 0.0;
    Drift(double B, std::array<double, 2> E, double gamma) {
        u = {-E[1] / B, E[0] / B};
        c = {E[0] / (2.0 * gamma), E[1] / (2.0 * gamma)};
        b = -(E[0] * E[0] + E[1] * E[1]) / (2.0 * B * B);
    }
    bool trivial() const { return u[0] == 0.0 && u[1] == 0.0; }
    JVec apply(const JVec& p) const {
        const Jet& t = p[T_];
        return make(t, p[X1] - u[0] * t, p[X2] - u[1] * t,
                    p[S_] + u[0] * p[X1] + u[1] * p[X2] + b * t + t * (c[0] * p[X1] + c[1] * p[X2]));
    }
    FieldFn conjugate(FieldFn V0) const {
        const Drift d = *this;
        return [d, V0](const JVec& p) {
            const JVec w = V0(d.apply(p));
            const Jet& t = p[T_];
            const Jet vt = w[T_];
            const Jet v1 = w[X1] + d.u[0] * vt;
            const Jet v2 = w[X2] + d.u[1] * vt;
            const Jet vs = w[S_] - (d.u[0] + t * d.c[0]) * v1 - (d.u[1] + t * d.c[1]) * v2 -
                           (d.b + d.c[0] * p[X1] + d.c[1] * p[X2]) * vt;
            return make(vt, v1, v2, vs);
        };
    }
};

// Rest-frame hidden fields on B(B = gamma/2kappa, 0) with omega = 1/4kappa,
// written in tau = omega t. These are the images of the flat fields under the
// inverse export map, in the normalization listed in minkowski_counterpart.
FieldFn hidden_rest(HiddenKind kind, const GeneratorParams& q, double kappa, double gamma) {
    const double w = 1.0 / (4.0 * kappa);
    switch (kind) {
        case HiddenKind::h_translation:
            return [w, G = q.Gamma](const JVec& x) {
                const Jet tau = w * x[T_];
                const Jet c2 = cos(2.0 * tau), s2 = sin(2.0 * tau);
                const Jet cs = 0.5 * (1.0 + c2);
                const Jet &x1 = x[X1], &x2 = x[X2];
                const Jet p1s = 0.5 * w * (x1 * s2 - x2 * c2 + x2);
                const Jet p2s = 0.5 * w * (x1 * c2 - x1 + x2 * s2);
                return make(kZero, G[0] * cs - G[1] * 0.5 * s2, G[0] * 0.5 * s2 + G[1] * cs,
                            G[0] * p1s + G[1] * p2s);
            };
        case HiddenKind::h_boost:
            return [w, gamma, b = q.beta](const JVec& x) {
                const Jet tau = w * x[T_];
                const Jet c2 = cos(2.0 * tau), s2 = sin(2.0 * tau);
                const Jet sn = 0.5 * (1.0 - c2);
                const Jet &x1 = x[X1], &x2 = x[X2];
                // -G~/gamma
                const double k = -1.0 / gamma;
                const Jet g1x = s2 / (2.0 * w), g1y = sn / w, g1s = -0.5 * (x1 * c2 + x1 + x2 * s2);
                const Jet g2x = -sn / w, g2y = s2 / (2.0 * w), g2s = 0.5 * (x1 * s2 - x2 * c2 - x2);
                return make(kZero, k * (b[0] * g1x + b[1] * g2x), k * (b[0] * g1y + b[1] * g2y),
                            k * (b[0] * g1s + b[1] * g2s));
            };
        case HiddenKind::h_rotation:
            return [om = q.omega_rot](const JVec& x) { return make(kZero, -om * x[X2], om * x[X1], kZero); };
        case HiddenKind::vertical:
            return [eta = q.eta](const JVec&) { return make(kZero, kZero, kZero, Jet(eta)); };
        case HiddenKind::h_time:
            return [w, k = gamma * q.eps](const JVec& x) {
                const Jet tau = w * x[T_];
                const Jet c2 = cos(2.0 * tau), s2 = sin(2.0 * tau);
                const Jet &x1 = x[X1], &x2 = x[X2];
                const Jet r2 = x1 * x1 + x2 * x2;
                return make(-k * 0.5 * (1.0 + c2), k * 0.5 * w * (x1 * s2 + x2 * c2 + x2),
                            -k * 0.5 * w * (x1 * c2 + x1 - x2 * s2), -k * 0.5 * w * w * r2 * c2);
            };
        case HiddenKind::h_expansion:
            return [w, k = q.chi / gamma](const JVec& x) {
                const Jet tau = w * x[T_];
                const Jet c2 = cos(2.0 * tau), s2 = sin(2.0 * tau);
                const Jet &x1 = x[X1], &x2 = x[X2];
                const Jet r2 = x1 * x1 + x2 * x2;
                return make(-k * 0.5 * (1.0 - c2) / (w * w), -k * (x1 * s2 + x2 * c2 - x2) / (2.0 * w),
                            k * (x1 * c2 - x1 - x2 * s2) / (2.0 * w), k * 0.5 * r2 * c2);
            };
        case HiddenKind::h_dilatation:
            return [w, k = -2.0 * q.rho_dil](const JVec& x) {
                const Jet tau = w * x[T_];
                const Jet c2 = cos(2.0 * tau), s2 = sin(2.0 * tau);
                const Jet &x1 = x[X1], &x2 = x[X2];
                const Jet r2 = x1 * x1 + x2 * x2;
                return make(-k * s2 / (2.0 * w), -k * 0.5 * (x1 * c2 - x2 * s2), -k * 0.5 * (x1 * s2 + x2 * c2),
                            -k * 0.5 * w * r2 * s2);
            };
    }
    throw std::logic_error("unknown hidden kind");
}

const char* hidden_name(HiddenKind k) {
    switch (k) {
        case HiddenKind::h_translation: return "hP";
        case HiddenKind::h_boost: return "hG";
        case HiddenKind::h_rotation: return "hR";
        case HiddenKind::h_time: return "hH";
        case HiddenKind::h_expansion: return "hK";
        case HiddenKind::h_dilatation: return "hD";
        case HiddenKind::vertical: return "N";
    }
    return "?";
}

}  // namespace

VectorField4 schrodinger_generator(SchKind kind, const GeneratorParams& q) {
    VectorField4 X;
    X.params = q;
    switch (kind) {
        case SchKind::rotation: require_only(q, {"omega_rot"}, "rotation"); X.label = "R~"; break;
        case SchKind::boost: require_only(q, {"beta"}, "boost"); X.label = "G~"; break;
        case SchKind::translation: require_only(q, {"delta"}, "translation"); X.label = "P~"; break;
        case SchKind::time: require_only(q, {"eps"}, "time"); X.label = "H~"; break;
        case SchKind::expansion: require_only(q, {"chi"}, "expansion"); X.label = "K~"; break;
        case SchKind::dilatation: require_only(q, {"rho_dil"}, "dilatation"); X.label = "D~"; break;
        case SchKind::vertical: require_only(q, {"eta"}, "vertical"); X.label = "N"; break;
    }
    X.eval = [q](const JVec& x) {
        const Jet& t = x[T_];
        const Jet &x1 = x[X1], &x2 = x[X2];
        const Jet vt = -q.chi * t * t - q.rho_dil * t - q.eps;
        const Jet scale = 0.5 * q.rho_dil + q.chi * t;
        const Jet v1 = -q.omega_rot * x2 - scale * x1 + t * q.beta[0] + q.delta[0];
        const Jet v2 = q.omega_rot * x1 - scale * x2 + t * q.beta[1] + q.delta[1];
        const Jet vs = 0.5 * q.chi * (x1 * x1 + x2 * x2) - q.beta[0] * x1 - q.beta[1] * x2 + q.eta;
        return make(vt, v1, v2, vs);
    };
    return X;
}

VectorField4 hidden_generator(HiddenKind kind, const GeneratorParams& q, double kappa, double gamma,
                              const TransportCurrent& jT) {
    switch (kind) {
        case HiddenKind::h_translation: require_only(q, {"Gamma"}, "h_translation"); break;
        case HiddenKind::h_boost: require_only(q, {"beta"}, "h_boost"); break;
        case HiddenKind::h_rotation: require_only(q, {"omega_rot"}, "h_rotation"); break;
        case HiddenKind::h_time: require_only(q, {"eps"}, "h_time"); break;
        case HiddenKind::h_expansion: require_only(q, {"chi"}, "h_expansion"); break;
        case HiddenKind::h_dilatation: require_only(q, {"rho_dil"}, "h_dilatation"); break;
        case HiddenKind::vertical: require_only(q, {"eta"}, "vertical"); break;
    }
    const bool moving = jT.j_vec[0] != 0.0 || jT.j_vec[1] != 0.0;
    if (moving && (kind == HiddenKind::h_time || kind == HiddenKind::h_expansion || kind == HiddenKind::h_dilatation))
        throw RestFrameError(std::string(hidden_name(kind)) + " is only available for J^T = 0");
    VectorField4 X;
    X.label = hidden_name(kind);
    X.params = q;
    FieldFn f = hidden_rest(kind, q, kappa, gamma);
    if (moving) {
        const Drift d(gamma / (2.0 * kappa), e_ext_from_transport(kappa, jT.j_vec), gamma);
        f = d.conjugate(f);
    }
    X.eval = f;
    return X;
}

VectorField4 minkowski_counterpart(HiddenKind kind, const GeneratorParams& q, double gamma) {
    GeneratorParams p;
    switch (kind) {
        case HiddenKind::h_translation: p.delta = q.Gamma; return schrodinger_generator(SchKind::translation, p);
        case HiddenKind::h_boost:
            p.beta = {-q.beta[0] / gamma, -q.beta[1] / gamma};
            return schrodinger_generator(SchKind::boost, p);
        case HiddenKind::h_rotation: p.omega_rot = q.omega_rot; return schrodinger_generator(SchKind::rotation, p);
        case HiddenKind::h_time: p.eps = gamma * q.eps; return schrodinger_generator(SchKind::time, p);
        case HiddenKind::h_expansion: p.chi = q.chi / gamma; return schrodinger_generator(SchKind::expansion, p);
        case HiddenKind::h_dilatation: p.rho_dil = -2.0 * q.rho_dil; return schrodinger_generator(SchKind::dilatation, p);
        case HiddenKind::vertical: p.eta = q.eta; return schrodinger_generator(SchKind::vertical, p);
    }
    throw std::logic_error("unknown hidden kind");
}

MetricSpec background_metric(Orientation o, double kappa, double gamma, std::array<double, 2> jT) {
    return o == Orientation::manton ? MetricSpec::manton(kappa, gamma, jT)
                                    : MetricSpec::metric_b_transport(kappa, gamma, jT);
}

VectorField4 good_lift_translation(std::array<double, 2> delta, double kappa, double gamma,
                                   const TransportCurrent& jT, Orientation o) {
    VectorField4 X;
    X.label = "P^";
    X.params.delta = delta;
    const auto J = jT.j_vec;
    const double sgn = o == Orientation::manton ? -1.0 : 1.0;
    X.eval = [=](const JVec& x) {
        const Jet& t = x[T_];
        const Jet dx = delta[0] * x[X2] - delta[1] * x[X1];  // delta cross x
        const double dJ = delta[0] * J[0] + delta[1] * J[1];
        const double dxJ = delta[0] * J[1] - delta[1] * J[0];
        const Jet vs = sgn * (dx / (4.0 * kappa) + dJ / gamma) + t * (dxJ / (2.0 * kappa * gamma));
        return make(kZero, Jet(delta[0]), Jet(delta[1]), vs);
    };
    return X;
}

VectorField4 good_lift_time(double eps, double gamma, const TransportCurrent& jT) {
    VectorField4 X;
    X.label = "H^";
    X.params.eps = eps;
    const double j2 = (jT.j_vec[0] * jT.j_vec[0] + jT.j_vec[1] * jT.j_vec[1]) / (gamma * gamma);
    X.eval = [=](const JVec&) { return make(Jet(-eps), kZero, kZero, Jet(-0.5 * eps * j2)); };
    return X;
}

VectorField4 hidden_time_combination(double kappa, double gamma, double rotation_sign) {
    GeneratorParams ph, pk, pr;
    const double half_b = gamma / (4.0 * kappa);
    ph.eps = 1.0;
    pk.chi = half_b * half_b;
    pr.omega_rot = rotation_sign * half_b;
    const auto H = hidden_generator(HiddenKind::h_time, ph, kappa, gamma);
    const auto K = hidden_generator(HiddenKind::h_expansion, pk, kappa, gamma);
    const auto R = hidden_generator(HiddenKind::h_rotation, pr, kappa, gamma);
    VectorField4 X;
    X.label = rotation_sign > 0 ? "hH+hK+hR" : "hH+hK-hR";
    X.eval = [H, K, R](const JVec& x) {
        const JVec a = H.eval(x), b = K.eval(x), c = R.eval(x);
        JVec r;
        for (int i = 0; i < 4; ++i) r[i] = a[i] + b[i] + c[i];
        return r;
    };
    return X;
}

VectorField4 time_reverse(const VectorField4& X) {
    VectorField4 Y = X;
    Y.label = X.label;
    const FieldFn f = X.eval;
    Y.eval = [f](const JVec& x) {
        const JVec w = f(make(-x[T_], x[X1], x[X2], -x[S_]));
        return make(-w[T_], w[X1], w[X2], -w[S_]);
    };
    Y.tag = Tag::unverified;
    return Y;
}

DiffeoSpec export_import_map(double gamma, double b_ext, std::array<double, 2> e_ext) {
    if (b_ext == 0.0) throw std::invalid_argument("export_import_map: B_ext must be nonzero");
    const double w = b_ext / (2.0 * gamma);
    const Drift d(b_ext, e_ext, gamma);
    DiffeoSpec m;
    m.label = "export_import";
    m.forward = [w, d](const JVec& p) {
        const JVec q = d.apply(p);
        const Jet tn = tan(w * q[T_]);
        const Jet &x1 = q[X1], &x2 = q[X2];
        return make(tn / w, x1 + x2 * tn, x2 - x1 * tn, q[S_] - 0.5 * w * (x1 * x1 + x2 * x2) * tn);
    };
    m.domain_guard = [w](const Point4& p) { return std::abs(std::cos(w * p[T_])) > 1e-6 && std::isfinite(p[T_]); };
    return m;
}

DiffeoSpec export_import_map_transport(double kappa, double gamma, std::array<double, 2> jT) {
    return export_import_map(gamma, gamma / (2.0 * kappa), e_ext_from_transport(kappa, jT));
}

namespace {
VectorField4 labelled(VectorField4 X, const std::string& name) {
    X.label = name;
    return X;
}
GeneratorParams gp_delta(double a, double b) { GeneratorParams p; p.delta = {a, b}; return p; }
GeneratorParams gp_beta(double a, double b) { GeneratorParams p; p.beta = {a, b}; return p; }
GeneratorParams gp_gamma(double a, double b) { GeneratorParams p; p.Gamma = {a, b}; return p; }
}  // namespace

GeneratorSet minkowski_set7(double gamma) {
    GeneratorSet s;
    s.metric = MetricSpec::minkowski(gamma);
    s.label = "minkowski7";
    GeneratorParams r, h, n;
    r.omega_rot = 1.0;
    h.eps = 1.0;
    n.eta = 1.0;
    s.basis = {labelled(schrodinger_generator(SchKind::translation, gp_delta(1, 0)), "P~1"),
               labelled(schrodinger_generator(SchKind::translation, gp_delta(0, 1)), "P~2"),
               labelled(schrodinger_generator(SchKind::boost, gp_beta(1, 0)), "G~1"),
               labelled(schrodinger_generator(SchKind::boost, gp_beta(0, 1)), "G~2"),
               labelled(schrodinger_generator(SchKind::rotation, r), "R~"),
               labelled(schrodinger_generator(SchKind::time, h), "H~"),
               labelled(schrodinger_generator(SchKind::vertical, n), "N")};
    return s;
}

GeneratorSet minkowski_set9(double gamma) {
    GeneratorSet s = minkowski_set7(gamma);
    s.label = "minkowski9";
    GeneratorParams k, d;
    k.chi = 1.0;
    d.rho_dil = 1.0;
    s.basis.insert(s.basis.end() - 1, labelled(schrodinger_generator(SchKind::expansion, k), "K~"));
    s.basis.insert(s.basis.end() - 1, labelled(schrodinger_generator(SchKind::dilatation, d), "D~"));
    return s;
}

GeneratorSet theorem2_set(double kappa, double gamma, const TransportCurrent& jT) {
    GeneratorSet s;
    s.metric = MetricSpec::metric_b_transport(kappa, gamma, jT.j_vec);
    s.label = "theorem2";
    GeneratorParams r, n;
    r.omega_rot = 1.0;
    n.eta = 1.0;
    s.basis = {labelled(good_lift_translation({1, 0}, kappa, gamma, jT, Orientation::metric_b), "P^1"),
               labelled(good_lift_translation({0, 1}, kappa, gamma, jT, Orientation::metric_b), "P^2"),
               labelled(good_lift_time(1.0, gamma, jT), "H^"),
               labelled(hidden_generator(HiddenKind::h_boost, gp_beta(gamma, 0), kappa, gamma, jT), "G1"),
               labelled(hidden_generator(HiddenKind::h_boost, gp_beta(0, gamma), kappa, gamma, jT), "G2"),
               labelled(hidden_generator(HiddenKind::h_rotation, r, kappa, gamma, jT), "R"),
               labelled(hidden_generator(HiddenKind::vertical, n, kappa, gamma, jT), "N")};
    return s;
}

GeneratorSet hidden_set9(double kappa, double gamma) {
    GeneratorSet s;
    s.metric = MetricSpec::metric_b_transport(kappa, gamma, {0.0, 0.0});
    s.label = "hidden9";
    GeneratorParams r, h, k, d, n;
    r.omega_rot = 1.0;
    h.eps = 1.0;
    k.chi = 1.0;
    d.rho_dil = 1.0;
    n.eta = 1.0;
    s.basis = {labelled(hidden_generator(HiddenKind::h_translation, gp_gamma(1, 0), kappa, gamma), "hP1"),
               labelled(hidden_generator(HiddenKind::h_translation, gp_gamma(0, 1), kappa, gamma), "hP2"),
               labelled(hidden_generator(HiddenKind::h_boost, gp_beta(1, 0), kappa, gamma), "hG1"),
               labelled(hidden_generator(HiddenKind::h_boost, gp_beta(0, 1), kappa, gamma), "hG2"),
               labelled(hidden_generator(HiddenKind::h_rotation, r, kappa, gamma), "hR"),
               labelled(hidden_generator(HiddenKind::h_time, h, kappa, gamma), "hH"),
               labelled(hidden_generator(HiddenKind::h_expansion, k, kappa, gamma), "hK"),
               labelled(hidden_generator(HiddenKind::h_dilatation, d, kappa, gamma), "hD"),
               labelled(hidden_generator(HiddenKind::vertical, n, kappa, gamma), "N")};
    return s;
}

// ---- spacetime symmetries ----

SpacetimeField3 spacetime_translation(std::array<double, 2> delta) {
    return {"P", [delta](const JVec&) { return std::array<Jet, 3>{kZero, Jet(delta[0]), Jet(delta[1])}; }};
}
SpacetimeField3 spacetime_time_translation(double eps) {
    return {"H", [eps](const JVec&) { return std::array<Jet, 3>{Jet(-eps), kZero, kZero}; }};
}
SpacetimeField3 spacetime_rotation(double omega) {
    return {"R", [omega](const JVec& x) { return std::array<Jet, 3>{kZero, -omega * x[X2], omega * x[X1]}; }};
}
SpacetimeField3 spacetime_zero() {
    return {"0", [](const JVec&) { return std::array<Jet, 3>{kZero, kZero, kZero}; }};
}

namespace {

// A_alpha over (t, x1, x2) as jets.
std::array<Jet, 3> potential(const MetricSpec& m, const JVec& x) {
    const auto ai = m.a_ext_i(x);
    return {m.a_ext_t(x), ai[0], ai[1]};
}

// (F.X)_alpha at p: value and gradient over the 4 coordinates.
struct FXAt {
    std::array<double, 3> v{};
    std::array<std::array<double, 4>, 3> grad{};
};

FXAt fx_at(const SpacetimeField3& X, const MetricSpec& m, const Point4& p) {
    const JVec x = seed(p);
    const auto A = potential(m, x);
    const auto V = X.X(x);
    FXAt r;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            // F_ab = d_a A_b - d_b A_a; coordinate index of a in the 4-chart is a.
            const double F = d1(A[b], a) - d1(A[a], b);
            r.v[a] += F * val(V[b]);
            for (int c = 0; c < 4; ++c) {
                const double dF = d2(A[b], a, c) - d2(A[a], b, c);
                r.grad[a][c] += dF * val(V[b]) + F * d1(V[b], c);
            }
        }
    }
    return r;
}

// 24-point Gauss-Legendre rule on [0,1].
struct GL24 {
    std::array<double, 24> x{}, w{};
    GL24() {
        const int n = 24;
        for (int i = 0; i < n; ++i) {
            double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 0; j < n; ++j) {
                    const double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                const double dz = p1 / pp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = 0.5 * (1.0 - z);
            w[i] = 1.0 / ((1.0 - z * z) * pp * pp);
        }
    }
};

const GL24& gl() {
    static const GL24 rule;
    return rule;
}

}  // namespace

std::array<std::array<double, 3>, 3> external_field_strength(const MetricSpec& m, const Point4& p) {
    const auto A = potential(m, seed(p));
    std::array<std::array<double, 3>, 3> F{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) F[a][b] = d1(A[b], a) - d1(A[a], b);
    return F;
}

double symmetry_curl_residual(const SpacetimeField3& X, const MetricSpec& m, const std::vector<Point4>& points) {
    double r = 0.0;
    for (const auto& p : points) {
        const FXAt f = fx_at(X, m, p);
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) r = std::max(r, std::abs(f.grad[b][a] - f.grad[a][b]));
    }
    return r;
}

Response symmetry_response(const SpacetimeField3& X, const MetricSpec& m, double constant,
                           const std::vector<Point4>& check_points) {
    const std::vector<Point4> pts = check_points.empty() ? sample_points(7u, 20) : check_points;
    const double curl = symmetry_curl_residual(X, m, pts);
    if (curl > 1e-9) {
        std::ostringstream os;
        os << "field '" << X.label << "' is not a symmetry of the background (curl residual " << curl << ")";
        throw NotASymmetry(os.str());
    }
    Response r;
    r.constant = constant;
    r.upsilon = [X, m, constant](const JVec& x) {
        const Point4 p0{val(x[0]), val(x[1]), val(x[2]), val(x[3])};
        const auto& rule = gl();
        double value = constant;
        for (int k = 0; k < 24; ++k) {
            const double tk = rule.x[k] * p0[T_];
            value += rule.w[k] * p0[T_] * fx_at(X, m, {tk, 0.0, 0.0, 0.0}).v[0];
            const Point4 q{p0[T_], rule.x[k] * p0[X1], rule.x[k] * p0[X2], 0.0};
            const auto f = fx_at(X, m, q).v;
            value += rule.w[k] * (f[1] * p0[X1] + f[2] * p0[X2]);
        }
        // Second-order Taylor composition: exact value, gradient F.X and its Jacobian.
        const FXAt f = fx_at(X, m, p0);
        std::array<double, 4> g{f.v[0], f.v[1], f.v[2], 0.0};
        Jet out(value);
        std::array<Jet, 4> dx;
        for (int a = 0; a < 4; ++a) dx[a] = x[a] - p0[a];
        for (int a = 0; a < 3; ++a) out = out + g[a] * dx[a];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 4; ++b) {
                const double h = f.grad[a][b];
                if (h != 0.0) out = out + (0.5 * h) * dx[a] * dx[b];
            }
        return out;
    };
    return r;
}

VectorField4 lift_from_spacetime(const SpacetimeField3& X, const MetricSpec& m, const Response& r) {
    VectorField4 out;
    out.label = X.label + "^";
    const double gamma = m.gamma;
    out.eval = [X, m, r, gamma](const JVec& x) {
        const auto V = X.X(x);
        const auto A = potential(m, x);
        const Jet ups = r.upsilon(x);
        const Jet ax = A[0] * V[0] + A[1] * V[1] + A[2] * V[2];
        return make(V[0], V[1], V[2], (ups - ax) / gamma);
    };
    return out;
}

double upsilon_of_lift(const MetricSpec& m, const VectorField4& X, const Point4& p) {
    const JVec x = seed(p);
    const auto A = potential(m, x);
    const Point4 v = X.at(p);
    return m.gamma * v[S_] + val(A[0]) * v[T_] + val(A[1]) * v[X1] + val(A[2]) * v[X2];
}

double bracket_fixed_constant_p2(const VectorField4& p1_lift, const VectorField4& rotation_lift,
                                 const MetricSpec& m, const Point4& p) {
    const Point4 br = lie_bracket(p1_lift.eval, rotation_lift.eval, p);
    const Response r0 = symmetry_response(spacetime_translation({0.0, 1.0}), m, 0.0);
    const VectorField4 l0 = lift_from_spacetime(spacetime_translation({0.0, 1.0}), m, r0);
    return m.gamma * (br[S_] - l0.at(p)[S_]);
}

}  // namespace manton
