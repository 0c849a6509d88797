#include "manton/geom.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace manton {

TensorValue::TensorValue(int cov_, int contra_) : cov(cov_), contra(contra_) {
    std::size_t n = 1;
    for (int i = 0; i < cov + contra; ++i) n *= 4;
    c.assign(n, 0.0);
}

static std::size_t flat_index(std::initializer_list<int> idx) {
    std::size_t k = 0;
    for (int i : idx) k = 4 * k + static_cast<std::size_t>(i);
    return k;
}

double& TensorValue::at(std::initializer_list<int> idx) { return c.at(flat_index(idx)); }
double TensorValue::at(std::initializer_list<int> idx) const { return c.at(flat_index(idx)); }

double TensorValue::max_abs() const {
    double m = 0.0;
    for (double x : c) m = std::max(m, std::abs(x));
    return m;
}

JVec seed(const Point4& p) {
    JVec x;
    for (int a = 0; a < 4; ++a) {
        x[a].v.v = p[a];
        x[a].v.d[a] = 1.0;
        x[a].d[a].v = 1.0;
    }
    return x;
}

MetricSpec MetricSpec::minkowski(double gamma) {
    MetricSpec m;
    m.a_ext_t = [](const JVec&) { return Jet(0.0); };
    m.a_ext_i = [](const JVec&) { return std::array<Jet, 2>{Jet(0.0), Jet(0.0)}; };
    m.gamma = gamma;
    m.label = "minkowski";
    return m;
}

MetricSpec MetricSpec::metric_b(double b_ext, std::array<double, 2> e_ext, double gamma) {
    MetricSpec m;
    m.a_ext_t = [e_ext](const JVec& x) { return x[X1] * e_ext[0] + x[X2] * e_ext[1]; };
    m.a_ext_i = [b_ext](const JVec& x) {
        return std::array<Jet, 2>{0.5 * b_ext * x[X2], -0.5 * b_ext * x[X1]};
    };
    m.gamma = gamma;
    m.label = "metric_b";
    return m;
}

std::array<double, 2> e_ext_from_transport(double kappa, std::array<double, 2> jT) {
    return {-jT[1] / (2.0 * kappa), jT[0] / (2.0 * kappa)};
}

MetricSpec MetricSpec::metric_b_transport(double kappa, double gamma, std::array<double, 2> jT) {
    MetricSpec m = metric_b(gamma / (2.0 * kappa), e_ext_from_transport(kappa, jT), gamma);
    return m;
}

MetricSpec MetricSpec::manton(double kappa, double gamma, std::array<double, 2> jT) {
    MetricSpec m;
    const double c = gamma / (4.0 * kappa);
    m.a_ext_i = [c](const JVec& x) { return std::array<Jet, 2>{-c * x[X2], c * x[X1]}; };
    m.a_ext_t = [kappa, jT](const JVec& x) {
        return -(x[X1] * jT[1] - x[X2] * jT[0]) / (2.0 * kappa);
    };
    m.gamma = gamma;
    m.label = "manton";
    return m;
}

JMat metric_jet(const MetricSpec& m, const JVec& x) {
    JMat g{};
    for (auto& row : g)
        for (auto& e : row) e = Jet(0.0);
    const Jet at = m.a_ext_t(x);
    const auto ai = m.a_ext_i(x);
    g[T_][S_] = g[S_][T_] = Jet(1.0);
    g[X1][X1] = g[X2][X2] = Jet(1.0);
    g[T_][T_] = at * (2.0 / m.gamma);
    g[T_][X1] = g[X1][T_] = ai[0] / m.gamma;
    g[T_][X2] = g[X2][T_] = ai[1] / m.gamma;
    return g;
}

Mat4<double> invert4(const Mat4<double>& a) {
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = a[i][j];
    Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
    if (!lu.isInvertible()) throw std::runtime_error("singular 4x4 matrix");
    const Eigen::Matrix4d inv = lu.inverse();
    Mat4<double> r{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r[i][j] = inv(i, j);
    return r;
}

namespace {

struct MetricDerivs {
    double g[4][4];
    double dg[4][4][4];       // dg[a][m][n] = d_a g_mn
    double ddg[4][4][4][4];   // ddg[a][b][m][n]
    double gi[4][4];
};

MetricDerivs metric_derivs(const MetricSpec& m, const Point4& p) {
    const JMat gj = metric_jet(m, seed(p));
    MetricDerivs r{};
    Mat4<double> g{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            r.g[i][j] = g[i][j] = val(gj[i][j]);
            for (int a = 0; a < 4; ++a) {
                r.dg[a][i][j] = d1(gj[i][j], a);
                for (int b = 0; b < 4; ++b) r.ddg[a][b][i][j] = d2(gj[i][j], a, b);
            }
        }
    const auto gi = invert4(g);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r.gi[i][j] = gi[i][j];
    return r;
}

// Gamma^r_{mn} and d_a Gamma^r_{mn}.
void christoffel_full(const MetricDerivs& md, double G[4][4][4], double dG[4][4][4][4]) {
    double low[4][4][4];  // Gamma_{s m n}
    double dlow[4][4][4][4];
    for (int s = 0; s < 4; ++s)
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu) {
                low[s][mu][nu] = 0.5 * (md.dg[mu][s][nu] + md.dg[nu][s][mu] - md.dg[s][mu][nu]);
                for (int a = 0; a < 4; ++a)
                    dlow[a][s][mu][nu] =
                        0.5 * (md.ddg[a][mu][s][nu] + md.ddg[a][nu][s][mu] - md.ddg[a][s][mu][nu]);
            }
    // d_a g^{rs} = -g^{rp} d_a g_{pq} g^{qs}
    double dgi[4][4][4];
    for (int a = 0; a < 4; ++a)
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s) {
                double acc = 0.0;
                for (int p = 0; p < 4; ++p)
                    for (int q = 0; q < 4; ++q) acc -= md.gi[r][p] * md.dg[a][p][q] * md.gi[q][s];
                dgi[a][r][s] = acc;
            }
    for (int r = 0; r < 4; ++r)
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu) {
                double acc = 0.0;
                for (int s = 0; s < 4; ++s) acc += md.gi[r][s] * low[s][mu][nu];
                G[r][mu][nu] = acc;
                for (int a = 0; a < 4; ++a) {
                    double da = 0.0;
                    for (int s = 0; s < 4; ++s)
                        da += dgi[a][r][s] * low[s][mu][nu] + md.gi[r][s] * dlow[a][s][mu][nu];
                    dG[a][r][mu][nu] = da;
                }
            }
}

}  // namespace

TensorValue metric_at(const MetricSpec& m, const Point4& p) {
    const JMat g = metric_jet(m, seed(p));
    TensorValue t(2, 0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) t(i, j) = val(g[i][j]);
    return t;
}

TensorValue inverse_metric_at(const MetricSpec& m, const Point4& p) {
    const TensorValue g = metric_at(m, p);
    Mat4<double> a{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a[i][j] = g(i, j);
    const auto inv = invert4(a);
    TensorValue t(0, 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) t(i, j) = inv[i][j];
    return t;
}

TensorValue christoffel_at(const MetricSpec& m, const Point4& p) {
    const auto md = metric_derivs(m, p);
    double G[4][4][4], dG[4][4][4][4];
    christoffel_full(md, G, dG);
    TensorValue t(2, 1);
    for (int r = 0; r < 4; ++r)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) t.at({r, a, b}) = G[r][a][b];
    return t;
}

TensorValue riemann_at(const MetricSpec& m, const Point4& p) {
    const auto md = metric_derivs(m, p);
    double G[4][4][4], dG[4][4][4][4];
    christoffel_full(md, G, dG);
    TensorValue t(3, 1);
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s)
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) {
                    double v = dG[mu][r][nu][s] - dG[nu][r][mu][s];
                    for (int l = 0; l < 4; ++l) v += G[r][mu][l] * G[l][nu][s] - G[r][nu][l] * G[l][mu][s];
                    t.at({r, s, mu, nu}) = v;
                }
    return t;
}

TensorValue ricci_at(const MetricSpec& m, const Point4& p) {
    const TensorValue R = riemann_at(m, p);
    TensorValue t(2, 0);
    for (int s = 0; s < 4; ++s)
        for (int nu = 0; nu < 4; ++nu) {
            double v = 0.0;
            for (int r = 0; r < 4; ++r) v += R.at({r, s, r, nu});
            t(s, nu) = v;
        }
    return t;
}

double curvature_scalar_at(const MetricSpec& m, const Point4& p) {
    const TensorValue ric = ricci_at(m, p);
    const TensorValue gi = inverse_metric_at(m, p);
    double r = 0.0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) r += gi(a, b) * ric(a, b);
    return r;
}

Point4 eval_field(const FieldFn& X, const Point4& p) {
    const JVec v = X(seed(p));
    return {val(v[0]), val(v[1]), val(v[2]), val(v[3])};
}

Point4 lie_bracket(const FieldFn& X, const FieldFn& Y, const Point4& p) {
    const JVec x = seed(p);
    const JVec a = X(x);
    const JVec b = Y(x);
    Point4 r{};
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) r[mu] += val(a[nu]) * d1(b[mu], nu) - val(b[nu]) * d1(a[mu], nu);
    return r;
}

Mat4<double> field_jacobian(const FieldFn& X, const Point4& p) {
    const JVec v = X(seed(p));
    Mat4<double> J{};
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) J[mu][nu] = d1(v[mu], nu);
    return J;
}

TensorValue covariant_derivative_at(const MetricSpec& m, const FieldFn& X, const Point4& p) {
    const TensorValue G = christoffel_at(m, p);
    const JVec v = X(seed(p));
    TensorValue t(1, 1);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double acc = d1(v[nu], mu);
            for (int l = 0; l < 4; ++l) acc += G.at({nu, mu, l}) * val(v[l]);
            t(mu, nu) = acc;
        }
    return t;
}

TensorValue lie_derivative_metric(const MetricSpec& m, const FieldFn& X, const Point4& p) {
    const JVec x = seed(p);
    const JMat g = metric_jet(m, x);
    const JVec v = X(x);
    TensorValue t(2, 0);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double acc = 0.0;
            for (int r = 0; r < 4; ++r) {
                acc += val(v[r]) * d1(g[mu][nu], r);
                acc += val(g[mu][r]) * d1(v[r], nu);
                acc += val(g[r][nu]) * d1(v[r], mu);
            }
            t(mu, nu) = acc;
        }
    return t;
}

ConformalFit fit_conformal(const TensorValue& L, const TensorValue& g) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.c.size(); ++i) {
        num += L.c[i] * g.c[i];
        den += g.c[i] * g.c[i];
    }
    ConformalFit f;
    f.factor = num / den;
    for (std::size_t i = 0; i < g.c.size(); ++i)
        f.spread = std::max(f.spread, std::abs(L.c[i] - f.factor * g.c[i]));
    return f;
}

static void guard_or_throw(const DiffeoSpec& map, const Point4& p) {
    if (!map.domain_guard(p)) throw DomainError(map.label + ": point outside the map domain");
}

Mat4<double> jacobian_at(const DiffeoSpec& map, const Point4& p) {
    guard_or_throw(map, p);
    const JVec y = map.forward(seed(p));
    Mat4<double> J{};
    for (int a = 0; a < 4; ++a)
        for (int mu = 0; mu < 4; ++mu) J[a][mu] = d1(y[a], mu);
    return J;
}

Point4 map_point(const DiffeoSpec& map, const Point4& p) {
    guard_or_throw(map, p);
    const JVec y = map.forward(seed(p));
    return {val(y[0]), val(y[1]), val(y[2]), val(y[3])};
}

TensorValue pullback_metric(const DiffeoSpec& map, const MetricSpec& target, const Point4& p) {
    const auto J = jacobian_at(map, p);
    const TensorValue gt = metric_at(target, map_point(map, p));
    TensorValue t(2, 0);
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            double acc = 0.0;
            for (int a = 0; a < 4; ++a)
                for (int b = 0; b < 4; ++b) acc += J[a][mu] * J[b][nu] * gt(a, b);
            t(mu, nu) = acc;
        }
    return t;
}

Point4 pushforward_vector(const DiffeoSpec& map, const FieldFn& X, const Point4& p) {
    const auto J = jacobian_at(map, p);
    const Point4 v = eval_field(X, p);
    Point4 r{};
    for (int a = 0; a < 4; ++a)
        for (int mu = 0; mu < 4; ++mu) r[a] += J[a][mu] * v[mu];
    return r;
}

std::vector<Point4> sample_points(unsigned seed_value, std::size_t count, double half_width,
                                  const std::function<bool(const Point4&)>& guard) {
    std::mt19937_64 rng(seed_value);
    std::uniform_real_distribution<double> u(-half_width, half_width);
    std::vector<Point4> pts;
    pts.reserve(count);
    std::size_t attempts = 0;
    while (pts.size() < count) {
        if (++attempts > 1000 * count + 1000) throw std::runtime_error("sample_points: guard rejects everything");
        Point4 p{u(rng), u(rng), u(rng), u(rng)};
        if (!guard || guard(p)) pts.push_back(p);
    }
    return pts;
}

}  // namespace manton
