#include "manton/algebra.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace manton {

AlgebraTable AlgebraTable::zeros(std::vector<std::string> labels) {
    AlgebraTable t;
    const std::size_t n = labels.size();
    t.labels = std::move(labels);
    t.c.assign(n * n * n, 0.0);
    t.residual.assign(n * n, 0.0);
    t.closed = true;
    return t;
}

std::size_t AlgebraTable::index(const std::string& name) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == name) return i;
    throw std::out_of_range("no generator labelled " + name);
}

void AlgebraTable::set(const std::string& i, const std::string& j, const std::string& k, double v) {
    const auto a = index(i), b = index(j), m = index(k);
    at(a, b, m) = v;
    at(b, a, m) = -v;
}

double AlgebraTable::coefficient(const std::string& i, const std::string& j, const std::string& k) const {
    return at(index(i), index(j), index(k));
}

double AlgebraTable::max_residual() const {
    double r = 0.0;
    for (double x : residual) r = std::max(r, x);
    return r;
}

Point4 bracket(const VectorField4& X, const VectorField4& Y, const Point4& p) { return lie_bracket(X.eval, Y.eval, p); }

AlgebraTable structure_constants(const GeneratorSet& set, const std::vector<Point4>& points, double closure_tol,
                                 bool strict) {
    if (points.size() < 20) throw std::invalid_argument("structure_constants needs at least 20 sample points");
    const std::size_t n = set.basis.size(), rows = 4 * points.size();
    std::vector<std::string> labels;
    for (const auto& X : set.basis) labels.push_back(X.label);
    AlgebraTable t = AlgebraTable::zeros(labels);

    Eigen::MatrixXd A(rows, n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t p = 0; p < points.size(); ++p) {
            const Point4 v = set.basis[k].at(points[p]);
            for (int a = 0; a < 4; ++a) A(4 * p + a, k) = v[a];
        }
    Eigen::MatrixXd An = A;
    for (std::size_t k = 0; k < n; ++k) {
        const double nk = A.col(k).norm();
        if (nk == 0.0) throw DependentBasis("generator " + labels[k] + " vanishes at the sample points");
        An.col(k) /= nk;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(An);
    const auto& sv = svd.singularValues();
    t.gram_condition = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
    if (!(t.gram_condition < 1e10)) throw DependentBasis("generator basis is linearly dependent at the sample points");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::VectorXd b(rows);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t p = 0; p < points.size(); ++p) {
                const Point4 v = bracket(set.basis[i], set.basis[j], points[p]);
                for (int a = 0; a < 4; ++a) b(4 * p + a) = v[a];
            }
            const Eigen::VectorXd c = qr.solve(b);
            const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
            const double res = (A * c - b).lpNorm<Eigen::Infinity>() / scale;
            for (std::size_t k = 0; k < n; ++k) {
                t.at(i, j, k) = c(k);
                t.at(j, i, k) = -c(k);
            }
            t.residual[i * n + j] = t.residual[j * n + i] = res;
        }
    t.closed = t.max_residual() < closure_tol;
    if (strict && !t.closed) {
        std::ostringstream os;
        os << "bracket does not close in " << set.label << ", residual " << t.max_residual();
        throw NonClosure(os.str());
    }
    return t;
}

double antisymmetry_residual(const AlgebraTable& t) {
    const std::size_t n = t.size();
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) r = std::max(r, std::abs(t.at(i, j, k) + t.at(j, i, k)));
    return r;
}

double jacobi_residual(const AlgebraTable& t) {
    const std::size_t n = t.size();
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k)
                for (std::size_t m = 0; m < n; ++m) {
                    double s = 0.0;
                    for (std::size_t l = 0; l < n; ++l)
                        s += t.at(i, j, l) * t.at(l, k, m) + t.at(j, k, l) * t.at(l, i, m) + t.at(k, i, l) * t.at(l, j, m);
                    r = std::max(r, std::abs(s));
                }
    return r;
}

std::vector<SnapValue> snap_grid(double kappa, double gamma) {
    std::vector<SnapValue> g{{0.0, "0", 0.0}};
    const std::vector<std::pair<double, std::string>> base{
        {1.0, "1"},
        {2.0, "2"},
        {0.5, "1/2"},
        {1.0 / (2 * kappa), "1/2kappa"},
        {1.0 / kappa, "1/kappa"},
        {1.0 / (4 * kappa), "1/4kappa"},
        {1.0 / gamma, "1/gamma"},
        {gamma, "gamma"},
        {gamma / (4 * kappa), "gamma/4kappa"},
    };
    for (const auto& [v, s] : base) {
        g.push_back({v, s, 0.0});
        g.push_back({-v, "-" + s, 0.0});
    }
    return g;
}

SnapValue snap(double x, const std::vector<SnapValue>& grid) {
    SnapValue best{x, "?", INFINITY};
    for (const auto& g : grid) {
        const double d = std::abs(x - g.value);
        if (d < best.distance) best = {g.value, g.label, d};
    }
    return best;
}

AlgebraTable snapped(const AlgebraTable& t, const std::vector<SnapValue>& grid, double* max_distance) {
    AlgebraTable s = t;
    double md = 0.0;
    for (double& v : s.c) {
        const SnapValue q = snap(v, grid);
        md = std::max(md, q.distance);
        v = q.value;
    }
    if (max_distance) *max_distance = md;
    return s;
}

AlgebraTable extended_galilei_reference() {
    AlgebraTable t = AlgebraTable::zeros({"P~1", "P~2", "G~1", "G~2", "R~", "H~", "N"});
    const char* P[2] = {"P~1", "P~2"};
    const char* G[2] = {"G~1", "G~2"};
    for (int i = 0; i < 2; ++i) {
        t.set(P[i], G[i], "N", -1.0);
        const int j = 1 - i;
        const double e = i == 0 ? 1.0 : -1.0;  // eps_ij
        t.set(G[i], "R~", G[j], e);
        t.set(P[i], "R~", P[j], e);
        t.set("H~", G[i], P[i], -1.0);
    }
    return t;
}

AlgebraTable theorem2_reference(double kappa) {
    AlgebraTable t = AlgebraTable::zeros({"P^1", "P^2", "H^", "G1", "G2", "R", "N"});
    const char* P[2] = {"P^1", "P^2"};
    const char* G[2] = {"G1", "G2"};
    t.set("P^1", "P^2", "N", -1.0 / (2 * kappa));
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        const double e = i == 0 ? 1.0 : -1.0;
        t.set(P[i], G[i], "N", 1.0);
        t.set(G[i], "R", G[j], e);
        t.set(P[i], "R", P[j], e);
        t.set("H^", G[i], P[i], 1.0);
    }
    return t;
}

AlgebraTable schrodinger_reference(double gamma, bool printed_kp_sign) {
    AlgebraTable t = AlgebraTable::zeros({"hP1", "hP2", "hG1", "hG2", "hR", "hH", "hK", "hD", "N"});
    const char* P[2] = {"hP1", "hP2"};
    const char* G[2] = {"hG1", "hG2"};
    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        const double e = i == 0 ? 1.0 : -1.0;
        t.set(P[i], G[i], "N", 1.0 / gamma);
        t.set(G[i], "hR", G[j], e);
        t.set(P[i], "hR", P[j], e);
        t.set("hH", G[i], P[i], 1.0);
        t.set("hD", G[i], G[i], 1.0);
        t.set("hD", P[i], P[i], -1.0);
        t.set("hK", P[i], G[i], printed_kp_sign ? 1.0 : -1.0);
    }
    t.set("hH", "hD", "hH", 2.0);
    t.set("hH", "hK", "hD", 1.0);
    t.set("hD", "hK", "hK", 2.0);
    return t;
}

TableComparison compare_tables(const AlgebraTable& measured, const AlgebraTable& reference, double tol) {
    if (measured.labels != reference.labels) throw std::invalid_argument("tables have different generator labels");
    TableComparison cmp;
    const std::size_t n = measured.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                const double d = std::abs(measured.at(i, j, k) - reference.at(i, j, k));
                cmp.max_deviation = std::max(cmp.max_deviation, d);
                if (d > tol)
                    cmp.mismatches.push_back({measured.labels[i], measured.labels[j], measured.labels[k],
                                              reference.at(i, j, k), measured.at(i, j, k)});
            }
    return cmp;
}

GeneratorSet project_to_spacetime(const GeneratorSet& set) {
    GeneratorSet out;
    out.metric = set.metric;
    out.label = set.label + "_projected";
    for (const auto& X : set.basis) {
        if (X.label == "N") continue;
        VectorField4 Y = X;
        Y.tag = Tag::unverified;
        Y.eval = [f = X.eval](const JVec& x) {
            JVec v = f(x);
            v[S_] = Jet(0.0);
            return v;
        };
        out.basis.push_back(std::move(Y));
    }
    return out;
}

GeneratorSet exported_set9(double gamma) {
    GeneratorSet s;
    s.metric = MetricSpec::minkowski(gamma);
    s.label = "exported9";
    auto add = [&](HiddenKind k, GeneratorParams q, const char* name) {
        VectorField4 X = minkowski_counterpart(k, q, gamma);
        X.label = name;
        s.basis.push_back(std::move(X));
    };
    GeneratorParams q;
    q.Gamma = {1, 0}; add(HiddenKind::h_translation, q, "hP1"); q = {};
    q.Gamma = {0, 1}; add(HiddenKind::h_translation, q, "hP2"); q = {};
    q.beta = {1, 0}; add(HiddenKind::h_boost, q, "hG1"); q = {};
    q.beta = {0, 1}; add(HiddenKind::h_boost, q, "hG2"); q = {};
    q.omega_rot = 1; add(HiddenKind::h_rotation, q, "hR"); q = {};
    q.eps = 1; add(HiddenKind::h_time, q, "hH"); q = {};
    q.chi = 1; add(HiddenKind::h_expansion, q, "hK"); q = {};
    q.rho_dil = 1; add(HiddenKind::h_dilatation, q, "hD"); q = {};
    q.eta = 1; add(HiddenKind::vertical, q, "N");
    return s;
}

namespace {
struct LiftBracket {
    double coefficient = 0.0, off_central = 0.0;
};

LiftBracket lifted_translation_bracket(const MetricSpec& m, double c1, double c2, const std::vector<Point4>& pts) {
    const auto X1 = spacetime_translation({1, 0}), X2 = spacetime_translation({0, 1});
    const auto L1 = lift_from_spacetime(X1, m, symmetry_response(X1, m, c1));
    const auto L2 = lift_from_spacetime(X2, m, symmetry_response(X2, m, c2));
    LiftBracket out;
    std::vector<double> s;
    for (const auto& p : pts) {
        const Point4 b = bracket(L1, L2, p);
        for (int a = 0; a < 3; ++a) out.off_central = std::max(out.off_central, std::abs(b[a]));
        s.push_back(b[3]);
    }
    // N = d_s, so the coefficient is the s-component; it must be constant.
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= static_cast<double>(s.size());
    for (double v : s) out.off_central = std::max(out.off_central, std::abs(v - mean));
    out.coefficient = mean;
    return out;
}
}  // namespace

ObstructionReport obstruction_check(double kappa, double gamma, std::array<double, 2> jT,
                                    const std::vector<double>& constants) {
    ObstructionReport r;
    r.kappa = kappa;
    r.gamma = gamma;
    r.b_ext = gamma / (2 * kappa);
    const MetricSpec mb = MetricSpec::metric_b_transport(kappa, gamma, jT);
    const Point4 origin{0.2, 0.3, -0.4, 0.0};
    r.field_strength = external_field_strength(mb, origin)[1][2];
    const auto pts = sample_points(11u, 8);
    double lo = INFINITY, hi = -INFINITY;
    for (double c1 : constants)
        for (double c2 : constants) {
            const LiftBracket b = lifted_translation_bracket(mb, c1, c2, pts);
            r.sweep.push_back({c1, c2, b.coefficient, b.off_central});
            lo = std::min(lo, b.coefficient);
            hi = std::max(hi, b.coefficient);
        }
    r.coefficient = r.sweep.front().coefficient;
    r.sweep_spread = hi - lo;
    const MetricSpec flat = MetricSpec::minkowski(gamma);
    for (double c1 : constants)
        for (double c2 : constants)
            r.flat_coefficient = std::max(r.flat_coefficient,
                                          std::abs(lifted_translation_bracket(flat, c1, c2, pts).coefficient));
    return r;
}

namespace {
std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string table_csv(const AlgebraTable& t) {
    std::ostringstream os;
    os << "i,j,k,c,residual\n";
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                os << t.labels[i] << ',' << t.labels[j] << ',' << t.labels[k] << ',' << g17(t.at(i, j, k)) << ','
                   << g17(t.residual[i * n + j]) << '\n';
    return os.str();
}

std::string table_text(const AlgebraTable& t, const std::vector<SnapValue>& grid, double zero_tol) {
    std::ostringstream os;
    const std::size_t n = t.size();
    std::size_t w = 0;
    for (const auto& l : t.labels) w = std::max(w, l.size());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            std::string rhs;
            for (std::size_t k = 0; k < n; ++k) {
                const double v = t.at(i, j, k);
                if (std::abs(v) <= zero_tol) continue;
                const SnapValue s = snap(v, grid);
                std::string term = s.distance <= zero_tol ? s.label : g17(v);
                if (term == "1") term.clear();
                else if (term == "-1") term = "-";
                else term += " ";
                term += t.labels[k];
                if (!rhs.empty()) rhs += term[0] == '-' ? " - " + term.substr(1) : " + " + term;
                else rhs = term;
            }
            if (rhs.empty()) continue;
            os << '[' << t.labels[i] << ", " << t.labels[j] << ']';
            os << std::string(2 * w - t.labels[i].size() - t.labels[j].size(), ' ') << " = " << rhs << '\n';
        }
    return os.str();
}

}  // namespace manton
