// Point-evaluated tensor calculus on R^4 with index order (t, x1, x2, s).
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "manton/dual.hpp"

namespace manton {

using D1 = ad::Dual<double, 4>;
using Jet = ad::Dual<D1, 4>;  // value, gradient and Hessian of a point function

template <class T> using Vec4 = std::array<T, 4>;
template <class T> using Mat4 = std::array<std::array<T, 4>, 4>;
using Point4 = Vec4<double>;
using JVec = Vec4<Jet>;
using JMat = Mat4<Jet>;

enum Index { T_ = 0, X1 = 1, X2 = 2, S_ = 3 };

/// Dense tensor with `cov` lower and `contra` upper indices, each in {0..3}.
/// Components are stored upper indices first, then lower ones.
struct TensorValue {
    int cov = 0;
    int contra = 0;
    std::vector<double> c;

    TensorValue() = default;
    TensorValue(int cov_, int contra_);
    std::size_t size() const { return c.size(); }
    double& at(std::initializer_list<int> idx);
    double at(std::initializer_list<int> idx) const;
    double& operator()(int a, int b) { return c[4 * a + b]; }
    double operator()(int a, int b) const { return c[4 * a + b]; }
    double max_abs() const;
};

/// Seeds a point so that every coordinate carries unit first and second
/// order tangent directions.
JVec seed(const Point4& p);

inline double val(const Jet& j) { return j.v.v; }
inline double d1(const Jet& j, int a) { return j.v.d[a]; }
inline double d2(const Jet& j, int a, int b) { return j.d[a].d[b]; }

/// Brinkmann metric with flat transverse block:
/// g = dx^2 + 2 dt ds + (2/gamma) A_t dt^2 + (2/gamma) A_i dx^i dt.
struct MetricSpec {
    using ScalarFn = std::function<Jet(const JVec&)>;
    using PairFn = std::function<std::array<Jet, 2>(const JVec&)>;

    ScalarFn a_ext_t;
    PairFn a_ext_i;
    double gamma = 1.0;
    std::string label = "custom";

    static MetricSpec minkowski(double gamma = 1.0);
    /// Constant fields: A_i = 1/2 eps_ij x^j B, A_t = x.E.
    static MetricSpec metric_b(double b_ext, std::array<double, 2> e_ext, double gamma);
    /// metric_b with B = gamma/2kappa and E_k = -eps_kj J_j / 2kappa.
    static MetricSpec metric_b_transport(double kappa, double gamma, std::array<double, 2> jT);
    /// The background used by the Manton reduction:
    /// A_i = -(gamma/4kappa) eps_ij x^j, A_t = -(1/2kappa) x cross J.
    static MetricSpec manton(double kappa, double gamma, std::array<double, 2> jT);
};

/// External fields from the transport current, E_k = -eps_kj J_j / (2 kappa).
std::array<double, 2> e_ext_from_transport(double kappa, std::array<double, 2> jT);

JMat metric_jet(const MetricSpec& m, const JVec& x);

TensorValue metric_at(const MetricSpec& m, const Point4& p);
TensorValue inverse_metric_at(const MetricSpec& m, const Point4& p);
/// Gamma^rho_{mu nu}, stored as at({rho, mu, nu}).
TensorValue christoffel_at(const MetricSpec& m, const Point4& p);
/// R^rho_{sigma mu nu}, stored as at({rho, sigma, mu, nu}).
TensorValue riemann_at(const MetricSpec& m, const Point4& p);
TensorValue ricci_at(const MetricSpec& m, const Point4& p);
double curvature_scalar_at(const MetricSpec& m, const Point4& p);

using FieldFn = std::function<JVec(const JVec&)>;

/// nabla_mu X^nu stored as (mu, nu), tensor type (1,1).
TensorValue covariant_derivative_at(const MetricSpec& m, const FieldFn& X, const Point4& p);
TensorValue lie_derivative_metric(const MetricSpec& m, const FieldFn& X, const Point4& p);

/// Least-squares fit L = f g. `spread` is max_{mu nu} |L - f g|.
struct ConformalFit {
    double factor = 0.0;
    double spread = 0.0;
};
ConformalFit fit_conformal(const TensorValue& L, const TensorValue& g);

struct DiffeoSpec {
    FieldFn forward;
    std::function<bool(const Point4&)> domain_guard = [](const Point4&) { return true; };
    std::string label = "map";
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

Mat4<double> jacobian_at(const DiffeoSpec& map, const Point4& p);
Point4 map_point(const DiffeoSpec& map, const Point4& p);
TensorValue pullback_metric(const DiffeoSpec& map, const MetricSpec& target, const Point4& p);
/// (Psi_* X)(Psi(p)) = dPsi(p) X(p).
Point4 pushforward_vector(const DiffeoSpec& map, const FieldFn& X, const Point4& p);

Point4 eval_field(const FieldFn& X, const Point4& p);
/// [X,Y]^mu = X^nu d_nu Y^mu - Y^nu d_nu X^mu.
Point4 lie_bracket(const FieldFn& X, const FieldFn& Y, const Point4& p);
Mat4<double> field_jacobian(const FieldFn& X, const Point4& p);  // (mu, nu) = d_nu X^mu

/// Deterministic sample points in a box, optionally filtered by a guard.
std::vector<Point4> sample_points(unsigned seed, std::size_t count, double half_width = 2.0,
                                  const std::function<bool(const Point4&)>& guard = {});

Mat4<double> invert4(const Mat4<double>& a);

}  // namespace manton
