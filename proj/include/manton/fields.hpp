// Generator catalogs (flat Schrödinger fields, hidden fields on metric B,
// good lifts), the export/import map and the symmetry-lift machinery.
#pragma once

#include <array>
#include <string>
#include <vector>

#include "manton/geom.hpp"

namespace manton {

struct GeneratorParams {
    std::array<double, 2> Gamma{0.0, 0.0};  // hidden translations
    std::array<double, 2> beta{0.0, 0.0};   // boosts
    std::array<double, 2> delta{0.0, 0.0};  // translations
    double omega_rot = 0.0;                 // rotation angle rate
    double eps = 0.0;                       // time translation
    double chi = 0.0;                       // expansion
    double rho_dil = 0.0;                   // dilatation
    double eta = 0.0;                       // vertical translation
};

struct TransportCurrent {
    double j_t = 1.0;  // equals gamma
    std::array<double, 2> j_vec{0.0, 0.0};
    double j_s = 0.0;
    static TransportCurrent from(double gamma, std::array<double, 2> J) { return {gamma, J, 0.0}; }
};

enum class Tag { unverified, killing, conformal, neither };
const char* tag_name(Tag t);

struct VectorField4 {
    std::string label;
    GeneratorParams params;
    FieldFn eval;
    Tag tag = Tag::unverified;
    double killing_residual = -1.0;
    double conformal_spread = -1.0;
    double conformal_factor_rms = -1.0;

    Point4 at(const Point4& p) const { return eval_field(eval, p); }
    JVec operator()(const JVec& x) const { return eval(x); }
};

struct GeneratorSet {
    MetricSpec metric;
    std::vector<VectorField4> basis;
    std::string label;
    const VectorField4& find(const std::string& name) const;
};

/// Tags each basis element by its Killing and conformal residuals at the points.
void classify(GeneratorSet& set, const std::vector<Point4>& points, double tol = 1e-9);

enum class SchKind { rotation, boost, translation, time, expansion, dilatation, vertical };
enum class HiddenKind { h_translation, h_boost, h_rotation, h_time, h_expansion, h_dilatation, vertical };

struct ArityError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct RestFrameError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Flat Bargmann conformal fields in (time row, space row, s row) form.
VectorField4 schrodinger_generator(SchKind kind, const GeneratorParams& params);

/// Hidden fields on metric B with B = gamma/2kappa and E from the transport
/// current. h_time, h_expansion and h_dilatation exist only for J = 0.
VectorField4 hidden_generator(HiddenKind kind, const GeneratorParams& params, double kappa, double gamma,
                              const TransportCurrent& jT = {});

/// Flat field that a hidden field is exported to (normalizations included).
VectorField4 minkowski_counterpart(HiddenKind kind, const GeneratorParams& params, double gamma);

enum class Orientation {
    manton,  // background A_i = -(gamma/4kappa) eps_ij x^j
    metric_b // background A_i = +1/2 eps_ij x^j B
};

MetricSpec background_metric(Orientation o, double kappa, double gamma, std::array<double, 2> jT);

/// Lift of the ordinary translation delta. Killing for background_metric(o, ...).
VectorField4 good_lift_translation(std::array<double, 2> delta, double kappa, double gamma,
                                   const TransportCurrent& jT = {}, Orientation o = Orientation::manton);
/// (-eps, 0, 0, -eps |J/gamma|^2 / 2). Killing for either orientation.
VectorField4 good_lift_time(double eps, double gamma, const TransportCurrent& jT = {});

/// hidden time + (B/2)^2 hidden expansion + sign (B/2) hidden rotation, rest frame.
VectorField4 hidden_time_combination(double kappa, double gamma, double rotation_sign);

/// Image under (t, x, s) -> (-t, x, -s); maps metric-B fields to Manton fields.
VectorField4 time_reverse(const VectorField4& X);

/// Conformal map taking metric B(B_ext, E_ext) to flat Bargmann space.
/// Frequency omega = B_ext/(2 gamma).
DiffeoSpec export_import_map(double gamma, double b_ext, std::array<double, 2> e_ext);
/// Convenience overload with B = gamma/2kappa, E from the transport current.
DiffeoSpec export_import_map_transport(double kappa, double gamma, std::array<double, 2> jT);

/// Generator sets.
GeneratorSet minkowski_set7(double gamma);
GeneratorSet minkowski_set9(double gamma);
GeneratorSet theorem2_set(double kappa, double gamma, const TransportCurrent& jT = {});
GeneratorSet hidden_set9(double kappa, double gamma);

// Spacetime symmetries and their lifts.

using Field3Fn = std::function<std::array<Jet, 3>(const JVec&)>;  // (X^t, X^1, X^2)

struct SpacetimeField3 {
    std::string label;
    Field3Fn X;
};

SpacetimeField3 spacetime_translation(std::array<double, 2> delta);
SpacetimeField3 spacetime_time_translation(double eps);
SpacetimeField3 spacetime_rotation(double omega);
SpacetimeField3 spacetime_zero();

struct NotASymmetry : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// F_{alpha beta} = d_alpha A_beta - d_beta A_alpha at p (3x3 over t, x1, x2).
std::array<std::array<double, 3>, 3> external_field_strength(const MetricSpec& m, const Point4& p);

/// Max curl of F.X over the points; zero for a symmetry.
double symmetry_curl_residual(const SpacetimeField3& X, const MetricSpec& m, const std::vector<Point4>& points);

/// Upsilon with d Upsilon = F.X, integrated from the origin (time leg at x = 0,
/// then a radial leg at fixed t), plus the constant C. Returned as a jet so
/// lifts can be differentiated.
struct Response {
    std::function<Jet(const JVec&)> upsilon;
    double constant = 0.0;
};
Response symmetry_response(const SpacetimeField3& X, const MetricSpec& m, double constant = 0.0,
                           const std::vector<Point4>& check_points = {});

/// X^ = (X^t, X^i, (Upsilon - A_alpha X^alpha)/gamma).
VectorField4 lift_from_spacetime(const SpacetimeField3& X, const MetricSpec& m, const Response& r);

/// gamma X^s + A_alpha X^alpha; recovers Upsilon from a lift.
double upsilon_of_lift(const MetricSpec& m, const VectorField4& X, const Point4& p);

/// Constant of the lift of P_2 fixed by [P^_1, R^] = P^_2, given the lift of
/// P_1 and a lifted rotation.
double bracket_fixed_constant_p2(const VectorField4& p1_lift, const VectorField4& rotation_lift,
                                 const MetricSpec& m, const Point4& p);

}  // namespace manton
