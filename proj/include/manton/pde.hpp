// Reduced 2+1D field equations on a doubly periodic box: constraint solve,
// Strang split-step evolution, finite symmetries and residual monitors.
#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "manton/fields.hpp"
#include "manton/spectral.hpp"

namespace manton {

enum class ModelCase { A, B, Manton };
const char* case_name(ModelCase c);
ModelCase parse_case(const std::string& s);

struct ModelParams {
    double gamma = 1.0;
    double lam = 1.0;
    double kappa = 0.5;
    TransportCurrent jT;
    ModelCase model_case = ModelCase::Manton;
    /// Throws std::invalid_argument unless gamma > 0, lam > 0, kappa != 0
    /// (and J^T = 0 for case A).
    void validate() const;
};

struct Grid2 {
    int n1 = 64, n2 = 64;
    double L1 = 20.0, L2 = 20.0;
    double dt = 0.0;  // 0 selects 0.1 L1/n1
    void validate() const;
    double step() const { return dt > 0 ? dt : 0.1 * L1 / n1; }
    double h1() const { return L1 / n1; }
    double h2() const { return L2 / n2; }
    double cell() const { return h1() * h2(); }
    std::size_t size() const { return static_cast<std::size_t>(n1) * n2; }
    /// Box-centered coordinates.
    double x1(int i) const { return -0.5 * L1 + i * h1(); }
    double x2(int j) const { return -0.5 * L2 + j * h2(); }
    const Spectral& spectral() const { return spectral_for(n1, n2, L1, L2); }
};

struct FieldState {
    CField phi;
    RField a_t, a1, a2;
    double time = 0.0;
};

struct Derived2 {
    RField B, E1, E2, rho, J1, J2, J_t;
    double mean_B = 0.0;
    std::array<double, 2> mean_E{0.0, 0.0};
    double gauss_residual = 0.0;    // max |2 kappa B - gamma (1 - rho)| (case A: |2 kappa B + gamma rho|)
    double coulomb_residual = 0.0;  // max |k.a^(k)| over transverse-fitted modes, divided by N
    double curl_residual = 0.0;     // max |curl a - (B - <B>)|
};

enum class Ansatz { uniform, gaussian_dip, vortex_pair, localized };
const char* ansatz_name(Ansatz a);
Ansatz parse_ansatz(const std::string& s);

/// Phi = 1 - sum depth exp(-|R(angle)^T (x - center) / width|^2), real.
/// A negative depth is a bump.
struct Dip {
    double depth = 0.5;
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> width{1.0, 1.0};
    double angle = 0.0;  // orientation of the width axes
};

struct AnsatzSpec {
    Ansatz kind = Ansatz::uniform;
    std::vector<Dip> dips{Dip{}};
    int winding = 1;
    double separation = 4.0;  // vortex pair along x1, centered
    double core = 1.0;        // tanh core radius
    std::array<double, 2> kick{0.0, 0.0};  // optional e^{i k.x}, k on the reciprocal lattice
    // localized: flux-free data whose B and current both decay like gaussians.
    // a1 = amp G(w) + c G(2w), a2 = amp twist (x1/w) G(0.8w) around center, with
    // c tuned so that the canonical momentum int rho a vanishes; Phi = sqrt(rho).
    // Requires case B or Manton.
    double amplitude = 0.25;
    double width = 1.5;
    double twist = 1.0;
    std::array<double, 2> center{0.5, 0.3};
    void validate(const Grid2& g) const;
};

struct InvalidAnsatz : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct StepRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

FieldState init_state(const Grid2& grid, const ModelParams& params, const AnsatzSpec& ansatz);

/// Rebuilds the transverse part of a from rho (longitudinal part and zero
/// mode kept), the current, the Ampere-Hall electric field and a_t.
Derived2 solve_constraints(FieldState& state, const ModelParams& params, const Grid2& grid);

struct StepInfo {
    double relative_change = 0.0;
    double faraday_residual = 0.0;  // max |curl E + dB/dt|
    int krylov_iterations = 0;
};

/// One Strang step of size grid.step() (or dt_override if nonzero).
FieldState step(const FieldState& state, const ModelParams& params, const Grid2& grid, StepInfo* info = nullptr,
                double dt_override = 0.0);

/// Covariant derivatives D_j Phi = d_j Phi - i a_j Phi.
std::array<CField, 2> covariant_gradient(const FieldState& s, const Grid2& grid);
/// (K + V) Phi: the right-hand side of i gamma d_t Phi.
CField nls_rhs(const FieldState& s, const ModelParams& params, const Grid2& grid);

/// L2 norm of i gamma D_t Phi + 1/2 D^2 Phi + (lam/4)(1 - rho) Phi at the
/// middle state, with d_t from centered differences.
double nls_residual(const FieldState& prev, const FieldState& mid, const FieldState& next, const ModelParams& params,
                    const Grid2& grid);

struct SymmetryError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Finite transformation exp(eps X) of a solution. metric is the background the
/// generator lives on (metric B with the transport current by default).
FieldState apply_symmetry(const FieldState& state, const VectorField4& gen, double eps, const ModelParams& params,
                          const Grid2& grid);
FieldState apply_symmetry(const FieldState& state, const VectorField4& gen, double eps, const ModelParams& params,
                          const Grid2& grid, const MetricSpec& metric);

/// Gauge transformation Phi -> e^{i chi} Phi, a -> a + grad chi for periodic chi.
FieldState gauge_transform(const FieldState& s, const RField& chi, const Grid2& grid);

double l2_norm(const CField& f, const Grid2& grid);
double l2_norm(const RField& f, const Grid2& grid);
double integral(const RField& f, const Grid2& grid);
double max_abs_diff(const RField& a, const RField& b);
double max_abs_diff(const CField& a, const CField& b);

}  // namespace manton
