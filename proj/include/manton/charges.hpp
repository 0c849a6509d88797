// Conserved quantities of the reduced model: closed-form integrals and the
// Noether route through the lifted energy-momentum tensor.
#pragma once

#include <array>
#include <string>

#include "manton/pde.hpp"

namespace manton {

struct ChargeParts {
    double matter_term = 0.0;
    double upsilon_term = 0.0;
    double total() const { return matter_term + upsilon_term; }
};

struct ChargeReport {
    double time = 0.0;
    double n = 0.0;
    std::array<double, 2> p{0.0, 0.0};
    double h = 0.0;
    double m = 0.0;
    ChargeParts parts_n, parts_h, parts_m;
    std::array<ChargeParts, 2> parts_p;
    double n_flux_form = 0.0;   // gamma 2 kappa int B
    double support_fraction = 0.0;
};

/// Both forms of the particle number and their difference.
struct ParticleNumber {
    double density_form = 0.0;  // gamma^2 int (1 - rho)
    double flux_form = 0.0;     // gamma 2 kappa int B
    double printed_flux_form = 0.0;  // gamma int B / 2 kappa, as printed
    double difference() const { return density_form - flux_form; }
};

ParticleNumber charge_n_forms(const FieldState& s, const ModelParams& params, const Grid2& grid);
double charge_n(const FieldState& s, const ModelParams& params, const Grid2& grid);
std::array<double, 2> charge_p(const FieldState& s, const ModelParams& params, const Grid2& grid,
                               std::array<ChargeParts, 2>* parts = nullptr);
double charge_h(const FieldState& s, const ModelParams& params, const Grid2& grid, ChargeParts* parts = nullptr);
double charge_m(const FieldState& s, const ModelParams& params, const Grid2& grid, ChargeParts* parts = nullptr);

/// Largest box-normalized sup-norm radius max(|x1|/(L1/2), |x2|/(L2/2)) over
/// points where |B| or |J - rho J^T| exceeds rel_tol times its maximum.
double support_fraction(const FieldState& s, const ModelParams& params, const Grid2& grid, double rel_tol = 1e-8);

/// All four charges; warns on stderr when the support fraction is >= 0.5.
ChargeReport charges(const FieldState& s, const ModelParams& params, const Grid2& grid, bool warn = true);

struct NotKilling : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoetherCharge {
    double total = 0.0;
    ChargeParts parts;          // horizontal lift part, Upsilon theta_ss part
    double printed_potential_total = 0.0;  // same charge with the potential term as printed
};

/// int theta_{mu s} X^mu over the grid at the state's time. The lift must be
/// Killing for the Manton background (checked at sample points). The state is
/// lifted as phi = e^{i gamma s} Phi with statistical potential a = A - A^ext.
NoetherCharge noether_charge(const FieldState& s, const VectorField4& lift, const ModelParams& params,
                             const Grid2& grid);

/// Lifts whose charges have closed forms, in the Manton orientation.
enum class ChargeKind { n, p1, p2, h, m };
const char* charge_kind_name(ChargeKind k);
VectorField4 charge_lift(ChargeKind k, const ModelParams& params);
/// Hidden boost lift (time-reversed hidden boost of metric B), rest frame only.
VectorField4 hidden_boost_lift(std::array<double, 2> beta, const ModelParams& params);

/// Constant C with curly bracket = -(2 kappa/gamma)(Upsilon - C) for p and m,
/// and -2 kappa (Upsilon - C) for h.
double upsilon_constant(ChargeKind k, const ModelParams& params);
/// Max over grid points of |curly bracket - factor (Upsilon - C)| at time t.
double upsilon_bracket_deviation(ChargeKind k, const ModelParams& params, const Grid2& grid, double t);

}  // namespace manton
