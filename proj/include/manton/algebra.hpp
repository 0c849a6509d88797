// Lie brackets of generator sets, structure constants by least squares, the
// reference tables and the lifting obstruction.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "manton/fields.hpp"

namespace manton {

struct AlgebraTable {
    std::vector<std::string> labels;
    std::vector<double> c;         // c[(i*n + j)*n + k] = c^k_ij
    std::vector<double> residual;  // residual[i*n + j]
    bool closed = false;
    double gram_condition = 0.0;

    static AlgebraTable zeros(std::vector<std::string> labels);
    std::size_t size() const { return labels.size(); }
    double at(std::size_t i, std::size_t j, std::size_t k) const { return c[(i * size() + j) * size() + k]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) { return c[(i * size() + j) * size() + k]; }
    /// Sets c^k_ij = v and c^k_ji = -v.
    void set(const std::string& i, const std::string& j, const std::string& k, double v);
    std::size_t index(const std::string& name) const;
    double coefficient(const std::string& i, const std::string& j, const std::string& k) const;
    double max_residual() const;
};

struct NonClosure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DependentBasis : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Point4 bracket(const VectorField4& X, const VectorField4& Y, const Point4& p);

/// Expands every bracket in the basis. Throws DependentBasis if the stacked
/// evaluation matrix is ill conditioned (> 1e10), NonClosure only if strict.
AlgebraTable structure_constants(const GeneratorSet& set, const std::vector<Point4>& points,
                                 double closure_tol = 1e-8, bool strict = false);

double antisymmetry_residual(const AlgebraTable& t);
/// max over (i, j, k, m) of |sum_l c^l_ij c^m_lk + cyclic|.
double jacobi_residual(const AlgebraTable& t);

struct SnapValue {
    double value = 0.0;
    std::string label;
    double distance = 0.0;
};
/// {0, +-1, +-2, +-1/2, +-1/2kappa, +-1/kappa, +-1/4kappa, +-1/gamma, +-gamma, +-gamma/4kappa}.
std::vector<SnapValue> snap_grid(double kappa, double gamma);
SnapValue snap(double x, const std::vector<SnapValue>& grid);
/// Table with coefficients replaced by their snapped values.
AlgebraTable snapped(const AlgebraTable& t, const std::vector<SnapValue>& grid, double* max_distance = nullptr);

/// Bargmann (extended Galilei) table of minkowski_set7.
AlgebraTable extended_galilei_reference();
/// Table of theorem2_set as printed.
AlgebraTable theorem2_reference(double kappa);
/// Table of hidden_set9. The printed [K, P_i] = +G_i is inconsistent with
/// Jacobi; the default uses -G_i.
AlgebraTable schrodinger_reference(double gamma, bool printed_kp_sign = false);

struct Mismatch {
    std::string i, j, k;
    double expected = 0.0;
    double measured = 0.0;
};
struct TableComparison {
    double max_deviation = 0.0;
    std::vector<Mismatch> mismatches;
    bool matches() const { return mismatches.empty(); }
};
/// Labels must agree in order.
TableComparison compare_tables(const AlgebraTable& measured, const AlgebraTable& reference, double tol = 1e-8);

/// Drops s-components and the central element N.
GeneratorSet project_to_spacetime(const GeneratorSet& set);

/// Minkowski counterparts of hidden_set9 in the same order and normalization.
GeneratorSet exported_set9(double gamma);

struct ObstructionReport {
    double kappa = 0.0, gamma = 0.0;
    double b_ext = 0.0;           // gamma/2kappa
    double field_strength = 0.0;  // F_12 of the background used (metric B, = -b_ext)
    struct Sweep {
        double c1 = 0.0, c2 = 0.0;
        double coefficient = 0.0;  // [P^1, P^2] = coefficient N
        double off_central = 0.0;  // non-N part of the bracket
    };
    std::vector<Sweep> sweep;
    double coefficient = 0.0;
    double sweep_spread = 0.0;
    double flat_coefficient = 0.0;
    bool obstructed() const { return coefficient != 0.0; }
};
ObstructionReport obstruction_check(double kappa, double gamma, std::array<double, 2> jT = {0.0, 0.0},
                                    const std::vector<double>& constants = {-1.0, 0.0, 1.0});

/// Rows i,j,k,c,residual with 17 significant digits.
std::string table_csv(const AlgebraTable& t);
/// One line per nonzero bracket, coefficients snapped.
std::string table_text(const AlgebraTable& t, const std::vector<SnapValue>& grid, double zero_tol = 1e-8);

}  // namespace manton
