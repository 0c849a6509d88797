#include "doctest.h"

#include <cmath>

#include "manton/algebra.hpp"

using namespace manton;

namespace {
constexpr double kKappa = 0.7;
constexpr double kGamma = 1.3;
const auto kPoints = sample_points(21u, 30);

void check_antisym_jacobi(const AlgebraTable& t) {
    CHECK(antisymmetry_residual(t) == 0.0);
    CHECK(jacobi_residual(t) < 1e-8);
    CHECK(t.closed);
    CHECK(t.max_residual() < 1e-8);
}
}  // namespace

TEST_CASE("vertical translation commutes with every cataloged generator") {
    const auto N = hidden_generator(HiddenKind::vertical, [] { GeneratorParams q; q.eta = 1; return q; }(), kKappa, kGamma);
    for (const auto& set : {theorem2_set(kKappa, kGamma), hidden_set9(kKappa, kGamma), minkowski_set9(kGamma)})
        for (const auto& X : set.basis)
            for (const auto& p : kPoints) {
                const Point4 b = bracket(N, X, p);
                CHECK(std::abs(b[0]) + std::abs(b[1]) + std::abs(b[2]) + std::abs(b[3]) == 0.0);
            }
}

TEST_CASE("lifted translations on metric B do not commute") {
    const auto s = theorem2_set(kKappa, kGamma);
    for (const auto& p : kPoints) {
        const Point4 b = bracket(s.find("P^1"), s.find("P^2"), p);
        CHECK(std::abs(b[0]) + std::abs(b[1]) + std::abs(b[2]) < 1e-14);
        CHECK(b[3] == doctest::Approx(-1.0 / (2 * kKappa)).epsilon(1e-13));
    }
}

TEST_CASE("minimum sample count and dependent bases") {
    CHECK_THROWS_AS(structure_constants(minkowski_set7(kGamma), sample_points(1u, 19)), std::invalid_argument);
    GeneratorSet dup = minkowski_set7(kGamma);
    dup.basis.push_back(dup.basis[0]);
    dup.basis.back().label = "copy";
    CHECK_THROWS_AS(structure_constants(dup, kPoints), DependentBasis);
}

TEST_CASE("non-closure is flagged") {
    GeneratorSet s = minkowski_set9(kGamma);
    s.basis.erase(s.basis.begin() + 7);  // drop D~, which [H~, K~] needs
    const auto t = structure_constants(s, kPoints);
    CHECK_FALSE(t.closed);
    CHECK_THROWS_AS(structure_constants(s, kPoints, 1e-8, true), NonClosure);
}

TEST_CASE("Bargmann table of the flat 7-set") {
    const auto t = structure_constants(minkowski_set7(kGamma), kPoints);
    check_antisym_jacobi(t);
    const auto cmp = compare_tables(t, extended_galilei_reference());
    CHECK(cmp.matches());
    CHECK(cmp.max_deviation < 1e-8);
    CHECK(t.coefficient("P~1", "G~1", "N") == doctest::Approx(-1.0));
    CHECK(t.coefficient("P~2", "G~2", "N") == doctest::Approx(-1.0));
    CHECK(std::abs(t.coefficient("P~1", "G~2", "N")) < 1e-12);
}

TEST_CASE("metric B 7-set against the printed table") {
    const auto t = structure_constants(theorem2_set(kKappa, kGamma), kPoints);
    check_antisym_jacobi(t);
    const auto ref = theorem2_reference(kKappa);
    CHECK(t.coefficient("P^1", "P^2", "N") == doctest::Approx(-1.0 / (2 * kKappa)));
    CHECK(t.coefficient("P^1", "G1", "N") == doctest::Approx(1.0));
    CHECK(t.coefficient("P^2", "G2", "N") == doctest::Approx(1.0));
    const auto cmp = compare_tables(t, ref);
    // Only [H^, G_i] differs: the printed table violates Jacobi.
    REQUIRE(cmp.mismatches.size() == 2);
    for (const auto& m : cmp.mismatches) {
        CHECK(m.i == "H^");
        CHECK(m.expected == 0.0);
        CHECK(std::abs(std::abs(m.measured) - 1.0 / (2 * kKappa)) < 1e-10);
    }
    CHECK(jacobi_residual(ref) == doctest::Approx(1.0 / (2 * kKappa)));
    CHECK(t.coefficient("H^", "G1", "P^1") == doctest::Approx(1.0));
    CHECK(t.coefficient("H^", "G1", "G2") == doctest::Approx(-1.0 / (2 * kKappa)));
    CHECK(t.coefficient("H^", "G2", "G1") == doctest::Approx(1.0 / (2 * kKappa)));
}

TEST_CASE("[H^, G1] by finite differences in t") {
    // H^ = -d_t, so [H^, G1] = -d_t G1.
    const auto s = theorem2_set(kKappa, kGamma);
    const auto& G1 = s.find("G1");
    const auto& G2 = s.find("G2");
    const auto& P1 = s.find("P^1");
    const double h = 1e-4, w = 1.0 / (4 * kKappa);
    for (const auto& p : kPoints) {
        Point4 a = p, b = p;
        a[0] += h;
        b[0] -= h;
        const Point4 ga = G1.at(a), gb = G1.at(b), p1 = P1.at(p), g2 = G2.at(p);
        for (int m = 0; m < 4; ++m) {
            const double fd = -(ga[m] - gb[m]) / (2 * h);
            CHECK(fd == doctest::Approx(p1[m] - 2 * w * g2[m]).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("hidden 9-set reproduces the Schroedinger table") {
    const auto t = structure_constants(hidden_set9(kKappa, kGamma), kPoints);
    check_antisym_jacobi(t);
    CHECK(compare_tables(t, schrodinger_reference(kGamma)).matches());
    const auto printed = compare_tables(t, schrodinger_reference(kGamma, true));
    CHECK(printed.mismatches.size() == 2);
    CHECK(jacobi_residual(schrodinger_reference(kGamma, true)) > 1.0);
    CHECK(jacobi_residual(schrodinger_reference(kGamma)) == 0.0);
    // Hidden translations commute, unlike the lifted ones.
    CHECK(std::abs(t.coefficient("hP1", "hP2", "N")) < 1e-12);
}

TEST_CASE("export functor: hidden and exported 9-sets share structure constants") {
    const auto a = structure_constants(hidden_set9(kKappa, kGamma), kPoints);
    const auto b = structure_constants(exported_set9(kGamma), kPoints);
    CHECK(compare_tables(a, b, 1e-10).matches());
}

TEST_CASE("projection loses the central extension") {
    const auto t = structure_constants(project_to_spacetime(theorem2_set(kKappa, kGamma)), kPoints);
    check_antisym_jacobi(t);
    CHECK(t.size() == 6);
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(std::abs(t.coefficient("P^1", "P^2", t.labels[k])) < 1e-12);
        CHECK(std::abs(t.coefficient("P^1", "G1", t.labels[k])) < 1e-12);
    }
    const auto g = structure_constants(project_to_spacetime(minkowski_set7(kGamma)), kPoints);
    check_antisym_jacobi(g);
    CHECK(std::abs(g.coefficient("P~1", "G~1", "P~1")) < 1e-12);
}

TEST_CASE("moving frame set still closes") {
    const auto t = structure_constants(theorem2_set(kKappa, kGamma, TransportCurrent::from(kGamma, {0.4, -0.25})), kPoints);
    check_antisym_jacobi(t);
    CHECK(t.coefficient("P^1", "P^2", "N") == doctest::Approx(-1.0 / (2 * kKappa)));
    CHECK(t.coefficient("P^1", "G1", "N") == doctest::Approx(1.0));
}

TEST_CASE("snapping") {
    const auto grid = snap_grid(kKappa, kGamma);
    const SnapValue s = snap(-1.0 / (2 * kKappa) + 3e-12, grid);
    CHECK(s.label == "-1/2kappa");
    CHECK(s.distance == doctest::Approx(3e-12).epsilon(1e-3));
    CHECK(snap(1e-15, grid).label == "0");
    double md = 1.0;
    const auto t = structure_constants(theorem2_set(kKappa, kGamma), kPoints);
    const auto sn = snapped(t, grid, &md);
    CHECK(md < 1e-8);
    CHECK(sn.coefficient("P^1", "P^2", "N") == -1.0 / (2 * kKappa));
}

TEST_CASE("obstruction") {
    const auto a = obstruction_check(0.5, 1.0);
    CHECK(a.b_ext == doctest::Approx(1.0));
    CHECK(a.field_strength == doctest::Approx(-1.0));
    CHECK(a.coefficient == doctest::Approx(-1.0));
    CHECK(a.obstructed());
    const auto b = obstruction_check(1.0, 2.0);
    CHECK(b.sweep.size() == 9);
    for (const auto& s : b.sweep) {
        CHECK(s.coefficient == doctest::Approx(-0.5).epsilon(1e-13));
        CHECK(s.off_central < 1e-13);
    }
    CHECK(b.sweep_spread == 0.0);
    CHECK(b.flat_coefficient == 0.0);
    // The bracket is F(P_1, P_2)/gamma N.
    const auto c = obstruction_check(kKappa, kGamma, {0.4, -0.25});
    CHECK(c.coefficient == doctest::Approx(c.field_strength / kGamma));
}

TEST_CASE("csv and text export") {
    const auto t = structure_constants(minkowski_set7(kGamma), kPoints);
    const std::string csv = table_csv(t);
    CHECK(csv.rfind("i,j,k,c,residual\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : csv) lines += ch == '\n';
    CHECK(lines == 1 + 7 * 7 * 7);
    CHECK(csv.find("P~1,G~1,N,-1") != std::string::npos);
    const std::string txt = table_text(t, snap_grid(kKappa, kGamma));
    CHECK(txt.find("[P~1, G~1] = -N") != std::string::npos);
    CHECK(txt.find("[G~1, H~]  = P~1") != std::string::npos);
}
