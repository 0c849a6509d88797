#include <doctest.h>

#include <cmath>
#include <random>

#include "manton/charges.hpp"

using namespace manton;

namespace {

Grid2 grid(int n = 64, double L = 16.0, double dt = 0.0) {
    Grid2 g;
    g.n1 = g.n2 = n;
    g.L1 = g.L2 = L;
    g.dt = dt;
    return g;
}

ModelParams params(std::array<double, 2> J = {0.0, 0.0}) {
    ModelParams p;
    p.gamma = 1.3;
    p.lam = 0.9;
    p.kappa = 0.6;
    p.jT = TransportCurrent::from(p.gamma, J);
    return p;
}

AnsatzSpec two_dips() {
    AnsatzSpec a;
    a.kind = Ansatz::gaussian_dip;
    a.dips = {Dip{0.4, {1.0, -0.5}, {1.2, 0.8}, 0.3}, Dip{0.3, {-1.5, 1.0}, {0.9, 1.1}, 0.0}};
    return a;
}

AnsatzSpec round_dip(double depth = 0.5, double w = 1.0) {
    AnsatzSpec a;
    a.kind = Ansatz::gaussian_dip;
    a.dips = {Dip{depth, {0.0, 0.0}, {w, w}, 0.0}};
    return a;
}

}  // namespace

TEST_CASE("vacuum carries no charge") {
    const Grid2 g = grid(32, 12.0);
    for (auto J : {std::array<double, 2>{0.0, 0.0}, std::array<double, 2>{0.3, -0.2}}) {
        const ModelParams p = params(J);
        const FieldState s = init_state(g, p, AnsatzSpec{});
        const ChargeReport r = charges(s, p, g, false);
        CHECK(std::abs(r.n) < 1e-12);
        CHECK(std::abs(r.p[0]) < 1e-12);
        CHECK(std::abs(r.p[1]) < 1e-12);
        CHECK(std::abs(r.h) < 1e-12);
        CHECK(std::abs(r.m) < 1e-12);
        CHECK(support_fraction(s, p, g) == 0.0);
    }
}

TEST_CASE("particle number of a round dip") {
    // rho = (1 - d e^{-r^2/w^2})^2 integrates to pi w^2 (2d - d^2/2) on the plane
    const Grid2 g = grid(64, 20.0);
    const ModelParams p = params();
    for (double d : {0.2, 0.5, 0.8})
        for (double w : {0.8, 1.3}) {
            const FieldState s = init_state(g, p, round_dip(d, w));
            const double exact = p.gamma * p.gamma * M_PI * w * w * (2 * d - 0.5 * d * d);
            CHECK(charge_n(s, p, g) == doctest::Approx(exact).epsilon(1e-12));
        }
}

TEST_CASE("both forms of n agree along a run") {
    const Grid2 g = grid(64, 16.0);
    const ModelParams p = params({0.3, -0.2});
    FieldState s = init_state(g, p, two_dips());
    for (int k = 0; k <= 20; ++k) {
        const ParticleNumber n = charge_n_forms(s, p, g);
        CHECK(std::abs(n.difference()) < 1e-10);
        // the printed second form misses a factor (2 kappa)^2
        CHECK(n.printed_flux_form == doctest::Approx(n.flux_form / (4 * p.kappa * p.kappa)).epsilon(1e-13));
        s = step(s, p, g);
    }
}

TEST_CASE("n is conserved by the unitary evolution") {
    const Grid2 g = grid(64, 16.0, 0.01);
    const ModelParams p = params({0.3, -0.2});
    FieldState s = init_state(g, p, two_dips());
    const double n0 = charge_n(s, p, g);
    for (int k = 0; k < 100; ++k) s = step(s, p, g);
    CHECK(std::abs(charge_n(s, p, g) - n0) < 1e-10 * n0);
}

TEST_CASE("mirror-symmetric data has p = 0") {
    const Grid2 g = grid(64, 16.0);
    const ModelParams p = params();
    AnsatzSpec a = round_dip();
    a.dips[0].width = {1.4, 0.9};
    const FieldState s = init_state(g, p, a);
    const ChargeReport r = charges(s, p, g, false);
    CHECK(std::abs(r.p[0]) < 1e-12);
    CHECK(std::abs(r.p[1]) < 1e-12);
}

TEST_CASE("matter term of m for real Phi") {
    // with Phi real the current is -rho a, so the term is -gamma int rho (x cross a)
    const Grid2 g = grid(64, 16.0);
    const ModelParams p = params();
    FieldState s = init_state(g, p, two_dips());
    ChargeParts parts;
    charge_m(s, p, g, &parts);
    const Derived2 d = solve_constraints(s, p, g);
    double q = 0.0;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t m = static_cast<std::size_t>(i) * g.n2 + j;
            q -= d.rho[m] * (g.x1(i) * s.a2[m] - g.x2(j) * s.a1[m]);
        }
    q *= p.gamma * g.cell();
    CHECK(parts.matter_term == doctest::Approx(q).epsilon(1e-12));
    CHECK(std::abs(parts.matter_term) > 1e-3);
}

TEST_CASE("energy is nonnegative without transport current") {
    const Grid2 g = grid(32, 12.0);
    const ModelParams p = params();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        AnsatzSpec a;
        a.kind = Ansatz::gaussian_dip;
        a.dips = {Dip{0.3 + 0.15 * u(rng), {2 * u(rng), 2 * u(rng)}, {1.0 + 0.3 * u(rng), 1.0 + 0.3 * u(rng)}, u(rng)},
                  Dip{0.2 + 0.1 * u(rng), {2 * u(rng), 2 * u(rng)}, {0.9, 1.2}, 0.0}};
        a.kick = {2 * M_PI / 12.0 * std::round(2 * u(rng)), 0.0};
        const FieldState s = init_state(g, p, a);
        ChargeParts parts;
        const double h = charge_h(s, p, g, &parts);
        CHECK(h > 0.0);
        CHECK(parts.upsilon_term == 0.0);
    }
}

TEST_CASE("parts add up and the n split is all flux") {
    const Grid2 g = grid(64, 16.0);
    const ModelParams p = params({0.3, -0.2});
    FieldState s = init_state(g, p, two_dips());
    s = step(s, p, g);
    const ChargeReport r = charges(s, p, g, false);
    CHECK(r.parts_n.matter_term == 0.0);
    CHECK(r.parts_n.upsilon_term == doctest::Approx(r.n_flux_form).epsilon(1e-15));
    CHECK(r.parts_h.total() == doctest::Approx(r.h).epsilon(1e-15));
    CHECK(r.parts_m.total() == doctest::Approx(r.m).epsilon(1e-15));
    CHECK(r.parts_p[0].total() == doctest::Approx(r.p[0]).epsilon(1e-15));
    CHECK(r.parts_p[1].total() == doctest::Approx(r.p[1]).epsilon(1e-15));
    CHECK(charge_h(s, p, g) == doctest::Approx(r.h).epsilon(1e-15));
    const auto pp = charge_p(s, p, g);
    CHECK(pp[0] == doctest::Approx(r.p[0]).epsilon(1e-15));
}

TEST_CASE("Noether charges match the closed forms") {
    const Grid2 g = grid(64, 16.0);
    for (auto J : {std::array<double, 2>{0.0, 0.0}, std::array<double, 2>{0.3, -0.2}}) {
        const ModelParams p = params(J);
        FieldState s = init_state(g, p, two_dips());
        for (int k = 0; k < 3; ++k) s = step(s, p, g);
        const ChargeReport r = charges(s, p, g, false);
        const double closed[] = {-r.n, r.p[0], r.p[1], r.h, r.m};
        int idx = 0;
        for (auto k : {ChargeKind::n, ChargeKind::p1, ChargeKind::p2, ChargeKind::h, ChargeKind::m}) {
            CAPTURE(charge_kind_name(k));
            CAPTURE(J[0]);
            const NoetherCharge q = noether_charge(s, charge_lift(k, p), p, g);
            CHECK(std::abs(q.total - closed[idx]) < 1e-8 * std::max(1.0, std::abs(closed[idx])));
            CHECK(q.parts.total() == doctest::Approx(q.total).epsilon(1e-14));
            ++idx;
        }
    }
}

TEST_CASE("printed potential term only shifts h") {
    // the two potential terms differ by (lam/4) int (1 - 2 rho/3) on the time lift
    const Grid2 g = grid(64, 16.0);
    const ModelParams p = params();
    const FieldState s = init_state(g, p, two_dips());
    const Derived2 d = [&] {
        FieldState c = s;
        return solve_constraints(c, p, g);
    }();
    double shift = 0.0;
    for (double r : d.rho) shift += 1.0 - 2.0 * r / 3.0;
    shift *= p.lam / 4.0 * g.cell();
    const NoetherCharge h = noether_charge(s, charge_lift(ChargeKind::h, p), p, g);
    CHECK(h.total - h.printed_potential_total == doctest::Approx(shift).epsilon(1e-10));
    for (auto k : {ChargeKind::n, ChargeKind::p1, ChargeKind::m}) {
        const NoetherCharge q = noether_charge(s, charge_lift(k, p), p, g);
        CHECK(std::abs(q.total - q.printed_potential_total) < 1e-12);
    }
}

TEST_CASE("non-Killing lifts are rejected") {
    const Grid2 g = grid(32, 12.0);
    const ModelParams p = params();
    const FieldState s = init_state(g, p, two_dips());
    GeneratorParams q;
    q.chi = 1.0;
    const VectorField4 K = time_reverse(hidden_generator(HiddenKind::h_expansion, q, p.kappa, p.gamma));
    CHECK_THROWS_AS(noether_charge(s, K, p, g), NotKilling);
    q.chi = 0.0;
    q.rho_dil = 1.0;
    const VectorField4 D = time_reverse(hidden_generator(HiddenKind::h_dilatation, q, p.kappa, p.gamma));
    CHECK_THROWS_AS(noether_charge(s, D, p, g), NotKilling);
}

TEST_CASE("Upsilon factors are the curly brackets") {
    const Grid2 g = grid(16, 10.0);
    for (double t : {0.0, 0.37, 2.0}) {
        const ModelParams p0 = params();
        for (auto k : {ChargeKind::n, ChargeKind::p1, ChargeKind::p2, ChargeKind::h, ChargeKind::m})
            CHECK(upsilon_bracket_deviation(k, p0, g, t) < 1e-12);
        const ModelParams p = params({0.3, -0.2});
        for (auto k : {ChargeKind::n, ChargeKind::p1, ChargeKind::p2, ChargeKind::h})
            CHECK(upsilon_bracket_deviation(k, p, g, t) < 1e-12);
        // with a transport current the Killing m lift carries an extra (2 kappa/gamma) x cross J
        double xj = 0.0;
        for (int i = 0; i < g.n1; ++i)
            for (int j = 0; j < g.n2; ++j) xj = std::max(xj, 2 * 0.6 / 1.3 * std::abs(g.x1(i) * -0.2 - g.x2(j) * 0.3));
        CHECK(upsilon_bracket_deviation(ChargeKind::m, p, g, t) == doctest::Approx(xj).epsilon(1e-12));
    }
    const ModelParams p = params({0.3, -0.2});
    CHECK(upsilon_constant(ChargeKind::p1, p) == -0.3);
    CHECK(upsilon_constant(ChargeKind::h, p) == doctest::Approx(-(0.09 + 0.04) / (2 * 1.3)));
}

TEST_CASE("localized ansatz") {
    const Grid2 g = grid(128, 40.0);
    const ModelParams p = params();
    AnsatzSpec a;
    a.kind = Ansatz::localized;
    FieldState s = init_state(g, p, a);
    const Derived2 d = solve_constraints(s, p, g);
    CHECK(std::abs(integral(d.J1, g)) < 1e-12);
    CHECK(std::abs(integral(d.J2, g)) < 1e-12);
    CHECK(std::abs(integral(d.B, g)) < 1e-12);
    const ChargeReport r = charges(s, p, g, false);
    CHECK(std::abs(r.p[0]) > 1e-2);
    CHECK(support_fraction(s, p, g, 1e-3) < 0.5);
    ModelParams pa = params();
    pa.model_case = ModelCase::A;
    CHECK_THROWS_AS(init_state(g, pa, a), InvalidAnsatz);
    a.amplitude = 40.0;
    CHECK_THROWS_AS(init_state(g, p, a), InvalidAnsatz);
}

TEST_CASE("energy drift is second order in dt") {
    const ModelParams p = params();
    AnsatzSpec a;
    a.kind = Ansatz::localized;
    a.width = 1.2;
    double drift[2];
    for (int r = 0; r < 2; ++r) {
        const double dt = r == 0 ? 0.02 : 0.01;
        const Grid2 g = grid(64, 16.0, dt);
        FieldState s = init_state(g, p, a);
        const double h0 = charge_h(s, p, g);
        for (int k = 0; k < (r == 0 ? 25 : 50); ++k) s = step(s, p, g);
        drift[r] = std::abs(charge_h(s, p, g) - h0);
    }
    MESSAGE("energy drift ratio " << drift[0] / drift[1]);
    CHECK(drift[0] / drift[1] > 3.5);
    CHECK(drift[0] / drift[1] < 4.5);
}
