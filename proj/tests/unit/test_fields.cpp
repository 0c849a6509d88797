#include "doctest.h"

#include <cmath>

#include "manton/fields.hpp"

using namespace manton;

namespace {
constexpr double kKappa = 0.7;
constexpr double kGamma = 1.3;
const TransportCurrent kMoving = TransportCurrent::from(kGamma, {0.4, -0.25});

double killing(const MetricSpec& m, const VectorField4& X, const std::vector<Point4>& pts) {
    double r = 0.0;
    for (const auto& p : pts) r = std::max(r, lie_derivative_metric(m, X.eval, p).max_abs());
    return r;
}

double max_diff(const Point4& a, const Point4& b) {
    double r = 0.0;
    for (int i = 0; i < 4; ++i) r = std::max(r, std::abs(a[i] - b[i]));
    return r;
}

std::vector<Point4> guarded_points(double kappa, unsigned seed, std::size_t n) {
    const double w = 1.0 / (4.0 * kappa);
    return sample_points(seed, n, 2.0, [w](const Point4& p) { return std::abs(std::cos(w * p[0])) > 0.1; });
}
}  // namespace

TEST_CASE("flat Schroedinger generators match the three-row form") {
    GeneratorParams v;
    v.eta = 1.0;
    CHECK(schrodinger_generator(SchKind::vertical, v).at({0.3, 1, 2, 4}) == Point4{0, 0, 0, 1});
    GeneratorParams b;
    b.beta = {1, 0};
    CHECK(schrodinger_generator(SchKind::boost, b).at({0.5, 1.5, -2, 0.1}) == Point4{0, 0.5, 0, -1.5});
    GeneratorParams k;
    k.chi = 1.0;
    CHECK(schrodinger_generator(SchKind::expansion, k).at({1, 0, 0, 0}) == Point4{-1, 0, 0, 0});
    GeneratorParams bad;
    bad.delta = {1, 0};
    CHECK_THROWS_AS(schrodinger_generator(SchKind::rotation, bad), ArityError);
}

TEST_CASE("flat catalog: 9 conformal, 7 Killing") {
    auto pts = sample_points(2u, 40);
    GeneratorSet s9 = minkowski_set9(kGamma);
    classify(s9, pts);
    int kill = 0;
    for (const auto& X : s9.basis) {
        CHECK(X.tag != Tag::neither);
        if (X.tag == Tag::killing) ++kill;
    }
    CHECK(kill == 7);
    CHECK(s9.find("K~").tag == Tag::conformal);
    CHECK(s9.find("D~").tag == Tag::conformal);
}

TEST_CASE("hidden generator examples") {
    GeneratorParams r;
    r.omega_rot = 1.0;
    CHECK(max_diff(hidden_generator(HiddenKind::h_rotation, r, kKappa, kGamma).at({0, 1, 0, 0}), {0, 0, 1, 0}) < 1e-15);
    GeneratorParams v;
    v.eta = 2.5;
    CHECK(hidden_generator(HiddenKind::vertical, v, kKappa, kGamma).at({0.3, 1, 1, 1}) == Point4{0, 0, 0, 2.5});
    GeneratorParams g;
    g.Gamma = {1, 0};
    // On metric B the s-component at t = 0 is +Gamma.J/gamma; its time-reversed
    // (Manton) image carries -Gamma.J/gamma.
    const Point4 p{0.0, 0.8, -0.6, 0.2};
    const auto P = hidden_generator(HiddenKind::h_translation, g, kKappa, kGamma, kMoving);
    CHECK(max_diff(P.at(p), {0, 1, 0, 0.4 / kGamma}) < 1e-14);
    CHECK(max_diff(time_reverse(P).at(p), {0, 1, 0, -0.4 / kGamma}) < 1e-14);
    GeneratorParams h;
    h.eps = 1.0;
    CHECK_THROWS_AS(hidden_generator(HiddenKind::h_time, h, kKappa, kGamma, kMoving), RestFrameError);
    CHECK_THROWS_AS(hidden_generator(HiddenKind::h_boost, r, kKappa, kGamma), ArityError);
}

TEST_CASE("theorem-2 generators are Killing on metric B, rest frame and moving") {
    const auto pts = sample_points(3u, 100);
    for (const auto& jT : {TransportCurrent::from(kGamma, {0, 0}), kMoving}) {
        GeneratorSet s = theorem2_set(kKappa, kGamma, jT);
        classify(s, pts);
        for (const auto& X : s.basis) {
            INFO(X.label);
            CHECK(X.killing_residual < 1e-9);
        }
    }
}

TEST_CASE("hidden conformal generators and the time-translation combination") {
    const auto pts = guarded_points(kKappa, 4u, 100);
    GeneratorSet s = hidden_set9(kKappa, kGamma);
    classify(s, pts);
    for (const char* name : {"hH", "hK", "hD"}) {
        INFO(name);
        CHECK(s.find(name).tag == Tag::conformal);
        CHECK(s.find(name).conformal_factor_rms > 1e-3);
    }
    for (const char* name : {"hP1", "hP2", "hG1", "hG2", "hR", "N"}) CHECK(s.find(name).tag == Tag::killing);
    for (double sign : {1.0, -1.0}) CHECK(killing(s.metric, hidden_time_combination(kKappa, kGamma, sign), pts) < 1e-9);
    // With the + sign it is gamma times the lifted time translation.
    const auto combo = hidden_time_combination(kKappa, kGamma, 1.0);
    const auto H = good_lift_time(kGamma, kGamma);
    for (const auto& p : pts) CHECK(max_diff(combo.at(p), H.at(p)) < 1e-12);
}

TEST_CASE("translation lift is a hidden translation plus a hidden boost") {
    const auto pts = sample_points(5u, 50);
    for (const auto& jT : {TransportCurrent::from(kGamma, {0, 0}), kMoving}) {
        for (int i = 0; i < 2; ++i) {
            GeneratorParams g, b;
            g.Gamma[i] = 1.0;
            // (gamma/4kappa) eps_ij G_j
            const int j = 1 - i;
            b.beta[j] = (i == 0 ? 1.0 : -1.0) * kGamma / (4 * kKappa);
            const auto hp = hidden_generator(HiddenKind::h_translation, g, kKappa, kGamma, jT);
            const auto hb = hidden_generator(HiddenKind::h_boost, b, kKappa, kGamma, jT);
            std::array<double, 2> delta{0, 0};
            delta[i] = 1.0;
            const auto P = good_lift_translation(delta, kKappa, kGamma, jT, Orientation::metric_b);
            for (const auto& p : pts) {
                const Point4 a = hp.at(p), c = hb.at(p);
                CHECK(max_diff({a[0] + c[0], a[1] + c[1], a[2] + c[2], a[3] + c[3]}, P.at(p)) < 1e-12);
            }
        }
    }
}

TEST_CASE("good lifts on the Manton background") {
    const auto pts = sample_points(6u, 100);
    const auto P = good_lift_translation({1, 0}, kKappa, kGamma);
    const Point4 v = P.at({0, 0, 1, 0});
    CHECK(v[3] == doctest::Approx(-1.0 / (4 * kKappa)));
    for (const auto& jT : {TransportCurrent::from(kGamma, {0, 0}), kMoving}) {
        const MetricSpec m = MetricSpec::manton(kKappa, kGamma, jT.j_vec);
        CHECK(killing(m, good_lift_translation({1, 0}, kKappa, kGamma, jT), pts) < 1e-9);
        CHECK(killing(m, good_lift_translation({0.3, -2}, kKappa, kGamma, jT), pts) < 1e-9);
        CHECK(killing(m, good_lift_time(1.0, kGamma, jT), pts) < 1e-9);
        GeneratorParams r;
        r.omega_rot = 1.0;
        CHECK(killing(m, time_reverse(hidden_generator(HiddenKind::h_rotation, r, kKappa, kGamma, jT)), pts) < 1e-9);
    }
    CHECK(good_lift_time(2.0, kGamma, kMoving).at({0, 0, 0, 0})[3] ==
          doctest::Approx(-0.5 * 2.0 * (0.16 + 0.0625) / (kGamma * kGamma)));
}

TEST_CASE("export/import map") {
    const double B = kGamma / (2 * kKappa);
    const auto map0 = export_import_map(kGamma, B, {0, 0});
    const Point4 p0{0.0, 0.4, -1.1, 0.3};
    CHECK(max_diff(map_point(map0, p0), p0) < 1e-15);
    CHECK_THROWS_AS(export_import_map(kGamma, 0.0, {0, 0}), std::invalid_argument);
    const MetricSpec flat = MetricSpec::minkowski(kGamma);
    for (const auto& E : {std::array<double, 2>{0, 0}, std::array<double, 2>{0.3, -0.45}}) {
        const auto map = export_import_map(kGamma, B, E);
        const MetricSpec mb = MetricSpec::metric_b(B, E, kGamma);
        for (const auto& p : guarded_points(kKappa, 8u, 60)) {
            const ConformalFit f = fit_conformal(pullback_metric(map, flat, p), metric_at(mb, p));
            CHECK(f.spread < 1e-9);
            const double c = std::cos(B / (2 * kGamma) * p[0]);
            CHECK(f.factor == doctest::Approx(1.0 / (c * c)).epsilon(1e-12));
            const auto J = jacobian_at(map, p);
            for (int a = 0; a < 4; ++a) CHECK(std::abs(J[a][3] - (a == 3 ? 1.0 : 0.0)) < 1e-14);
        }
    }
    const double tsing = M_PI / 2 * 4 * kKappa;
    CHECK_THROWS_AS(map_point(map0, {tsing, 0, 0, 0}), DomainError);
}

TEST_CASE("hidden generators export to their flat counterparts") {
    struct Case { HiddenKind k; GeneratorParams q; bool moving_ok; };
    std::vector<Case> cases;
    GeneratorParams q;
    q.Gamma = {0.7, -1.2}; cases.push_back({HiddenKind::h_translation, q, true}); q = {};
    q.beta = {-0.4, 0.9}; cases.push_back({HiddenKind::h_boost, q, true}); q = {};
    q.omega_rot = 1.3; cases.push_back({HiddenKind::h_rotation, q, true}); q = {};
    q.eta = 0.6; cases.push_back({HiddenKind::vertical, q, true}); q = {};
    q.eps = 1.1; cases.push_back({HiddenKind::h_time, q, false}); q = {};
    q.chi = 0.8; cases.push_back({HiddenKind::h_expansion, q, false}); q = {};
    q.rho_dil = -0.5; cases.push_back({HiddenKind::h_dilatation, q, false});
    for (const auto& jT : {TransportCurrent::from(kGamma, {0, 0}), kMoving}) {
        const auto map = export_import_map_transport(kKappa, kGamma, jT.j_vec);
        const bool moving = jT.j_vec[0] != 0.0;
        for (const auto& c : cases) {
            if (moving && !c.moving_ok) continue;
            const auto X = hidden_generator(c.k, c.q, kKappa, kGamma, jT);
            const auto Y = minkowski_counterpart(c.k, c.q, kGamma);
            for (const auto& p : guarded_points(kKappa, 12u, 40)) {
                INFO(X.label);
                const Point4 img = map_point(map, p);
                CHECK(max_diff(pushforward_vector(map, X.eval, p), Y.at(img)) < 1e-8 * (1 + std::abs(img[0])));
            }
        }
    }
}

TEST_CASE("every cataloged generator commutes with xi") {
    const FieldFn xi = [](const JVec&) { return JVec{Jet(0.0), Jet(0.0), Jet(0.0), Jet(1.0)}; };
    const auto pts = guarded_points(kKappa, 13u, 20);
    for (const auto& set : {theorem2_set(kKappa, kGamma, kMoving), hidden_set9(kKappa, kGamma), minkowski_set9(kGamma)})
        for (const auto& X : set.basis)
            for (const auto& p : pts) {
                const Point4 b = lie_bracket(X.eval, xi, p);
                CHECK(max_diff(b, {0, 0, 0, 0}) == 0.0);
            }
}

TEST_CASE("symmetry response and lifts") {
    const auto pts = sample_points(14u, 30);
    const MetricSpec m = MetricSpec::manton(kKappa, kGamma, kMoving.j_vec);
    const auto J = kMoving.j_vec;
    const double C1 = -J[0];
    const Response r = symmetry_response(spacetime_translation({1, 0}), m, C1);
    const auto lift = lift_from_spacetime(spacetime_translation({1, 0}), m, r);
    const auto good = good_lift_translation({1, 0}, kKappa, kGamma, kMoving);
    for (const auto& p : pts) {
        const double t = p[0], x2 = p[2];
        const JVec x = seed(p);
        const double ups = val(r.upsilon(x));
        CHECK(ups == doctest::Approx(-(kGamma * x2 - t * J[1]) / (2 * kKappa) + C1).epsilon(1e-12));
        CHECK(max_diff(lift.at(p), good.at(p)) < 1e-12);
        CHECK(upsilon_of_lift(m, lift, p) == doctest::Approx(ups).epsilon(1e-12));
        // d_t Upsilon = (X cross J)/2kappa for a translation.
        CHECK(d1(r.upsilon(x), 0) == doctest::Approx(J[1] / (2 * kKappa)));
    }
    CHECK(killing(m, lift, pts) < 1e-9);

    const Response flat = symmetry_response(spacetime_rotation(1.0), MetricSpec::minkowski(kGamma), 0.25);
    for (const auto& p : pts) CHECK(val(flat.upsilon(seed(p))) == doctest::Approx(0.25));

    const Response vert = symmetry_response(spacetime_zero(), m, 1.5);
    const auto N = lift_from_spacetime(spacetime_zero(), m, vert);
    CHECK(max_diff(N.at({0.3, 0.2, 0.1, 0}), {0, 0, 0, 1.5 / kGamma}) < 1e-15);

    // Rotations are only symmetries of the rest-frame background.
    CHECK_THROWS_AS(symmetry_response(spacetime_rotation(1.0), m), NotASymmetry);
    const MetricSpec m0 = MetricSpec::manton(kKappa, kGamma, {0, 0});
    const Response rr = symmetry_response(spacetime_rotation(1.0), m0, 0.0);
    GeneratorParams rp;
    rp.omega_rot = 1.0;
    const auto R0 = time_reverse(hidden_generator(HiddenKind::h_rotation, rp, kKappa, kGamma));
    const auto Rl = lift_from_spacetime(spacetime_rotation(1.0), m0, rr);
    for (const auto& p : pts) CHECK(max_diff(Rl.at(p), R0.at(p)) < 1e-12);
    // Bracket rule: [P^_1, R^] = P^_2 fixes the constant of P^_2 (zero at rest).
    const auto P1 = good_lift_translation({1, 0}, kKappa, kGamma);
    CHECK(std::abs(bracket_fixed_constant_p2(P1, Rl, m0, {0.4, 0.3, -0.2, 0})) < 1e-12);
}

TEST_CASE("transport form of the symmetry condition on metric B") {
    const MetricSpec mb = MetricSpec::metric_b_transport(kKappa, kGamma, kMoving.j_vec);
    const auto J = kMoving.j_vec;
    for (const auto& d : {std::array<double, 2>{1, 0}, std::array<double, 2>{0, 1}}) {
        const Response r = symmetry_response(spacetime_translation(d), mb);
        for (const auto& p : sample_points(15u, 10)) {
            const Jet u = r.upsilon(seed(p));
            const double cross = d[0] * J[1] - d[1] * J[0];
            CHECK(2 * kKappa * d1(u, 0) == doctest::Approx(cross));
            // eps_ij (X^t J^j - X^j gamma)
            CHECK(2 * kKappa * d1(u, 1) == doctest::Approx(-d[1] * kGamma));
            CHECK(2 * kKappa * d1(u, 2) == doctest::Approx(d[0] * kGamma));
        }
    }
}
