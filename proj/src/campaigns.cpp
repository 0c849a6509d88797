#include "manton/campaigns.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <memory>
#include <sstream>

#include "manton/algebra.hpp"
#include "manton/charges.hpp"

namespace manton {

bool CampaignResult::pass() const { return first_failure().empty(); }

std::string CampaignResult::first_failure() const {
    for (const auto& c : checks)
        if (!c.pass) return c.name;
    return "";
}

nlohmann::json CampaignResult::json(const ScenarioConfig& cfg) const {
    nlohmann::json j;
    j["campaign"] = campaign_name(campaign);
    j["config"] = config_json(cfg);
    j["pass"] = pass();
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) j["checks"].push_back(check_json(c));
    j["files"] = files;
    return j;
}

double relative_drift(double q, double q0, double floor) {
    const double d = std::abs(q - q0);
    return std::abs(q0) > floor ? d / std::abs(q0) : d;
}

namespace {

std::string out_path(const ScenarioConfig& c, const std::string& name) {
    return c.output_dir.empty() ? "" : c.output_dir + "/" + name;
}

void add(CampaignResult& r, const std::string& name, double value, double tol, bool pass, const std::string& detail = "") {
    r.checks.push_back(Check{name, value, tol, pass, detail});
}
void below(CampaignResult& r, const std::string& name, double value, double tol, const std::string& detail = "") {
    add(r, name, value, tol, std::isfinite(value) && value < tol, detail);
}

std::string checks_text(const CampaignResult& r) {
    std::ostringstream os;
    for (const auto& c : r.checks) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name << "  value=" << fmt17(c.value);
        if (c.tolerance > 0) os << " tol=" << c.tolerance;
        if (!c.detail.empty()) os << "  " << c.detail;
        os << "\n";
    }
    return os.str();
}

std::vector<Point4> guarded(double kappa, unsigned seed, std::size_t n) {
    const double w = 1.0 / (4.0 * kappa);
    return sample_points(seed, n, 2.0, [w](const Point4& p) { return std::abs(std::cos(w * p[0])) > 0.1; });
}

VectorField4 corrupted(const VectorField4& X) {
    VectorField4 out = X;
    const FieldFn f = X.eval;
    out.eval = [f](const JVec& x) {
        JVec v = f(x);
        v[3] = -v[3];
        return v;
    };
    out.label = X.label + " (s flipped)";
    return out;
}

const char* tag_text(Tag t) { return tag_name(t); }

}  // namespace

// ---- verify-geometry ----

CampaignResult run_verify_geometry(const ScenarioConfig& cfg) {
    CampaignResult r;
    r.campaign = Campaign::verify_geometry;
    const ModelParams& p = cfg.params;
    const auto pts = sample_points(cfg.seed, static_cast<std::size_t>(cfg.sample_count));
    const auto gpts = guarded(p.kappa, cfg.seed + 1, static_cast<std::size_t>(cfg.sample_count));
    const bool flat = cfg.metric == "minkowski";
    const MetricSpec metric =
        flat ? MetricSpec::minkowski(p.gamma) : MetricSpec::metric_b_transport(p.kappa, p.gamma, p.jT.j_vec);

    double R = 0.0, null = 0.0, dxi = 0.0;
    const FieldFn xi = [](const JVec&) { return JVec{Jet(0.0), Jet(0.0), Jet(0.0), Jet(1.0)}; };
    for (const auto& q : pts) {
        R = std::max(R, std::abs(curvature_scalar_at(metric, q)));
        null = std::max(null, std::abs(metric_at(metric, q)(3, 3)));
        dxi = std::max(dxi, covariant_derivative_at(metric, xi, q).max_abs());
    }
    below(r, "scalar curvature", R, 1e-9);
    below(r, "xi null", null, 1e-10);
    below(r, "xi covariantly constant", dxi, 1e-10);

    struct Row {
        VectorField4 X;
        Tag expected;
        bool factor_nonzero;
    };
    std::vector<Row> rows;
    if (flat) {
        GeneratorSet s = minkowski_set9(p.gamma);
        for (auto& X : s.basis) {
            if (X.label == cfg.corrupt) X = corrupted(X);
        }
        classify(s, pts);
        for (const auto& X : s.basis) {
            const bool conf_only = X.label == "K~" || X.label == "D~";
            rows.push_back({X, conf_only ? Tag::conformal : Tag::killing, conf_only});
        }
    } else {
        GeneratorSet s = theorem2_set(p.kappa, p.gamma, p.jT);
        for (auto& X : s.basis)
            if (X.label == cfg.corrupt) X = corrupted(X);
        classify(s, pts);
        for (const auto& X : s.basis) rows.push_back({X, Tag::killing, false});
        const bool rest = p.jT.j_vec[0] == 0.0 && p.jT.j_vec[1] == 0.0;
        if (rest) {
            GeneratorSet h = hidden_set9(p.kappa, p.gamma);
            GeneratorSet conf;
            conf.metric = h.metric;
            for (const char* name : {"hH", "hK", "hD"}) {
                VectorField4 X = h.find(name);
                if (X.label == cfg.corrupt) X = corrupted(X);
                conf.basis.push_back(X);
            }
            classify(conf, gpts);
            for (const auto& X : conf.basis) rows.push_back({X, Tag::conformal, X.label != "hH"});
            GeneratorSet combo;
            combo.metric = h.metric;
            combo.basis.push_back(hidden_time_combination(p.kappa, p.gamma, 1.0));
            combo.basis.back().label = "hH+(B/2)^2hK+(B/2)hR";
            classify(combo, gpts);
            rows.push_back({combo.basis[0], Tag::killing, false});
        } else {
            r.text += "note: hH, hK, hD exist only in the rest frame; conformal rows skipped\n";
        }
    }
    std::ostringstream tab;
    tab << std::left << std::setw(24) << "generator" << std::setw(14) << "expected" << std::setw(14) << "tag"
        << std::setw(26) << "killing_residual" << std::setw(26) << "conformal_spread" << "factor_rms\n";
    int nk = 0, nc = 0;
    for (const auto& row : rows) {
        const auto& X = row.X;
        bool ok = X.tag == row.expected;
        if (row.factor_nonzero) ok = ok && X.conformal_factor_rms > 1e-6;
        nk += X.tag == Tag::killing;
        nc += X.tag != Tag::neither;
        const double value = row.expected == Tag::killing ? X.killing_residual : X.conformal_spread;
        add(r, std::string(row.expected == Tag::killing ? "Killing " : "conformal-only ") + X.label, value, 1e-9, ok,
            std::string("tag=") + tag_text(X.tag) + " factor_rms=" + fmt17(X.conformal_factor_rms));
        tab << std::left << std::setw(24) << X.label << std::setw(14) << tag_text(row.expected) << std::setw(14)
            << tag_text(X.tag) << std::setw(26) << fmt17(X.killing_residual) << std::setw(26)
            << fmt17(X.conformal_spread) << fmt17(X.conformal_factor_rms) << "\n";
    }
    tab << "killing: " << nk << "  conformal (incl. killing): " << nc << "\n";
    r.text = tab.str() + r.text + checks_text(r);
    if (!cfg.output_dir.empty()) {
        write_text(out_path(cfg, "geometry.txt"), r.text);
        r.files.push_back(out_path(cfg, "geometry.txt"));
    }
    return r;
}

// ---- algebra-table ----

CampaignResult run_algebra_table(const ScenarioConfig& cfg) {
    CampaignResult r;
    r.campaign = Campaign::algebra_table;
    const ModelParams& p = cfg.params;
    GeneratorSet set;
    AlgebraTable ref;
    bool have_ref = true;
    std::vector<Point4> pts = sample_points(cfg.seed, static_cast<std::size_t>(std::max(cfg.sample_count, 30)));
    if (cfg.set == "theorem2") {
        set = theorem2_set(p.kappa, p.gamma, p.jT);
        ref = theorem2_reference(p.kappa);
    } else if (cfg.set == "hidden9") {
        set = hidden_set9(p.kappa, p.gamma);
        ref = schrodinger_reference(p.gamma);
        pts = guarded(p.kappa, cfg.seed, static_cast<std::size_t>(std::max(cfg.sample_count, 30)));
    } else if (cfg.set == "minkowski7") {
        set = minkowski_set7(p.gamma);
        ref = extended_galilei_reference();
    } else {
        set = minkowski_set9(p.gamma);
        have_ref = false;
    }
    const AlgebraTable t = structure_constants(set, pts);
    const auto grid = snap_grid(p.kappa, p.gamma);
    double snapd = 0.0;
    const AlgebraTable sn = snapped(t, grid, &snapd);
    add(r, "closure", t.max_residual(), 1e-8, t.closed && t.max_residual() < 1e-8);
    below(r, "snap distance", snapd, 1e-8);
    below(r, "jacobi", jacobi_residual(t), 1e-8);
    if (have_ref) {
        const TableComparison cmp = compare_tables(sn, ref);
        for (const auto& m : cmp.mismatches)
            add(r, "table [" + m.i + ", " + m.j + "] -> " + m.k, m.measured, 0.0, false,
                "expected " + fmt17(m.expected));
        add(r, "reference table", cmp.max_deviation, 1e-8, cmp.matches(),
            std::to_string(cmp.mismatches.size()) + " mismatching entries");
    }
    if (cfg.set == "theorem2") {
        const double c12 = t.coefficient("P^1", "P^2", "N");
        below(r, "[P^1, P^2] = -1/2kappa N", std::abs(c12 + 1.0 / (2 * p.kappa)), 1e-8, "raw " + fmt17(c12));
        for (int i = 1; i <= 2; ++i) {
            const std::string P = "P^" + std::to_string(i), G = "G" + std::to_string(i);
            const double c = t.coefficient(P, G, "N");
            below(r, "[" + P + ", " + G + "] = N", std::abs(c - 1.0), 1e-8, "raw " + fmt17(c));
        }
    }
    const ObstructionReport ob = obstruction_check(p.kappa, p.gamma, p.jT.j_vec);
    double worst = 0.0;
    for (const auto& s : ob.sweep) worst = std::max(worst, std::abs(s.coefficient - ob.coefficient));
    add(r, "obstruction sweep invariant", worst, 0.0, worst == 0.0 && ob.sweep_spread == 0.0,
        "coefficient " + fmt17(ob.coefficient) + " over " + std::to_string(ob.sweep.size()) + " constant pairs");
    below(r, "obstruction coefficient F12/gamma", std::abs(ob.coefficient - ob.field_strength / p.gamma), 1e-12);

    std::ostringstream os;
    os << table_text(t, grid) << "\nobstruction: [P^1, P^2] = " << fmt17(ob.coefficient) << " N, flat "
       << fmt17(ob.flat_coefficient) << "\n";
    r.text = os.str() + checks_text(r);
    if (!cfg.output_dir.empty()) {
        write_text(out_path(cfg, "table.csv"), "# " + config_json(cfg).dump() + "\n" + table_csv(t));
        write_text(out_path(cfg, "table.txt"), r.text);
        CsvWriter ob_csv(out_path(cfg, "obstruction.csv"), config_json(cfg), {"c1", "c2", "coefficient", "off_central"});
        for (const auto& s : ob.sweep) ob_csv.row({s.c1, s.c2, s.coefficient, s.off_central});
        r.files = {out_path(cfg, "table.csv"), out_path(cfg, "table.txt"), out_path(cfg, "obstruction.csv")};
    }
    return r;
}

// ---- map-check ----

CampaignResult run_map_check(const ScenarioConfig& cfg) {
    CampaignResult r;
    r.campaign = Campaign::map_check;
    const ModelParams& p = cfg.params;
    const auto J = p.jT.j_vec;
    const bool rest = J[0] == 0.0 && J[1] == 0.0;
    const auto map = export_import_map_transport(p.kappa, p.gamma, J);
    const MetricSpec flat = MetricSpec::minkowski(p.gamma);
    const MetricSpec mb = MetricSpec::metric_b_transport(p.kappa, p.gamma, J);
    const auto pts = guarded(p.kappa, cfg.seed, static_cast<std::size_t>(cfg.sample_count));
    const double omega = 1.0 / (4.0 * p.kappa);
    double spread = 0.0, fac = 0.0;
    for (const auto& q : pts) {
        const TensorValue g = metric_at(mb, q);
        const ConformalFit f = fit_conformal(pullback_metric(map, flat, q), g);
        spread = std::max(spread, f.spread / std::max(1.0, std::abs(f.factor)));
        const double c = std::cos(omega * q[0]);
        fac = std::max(fac, std::abs(f.factor * c * c - 1.0));
    }
    below(r, "pullback ratio spread", spread, 1e-9);
    below(r, "conformal factor 1/cos^2(t/4kappa)", fac, 1e-9);

    struct Case {
        HiddenKind k;
        GeneratorParams q;
        bool moving_ok;
        const char* name;
    };
    std::vector<Case> cases;
    GeneratorParams q;
    q.Gamma = {0.7, -1.2};
    cases.push_back({HiddenKind::h_translation, q, true, "hP"});
    q = {};
    q.beta = {-0.4, 0.9};
    cases.push_back({HiddenKind::h_boost, q, true, "hG"});
    q = {};
    q.omega_rot = 1.3;
    cases.push_back({HiddenKind::h_rotation, q, true, "hR"});
    q = {};
    q.eta = 0.6;
    cases.push_back({HiddenKind::vertical, q, true, "N"});
    q = {};
    q.eps = 1.1;
    cases.push_back({HiddenKind::h_time, q, false, "hH"});
    q = {};
    q.chi = 0.8;
    cases.push_back({HiddenKind::h_expansion, q, false, "hK"});
    q = {};
    q.rho_dil = -0.5;
    cases.push_back({HiddenKind::h_dilatation, q, false, "hD"});
    const TransportCurrent jT = TransportCurrent::from(p.gamma, J);
    for (const auto& c : cases) {
        if (!rest && !c.moving_ok) continue;
        const auto X = hidden_generator(c.k, c.q, p.kappa, p.gamma, jT);
        const auto Y = minkowski_counterpart(c.k, c.q, p.gamma);
        double dev = 0.0;
        for (const auto& pt : pts) {
            const Point4 img = map_point(map, pt);
            const Point4 a = pushforward_vector(map, X.eval, pt), b = Y.at(img);
            for (int m = 0; m < 4; ++m) dev = std::max(dev, std::abs(a[m] - b[m]) / (1.0 + std::abs(img[0])));
        }
        below(r, std::string("pushforward ") + c.name, dev, 1e-8);
    }
    r.text = checks_text(r);
    if (!cfg.output_dir.empty()) {
        CsvWriter csv(out_path(cfg, "map.csv"), config_json(cfg), {"t", "x1", "x2", "s", "factor", "spread"});
        for (const auto& pt : pts) {
            const ConformalFit f = fit_conformal(pullback_metric(map, flat, pt), metric_at(mb, pt));
            csv.row({pt[0], pt[1], pt[2], pt[3], f.factor, f.spread});
        }
        r.files.push_back(csv.path());
    }
    return r;
}

// ---- simulate / charges ----

namespace {

void write_snapshot(const ScenarioConfig& cfg, const FieldState& s, int k, CampaignResult& r) {
    FieldState c = s;
    const Derived2 d = solve_constraints(c, cfg.params, cfg.grid);
    char name[64];
    std::snprintf(name, sizeof name, "snapshots/snap_%06d.csv", k);
    nlohmann::json h = config_json(cfg);
    h["step"] = k;
    h["time"] = s.time;
    CsvWriter w(out_path(cfg, name), h, {"i", "j", "x1", "x2", "re_phi", "im_phi", "rho", "B", "a1", "a2", "E1", "E2"});
    const Grid2& g = cfg.grid;
    for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) {
            const std::size_t m = static_cast<std::size_t>(i) * g.n2 + j;
            w.row({double(i), double(j), g.x1(i), g.x2(j), c.phi[m].real(), c.phi[m].imag(), d.rho[m], d.B[m], c.a1[m],
                   c.a2[m], d.E1[m], d.E2[m]});
        }
    r.files.push_back(w.path());
}

double phi_distance(const FieldState& a, const FieldState& b, const Grid2& g) {
    CField d(a.phi.size());
    for (std::size_t m = 0; m < d.size(); ++m) d[m] = a.phi[m] - b.phi[m];
    return l2_norm(d, g);
}

}  // namespace

CampaignResult run_simulate(const ScenarioConfig& cfg) {
    CampaignResult r;
    r.campaign = cfg.campaign == Campaign::charges ? Campaign::charges : Campaign::simulate;
    const bool with_charges = r.campaign == Campaign::charges;
    const ModelParams& p = cfg.params;
    const Grid2& g = cfg.grid;
    const double dt = g.step();
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::string> cols = {"step", "time", "n", "relative_change", "faraday_residual", "gauss_residual",
                                     "coulomb_residual", "curl_residual", "krylov_iterations", "nls_residual"};
    if (cfg.order_check) cols.push_back("order");
    if (with_charges)
        for (const char* c : {"n_flux", "p1", "p2", "h", "m", "support", "drift_n", "drift_p", "drift_h", "drift_m"})
            cols.push_back(c);
    std::unique_ptr<CsvWriter> csv;
    if (!cfg.output_dir.empty()) {
        csv = std::make_unique<CsvWriter>(out_path(cfg, "trajectory.csv"), config_json(cfg), cols);
        r.files.push_back(csv->path());
    }

    FieldState prev = init_state(g, p, cfg.ansatz);
    // companions at dt/2 and dt/4 for the order column
    FieldState half = prev, quarter = prev;
    ChargeReport c0;
    if (with_charges) c0 = charges(prev, p, g, false);
    StepInfo info;
    FieldState cur = step(prev, p, g, &info);
    StepInfo info_cur = info;
    double max_gauss = 0, max_coulomb = 0, max_curl = 0, max_faraday = 0, max_nls = 0;
    double drift[4] = {0, 0, 0, 0};
    double last_order = NAN;
    int worst_support_step = -1;
    double worst_support = 0;

    auto row = [&](int k, const FieldState& s, const StepInfo& si, double nls) {
        FieldState c = s;
        const Derived2 d = solve_constraints(c, p, g);
        max_gauss = std::max(max_gauss, d.gauss_residual);
        max_coulomb = std::max(max_coulomb, d.coulomb_residual);
        max_curl = std::max(max_curl, d.curl_residual);
        max_faraday = std::max(max_faraday, si.faraday_residual);
        max_nls = std::max(max_nls, nls);
        std::vector<double> v = {double(k), s.time, charge_n(s, p, g), si.relative_change, si.faraday_residual,
                                 d.gauss_residual, d.coulomb_residual, d.curl_residual, double(si.krylov_iterations),
                                 nls};
        if (cfg.order_check) {
            double order = NAN;
            if (k > 0) {
                const double e1 = phi_distance(s, half, g), e2 = phi_distance(half, quarter, g);
                if (e2 > 0) order = std::log2(e1 / e2);
                last_order = order;
            }
            v.push_back(order);
        }
        if (with_charges) {
            const ChargeReport q = charges(s, p, g, false);
            const double dn = relative_drift(q.n, c0.n);
            const double dp = std::hypot(q.p[0] - c0.p[0], q.p[1] - c0.p[1]) /
                              (std::hypot(c0.p[0], c0.p[1]) > 1e-10 ? std::hypot(c0.p[0], c0.p[1]) : 1.0);
            const double dh = relative_drift(q.h, c0.h), dm = relative_drift(q.m, c0.m);
            drift[0] = std::max(drift[0], dn);
            drift[1] = std::max(drift[1], dp);
            drift[2] = std::max(drift[2], dh);
            drift[3] = std::max(drift[3], dm);
            if (q.support_fraction > worst_support) {
                worst_support = q.support_fraction;
                worst_support_step = k;
            }
            for (double x : {q.n_flux_form, q.p[0], q.p[1], q.h, q.m, q.support_fraction, dn, dp, dh, dm}) v.push_back(x);
        }
        if (csv) csv->row(v);
    };

    auto advance_companions = [&] {
        if (!cfg.order_check) return;
        for (int m = 0; m < 2; ++m) half = step(half, p, g, nullptr, dt / 2);
        for (int m = 0; m < 4; ++m) quarter = step(quarter, p, g, nullptr, dt / 4);
    };

    if (cfg.snapshot_every > 0) write_snapshot(cfg, prev, 0, r);
    advance_companions();
    for (int k = 1; k <= cfg.steps; ++k) {
        StepInfo ni;
        const FieldState next = step(cur, p, g, &ni);
        const double nls = nls_residual(prev, cur, next, p, g);
        if (k == 1) row(0, prev, StepInfo{}, nls);
        if (k % cfg.output_every == 0 || k == cfg.steps) row(k, cur, info_cur, nls);
        if (cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0) write_snapshot(cfg, cur, k, r);
        prev = cur;
        cur = next;
        info_cur = ni;
        advance_companions();
    }
    if (cfg.steps == 0) {
        const FieldState next = step(cur, p, g);
        row(0, prev, StepInfo{}, nls_residual(prev, cur, next, p, g));
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    below(r, "gauss residual", max_gauss, 1e-9);
    below(r, "curl residual", max_curl, 1e-9);
    below(r, "coulomb residual", max_coulomb, 1e-12);
    if (cfg.order_check) add(r, "convergence order", last_order, 1.9, last_order >= 1.9);
    if (with_charges) {
        // the final state is prev after the loop
        const FieldState& fin = prev;
        const ParticleNumber n = charge_n_forms(fin, p, g);
        below(r, "n two forms", std::abs(n.difference()), 1e-10);
        below(r, "drift n", drift[0], 1e-6, std::abs(c0.n) > 1e-10 ? "relative" : "absolute, n0 = 0");
        below(r, "drift p", drift[1], 1e-6);
        below(r, "drift h", drift[2], 1e-6);
        below(r, "drift m", drift[3], 1e-5);
        if (worst_support >= 0.5)
            r.text += "warning: field deviations reach " + fmt17(worst_support) + " of the half box at step " +
                      std::to_string(worst_support_step) + "; moment integrals are unreliable\n";
        const ChargeReport q = charges(fin, p, g, false);
        const double closed[] = {-q.n, q.p[0], q.p[1], q.h};
        int idx = 0;
        for (auto k : {ChargeKind::n, ChargeKind::p1, ChargeKind::p2, ChargeKind::h}) {
            const NoetherCharge nc = noether_charge(fin, charge_lift(k, p), p, g);
            below(r, std::string("noether ") + charge_kind_name(k),
                  std::abs(nc.total - closed[idx]) / std::max(1.0, std::abs(closed[idx])), 1e-8);
            ++idx;
        }
        for (auto k : {ChargeKind::p1, ChargeKind::p2, ChargeKind::h, ChargeKind::m})
            below(r, std::string("upsilon bracket ") + charge_kind_name(k), upsilon_bracket_deviation(k, p, g, fin.time),
                  1e-10);
    }
    std::ostringstream os;
    os << campaign_name(r.campaign) << ": " << cfg.steps << " steps of dt " << dt << " on " << g.n1 << "x" << g.n2
       << " in " << std::setprecision(3) << elapsed << " s; max nls residual " << fmt17(max_nls) << "\n";
    r.text = os.str() + r.text + checks_text(r);
    return r;
}

CampaignResult run_charges(const ScenarioConfig& cfg) {
    ScenarioConfig c = cfg;
    c.campaign = Campaign::charges;
    return run_simulate(c);
}

// ---- theorem1-test ----

CampaignResult run_theorem1_test(const ScenarioConfig& cfg) {
    CampaignResult r;
    r.campaign = Campaign::theorem1_test;
    const ModelParams& p = cfg.params;
    const Grid2& g = cfg.grid;
    FieldState s = init_state(g, p, cfg.ansatz);
    for (int k = 0; k < cfg.mid_steps; ++k) s = step(s, p, g);

    auto max_residual = [&](FieldState a) {
        FieldState b = step(a, p, g);
        double m = 0.0;
        for (int k = 0; k < cfg.steps; ++k) {
            FieldState c = step(b, p, g);
            m = std::max(m, nls_residual(a, b, c, p, g));
            a = std::move(b);
            b = std::move(c);
        }
        return m;
    };
    const double base = max_residual(s);
    add(r, "baseline residual", base, 0.0, std::isfinite(base));

    const GeneratorSet set = theorem2_set(p.kappa, p.gamma, p.jT);
    struct Iso {
        const char* label;
        double eps;
    };
    const Iso isos[] = {{"P^1", 0.37}, {"P^2", -0.61}, {"G1", 0.1}, {"G2", -0.07},
                        {"R", M_PI / 2}, {"H^", 2 * g.step()}, {"N", 0.7}};
    CsvWriter* csv = nullptr;
    std::unique_ptr<CsvWriter> w;
    if (!cfg.output_dir.empty()) {
        w = std::make_unique<CsvWriter>(out_path(cfg, "theorem1.csv"), config_json(cfg),
                                        std::vector<std::string>{"index", "eps", "max_residual", "baseline", "ratio"});
        csv = w.get();
        r.files.push_back(w->path());
    }
    int idx = 0;
    for (const auto& iso : isos) {
        try {
            const FieldState t = apply_symmetry(s, set.find(iso.label), iso.eps, p, g);
            const double m = max_residual(t);
            const double ratio = base > 0 ? m / base : (m == 0 ? 0.0 : INFINITY);
            add(r, std::string("isometry ") + iso.label, ratio, 10.0, std::isfinite(ratio) && ratio <= 10.0,
                "max residual " + fmt17(m) + " vs baseline " + fmt17(base));
            if (csv) csv->row({double(idx), iso.eps, m, base, ratio});
        } catch (const SymmetryError& e) {
            add(r, std::string("isometry ") + iso.label, NAN, 10.0, false, e.what());
        }
        ++idx;
    }
    r.text = checks_text(r);
    return r;
}

CampaignResult run_campaign(const ScenarioConfig& cfg) {
    CampaignResult r;
    switch (cfg.campaign) {
        case Campaign::verify_geometry: r = run_verify_geometry(cfg); break;
        case Campaign::algebra_table: r = run_algebra_table(cfg); break;
        case Campaign::map_check: r = run_map_check(cfg); break;
        case Campaign::simulate: r = run_simulate(cfg); break;
        case Campaign::charges: r = run_charges(cfg); break;
        case Campaign::theorem1_test: r = run_theorem1_test(cfg); break;
    }
    if (!cfg.output_dir.empty()) {
        write_json(out_path(cfg, "report.json"), r.json(cfg));
        r.files.push_back(out_path(cfg, "report.json"));
    }
    return r;
}

}  // namespace manton
