#include "manton/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace manton {

const char* campaign_name(Campaign c) {
    switch (c) {
        case Campaign::verify_geometry: return "verify-geometry";
        case Campaign::algebra_table: return "algebra-table";
        case Campaign::map_check: return "map-check";
        case Campaign::simulate: return "simulate";
        case Campaign::charges: return "charges";
        case Campaign::theorem1_test: return "theorem1-test";
    }
    return "?";
}

Campaign parse_campaign(const std::string& s) {
    for (Campaign c : {Campaign::verify_geometry, Campaign::algebra_table, Campaign::map_check, Campaign::simulate,
                       Campaign::charges, Campaign::theorem1_test})
        if (s == campaign_name(c)) return c;
    throw ConfigError("unknown campaign '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Line {
    int number;
    std::string key, value;
};

double to_double(const Line& l, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(l.number) + ": '" + l.key + "' expects a number, got '" + v + "'");
    }
    if (trim(v.substr(pos)) != "" || !std::isfinite(x))
        throw ConfigError("line " + std::to_string(l.number) + ": '" + l.key + "' expects a number, got '" + v + "'");
    return x;
}

std::vector<double> to_list(const Line& l, std::size_t n) {
    std::vector<double> out;
    std::stringstream ss(l.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(l, trim(item)));
    if (out.size() != n)
        throw ConfigError("line " + std::to_string(l.number) + ": '" + l.key + "' expects " + std::to_string(n) +
                          " comma-separated numbers");
    return out;
}

int to_int(const Line& l) {
    const double x = to_double(l, l.value);
    if (x != std::round(x) || std::abs(x) > 1e9)
        throw ConfigError("line " + std::to_string(l.number) + ": '" + l.key + "' expects an integer");
    return static_cast<int>(x);
}

bool to_bool(const Line& l) {
    if (l.value == "true" || l.value == "1" || l.value == "yes") return true;
    if (l.value == "false" || l.value == "0" || l.value == "no") return false;
    throw ConfigError("line " + std::to_string(l.number) + ": '" + l.key + "' expects true or false");
}

void apply(ScenarioConfig& c, const std::string& section, const Line& l, bool& dips_reset) {
    const std::string& k = l.key;
    auto unknown = [&] { return ConfigError("line " + std::to_string(l.number) + ": unknown key '" + k + "' in [" + section + "]"); };
    if (section == "model") {
        if (k == "gamma") c.params.gamma = to_double(l, l.value);
        else if (k == "lambda") c.params.lam = to_double(l, l.value);
        else if (k == "kappa") c.params.kappa = to_double(l, l.value);
        else if (k == "case") {
            try {
                c.params.model_case = parse_case(l.value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("line " + std::to_string(l.number) + ": " + e.what());
            }
        } else if (k == "transport") {
            const auto v = to_list(l, 2);
            c.params.jT.j_vec = {v[0], v[1]};
        } else throw unknown();
    } else if (section == "grid") {
        if (k == "n") c.grid.n1 = c.grid.n2 = to_int(l);
        else if (k == "n1") c.grid.n1 = to_int(l);
        else if (k == "n2") c.grid.n2 = to_int(l);
        else if (k == "L") c.grid.L1 = c.grid.L2 = to_double(l, l.value);
        else if (k == "L1") c.grid.L1 = to_double(l, l.value);
        else if (k == "L2") c.grid.L2 = to_double(l, l.value);
        else if (k == "dt") c.grid.dt = to_double(l, l.value);
        else throw unknown();
    } else if (section == "ansatz") {
        AnsatzSpec& a = c.ansatz;
        if (k == "kind") {
            try {
                a.kind = parse_ansatz(l.value);
            } catch (const std::invalid_argument& e) {
                throw ConfigError("line " + std::to_string(l.number) + ": " + e.what());
            }
        } else if (k == "dip") {
            // depth, center x1, center x2, width 1, width 2, angle
            const auto v = to_list(l, 6);
            if (!dips_reset) {
                a.dips.clear();
                dips_reset = true;
            }
            a.dips.push_back(Dip{v[0], {v[1], v[2]}, {v[3], v[4]}, v[5]});
        } else if (k == "winding") a.winding = to_int(l);
        else if (k == "separation") a.separation = to_double(l, l.value);
        else if (k == "core") a.core = to_double(l, l.value);
        else if (k == "kick") {
            const auto v = to_list(l, 2);
            a.kick = {v[0], v[1]};
        } else if (k == "amplitude") a.amplitude = to_double(l, l.value);
        else if (k == "width") a.width = to_double(l, l.value);
        else if (k == "twist") a.twist = to_double(l, l.value);
        else if (k == "center") {
            const auto v = to_list(l, 2);
            a.center = {v[0], v[1]};
        } else throw unknown();
    } else if (section == "run") {
        if (k == "campaign") c.campaign = parse_campaign(l.value);
        else if (k == "seed") {
            const int s = to_int(l);
            if (s < 0) throw ConfigError("line " + std::to_string(l.number) + ": seed must be nonnegative");
            c.seed = static_cast<unsigned>(s);
        } else if (k == "output_dir") c.output_dir = l.value;
        else if (k == "steps") c.steps = to_int(l);
        else if (k == "output_every") c.output_every = to_int(l);
        else if (k == "snapshot_every") c.snapshot_every = to_int(l);
        else if (k == "order_check") c.order_check = to_bool(l);
        else if (k == "mid_steps") c.mid_steps = to_int(l);
        else if (k == "metric") c.metric = l.value;
        else if (k == "set") c.set = l.value;
        else if (k == "sample_count") c.sample_count = to_int(l);
        else if (k == "corrupt") c.corrupt = l.value;
        else throw unknown();
    } else {
        throw ConfigError("line " + std::to_string(l.number) + ": key outside a known section");
    }
}

}  // namespace

void ScenarioConfig::validate() const {
    try {
        params.validate();
        grid.validate();
        ansatz.validate(grid);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (ansatz.kind == Ansatz::localized && params.model_case == ModelCase::A)
        throw ConfigError("localized data needs case B or Manton");
    if (steps < 0) throw ConfigError("steps must be nonnegative");
    if (output_every < 1) throw ConfigError("output_every must be positive");
    if (snapshot_every < 0) throw ConfigError("snapshot_every must be nonnegative");
    if (mid_steps < 1) throw ConfigError("mid_steps must be positive");
    if (metric != "B" && metric != "minkowski") throw ConfigError("metric must be B or minkowski");
    if (set != "theorem2" && set != "hidden9" && set != "minkowski7" && set != "minkowski9")
        throw ConfigError("set must be theorem2, hidden9, minkowski7 or minkowski9");
    if (sample_count < 20) throw ConfigError("sample_count must be at least 20");
}

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c;
    std::istringstream in(text);
    std::string raw, section;
    std::map<std::string, int> seen;
    bool dips_reset = false;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const auto hash = raw.find('#');
        const std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("line " + std::to_string(number) + ": malformed section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section != "model" && section != "grid" && section != "ansatz" && section != "run")
                throw ConfigError("line " + std::to_string(number) + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(number) + ": expected key = value");
        Line l{number, trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
        if (l.key.empty() || l.value.empty()) throw ConfigError("line " + std::to_string(number) + ": empty key or value");
        const std::string full = section + "." + l.key;
        if (l.key != "dip" && seen[full]++)
            throw ConfigError("line " + std::to_string(number) + ": duplicate key '" + l.key + "'");
        apply(c, section, l, dips_reset);
    }
    c.params.jT = TransportCurrent::from(c.params.gamma, c.params.jT.j_vec);
    c.validate();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

nlohmann::json config_json(const ScenarioConfig& c) {
    nlohmann::json j;
    j["model"] = {{"gamma", c.params.gamma},
                  {"lambda", c.params.lam},
                  {"kappa", c.params.kappa},
                  {"case", case_name(c.params.model_case)},
                  {"transport", {c.params.jT.j_vec[0], c.params.jT.j_vec[1]}}};
    j["grid"] = {{"n1", c.grid.n1}, {"n2", c.grid.n2}, {"L1", c.grid.L1}, {"L2", c.grid.L2}, {"dt", c.grid.step()}};
    nlohmann::json dips = nlohmann::json::array();
    for (const auto& d : c.ansatz.dips)
        dips.push_back({d.depth, d.center[0], d.center[1], d.width[0], d.width[1], d.angle});
    j["ansatz"] = {{"kind", ansatz_name(c.ansatz.kind)},
                   {"dips", dips},
                   {"winding", c.ansatz.winding},
                   {"separation", c.ansatz.separation},
                   {"core", c.ansatz.core},
                   {"kick", {c.ansatz.kick[0], c.ansatz.kick[1]}},
                   {"amplitude", c.ansatz.amplitude},
                   {"width", c.ansatz.width},
                   {"twist", c.ansatz.twist},
                   {"center", {c.ansatz.center[0], c.ansatz.center[1]}}};
    j["run"] = {{"campaign", campaign_name(c.campaign)},
                {"seed", c.seed},
                {"output_dir", c.output_dir},
                {"steps", c.steps},
                {"output_every", c.output_every},
                {"snapshot_every", c.snapshot_every},
                {"order_check", c.order_check},
                {"mid_steps", c.mid_steps},
                {"metric", c.metric},
                {"set", c.set},
                {"sample_count", c.sample_count},
                {"corrupt", c.corrupt}};
    return j;
}

}  // namespace manton
