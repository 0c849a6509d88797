// Scenario files: "key = value" lines grouped in [model], [grid], [ansatz]
// and [run] sections. Unknown sections or keys are errors.
#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

#include "manton/pde.hpp"

namespace manton {

enum class Campaign { verify_geometry, algebra_table, map_check, simulate, charges, theorem1_test };
const char* campaign_name(Campaign c);
Campaign parse_campaign(const std::string& s);

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioConfig {
    ModelParams params;
    Grid2 grid;
    AnsatzSpec ansatz;
    unsigned seed = 1;
    Campaign campaign = Campaign::simulate;
    std::string output_dir = "out";

    int steps = 100;
    int output_every = 10;    // trajectory rows
    int snapshot_every = 0;   // field snapshots, 0 = none
    bool order_check = false; // dt/2 and dt/4 companion runs
    int mid_steps = 50;       // theorem1-test: steps before the isometry

    std::string metric = "B";      // verify-geometry: B or minkowski
    std::string set = "theorem2";  // algebra-table: theorem2, hidden9, minkowski7, minkowski9
    int sample_count = 100;
    std::string corrupt;           // verify-geometry negative control: generator label

    /// Physical and numerical constraints; throws ConfigError.
    void validate() const;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// Every field, defaults included.
nlohmann::json config_json(const ScenarioConfig& c);

}  // namespace manton
