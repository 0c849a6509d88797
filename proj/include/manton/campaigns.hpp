// Verification campaigns driven by a ScenarioConfig. Each returns named checks
// and writes its data files under output_dir (nothing when it is empty).
#pragma once

#include <string>
#include <vector>

#include "manton/config.hpp"
#include "manton/report.hpp"

namespace manton {

struct CampaignResult {
    Campaign campaign = Campaign::simulate;
    std::vector<Check> checks;
    std::vector<std::string> files;
    std::string text;  // human-readable summary
    bool pass() const;
    /// Name of the first failing check, empty if all pass.
    std::string first_failure() const;
    nlohmann::json json(const ScenarioConfig& cfg) const;
};

CampaignResult run_verify_geometry(const ScenarioConfig& cfg);
CampaignResult run_algebra_table(const ScenarioConfig& cfg);
CampaignResult run_map_check(const ScenarioConfig& cfg);
/// Trajectory CSV; with campaign == charges also charge columns and the
/// Noether and drift checks.
CampaignResult run_simulate(const ScenarioConfig& cfg);
CampaignResult run_charges(const ScenarioConfig& cfg);
CampaignResult run_theorem1_test(const ScenarioConfig& cfg);

/// Dispatches on cfg.campaign and writes report.json.
CampaignResult run_campaign(const ScenarioConfig& cfg);

/// Relative drift |q - q0| / |q0|, or the absolute drift when |q0| <= floor.
double relative_drift(double q, double q0, double floor = 1e-10);

}  // namespace manton
