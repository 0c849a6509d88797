// manton-cli: runs one verification campaign per invocation.
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad config or usage.
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "manton/campaigns.hpp"

using namespace manton;

int main(int argc, char** argv) {
    CLI::App app{"Symmetry verification and simulation campaigns"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::optional<unsigned> seed;
    bool quiet = false;
    const std::pair<const char*, Campaign> subs[] = {
        {"verify-geometry", Campaign::verify_geometry}, {"algebra-table", Campaign::algebra_table},
        {"map-check", Campaign::map_check},             {"simulate", Campaign::simulate},
        {"charges", Campaign::charges},                 {"theorem1-test", Campaign::theorem1_test}};
    std::vector<CLI::App*> cmds;
    for (const auto& [name, c] : subs) {
        CLI::App* sc = app.add_subcommand(name, std::string("run the ") + name + " campaign");
        sc->add_option("--config", config_path, "scenario file ([model], [grid], [ansatz], [run] sections)");
        sc->add_option("--seed", seed, "seed for sample points (overrides the config)");
        sc->add_option("--out", out_dir, "output directory (overrides the config)");
        sc->add_flag("-q,--quiet", quiet, "print only the verdict");
        cmds.push_back(sc);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    Campaign campaign = Campaign::simulate;
    for (std::size_t i = 0; i < cmds.size(); ++i)
        if (cmds[i]->parsed()) campaign = subs[i].second;

    ScenarioConfig cfg;
    try {
        if (!config_path.empty()) cfg = load_config(config_path);
        cfg.campaign = campaign;
        if (seed) cfg.seed = *seed;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        cfg.validate();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }
    try {
        const CampaignResult r = run_campaign(cfg);
        if (!quiet) std::cout << r.text;
        if (r.pass()) {
            std::cout << campaign_name(campaign) << ": PASS\n";
            return 0;
        }
        std::cout << campaign_name(campaign) << ": FAIL (" << r.first_failure() << ")\n";
        return 1;
    } catch (const InvalidAnsatz& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
