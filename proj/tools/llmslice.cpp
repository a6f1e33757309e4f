// Command-line front end: scenario-driven downlink slicing runs,
// baseline-vs-treatment comparisons, and scenario validation.
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "llmslice/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"llmslice: deterministic 5G downlink slicing simulator for LLM token traffic"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::uint64_t seed = 1;
    std::string mode_override;
    bool trace = false;

    CLI::App* run = app.add_subcommand("run", "Run one scenario in one mode");
    run->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    run->add_option("--seed", seed, "Master seed")->required();
    run->add_option("--mode", mode_override, "Override scheduler mode (shared|static|dynamic)");
    run->add_flag("--trace", trace, "Also write trace.log to the output directory");
    run->add_option("--out", out_dir, "Output directory")->required();

    std::string baseline_mode;
    std::string treatment_mode;
    std::string seed_spec;

    CLI::App* cmp = app.add_subcommand("compare", "Run two modes over seeds and compare");
    cmp->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    cmp->add_option("--baseline", baseline_mode, "Baseline mode")->required();
    cmp->add_option("--treatment", treatment_mode, "Treatment mode")->required();
    cmp->add_option("--seeds", seed_spec, "Seeds: <n>, <a,b,c> or <a..b> (default: scenario seeds)");
    cmp->add_option("--out", out_dir, "Output directory")->required();

    CLI::App* validate = app.add_subcommand("validate", "Parse and validate a scenario");
    validate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return llmslice::kExitConfig;
    }

    if (run->parsed()) {
        std::optional<std::string> mode;
        if (!mode_override.empty()) mode = mode_override;
        return llmslice::cmd_run(scenario_path, seed, mode, out_dir, trace);
    }
    if (cmp->parsed()) {
        std::optional<std::string> seeds;
        if (!seed_spec.empty()) seeds = seed_spec;
        return llmslice::cmd_compare(scenario_path, baseline_mode, treatment_mode, seeds, out_dir);
    }
    return llmslice::cmd_validate(scenario_path);
}
