#include "llmslice/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "llmslice/errors.hpp"
#include "llmslice/log.hpp"
#include "llmslice/metrics.hpp"
#include "llmslice/scenario.hpp"
#include "llmslice/sim.hpp"

namespace llmslice {

namespace {

int exit_code_for(const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? kExitConfig : kExitRuntime;
}

std::uint64_t parse_seed_value(const std::string& text) {
    std::size_t consumed = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &consumed);
    } catch (const std::exception&) {
        throw_error(ErrorCode::ParseError, "invalid seed '" + text + "'");
    }
    if (consumed != text.size()) {
        throw_error(ErrorCode::ParseError, "invalid seed '" + text + "'");
    }
    return value;
}

void write_trace(const RunResult& result, const std::filesystem::path& out_dir) {
    std::ofstream out(out_dir / "trace.log", std::ios::binary | std::ios::trunc);
    if (!out) {
        throw_error(ErrorCode::IoError, "cannot open " + (out_dir / "trace.log").string());
    }
    result.trace.write(out);
}

}  // namespace

std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
    std::vector<std::uint64_t> seeds;
    if (spec.empty()) throw_error(ErrorCode::ParseError, "empty seed spec");

    if (auto dots = spec.find(".."); dots != std::string::npos) {
        std::uint64_t lo = parse_seed_value(spec.substr(0, dots));
        std::uint64_t hi = parse_seed_value(spec.substr(dots + 2));
        if (hi < lo) throw_error(ErrorCode::ParseError, "seed range '" + spec + "' is empty");
        for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        return seeds;
    }
    std::istringstream stream(spec);
    std::string part;
    while (std::getline(stream, part, ',')) {
        seeds.push_back(parse_seed_value(part));
    }
    if (seeds.empty()) throw_error(ErrorCode::ParseError, "empty seed spec");
    return seeds;
}

int cmd_run(const std::filesystem::path& scenario_path, std::uint64_t seed,
            const std::optional<std::string>& mode_override, const std::filesystem::path& out_dir,
            bool trace) {
    Scenario scenario;
    SchedulerPolicy policy;
    try {
        scenario = load_scenario_file(scenario_path);
        policy = mode_override ? parse_policy(*mode_override) : scenario.mode;
        validate_for_policy(scenario, policy);
    } catch (const Error& e) {
        std::cerr << "error (configuration): " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        RunResult result = run_scenario(scenario, seed, policy, trace);
        RunSummary summary = summarize(result.records, result.alloc, result.mode);
        write_run_outputs(summary, result.records, out_dir);
        if (trace) write_trace(result, out_dir);

        std::ostringstream line;
        line << scenario.name << " mode=" << result.mode << " seed=" << seed
             << " requests=" << summary.overall.requests
             << " completions=" << summary.overall.completions
             << " aborts=" << summary.overall.aborts;
        if (summary.overall.mean_completion_latency_ms) {
            line << " latency_ms=" << *summary.overall.mean_completion_latency_ms;
        }
        line << " utilization=" << summary.overall.utilization
             << " stability=" << summary.overall.stability;
        std::cout << line.str() << "\n";
        return kExitOk;
    } catch (const Error& e) {
        return exit_code_for(e);
    }
}

int cmd_compare(const std::filesystem::path& scenario_path, const std::string& baseline_mode,
                const std::string& treatment_mode, const std::optional<std::string>& seed_spec,
                const std::filesystem::path& out_dir) {
    Scenario scenario;
    SchedulerPolicy baseline_policy;
    SchedulerPolicy treatment_policy;
    std::vector<std::uint64_t> seeds;
    try {
        scenario = load_scenario_file(scenario_path);
        baseline_policy = parse_policy(baseline_mode);
        treatment_policy = parse_policy(treatment_mode);
        validate_for_policy(scenario, baseline_policy);
        validate_for_policy(scenario, treatment_policy);
        seeds = seed_spec ? parse_seed_spec(*seed_spec) : scenario.seeds;
        if (seeds.empty()) throw_error(ErrorCode::ParseError, "no seeds to run");
    } catch (const Error& e) {
        std::cerr << "error (configuration): " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        auto run_mode = [&](SchedulerPolicy policy) {
            std::vector<RunSummary> summaries;
            for (std::uint64_t seed : seeds) {
                RunResult result = run_scenario(scenario, seed, policy, false);
                summaries.push_back(summarize(result.records, result.alloc, result.mode));
            }
            return average_summaries(summaries);
        };
        RunSummary baseline = run_mode(baseline_policy);
        RunSummary treatment = run_mode(treatment_policy);
        ComparisonReport report = compare(baseline, treatment);
        write_comparison_outputs(report, out_dir);
        std::cout << render_comparison_table(report);
        return kExitOk;
    } catch (const Error& e) {
        return exit_code_for(e);
    }
}

int cmd_validate(const std::filesystem::path& scenario_path) {
    try {
        Scenario scenario = load_scenario_file(scenario_path);
        std::cout << "OK: " << scenario.name << " (" << scenario.ues.size() << " ues, "
                  << scenario.services.size() << " services, " << scenario.slices.size()
                  << " slices, mode=" << scheduler_policy_name(scenario.mode) << ")\n";
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error (configuration): " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace llmslice
