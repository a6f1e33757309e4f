#pragma once
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace llmslice {

// Exit code contract: 0 success, 1 runtime failure, 2 invalid configuration.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// "7", "1,2,5" or "1..10" (inclusive range).
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec);

int cmd_run(const std::filesystem::path& scenario_path, std::uint64_t seed,
            const std::optional<std::string>& mode_override, const std::filesystem::path& out_dir,
            bool trace);

int cmd_compare(const std::filesystem::path& scenario_path, const std::string& baseline_mode,
                const std::string& treatment_mode, const std::optional<std::string>& seed_spec,
                const std::filesystem::path& out_dir);

int cmd_validate(const std::filesystem::path& scenario_path);

}  // namespace llmslice
