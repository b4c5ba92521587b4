#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mccs/backtest.hpp"
#include "mccs/scenario.hpp"

namespace mccs {

struct RunConfig {
    std::uint64_t seed = 0;
    ScenarioConfig scenario;
    bool plant_enabled = false;
    PlantSpec plant;  // coefficients, snr, noise scale; seed and cost follow the run
    std::vector<MccsSpec> trades = standard_trades();
    std::vector<Strategy> strategies = all_strategies();
    CvScheme cv;
    double cost_multiplier = 0.75;
    bool gross_returns = false;
    std::filesystem::path output = "mccs_out";
    std::string recommend_model = "lasso";  // strategy whose signals feed the rank table
    int threads = 0;                        // 0 = hardware count (capped by MCCS_LAB_THREADS)

    /// Throws ArgumentError when inconsistent.
    void validate() const;
};

/// Feature column for a config key: snake_case field name or display name.
std::size_t feature_index(std::string_view key);

/// Applies `key = value` lines grouped under [section] headers. '#' starts a
/// comment. Unknown sections or keys are errors (ArgumentError).
void apply_config_text(RunConfig& config, std::string_view text, const std::string& source = "config");
RunConfig load_config(const std::filesystem::path& path);

/// Comma-separated list overrides; "all" selects every entry.
std::vector<MccsSpec> parse_trade_list(std::string_view list);
std::vector<Strategy> parse_strategy_list(std::string_view list);

}  // namespace mccs
