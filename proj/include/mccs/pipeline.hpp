#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "mccs/config.hpp"
#include "mccs/evaluator.hpp"

namespace mccs {

/// Synthetic history with the planted overlay applied when enabled.
std::vector<MarketSnapshot> build_history(const RunConfig& config);

/// One panel per configured trade, rows with absent inputs or absent matured labels removed.
std::vector<TradePanel> build_panels(const std::vector<MarketSnapshot>& history, const RunConfig& config);

struct BacktestOutputs {
    std::vector<PredictionRecord> predictions;  // trade-major, strategy order of the config, then date
    std::vector<SkippedCell> skipped;
    std::vector<SignalRecord> signals;
    std::vector<MetricReport> metrics;
};

BacktestOutputs run_backtest_pipeline(const std::vector<TradePanel>& panels, const RunConfig& config);

/// Lasso normalized t-statistics per trade, fitted on every matured row of the
/// panel (winsorized on those rows). The penalty is the last one chosen in the
/// walk-forward run when `predictions` has lasso records for the trade,
/// otherwise it is tuned by the inner scheme.
std::vector<std::array<double, kInputCount>> feature_significance(const std::vector<TradePanel>& panels,
                                                                  const std::vector<PredictionRecord>& predictions,
                                                                  const RunConfig& config);

/// IR matrix trades x strategies (config order, rows in trade order) feeding the rank analysis.
std::vector<std::vector<std::optional<double>>> ir_matrix(const std::vector<MetricReport>& metrics,
                                                          const std::vector<std::string>& trades,
                                                          const std::vector<std::string>& models);

// Subcommands. Each writes into config.output and prints a short summary to `log`.
void cmd_synth(const RunConfig& config, std::ostream& log);
void cmd_backtest(const RunConfig& config, std::ostream& log);
void cmd_report(const RunConfig& config, std::ostream& log);

}  // namespace mccs
