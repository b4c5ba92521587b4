#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mccs/models.hpp"
#include "mccs/panel.hpp"

namespace mccs {

/// Walk-forward scheme. All spans are in weekly rows.
struct CvScheme {
    int outer_warmup_weeks = 104;  // first prediction: panel start + this many weeks
    int outer_step_weeks = 1;
    int inner_warmup_weeks = 52;
    int inner_folds = 5;
    int purge_weeks = 52;          // training rows are dated <= prediction date - purge
    // Refit/retune cadence in outer steps. 1 = every step; larger values reuse the
    // last fitted model between refits and the last chosen hyperparameters between retunes.
    int refit_every = 1;
    int retune_every = 1;
    double winsor_low = 0.01;
    double winsor_high = 0.95;

    /// Throws ArgumentError on an invalid scheme.
    void validate() const;
};

/// A strategy is a model family or one of the four benchmarks.
struct Strategy {
    enum class Kind { model, mean_pred, naive, zscore_be_width, zscore_carry };
    Kind kind = Kind::model;
    ModelFamily family = ModelFamily::classic;

    std::string name() const;
    std::string slug() const;
    /// Z-score strategies emit a signal in [-1, 1] instead of an expected return.
    bool emits_signal() const { return kind == Kind::zscore_be_width || kind == Kind::zscore_carry; }

    static Strategy model(ModelFamily family) { return Strategy{Kind::model, family}; }
    friend bool operator==(const Strategy&, const Strategy&) = default;
};

/// The 11 model families followed by Mean Pred, Naive and the two z-score rules.
const std::vector<Strategy>& all_strategies();
/// Accepts a display name or slug.
Strategy parse_strategy(std::string_view text);

struct PredictionRecord {
    Date date;
    std::string trade;
    std::string model;
    double prediction = 0.0;
    std::optional<double> realized;  // raw label, once matured inside the history
    std::string hyper;               // canonical key=value list
    Date train_end;                  // latest entry date among the training rows
    int train_rows = 0;
};

struct SkippedCell {
    Date date;
    std::string trade;
    std::string model;
    std::string reason;
};

struct CellResult {
    std::vector<PredictionRecord> records;
    std::vector<SkippedCell> skipped;
};

/// Rows usable for training at `date`: trainable and dated <= date - purge.
std::vector<FeatureRow> training_rows(const TradePanel& panel, Date date, int purge_weeks);

/// Sequential inner validation; returns the grid point with the lowest mean
/// validation MSE (earliest on ties). Falls back to the middle grid point when
/// there are too few rows for the folds.
HyperParams run_inner(std::span<const FeatureRow> train, const ModelSpec& spec, const CvScheme& scheme,
                      std::uint64_t seed);

/// Expanding-window out-of-sample predictions for one model family.
CellResult run_outer(const TradePanel& panel, const ModelSpec& spec, const CvScheme& scheme, std::uint64_t seed);

/// Any strategy on one trade panel.
CellResult run_strategy(const TradePanel& panel, const Strategy& strategy, const CvScheme& scheme,
                        std::uint64_t seed);

/// Which feature drives a z-score rule.
enum class ZMetric { be_width, carry_at_expiry };

/// Trader rule on a rolling 52-observation window strictly before each row.
/// Signal = clamp(Z * 1[|Z| >= 1] / 3, -1, 1); 0 until the window fills, when
/// the dispersion is zero, or when a value is absent.
std::vector<double> zscore_benchmark(const TradePanel& panel, ZMetric metric);
double zscore_signal(double z);

/// Whole grid of trades x strategies. Output index = trade * strategies + strategy.
/// `threads` <= 0 uses the MCCS_LAB_THREADS environment variable or the hardware count.
std::vector<CellResult> run_backtest(const std::vector<TradePanel>& panels, const std::vector<Strategy>& strategies,
                                     const CvScheme& scheme, std::uint64_t seed, int threads = 0);

/// Parallelism actually used for `requested` (see run_backtest).
int resolve_threads(int requested);

void write_predictions_csv(const std::filesystem::path& path, const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> read_predictions_csv(const std::filesystem::path& path);

}  // namespace mccs
