#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mccs/package.hpp"

namespace mccs {

inline constexpr int kHoldingWeeks = 52;
inline constexpr std::size_t kLagCount = 3;
inline constexpr std::size_t kInputCount = FeatureVector::size + kLagCount;
inline constexpr double kPvEpsilon = 1e-6;

/// Net excess holding return: (pv_exit - pv_entry - cost * vega) / pv_entry - funding.
/// `gross` drops both the cost and the funding. Throws DataError if |pv_entry| <= 1e-6.
double holding_return(double pv_entry, double pv_exit, double vega_entry, double funding,
                      double cost_multiplier = 0.75, bool gross = false);

/// 12 feature names followed by lag1..lag3.
const std::array<std::string, kInputCount>& input_names();

struct FeatureRow {
    Date date;
    std::array<std::optional<double>, kInputCount> inputs;
    std::optional<double> label;
    bool matured = false;  // date + 52 weeks lies inside the history

    bool inputs_complete() const;
    bool trainable() const { return inputs_complete() && label.has_value(); }
};

/// Clip bounds per input column plus the label (last entry).
struct WinsorBounds {
    std::array<double, kInputCount + 1> low{};
    std::array<double, kInputCount + 1> high{};
};

struct TradePanel {
    std::string trade;
    std::vector<FeatureRow> rows;
    std::optional<WinsorBounds> bounds;
};

struct PanelOptions {
    double cost_multiplier = 0.75;
    bool gross = false;
};

/// Per-snapshot features and labels of one trade, before lagging and trimming.
struct TradeSeries {
    std::vector<FeatureVector> features;
    std::vector<std::optional<double>> labels;  // includes any planted overlay
    std::vector<std::optional<double>> natural_labels;
};

TradeSeries compute_trade_series(const std::vector<MarketSnapshot>& history, const MccsSpec& spec,
                                 const PanelOptions& options = {});

/// One row per weekly entry from the first with three realized lags to the end
/// of the history. Rows whose label has not matured keep an absent label.
TradePanel assemble_panel(const std::vector<MarketSnapshot>& history, const MccsSpec& spec,
                          const PanelOptions& options = {});
TradePanel assemble_panel(const TradeSeries& series, const std::vector<MarketSnapshot>& history,
                          const MccsSpec& spec);

/// Type-7 (linear interpolation) sample quantile of unsorted data.
double quantile(std::vector<double> values, double q);

WinsorBounds fit_winsor(std::span<const FeatureRow> fit_rows, double low_q, double high_q);
void apply_winsor(const WinsorBounds& bounds, std::span<FeatureRow> rows);

/// Fits bounds on rows dated <= fit_cutoff and clips every row.
TradePanel winsorize(const TradePanel& panel, double low_q, double high_q, Date fit_cutoff);

/// Removes rows with absent inputs, and rows whose matured label is absent.
/// Unmatured rows stay for out-of-sample prediction.
TradePanel drop_missing(const TradePanel& panel);

void write_panels_csv(const std::filesystem::path& path, const std::vector<TradePanel>& panels);
std::vector<TradePanel> read_panels_csv(const std::filesystem::path& path);

}  // namespace mccs
