#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mccs/backtest.hpp"

namespace mccs {

inline constexpr int kCreditMinPairs = 8;
inline constexpr int kSignalWindowWeeks = 52;

struct SignalRecord {
    Date date;
    std::string trade;
    std::string model;
    double expected = 0.0;          // model prediction (or the raw rule signal for z-score strategies)
    std::optional<double> credit;   // trailing Pearson credit; absent for z-score strategies
    double signal = 0.0;            // in [-1, 1]
    std::optional<double> realized;
    std::optional<double> strategy_return;  // signal * realized, once matured
};

/// Pearson correlation; absent for fewer than 2 pairs or a constant series.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// S = (prediction * credit) / max |prediction * credit| over the trailing
/// window (inclusive); 0 when that maximum is 0.
double normalized_signal(double current, std::span<const double> trailing_weighted);

double strategy_return(double signal, double realized);

/// Signals of one (trade, model) prediction stream sorted by date. Credit at t
/// uses only pairs entered at or before t - 52 weeks (matured by t) and needs
/// at least 8 of them; with less, or an undefined correlation, credit is 0.
std::vector<SignalRecord> compute_signals(std::span<const PredictionRecord> records, bool passthrough);

/// Groups records by (trade, model), keeping their first-appearance order, and
/// computes signals for each. Z-score strategy streams pass straight through.
std::vector<SignalRecord> compute_all_signals(const std::vector<PredictionRecord>& records);

struct RankEntry {
    std::string trade;
    double signal = 0.0;
    std::optional<double> credit;
    double expected = 0.0;
};

struct RankTable {
    Date date;
    std::vector<RankEntry> longs;   // descending signal
    std::vector<RankEntry> shorts;  // ascending signal (strongest short first)
    std::vector<RankEntry> flats;   // input order
};

/// All signals must share one date. Sorting is stable.
RankTable rank_trades(std::span<const SignalRecord> signals);

void write_signals_csv(const std::filesystem::path& path, const std::vector<SignalRecord>& signals);
std::vector<SignalRecord> read_signals_csv(const std::filesystem::path& path);

/// One row per (date, position) with side long/short/flat and 1-based rank within the side.
void write_rank_tables_csv(const std::filesystem::path& path, const std::string& model,
                           const std::vector<RankTable>& tables);

}  // namespace mccs
