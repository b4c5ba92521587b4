#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mccs/recommender.hpp"

namespace mccs {

struct MetricReport {
    std::string trade;
    std::string model;
    std::optional<double> rho;  // prediction vs realized
    double avg_return = 0.0;
    double std_dev = 0.0;
    std::optional<double> information_ratio;
    std::optional<double> success_rate;
    std::optional<double> auc;
    int observations = 0;  // matured signal records
};

double mean(std::span<const double> x);
/// Population standard deviation (divide by n).
double population_std(std::span<const double> x);

/// (mean - benchmark) / population std; absent for zero dispersion or no data.
std::optional<double> information_ratio(std::span<const double> returns, double benchmark_mean = 0.0);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocResult {
    double success_rate = 0.0;
    std::vector<RocPoint> curve;  // from (0,0) to (1,1)
    double auc = 0.0;
    int calls = 0;
};

/// Calls are pairs with a nonzero signal; a call succeeds when sign(S) == sign(R).
/// Calls are scored by |S|; tied scores form diagonal segments. With only
/// successes the AUC is 1, with only failures 0. Absent when there are no calls.
std::optional<RocResult> success_rate_and_roc(std::span<const double> signals, std::span<const double> realized);

/// Metrics for each (trade, model) stream of matured signal records, in first-appearance order.
std::vector<MetricReport> evaluate(const std::vector<SignalRecord>& signals);

/// Ranks within each row (1 = best, ties averaged), averaged over rows. Rows
/// with an absent cell are excluded with a warning; `used_rows` reports how many remain.
std::vector<double> average_ranks(const std::vector<std::vector<std::optional<double>>>& matrix,
                                  bool higher_is_better, int* used_rows = nullptr);

struct RankAnalysis {
    std::vector<std::string> models;
    std::vector<double> average_rank;
    int trades = 0;
    double chi_square = 0.0;
    double chi_square_p = 0.0;
    std::size_t best = 0;
    // Per model; the best model has no comparison.
    std::vector<std::optional<double>> z;
    std::vector<std::optional<double>> p_value;
    std::vector<std::optional<double>> holm_threshold;
    std::vector<bool> significant;
};

/// Holm thresholds alpha / (m - i + 1), i = 1..m, increasing.
std::vector<double> holm_thresholds(int m, double alpha = 0.05);

/// Friedman statistic plus one-sided post-hoc z tests against the best
/// (lowest) average rank, with Holm's step-down correction.
RankAnalysis friedman_holm(const std::vector<std::string>& models, const std::vector<double>& average_rank,
                           int trades, double alpha = 0.05);

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricReport>& reports);
std::vector<MetricReport> read_metrics_csv(const std::filesystem::path& path);
void write_rank_analysis_csv(const std::filesystem::path& path, const RankAnalysis& analysis);

}  // namespace mccs
