#include "mccs/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "mccs/csv.hpp"
#include "mccs/errors.hpp"
#include "mccs/log.hpp"

namespace mccs {
namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double population_std(std::span<const double> x) {
    if (x.empty()) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return std::sqrt(ss / static_cast<double>(x.size()));
}

std::optional<double> information_ratio(std::span<const double> returns, double benchmark_mean) {
    const double sd = population_std(returns);
    if (returns.empty() || !(sd > 0.0)) return std::nullopt;
    return (mean(returns) - benchmark_mean) / sd;
}

std::optional<RocResult> success_rate_and_roc(std::span<const double> signals, std::span<const double> realized) {
    if (signals.size() != realized.size()) throw ArgumentError("roc: series lengths differ");
    std::vector<std::pair<double, bool>> calls;
    for (std::size_t i = 0; i < signals.size(); ++i)
        if (signals[i] != 0.0) calls.emplace_back(std::abs(signals[i]), sign_of(signals[i]) == sign_of(realized[i]));
    if (calls.empty()) return std::nullopt;

    RocResult r;
    r.calls = static_cast<int>(calls.size());
    const auto positives = std::count_if(calls.begin(), calls.end(), [](const auto& c) { return c.second; });
    const auto negatives = static_cast<long>(calls.size()) - positives;
    r.success_rate = static_cast<double>(positives) / static_cast<double>(calls.size());
    r.curve.push_back({0.0, 0.0});
    if (negatives == 0 || positives == 0) {
        r.auc = negatives == 0 ? 1.0 : 0.0;
        r.curve.push_back(negatives == 0 ? RocPoint{0.0, 1.0} : RocPoint{1.0, 0.0});
        r.curve.push_back({1.0, 1.0});
        return r;
    }
    std::stable_sort(calls.begin(), calls.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    long tp = 0, fp = 0;
    for (std::size_t i = 0; i < calls.size();) {
        std::size_t j = i;
        for (; j < calls.size() && calls[j].first == calls[i].first; ++j) (calls[j].second ? tp : fp) += 1;
        const RocPoint next{static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)};
        const RocPoint& prev = r.curve.back();
        r.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
        r.curve.push_back(next);
        i = j;
    }
    return r;
}

std::vector<MetricReport> evaluate(const std::vector<SignalRecord>& signals) {
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<const SignalRecord*>> groups;
    for (const auto& s : signals) {
        auto key = std::make_pair(s.trade, s.model);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(&s);
    }
    std::vector<MetricReport> out;
    for (const auto& key : order) {
        std::vector<double> expected, realized, sig, ret;
        for (const SignalRecord* s : groups[key]) {
            if (!s->realized || !s->strategy_return) continue;
            expected.push_back(s->expected);
            realized.push_back(*s->realized);
            sig.push_back(s->signal);
            ret.push_back(*s->strategy_return);
        }
        MetricReport m;
        m.trade = key.first;
        m.model = key.second;
        m.observations = static_cast<int>(ret.size());
        m.rho = pearson(expected, realized);
        m.avg_return = mean(ret);
        m.std_dev = population_std(ret);
        m.information_ratio = information_ratio(ret);
        if (const auto roc = success_rate_and_roc(sig, realized)) {
            m.success_rate = roc->success_rate;
            m.auc = roc->auc;
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<double> average_ranks(const std::vector<std::vector<std::optional<double>>>& matrix,
                                  bool higher_is_better, int* used_rows) {
    if (matrix.empty()) throw ArgumentError("average_ranks: empty matrix");
    const std::size_t k = matrix.front().size();
    std::vector<double> total(k, 0.0);
    int used = 0;
    for (std::size_t r = 0; r < matrix.size(); ++r) {
        const auto& row = matrix[r];
        if (row.size() != k) throw ArgumentError("average_ranks: ragged matrix");
        if (std::any_of(row.begin(), row.end(), [](const auto& v) { return !v.has_value(); })) {
            log::warn("average_ranks: row " + std::to_string(r) + " has missing cells; excluded");
            continue;
        }
        std::vector<std::size_t> idx(k);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return higher_is_better ? *row[a] > *row[b] : *row[a] < *row[b];
        });
        for (std::size_t i = 0; i < k;) {
            std::size_t j = i;
            while (j < k && *row[idx[j]] == *row[idx[i]]) ++j;
            const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
            for (std::size_t t = i; t < j; ++t) total[idx[t]] += rank;
            i = j;
        }
        ++used;
    }
    if (used_rows) *used_rows = used;
    if (used == 0) throw DataError("average_ranks: no complete rows");
    for (auto& v : total) v /= used;
    return total;
}

std::vector<double> holm_thresholds(int m, double alpha) {
    if (m < 1) throw ArgumentError("holm: need at least one hypothesis");
    std::vector<double> out;
    for (int i = 1; i <= m; ++i) out.push_back(alpha / static_cast<double>(m - i + 1));
    return out;
}

RankAnalysis friedman_holm(const std::vector<std::string>& models, const std::vector<double>& average_rank,
                           int trades, double alpha) {
    const auto k = static_cast<int>(average_rank.size());
    if (k < 3) throw ArgumentError("friedman: need at least 3 models");
    if (trades < 2) throw ArgumentError("friedman: need at least 2 trades");
    if (models.size() != average_rank.size()) throw ArgumentError("friedman: names and ranks differ in length");

    RankAnalysis a;
    a.models = models;
    a.average_rank = average_rank;
    a.trades = trades;
    const double kk = k, n = trades;
    double sum_sq = 0.0;
    for (double r : average_rank) sum_sq += r * r;
    a.chi_square = std::max(0.0, 12.0 * n / (kk * (kk + 1.0)) * (sum_sq - kk * (kk + 1.0) * (kk + 1.0) / 4.0));
    a.chi_square_p = boost::math::gamma_q((kk - 1.0) / 2.0, a.chi_square / 2.0);

    a.best = static_cast<std::size_t>(std::min_element(average_rank.begin(), average_rank.end()) - average_rank.begin());
    const double se = std::sqrt(kk * (kk + 1.0) / (6.0 * n));
    a.z.assign(models.size(), std::nullopt);
    a.p_value.assign(models.size(), std::nullopt);
    a.holm_threshold.assign(models.size(), std::nullopt);
    a.significant.assign(models.size(), false);
    std::vector<std::size_t> others;
    for (std::size_t j = 0; j < models.size(); ++j) {
        if (j == a.best) continue;
        const double z = (average_rank[j] - average_rank[a.best]) / se;
        a.z[j] = z;
        a.p_value[j] = 0.5 * std::erfc(z / std::sqrt(2.0));
        others.push_back(j);
    }
    std::stable_sort(others.begin(), others.end(), [&](std::size_t x, std::size_t y) { return *a.p_value[x] < *a.p_value[y]; });
    const std::vector<double> thresholds = holm_thresholds(static_cast<int>(others.size()), alpha);
    bool rejecting = true;
    for (std::size_t i = 0; i < others.size(); ++i) {
        a.holm_threshold[others[i]] = thresholds[i];
        rejecting = rejecting && *a.p_value[others[i]] < thresholds[i];
        a.significant[others[i]] = rejecting;
    }
    return a;
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricReport>& reports) {
    csv::Table t;
    t.header = {"trade", "model", "rho", "avg_return", "std_dev", "information_ratio", "success_rate", "auc",
                "observations"};
    for (const auto& m : reports)
        t.rows.push_back({m.trade, m.model, csv::format_optional(m.rho), csv::format_number(m.avg_return),
                          csv::format_number(m.std_dev), csv::format_optional(m.information_ratio),
                          csv::format_optional(m.success_rate), csv::format_optional(m.auc),
                          std::to_string(m.observations)});
    csv::write(path, t);
}

std::vector<MetricReport> read_metrics_csv(const std::filesystem::path& path) {
    const csv::Table t = csv::read(path);
    const std::size_t c_trade = t.column("trade"), c_model = t.column("model"), c_rho = t.column("rho"),
                      c_avg = t.column("avg_return"), c_std = t.column("std_dev"),
                      c_ir = t.column("information_ratio"), c_sr = t.column("success_rate"), c_auc = t.column("auc"),
                      c_obs = t.column("observations");
    std::vector<MetricReport> out;
    for (const auto& f : t.rows) {
        MetricReport m;
        m.trade = f[c_trade];
        m.model = f[c_model];
        m.rho = csv::parse_optional(f[c_rho]);
        m.avg_return = csv::parse_number(f[c_avg]);
        m.std_dev = csv::parse_number(f[c_std]);
        m.information_ratio = csv::parse_optional(f[c_ir]);
        m.success_rate = csv::parse_optional(f[c_sr]);
        m.auc = csv::parse_optional(f[c_auc]);
        m.observations = static_cast<int>(csv::parse_number(f[c_obs]));
        out.push_back(std::move(m));
    }
    return out;
}

void write_rank_analysis_csv(const std::filesystem::path& path, const RankAnalysis& a) {
    csv::Table t;
    t.header = {"Model", "Avg Rank", "Z-score", "p-value", "Holm Correction", "Significant"};
    std::vector<std::size_t> order(a.models.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a.average_rank[x] < a.average_rank[y]; });
    for (std::size_t j : order)
        t.rows.push_back({a.models[j], csv::format_number(a.average_rank[j]), csv::format_optional(a.z[j]),
                          csv::format_optional(a.p_value[j]), csv::format_optional(a.holm_threshold[j]),
                          j == a.best ? "" : (a.significant[j] ? "yes" : "no")});
    t.rows.push_back({"Friedman chi-square", csv::format_number(a.chi_square), "", csv::format_number(a.chi_square_p),
                      "", "trades=" + std::to_string(a.trades)});
    csv::write(path, t);
}

}  // namespace mccs
