#include "mccs/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mccs/csv.hpp"
#include "mccs/errors.hpp"

namespace mccs {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ArgumentError("pearson: series lengths differ");
    const std::size_t n = x.size();
    if (n < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    // Dispersion at the level of rounding error in the mean counts as none.
    auto negligible = [n](double ss, double m) {
        const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(m);
        return !(ss > static_cast<double>(n) * tol * tol);
    };
    if (negligible(sxx, mx) || negligible(syy, my)) return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double normalized_signal(double current, std::span<const double> trailing_weighted) {
    double denom = std::abs(current);
    for (double v : trailing_weighted) denom = std::max(denom, std::abs(v));
    if (!(denom > 0.0) || !std::isfinite(denom)) return 0.0;
    return std::clamp(current / denom, -1.0, 1.0);
}

double strategy_return(double signal, double realized) { return signal * realized; }

std::vector<SignalRecord> compute_signals(std::span<const PredictionRecord> records, bool passthrough) {
    for (std::size_t i = 1; i < records.size(); ++i)
        if (!(records[i - 1].date < records[i].date)) throw DataError("compute_signals: records not strictly dated");

    std::vector<SignalRecord> out;
    out.reserve(records.size());
    std::vector<double> pred_pairs, real_pairs, weighted;
    std::size_t matured = 0;  // records[0, matured) have entry date <= t - 52 weeks
    for (std::size_t i = 0; i < records.size(); ++i) {
        const PredictionRecord& r = records[i];
        SignalRecord s;
        s.date = r.date;
        s.trade = r.trade;
        s.model = r.model;
        s.expected = r.prediction;
        s.realized = r.realized;
        if (passthrough) {
            s.signal = std::isfinite(r.prediction) ? std::clamp(r.prediction, -1.0, 1.0) : 0.0;
        } else {
            const Date cutoff = r.date.plus_weeks(-kHoldingWeeks);
            for (; matured < i && records[matured].date <= cutoff; ++matured)
                if (records[matured].realized) {
                    pred_pairs.push_back(records[matured].prediction);
                    real_pairs.push_back(*records[matured].realized);
                }
            double credit = 0.0;
            if (pred_pairs.size() >= static_cast<std::size_t>(kCreditMinPairs))
                credit = pearson(pred_pairs, real_pairs).value_or(0.0);
            s.credit = credit;
            weighted.push_back(r.prediction * credit);
            // Trailing window: records dated within the last 52 weeks, inclusive of t.
            const Date window_start = r.date.plus_weeks(-kSignalWindowWeeks);
            std::size_t first = i;
            while (first > 0 && records[first - 1].date > window_start) --first;
            s.signal = normalized_signal(weighted[i], std::span<const double>(weighted).subspan(first, i - first + 1));
        }
        if (s.realized) s.strategy_return = strategy_return(s.signal, *s.realized);
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<SignalRecord> compute_all_signals(const std::vector<PredictionRecord>& records) {
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<PredictionRecord>> groups;
    for (const auto& r : records) {
        auto key = std::make_pair(r.trade, r.model);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(r);
    }
    std::vector<SignalRecord> out;
    out.reserve(records.size());
    for (const auto& key : order) {
        auto& group = groups[key];
        std::stable_sort(group.begin(), group.end(), [](const auto& a, const auto& b) { return a.date < b.date; });
        bool passthrough = false;
        for (const auto& s : all_strategies())
            if (s.name() == key.second) passthrough = s.emits_signal();
        const auto signals = compute_signals(group, passthrough);
        out.insert(out.end(), signals.begin(), signals.end());
    }
    return out;
}

RankTable rank_trades(std::span<const SignalRecord> signals) {
    if (signals.empty()) throw ArgumentError("rank_trades: no active trades");
    RankTable t;
    t.date = signals.front().date;
    for (const auto& s : signals) {
        if (s.date != t.date) throw ArgumentError("rank_trades: signals from different dates");
        RankEntry e{s.trade, s.signal, s.credit, s.expected};
        if (s.signal > 0.0) t.longs.push_back(std::move(e));
        else if (s.signal < 0.0) t.shorts.push_back(std::move(e));
        else t.flats.push_back(std::move(e));
    }
    std::stable_sort(t.longs.begin(), t.longs.end(), [](const auto& a, const auto& b) { return a.signal > b.signal; });
    std::stable_sort(t.shorts.begin(), t.shorts.end(), [](const auto& a, const auto& b) { return a.signal < b.signal; });
    return t;
}

void write_signals_csv(const std::filesystem::path& path, const std::vector<SignalRecord>& signals) {
    csv::Table t;
    t.header = {"date", "trade", "model", "expected", "credit", "signal", "realized", "strategy_return"};
    for (const auto& s : signals)
        t.rows.push_back({s.date.iso(), s.trade, s.model, csv::format_number(s.expected),
                          csv::format_optional(s.credit), csv::format_number(s.signal),
                          csv::format_optional(s.realized), csv::format_optional(s.strategy_return)});
    csv::write(path, t);
}

std::vector<SignalRecord> read_signals_csv(const std::filesystem::path& path) {
    const csv::Table t = csv::read(path);
    const std::size_t c_date = t.column("date"), c_trade = t.column("trade"), c_model = t.column("model"),
                      c_exp = t.column("expected"), c_credit = t.column("credit"), c_sig = t.column("signal"),
                      c_real = t.column("realized"), c_ret = t.column("strategy_return");
    std::vector<SignalRecord> out;
    out.reserve(t.rows.size());
    for (const auto& f : t.rows) {
        SignalRecord s;
        s.date = Date::parse(f[c_date]);
        s.trade = f[c_trade];
        s.model = f[c_model];
        s.expected = csv::parse_number(f[c_exp]);
        s.credit = csv::parse_optional(f[c_credit]);
        s.signal = csv::parse_number(f[c_sig]);
        s.realized = csv::parse_optional(f[c_real]);
        s.strategy_return = csv::parse_optional(f[c_ret]);
        out.push_back(std::move(s));
    }
    return out;
}

void write_rank_tables_csv(const std::filesystem::path& path, const std::string& model,
                           const std::vector<RankTable>& tables) {
    csv::Table t;
    t.header = {"date", "model", "side", "rank", "trade", "signal", "credit", "expected"};
    const auto emit = [&](const RankTable& table, const char* side, const std::vector<RankEntry>& entries) {
        for (std::size_t i = 0; i < entries.size(); ++i)
            t.rows.push_back({table.date.iso(), model, side, std::to_string(i + 1), entries[i].trade,
                              csv::format_number(entries[i].signal), csv::format_optional(entries[i].credit),
                              csv::format_number(entries[i].expected)});
    };
    for (const auto& table : tables) {
        emit(table, "long", table.longs);
        emit(table, "short", table.shorts);
        emit(table, "flat", table.flats);
    }
    csv::write(path, t);
}

}  // namespace mccs
