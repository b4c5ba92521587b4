#include "mccs/panel.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mccs/csv.hpp"
#include "mccs/errors.hpp"

namespace mccs {

double holding_return(double pv_entry, double pv_exit, double vega_entry, double funding, double cost_multiplier,
                      bool gross) {
    if (!(std::abs(pv_entry) > kPvEpsilon)) throw DataError("holding_return: degenerate entry PV");
    if (gross) return (pv_exit - pv_entry) / pv_entry;
    return (pv_exit - pv_entry - cost_multiplier * vega_entry) / pv_entry - funding;
}

const std::array<std::string, kInputCount>& input_names() {
    static const std::array<std::string, kInputCount> names = [] {
        std::array<std::string, kInputCount> out;
        const auto& f = FeatureVector::names();
        for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::string(f[i]);
        for (std::size_t k = 0; k < kLagCount; ++k) out[FeatureVector::size + k] = "lag" + std::to_string(k + 1);
        return out;
    }();
    return names;
}

bool FeatureRow::inputs_complete() const {
    return std::all_of(inputs.begin(), inputs.end(), [](const auto& v) { return v.has_value(); });
}

TradeSeries compute_trade_series(const std::vector<MarketSnapshot>& history, const MccsSpec& spec,
                                 const PanelOptions& options) {
    const std::size_t n = history.size();
    TradeSeries s;
    s.features.resize(n);
    s.labels.assign(n, std::nullopt);
    s.natural_labels.assign(n, std::nullopt);
    const std::string id = spec.id();
    for (std::size_t w = 0; w < n; ++w) {
        const PackageState pkg = build_package(spec, history[w]);
        s.features[w] = compute_features(pkg, history[w]);
        const std::size_t exit = w + kHoldingWeeks;
        if (exit >= n) continue;
        const double pv_exit = package_pv(pkg, history[exit]);
        try {
            const double r = holding_return(s.features[w].pv, pv_exit, s.features[w].vega, history[w].funding_rate,
                                            options.cost_multiplier, options.gross);
            s.natural_labels[w] = r;
            const auto overlay = history[exit].planted_return.find(id);
            s.labels[w] = overlay == history[exit].planted_return.end() ? r : r + overlay->second;
        } catch (const DataError&) {
            // degenerate entry PV: label stays absent
        }
    }
    return s;
}

TradePanel assemble_panel(const TradeSeries& series, const std::vector<MarketSnapshot>& history,
                          const MccsSpec& spec) {
    const std::size_t n = history.size();
    const std::size_t first = kHoldingWeeks + kLagCount;
    if (n <= first) throw DataError("history too short for a panel: need more than one year plus three weeks");

    TradePanel panel;
    panel.trade = spec.id();
    panel.rows.reserve(n - first);
    for (std::size_t w = first; w < n; ++w) {
        FeatureRow row;
        row.date = history[w].date;
        const auto values = series.features[w].values();
        std::copy(values.begin(), values.end(), row.inputs.begin());
        // k-th lag: label of the entry made 52 + k weeks ago, realized k weeks ago.
        for (std::size_t k = 1; k <= kLagCount; ++k)
            row.inputs[FeatureVector::size + k - 1] = series.labels[w - kHoldingWeeks - k];
        row.label = series.labels[w];
        row.matured = w + kHoldingWeeks < n;
        panel.rows.push_back(row);
    }
    return panel;
}

TradePanel assemble_panel(const std::vector<MarketSnapshot>& history, const MccsSpec& spec,
                          const PanelOptions& options) {
    if (history.size() <= kHoldingWeeks + kLagCount)
        throw DataError("history too short for a panel: need more than one year plus three weeks");
    return assemble_panel(compute_trade_series(history, spec, options), history, spec);
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DataError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile level outside [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

WinsorBounds fit_winsor(std::span<const FeatureRow> fit_rows, double low_q, double high_q) {
    if (fit_rows.empty()) throw DataError("winsorize: empty fit window");
    if (!(low_q <= high_q)) throw ArgumentError("winsorize: low quantile above high quantile");
    WinsorBounds b;
    for (std::size_t c = 0; c <= kInputCount; ++c) {
        std::vector<double> column;
        column.reserve(fit_rows.size());
        for (const auto& row : fit_rows) {
            const auto& v = c < kInputCount ? row.inputs[c] : row.label;
            if (v) column.push_back(*v);
        }
        if (column.empty()) {
            b.low[c] = -HUGE_VAL;
            b.high[c] = HUGE_VAL;
            continue;
        }
        b.low[c] = quantile(column, low_q);
        b.high[c] = quantile(std::move(column), high_q);
    }
    return b;
}

void apply_winsor(const WinsorBounds& b, std::span<FeatureRow> rows) {
    for (auto& row : rows) {
        for (std::size_t c = 0; c < kInputCount; ++c)
            if (row.inputs[c]) row.inputs[c] = std::clamp(*row.inputs[c], b.low[c], b.high[c]);
        if (row.label) row.label = std::clamp(*row.label, b.low[kInputCount], b.high[kInputCount]);
    }
}

TradePanel winsorize(const TradePanel& panel, double low_q, double high_q, Date fit_cutoff) {
    std::vector<FeatureRow> fit;
    for (const auto& row : panel.rows)
        if (row.date <= fit_cutoff) fit.push_back(row);
    TradePanel out = panel;
    out.bounds = fit_winsor(fit, low_q, high_q);
    apply_winsor(*out.bounds, out.rows);
    return out;
}

TradePanel drop_missing(const TradePanel& panel) {
    TradePanel out;
    out.trade = panel.trade;
    out.bounds = panel.bounds;
    for (const auto& row : panel.rows) {
        if (!row.inputs_complete()) continue;
        if (row.matured && !row.label) continue;
        out.rows.push_back(row);
    }
    return out;
}

void write_panels_csv(const std::filesystem::path& path, const std::vector<TradePanel>& panels) {
    csv::Table table;
    table.header = {"date", "trade"};
    for (const auto& name : input_names()) table.header.push_back(name);
    table.header.push_back("label");
    for (const auto& panel : panels)
        for (const auto& row : panel.rows) {
            std::vector<std::string> fields{row.date.iso(), panel.trade};
            for (const auto& v : row.inputs) fields.push_back(csv::format_optional(v));
            fields.push_back(csv::format_optional(row.label));
            table.rows.push_back(std::move(fields));
        }
    csv::write(path, table);
}

std::vector<TradePanel> read_panels_csv(const std::filesystem::path& path) {
    const csv::Table table = csv::read(path);
    if (table.header.size() != kInputCount + 3 || table.header[0] != "date" || table.header[1] != "trade")
        throw DataError("unexpected panel CSV header in " + path.string());
    std::vector<TradePanel> panels;
    std::map<std::string, std::size_t> index;
    for (const auto& fields : table.rows) {
        auto [it, inserted] = index.try_emplace(fields[1], panels.size());
        if (inserted) panels.push_back(TradePanel{fields[1], {}, std::nullopt});
        FeatureRow row;
        row.date = Date::parse(fields[0]);
        for (std::size_t c = 0; c < kInputCount; ++c) row.inputs[c] = csv::parse_optional(fields[2 + c]);
        row.label = csv::parse_optional(fields[2 + kInputCount]);
        panels[it->second].rows.push_back(row);
    }
    // The panel runs to the end of its history, so maturity follows from the last date.
    for (auto& panel : panels) {
        if (panel.rows.empty()) continue;
        const Date last = panel.rows.back().date;
        for (auto& row : panel.rows) row.matured = row.date.plus_weeks(kHoldingWeeks) <= last;
    }
    return panels;
}

}  // namespace mccs
