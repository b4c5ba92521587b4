#include "mccs/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "mccs/csv.hpp"
#include "mccs/errors.hpp"
#include "mccs/log.hpp"
#include "mccs/svg.hpp"

namespace mccs {
namespace {

/// Runs body(i) for i in [0, n) on up to `threads` workers; rethrows the first error by index.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body body) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int count = std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(n, 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < count; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::filesystem::path out_file(const RunConfig& c, const char* name) { return c.output / name; }

void ensure_output(const RunConfig& c) {
    std::error_code ec;
    std::filesystem::create_directories(c.output, ec);
    if (ec || !std::filesystem::is_directory(c.output))
        throw Error("cannot create output directory " + c.output.string());
}

template <typename T>
std::vector<std::string> unique_in_order(const std::vector<T>& items, std::string T::*field) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& item : items)
        if (seen.insert(item.*field).second) out.push_back(item.*field);
    return out;
}

void write_skipped_csv(const std::filesystem::path& path, const std::vector<SkippedCell>& skipped) {
    csv::Table t;
    t.header = {"date", "trade", "model", "reason"};
    for (const auto& s : skipped) {
        std::string reason = s.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        t.rows.push_back({s.date.iso(), s.trade, s.model, reason});
    }
    csv::write(path, t);
}

svg::Heatmap metric_heatmap(const std::string& title, const std::vector<MetricReport>& metrics,
                            const std::vector<std::string>& trades, const std::vector<std::string>& models,
                            std::optional<double> MetricReport::*field_opt, double MetricReport::*field) {
    svg::Heatmap h;
    h.title = title;
    h.row_labels = trades;
    h.column_labels = models;
    std::map<std::pair<std::string, std::string>, const MetricReport*> index;
    for (const auto& m : metrics) index[{m.trade, m.model}] = &m;
    for (const auto& trade : trades) {
        std::vector<std::optional<double>> row;
        for (const auto& model : models) {
            const auto it = index.find({trade, model});
            if (it == index.end()) row.push_back(std::nullopt);
            else if (field_opt) row.push_back(it->second->*field_opt);
            else row.push_back(it->second->*field);
        }
        h.values.push_back(std::move(row));
    }
    return h;
}

/// Rank analysis that degrades gracefully for fewer than 3 models or 2 trades.
RankAnalysis analyse_ranks(const std::vector<MetricReport>& metrics, std::ostream& log) {
    const auto trades = unique_in_order(metrics, &MetricReport::trade);
    const auto models = unique_in_order(metrics, &MetricReport::model);
    const auto matrix = ir_matrix(metrics, trades, models);
    int used = 0;
    const std::vector<double> ranks = average_ranks(matrix, true, &used);
    if (models.size() >= 3 && used >= 2) return friedman_holm(models, ranks, used);
    log << "rank analysis: " << models.size() << " model(s) over " << used
        << " trade(s); Friedman test needs >= 3 models and >= 2 trades\n";
    RankAnalysis a;
    a.models = models;
    a.average_rank = ranks;
    a.trades = used;
    a.chi_square_p = 1.0;
    a.best = static_cast<std::size_t>(std::min_element(ranks.begin(), ranks.end()) - ranks.begin());
    a.z.assign(models.size(), std::nullopt);
    a.p_value.assign(models.size(), std::nullopt);
    a.holm_threshold.assign(models.size(), std::nullopt);
    a.significant.assign(models.size(), false);
    return a;
}

}  // namespace

std::vector<MarketSnapshot> build_history(const RunConfig& config) {
    ScenarioConfig scenario = config.scenario;
    scenario.seed = config.seed;
    std::vector<MarketSnapshot> history = generate_history(scenario);
    if (!config.plant_enabled) return history;
    PlantSpec plant = config.plant;
    plant.seed = config.seed;
    plant.cost_multiplier = config.cost_multiplier;
    return plant_signal(std::move(history), config.trades, plant);
}

std::vector<TradePanel> build_panels(const std::vector<MarketSnapshot>& history, const RunConfig& config) {
    const PanelOptions options{config.cost_multiplier, config.gross_returns};
    std::vector<TradePanel> panels(config.trades.size());
    parallel_for(config.trades.size(), config.threads, [&](std::size_t i) {
        panels[i] = drop_missing(assemble_panel(history, config.trades[i], options));
    });
    return panels;
}

BacktestOutputs run_backtest_pipeline(const std::vector<TradePanel>& panels, const RunConfig& config) {
    BacktestOutputs out;
    const auto cells = run_backtest(panels, config.strategies, config.cv, config.seed, config.threads);
    for (const auto& cell : cells) {
        out.predictions.insert(out.predictions.end(), cell.records.begin(), cell.records.end());
        out.skipped.insert(out.skipped.end(), cell.skipped.begin(), cell.skipped.end());
    }
    out.signals = compute_all_signals(out.predictions);
    out.metrics = evaluate(out.signals);
    return out;
}

std::vector<std::array<double, kInputCount>> feature_significance(const std::vector<TradePanel>& panels,
                                                                  const std::vector<PredictionRecord>& predictions,
                                                                  const RunConfig& config) {
    const ModelSpec spec = ModelSpec::defaults(ModelFamily::lasso);
    const std::string lasso_name(family_name(ModelFamily::lasso));
    std::map<std::string, std::string> last_hyper;
    for (const auto& r : predictions)
        if (r.model == lasso_name) last_hyper[r.trade] = r.hyper;

    std::vector<std::array<double, kInputCount>> out(panels.size());
    parallel_for(panels.size(), config.threads, [&](std::size_t i) {
        const TradePanel& panel = panels[i];
        std::vector<FeatureRow> rows;
        for (const auto& row : panel.rows)
            if (row.trainable() && row.matured) rows.push_back(row);
        if (rows.size() < minimum_rows(kInputCount))
            throw DataError("feature significance: too few matured rows for " + panel.trade);
        HyperParams chosen;
        const auto it = last_hyper.find(panel.trade);
        if (it != last_hyper.end()) {
            chosen = parse_hyper(it->second);
        } else {
            chosen = run_inner(rows, spec, config.cv, stream_key({config.seed, hash_string(panel.trade), 0x7369}));
        }
        const WinsorBounds bounds = fit_winsor(rows, config.cv.winsor_low, config.cv.winsor_high);
        apply_winsor(bounds, rows);
        Matrix x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kInputCount));
        Vector y(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < kInputCount; ++c)
                x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *rows[r].inputs[c];
            y(static_cast<Eigen::Index>(r)) = *rows[r].label;
        }
        const FittedModel model = fit(spec, chosen, x, y, config.seed);
        const Vector sig = lasso_feature_significance(model, x, y);
        for (std::size_t c = 0; c < kInputCount; ++c) out[i][c] = sig(static_cast<Eigen::Index>(c));
    });
    return out;
}

std::vector<std::vector<std::optional<double>>> ir_matrix(const std::vector<MetricReport>& metrics,
                                                          const std::vector<std::string>& trades,
                                                          const std::vector<std::string>& models) {
    std::map<std::pair<std::string, std::string>, std::optional<double>> index;
    for (const auto& m : metrics) index[{m.trade, m.model}] = m.information_ratio;
    std::vector<std::vector<std::optional<double>>> out;
    for (const auto& t : trades) {
        std::vector<std::optional<double>> row;
        for (const auto& m : models) {
            const auto it = index.find({t, m});
            row.push_back(it == index.end() ? std::nullopt : it->second);
        }
        out.push_back(std::move(row));
    }
    return out;
}

void cmd_synth(const RunConfig& config, std::ostream& log) {
    config.validate();
    ensure_output(config);
    const auto history = build_history(config);
    write_history_csv(history, out_file(config, "scenario.csv"), out_file(config, "planted.csv"));
    log << "snapshots: " << history.size() << " (" << history.front().date.iso() << " .. "
        << history.back().date.iso() << "), buckets per snapshot: "
        << config.scenario.expiry_buckets.size() * config.scenario.tenor_buckets.size() << "\n";
}

void cmd_backtest(const RunConfig& config, std::ostream& log) {
    config.validate();
    ensure_output(config);
    const auto scenario_csv = out_file(config, "scenario.csv");
    std::vector<MarketSnapshot> history;
    if (std::filesystem::exists(scenario_csv)) {
        history = read_history_csv(scenario_csv, out_file(config, "planted.csv"));
        log << "scenario: read " << history.size() << " snapshots from " << scenario_csv.string() << "\n";
    } else {
        history = build_history(config);
        write_history_csv(history, scenario_csv, out_file(config, "planted.csv"));
        log << "scenario: generated " << history.size() << " snapshots\n";
    }

    const auto panels = build_panels(history, config);
    write_panels_csv(out_file(config, "panels.csv"), panels);
    log << "panels: " << panels.size() << " trades\n";

    const BacktestOutputs out = run_backtest_pipeline(panels, config);
    write_predictions_csv(out_file(config, "predictions.csv"), out.predictions);
    write_skipped_csv(out_file(config, "skipped.csv"), out.skipped);
    write_signals_csv(out_file(config, "signals.csv"), out.signals);
    write_metrics_csv(out_file(config, "metrics.csv"), out.metrics);
    log << "predictions: " << out.predictions.size() << ", skipped: " << out.skipped.size() << "\n";

    // Daily recommendation table for the configured model.
    const std::string rec_name = parse_strategy(config.recommend_model).name();
    std::map<Date, std::vector<SignalRecord>> by_date;
    for (const auto& s : out.signals)
        if (s.model == rec_name) by_date[s.date].push_back(s);
    std::vector<RankTable> tables;
    for (const auto& [date, signals] : by_date) tables.push_back(rank_trades(signals));
    write_rank_tables_csv(out_file(config, "recommendations.csv"), rec_name, tables);

    svg::Heatmap signal_map;
    signal_map.title = "Signal S by trade and date: " + rec_name;
    signal_map.show_text = false;
    signal_map.cell_width = 3;
    signal_map.cell_height = 12;
    signal_map.scale = 1.0;
    for (const auto& p : panels) signal_map.row_labels.push_back(p.trade);
    std::map<std::pair<std::string, Date>, double> s_index;
    for (const auto& [date, signals] : by_date) {
        signal_map.column_labels.push_back(date.iso());
        for (const auto& s : signals) s_index[{s.trade, date}] = s.signal;
    }
    for (const auto& trade : signal_map.row_labels) {
        std::vector<std::optional<double>> row;
        for (const auto& [date, signals] : by_date) {
            const auto it = s_index.find({trade, date});
            row.push_back(it == s_index.end() ? std::nullopt : std::optional<double>(it->second));
        }
        signal_map.values.push_back(std::move(row));
    }
    svg::write(out_file(config, "recommendations.svg"), signal_map);

    const auto trades = unique_in_order(out.metrics, &MetricReport::trade);
    const auto models = unique_in_order(out.metrics, &MetricReport::model);
    auto avg = metric_heatmap("Average strategy return", out.metrics, trades, models, nullptr,
                              &MetricReport::avg_return);
    avg.display_factor = 100.0;
    avg.display_suffix = "%";
    svg::write(out_file(config, "avg_return.svg"), avg);
    svg::write(out_file(config, "information_ratio.svg"),
               metric_heatmap("Information ratio", out.metrics, trades, models, &MetricReport::information_ratio,
                              nullptr));
    log << "wrote predictions.csv, signals.csv, metrics.csv, recommendations.csv and heatmaps to "
        << config.output.string() << "\n";
}

void cmd_report(const RunConfig& config, std::ostream& log) {
    config.validate();
    for (const char* name : {"panels.csv", "predictions.csv", "metrics.csv"})
        if (!std::filesystem::exists(out_file(config, name)))
            throw DataError(std::string("report: missing ") + (config.output / name).string() + "; run backtest first");
    const auto panels = read_panels_csv(out_file(config, "panels.csv"));
    const auto predictions = read_predictions_csv(out_file(config, "predictions.csv"));
    const auto metrics = read_metrics_csv(out_file(config, "metrics.csv"));
    if (metrics.empty()) throw DataError("report: metrics.csv has no rows");

    const RankAnalysis analysis = analyse_ranks(metrics, log);
    write_rank_analysis_csv(out_file(config, "rank_analysis.csv"), analysis);
    log << "rank analysis: " << analysis.models.size() << " models over " << analysis.trades
        << " trades, Friedman chi-square " << csv::format_number(analysis.chi_square) << ", best "
        << analysis.models[analysis.best] << "\n";

    const auto significance = feature_significance(panels, predictions, config);
    csv::Table t;
    t.header = {"trade"};
    for (const auto& name : input_names()) t.header.push_back(name);
    svg::Heatmap h;
    h.title = "Feature significance (lasso normalized t-stats)";
    h.scale = 1.0;
    h.display_factor = 100.0;
    h.display_suffix = "%";
    h.cell_width = 80;
    for (const auto& name : input_names()) h.column_labels.push_back(name);
    for (std::size_t i = 0; i < panels.size(); ++i) {
        std::vector<std::string> fields{panels[i].trade};
        std::vector<std::optional<double>> row;
        for (double v : significance[i]) {
            fields.push_back(csv::format_number(100.0 * v));
            row.push_back(v);
        }
        t.rows.push_back(std::move(fields));
        h.row_labels.push_back(panels[i].trade);
        h.values.push_back(std::move(row));
    }
    csv::write(out_file(config, "feature_significance.csv"), t);
    svg::write(out_file(config, "feature_significance.svg"), h);
    log << "wrote rank_analysis.csv and feature_significance.csv/.svg to " << config.output.string() << "\n";
}

}  // namespace mccs
