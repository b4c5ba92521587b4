#include "mccs/backtest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <thread>

#include "mccs/csv.hpp"
#include "mccs/errors.hpp"
#include "mccs/log.hpp"
#include "mccs/random.hpp"

namespace mccs {
namespace {

constexpr Strategy kBenchmarks[] = {
    {Strategy::Kind::mean_pred, ModelFamily::classic},
    {Strategy::Kind::naive, ModelFamily::classic},
    {Strategy::Kind::zscore_be_width, ModelFamily::classic},
    {Strategy::Kind::zscore_carry, ModelFamily::classic},
};

void to_matrix(std::span<const FeatureRow> rows, Matrix& x, Vector& y) {
    x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(kInputCount));
    y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        for (std::size_t c = 0; c < kInputCount; ++c) x(r, static_cast<Eigen::Index>(c)) = *rows[i].inputs[c];
        y(r) = rows[i].label.value_or(0.0);
    }
}

Matrix row_matrix(const FeatureRow& row) {
    Matrix x(1, static_cast<Eigen::Index>(kInputCount));
    for (std::size_t c = 0; c < kInputCount; ++c) x(0, static_cast<Eigen::Index>(c)) = *row.inputs[c];
    return x;
}

/// Copy of rows clipped with bounds fitted on `fit`.
std::vector<FeatureRow> clipped(std::span<const FeatureRow> rows, const WinsorBounds& bounds) {
    std::vector<FeatureRow> out(rows.begin(), rows.end());
    apply_winsor(bounds, out);
    return out;
}

double mse(const Vector& a, const Vector& b) { return (a - b).squaredNorm() / static_cast<double>(a.size()); }

std::optional<double> realized_of(const FeatureRow& row) {
    return row.matured && row.label ? row.label : std::nullopt;
}

/// Indices of the rows that receive a prediction.
std::vector<std::size_t> prediction_rows(const TradePanel& panel, const CvScheme& scheme) {
    std::vector<std::size_t> out;
    if (panel.rows.empty()) return out;
    const Date first = panel.rows.front().date.plus_weeks(scheme.outer_warmup_weeks);
    for (std::size_t i = 0; i < panel.rows.size(); ++i) {
        const long days = days_between(first, panel.rows[i].date);
        if (days < 0) continue;
        if ((days / 7) % scheme.outer_step_weeks == 0) out.push_back(i);
    }
    return out;
}

PredictionRecord make_record(const TradePanel& panel, const FeatureRow& row, const std::string& model,
                             double prediction) {
    PredictionRecord r;
    r.date = row.date;
    r.trade = panel.trade;
    r.model = model;
    r.prediction = prediction;
    r.realized = realized_of(row);
    return r;
}

CellResult run_baseline(const TradePanel& panel, const Strategy& strategy, const CvScheme& scheme) {
    CellResult out;
    const std::string name = strategy.name();
    for (std::size_t idx : prediction_rows(panel, scheme)) {
        const FeatureRow& row = panel.rows[idx];
        const std::vector<FeatureRow> train = training_rows(panel, row.date, scheme.purge_weeks);
        if (train.empty()) {
            out.skipped.push_back({row.date, panel.trade, name, "no matured training labels"});
            continue;
        }
        const std::vector<FeatureRow> clip = clipped(train, fit_winsor(train, scheme.winsor_low, scheme.winsor_high));
        std::vector<double> labels;
        labels.reserve(clip.size());
        for (const auto& r : clip) labels.push_back(*r.label);
        const double value =
            strategy.kind == Strategy::Kind::mean_pred ? baseline_mean(labels) : baseline_naive(labels);
        PredictionRecord rec = make_record(panel, row, name, value);
        rec.train_end = train.back().date;
        rec.train_rows = static_cast<int>(train.size());
        out.records.push_back(std::move(rec));
    }
    return out;
}

CellResult run_zscore(const TradePanel& panel, const Strategy& strategy, const CvScheme& scheme) {
    CellResult out;
    const std::vector<double> signals = zscore_benchmark(
        panel, strategy.kind == Strategy::Kind::zscore_be_width ? ZMetric::be_width : ZMetric::carry_at_expiry);
    for (std::size_t idx : prediction_rows(panel, scheme)) {
        PredictionRecord rec = make_record(panel, panel.rows[idx], strategy.name(), signals[idx]);
        // Uses no labels: nothing to purge.
        rec.train_end = panel.rows[idx].date;
        rec.train_rows = 0;
        out.records.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

void CvScheme::validate() const {
    if (outer_warmup_weeks < 0 || outer_step_weeks < 1) throw ArgumentError("cv: invalid outer warm-up or step");
    if (inner_warmup_weeks < 1 || inner_folds < 2) throw ArgumentError("cv: need an inner warm-up and >= 2 folds");
    if (purge_weeks < kHoldingWeeks) throw ArgumentError("cv: purge gap shorter than the label horizon");
    if (refit_every < 1 || retune_every < 1) throw ArgumentError("cv: refit/retune cadence must be >= 1");
    if (!(winsor_low >= 0.0 && winsor_low <= winsor_high && winsor_high <= 1.0))
        throw ArgumentError("cv: winsor quantiles must satisfy 0 <= low <= high <= 1");
}

std::string Strategy::name() const {
    switch (kind) {
        case Kind::model: return std::string(family_name(family));
        case Kind::mean_pred: return "Mean Pred";
        case Kind::naive: return "Naive";
        case Kind::zscore_be_width: return "Z-Score: BE-Width";
        case Kind::zscore_carry: return "Z-Score: CarryAtExpiry";
    }
    return {};
}

std::string Strategy::slug() const {
    switch (kind) {
        case Kind::model: return std::string(family_slug(family));
        case Kind::mean_pred: return "mean";
        case Kind::naive: return "naive";
        case Kind::zscore_be_width: return "zscore-be";
        case Kind::zscore_carry: return "zscore-carry";
    }
    return {};
}

const std::vector<Strategy>& all_strategies() {
    static const std::vector<Strategy> strategies = [] {
        std::vector<Strategy> out;
        for (ModelFamily f : all_families()) out.push_back(Strategy::model(f));
        for (const auto& b : kBenchmarks) out.push_back(b);
        return out;
    }();
    return strategies;
}

Strategy parse_strategy(std::string_view text) {
    for (const auto& s : all_strategies())
        if (s.name() == text || s.slug() == text) return s;
    throw ArgumentError("unknown strategy '" + std::string(text) + "'");
}

std::vector<FeatureRow> training_rows(const TradePanel& panel, Date date, int purge_weeks) {
    const Date cutoff = date.plus_weeks(-purge_weeks);
    std::vector<FeatureRow> out;
    for (const auto& row : panel.rows) {
        if (row.date > cutoff) break;
        if (row.trainable()) out.push_back(row);
    }
    return out;
}

HyperParams run_inner(std::span<const FeatureRow> train, const ModelSpec& spec, const CvScheme& scheme,
                      std::uint64_t seed) {
    if (spec.grid.empty()) throw ArgumentError("run_inner: empty grid");
    if (spec.grid.size() == 1) return spec.grid.front();
    const HyperParams fallback = spec.grid[(spec.grid.size() - 1) / 2];

    const std::size_t warm = static_cast<std::size_t>(scheme.inner_warmup_weeks);
    const std::size_t folds = static_cast<std::size_t>(scheme.inner_folds);
    if (train.size() < warm + folds || warm < minimum_rows(kInputCount)) {
        log::warn("inner CV: " + std::to_string(train.size()) + " rows is too few; using the middle grid point");
        return fallback;
    }
    const std::size_t block = (train.size() - warm) / folds;

    std::vector<double> total(spec.grid.size(), 0.0);
    std::vector<bool> failed(spec.grid.size(), false);
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t split = warm + f * block;
        const auto fit_part = train.subspan(0, split);
        const auto val_part = train.subspan(split, block);
        const WinsorBounds bounds = fit_winsor(fit_part, scheme.winsor_low, scheme.winsor_high);
        Matrix xf, xv;
        Vector yf, yv;
        to_matrix(clipped(fit_part, bounds), xf, yf);
        to_matrix(clipped(val_part, bounds), xv, yv);
        for (std::size_t g = 0; g < spec.grid.size(); ++g) {
            if (failed[g]) continue;
            try {
                const FittedModel m = fit(spec, spec.grid[g], xf, yf, stream_key({seed, 0x696e, f}));
                total[g] += mse(predict(m, xv), yv);
            } catch (const ConvergenceError& e) {
                log::warn(std::string("inner CV: grid point ") + format_hyper(spec.grid[g]) + " failed: " + e.what());
                failed[g] = true;
            } catch (const DataError& e) {
                log::warn(std::string("inner CV: grid point ") + format_hyper(spec.grid[g]) + " failed: " + e.what());
                failed[g] = true;
            }
        }
    }
    std::size_t best = spec.grid.size();
    for (std::size_t g = 0; g < spec.grid.size(); ++g) {
        if (failed[g] || !std::isfinite(total[g])) continue;
        if (best == spec.grid.size() || total[g] < total[best]) best = g;
    }
    if (best == spec.grid.size()) {
        log::warn("inner CV: every grid point failed; using the middle grid point");
        return fallback;
    }
    return spec.grid[best];
}

CellResult run_outer(const TradePanel& panel, const ModelSpec& spec, const CvScheme& scheme, std::uint64_t seed) {
    scheme.validate();
    CellResult out;
    const std::string name(family_name(spec.family));

    std::optional<FittedModel> model;
    std::optional<HyperParams> chosen;
    WinsorBounds bounds;
    Date train_end;
    int train_count = 0;

    const std::vector<std::size_t> targets = prediction_rows(panel, scheme);
    for (std::size_t step = 0; step < targets.size(); ++step) {
        const FeatureRow& row = panel.rows[targets[step]];
        if (!row.inputs_complete()) {
            out.skipped.push_back({row.date, panel.trade, name, "absent inputs"});
            continue;
        }
        const bool retune = !chosen || step % static_cast<std::size_t>(scheme.retune_every) == 0;
        const bool refit = retune || !model || step % static_cast<std::size_t>(scheme.refit_every) == 0;
        if (refit) {
            model.reset();
            const std::vector<FeatureRow> train = training_rows(panel, row.date, scheme.purge_weeks);
            if (train.size() < minimum_rows(kInputCount)) {
                out.skipped.push_back({row.date, panel.trade, name,
                                       "training set of " + std::to_string(train.size()) + " rows below minimum"});
                chosen.reset();
                continue;
            }
            try {
                if (retune) chosen = run_inner(train, spec, scheme, stream_key({seed, 0x74756e65, static_cast<std::uint64_t>(row.date.serial())}));
                bounds = fit_winsor(train, scheme.winsor_low, scheme.winsor_high);
                Matrix x;
                Vector y;
                to_matrix(clipped(train, bounds), x, y);
                model = fit(spec, *chosen, x, y, stream_key({seed, static_cast<std::uint64_t>(row.date.serial())}));
                train_end = train.back().date;
                train_count = static_cast<int>(train.size());
            } catch (const ConvergenceError& e) {
                out.skipped.push_back({row.date, panel.trade, name, e.what()});
                chosen.reset();
                continue;
            } catch (const DataError& e) {
                out.skipped.push_back({row.date, panel.trade, name, e.what()});
                chosen.reset();
                continue;
            }
        }
        FeatureRow clip = row;
        apply_winsor(bounds, std::span<FeatureRow>(&clip, 1));
        PredictionRecord rec = make_record(panel, row, name, predict(*model, row_matrix(clip))(0));
        rec.hyper = format_hyper(model->hyper);
        rec.train_end = train_end;
        rec.train_rows = train_count;
        out.records.push_back(std::move(rec));
    }
    return out;
}

CellResult run_strategy(const TradePanel& panel, const Strategy& strategy, const CvScheme& scheme,
                        std::uint64_t seed) {
    scheme.validate();
    switch (strategy.kind) {
        case Strategy::Kind::model: return run_outer(panel, ModelSpec::defaults(strategy.family), scheme, seed);
        case Strategy::Kind::mean_pred:
        case Strategy::Kind::naive: return run_baseline(panel, strategy, scheme);
        case Strategy::Kind::zscore_be_width:
        case Strategy::Kind::zscore_carry: return run_zscore(panel, strategy, scheme);
    }
    throw ArgumentError("unknown strategy kind");
}

double zscore_signal(double z) {
    if (!std::isfinite(z) || std::abs(z) < 1.0) return 0.0;
    return std::clamp(z / 3.0, -1.0, 1.0);
}

std::vector<double> zscore_benchmark(const TradePanel& panel, ZMetric metric) {
    constexpr std::size_t kWindow = 52;
    const std::size_t column = metric == ZMetric::be_width ? 3 : 2;
    std::vector<double> out(panel.rows.size(), 0.0);
    for (std::size_t i = kWindow; i < panel.rows.size(); ++i) {
        const auto& current = panel.rows[i].inputs[column];
        if (!current) continue;
        double sum = 0.0, sq = 0.0;
        bool complete = true;
        for (std::size_t k = i - kWindow; k < i && complete; ++k) {
            const auto& v = panel.rows[k].inputs[column];
            if (!v) complete = false;
            else sum += *v;
        }
        if (!complete) continue;
        const double mean = sum / kWindow;
        for (std::size_t k = i - kWindow; k < i; ++k) sq += (*panel.rows[k].inputs[column] - mean) * (*panel.rows[k].inputs[column] - mean);
        const double sd = std::sqrt(sq / kWindow);
        // A flat window leaves only rounding noise in the dispersion.
        if (!(sd > 64.0 * std::numeric_limits<double>::epsilon() * std::abs(mean))) continue;
        out[i] = zscore_signal((*current - mean) / sd);
    }
    return out;
}

int resolve_threads(int requested) {
    int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("MCCS_LAB_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0) n = std::min(n, cap);
        } catch (const std::exception&) {
            log::warn("ignoring malformed MCCS_LAB_THREADS");
        }
    }
    return std::max(1, n);
}

std::vector<CellResult> run_backtest(const std::vector<TradePanel>& panels, const std::vector<Strategy>& strategies,
                                     const CvScheme& scheme, std::uint64_t seed, int threads) {
    scheme.validate();
    const std::size_t cells = panels.size() * strategies.size();
    std::vector<CellResult> results(cells);
    std::vector<std::exception_ptr> errors(cells);
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            const TradePanel& panel = panels[c / strategies.size()];
            const Strategy& strategy = strategies[c % strategies.size()];
            try {
                results[c] = run_strategy(panel, strategy, scheme,
                                          stream_key({seed, hash_string(panel.trade), hash_string(strategy.slug())}));
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    const int n = std::min<int>(resolve_threads(threads), static_cast<int>(std::max<std::size_t>(cells, 1)));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

void write_predictions_csv(const std::filesystem::path& path, const std::vector<PredictionRecord>& records) {
    csv::Table t;
    t.header = {"date", "trade", "model", "prediction", "realized", "hyper", "train_end", "train_rows"};
    for (const auto& r : records)
        t.rows.push_back({r.date.iso(), r.trade, r.model, csv::format_number(r.prediction),
                          csv::format_optional(r.realized), r.hyper, r.train_end.iso(),
                          std::to_string(r.train_rows)});
    csv::write(path, t);
}

std::vector<PredictionRecord> read_predictions_csv(const std::filesystem::path& path) {
    const csv::Table t = csv::read(path);
    const std::size_t c_date = t.column("date"), c_trade = t.column("trade"), c_model = t.column("model"),
                      c_pred = t.column("prediction"), c_real = t.column("realized"), c_hyper = t.column("hyper"),
                      c_end = t.column("train_end"), c_rows = t.column("train_rows");
    std::vector<PredictionRecord> out;
    out.reserve(t.rows.size());
    for (const auto& f : t.rows) {
        PredictionRecord r;
        r.date = Date::parse(f[c_date]);
        r.trade = f[c_trade];
        r.model = f[c_model];
        r.prediction = csv::parse_number(f[c_pred]);
        r.realized = csv::parse_optional(f[c_real]);
        r.hyper = f[c_hyper];
        r.train_end = Date::parse(f[c_end]);
        r.train_rows = static_cast<int>(csv::parse_number(f[c_rows]));
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace mccs
