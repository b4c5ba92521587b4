#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mccs/backtest.hpp"
#include "mccs/errors.hpp"

using namespace mccs;

namespace {

const Date kStart{2008, 1, 2};

/// Weekly panel with a linear signal in two inputs; labels are known only once matured.
TradePanel synthetic_panel(int weeks, std::uint64_t seed, double noise = 0.5, const std::string& trade = "EUR1y1y2y") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    TradePanel p;
    p.trade = trade;
    for (int w = 0; w < weeks; ++w) {
        FeatureRow r;
        r.date = kStart.plus_weeks(w);
        for (auto& v : r.inputs) v = z(rng);
        r.matured = w + kHoldingWeeks < weeks;
        const double label = 0.5 * *r.inputs[0] - 0.3 * *r.inputs[3] + noise * z(rng);
        if (r.matured) r.label = label;
        p.rows.push_back(r);
    }
    return p;
}

/// The panel as it would look if the history ended at row `last`.
TradePanel truncated(const TradePanel& p, std::size_t last) {
    TradePanel t;
    t.trade = p.trade;
    const Date end = p.rows[last].date;
    for (std::size_t i = 0; i <= last; ++i) {
        FeatureRow r = p.rows[i];
        r.matured = r.date.plus_weeks(kHoldingWeeks) <= end;
        if (!r.matured) r.label.reset();
        t.rows.push_back(r);
    }
    return t;
}

CvScheme fast_scheme() {
    CvScheme s;
    s.refit_every = 1;
    s.retune_every = 1;
    return s;
}

/// Inner selection recomputed directly: sequential folds of equal blocks after the warm-up.
HyperParams inner_by_hand(const std::vector<FeatureRow>& train, const ModelSpec& spec, const CvScheme& scheme,
                          std::size_t expected_block) {
    const std::size_t warm = 52, folds = 5;
    const std::size_t block = (train.size() - warm) / folds;
    CHECK(block == expected_block);
    std::vector<double> score(spec.grid.size(), 0.0);
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<FeatureRow> fit_rows(train.begin(), train.begin() + static_cast<long>(warm + f * block));
        std::vector<FeatureRow> val_rows(train.begin() + static_cast<long>(warm + f * block),
                                         train.begin() + static_cast<long>(warm + (f + 1) * block));
        const WinsorBounds b = fit_winsor(fit_rows, scheme.winsor_low, scheme.winsor_high);
        apply_winsor(b, fit_rows);
        apply_winsor(b, val_rows);
        Matrix xf(fit_rows.size(), kInputCount), xv(val_rows.size(), kInputCount);
        Vector yf(fit_rows.size()), yv(val_rows.size());
        for (std::size_t i = 0; i < fit_rows.size(); ++i) {
            for (std::size_t c = 0; c < kInputCount; ++c) xf(i, c) = *fit_rows[i].inputs[c];
            yf(i) = *fit_rows[i].label;
        }
        for (std::size_t i = 0; i < val_rows.size(); ++i) {
            for (std::size_t c = 0; c < kInputCount; ++c) xv(i, c) = *val_rows[i].inputs[c];
            yv(i) = *val_rows[i].label;
        }
        for (std::size_t g = 0; g < spec.grid.size(); ++g) {
            const Vector e = predict(fit(spec, spec.grid[g], xf, yf, 0), xv) - yv;
            score[g] += e.squaredNorm() / static_cast<double>(e.size());
        }
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < score.size(); ++g)
        if (score[g] < score[best]) best = g;
    return spec.grid[best];
}

}  // namespace

TEST_CASE("training rows respect the purge gap") {
    const TradePanel p = synthetic_panel(200, 1);
    const Date t = p.rows[150].date;
    const auto rows = training_rows(p, t, 52);
    REQUIRE(rows.size() == 99);
    CHECK(rows.back().date == t.plus_weeks(-52));
    for (const auto& r : rows) CHECK(r.trainable());
    CHECK(training_rows(p, p.rows[51].date, 52).empty());
    CHECK(training_rows(p, t, 60).size() == 91);
}

TEST_CASE("cv scheme validation") {
    CvScheme s;
    CHECK_NOTHROW(s.validate());
    s.purge_weeks = 40;
    CHECK_THROWS_AS(s.validate(), ArgumentError);
    s = CvScheme{};
    s.inner_folds = 1;
    CHECK_THROWS_AS(s.validate(), ArgumentError);
    s = CvScheme{};
    s.refit_every = 0;
    CHECK_THROWS_AS(s.validate(), ArgumentError);
    s = CvScheme{};
    s.winsor_low = 0.99;
    CHECK_THROWS_AS(s.validate(), ArgumentError);
}

TEST_CASE("walk-forward predictions are purged and start after the warm-up") {
    const TradePanel p = synthetic_panel(260, 2);
    const auto cell = run_outer(p, ModelSpec::defaults(ModelFamily::ridge), fast_scheme(), 7);
    REQUIRE(!cell.records.empty());
    CHECK(cell.records.front().date == kStart.plus_weeks(104));
    CHECK(cell.records.size() == 260 - 104);
    CHECK(cell.skipped.empty());
    for (const auto& r : cell.records) {
        CHECK(r.train_end <= r.date.plus_weeks(-52));
        CHECK(r.train_rows == static_cast<int>(training_rows(p, r.date, 52).size()));
        CHECK(std::isfinite(r.prediction));
        CHECK(r.model == "Ridge Regression");
        CHECK_FALSE(r.hyper.empty());
        CHECK(r.realized.has_value() == (r.date.plus_weeks(52) < kStart.plus_weeks(260)));
    }
}

TEST_CASE("predictions do not depend on data after their date") {
    const TradePanel p = synthetic_panel(240, 3);
    const CvScheme scheme = fast_scheme();
    const std::vector<Strategy> strategies{Strategy::model(ModelFamily::ridge), Strategy::model(ModelFamily::cart),
                                           parse_strategy("mean"), parse_strategy("naive"), parse_strategy("zscore-be")};
    for (const auto& strategy : strategies) {
        const auto full = run_strategy(p, strategy, scheme, 11);
        for (std::size_t cut : {130u, 175u, 205u}) {
            const auto part = run_strategy(truncated(p, cut), strategy, scheme, 11);
            std::size_t compared = 0;
            for (const auto& r : part.records) {
                const auto it = std::find_if(full.records.begin(), full.records.end(),
                                             [&](const PredictionRecord& f) { return f.date == r.date; });
                REQUIRE(it != full.records.end());
                CHECK(it->prediction == r.prediction);
                CHECK(it->hyper == r.hyper);
                ++compared;
            }
            CHECK(compared == cut - 104 + 1);
        }
    }
}

TEST_CASE("constant labels are predicted exactly") {
    TradePanel p = synthetic_panel(200, 4);
    for (auto& r : p.rows)
        if (r.label) r.label = 0.0125;
    for (const auto& strategy : {Strategy::model(ModelFamily::ridge), Strategy::model(ModelFamily::lasso),
                                 Strategy::model(ModelFamily::knn), parse_strategy("mean"), parse_strategy("naive")}) {
        const auto cell = run_strategy(p, strategy, fast_scheme(), 5);
        REQUIRE(!cell.records.empty());
        for (const auto& r : cell.records) CHECK(r.prediction == doctest::Approx(0.0125).epsilon(1e-12));
    }
}

TEST_CASE("inner validation uses sequential equal blocks") {
    const TradePanel p = synthetic_panel(520, 5, 2.0);
    std::vector<FeatureRow> train(p.rows.begin(), p.rows.begin() + 364);
    const CvScheme scheme = fast_scheme();
    for (ModelFamily f : {ModelFamily::ridge, ModelFamily::lasso}) {
        const ModelSpec spec = ModelSpec::defaults(f);
        CHECK(run_inner(train, spec, scheme, 1) == inner_by_hand(train, spec, scheme, 62));
    }
    train.resize(300);
    CHECK(run_inner(train, ModelSpec::defaults(ModelFamily::ridge), scheme, 1) ==
          inner_by_hand(train, ModelSpec::defaults(ModelFamily::ridge), scheme, 49));
}

TEST_CASE("inner validation edge cases") {
    const CvScheme scheme = fast_scheme();
    ModelSpec spec = ModelSpec::defaults(ModelFamily::ridge);
    const TradePanel p = synthetic_panel(200, 6);
    std::vector<FeatureRow> few(p.rows.begin(), p.rows.begin() + 40);
    CHECK(run_inner(few, spec, scheme, 1) == spec.grid[(spec.grid.size() - 1) / 2]);

    ModelSpec single = spec;
    single.grid = {{{"lambda", 0.01}}};
    CHECK(run_inner(few, single, scheme, 1) == single.grid.front());

    single.grid.clear();
    CHECK_THROWS_AS(run_inner(few, single, scheme, 1), ArgumentError);

    // Labels unrelated to the inputs: the heaviest penalty validates best.
    TradePanel noise = synthetic_panel(400, 7);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z;
    for (auto& r : noise.rows)
        if (r.label) r.label = z(rng);
    const std::vector<FeatureRow> train(noise.rows.begin(), noise.rows.begin() + 340);
    CHECK(run_inner(train, spec, scheme, 1).at("lambda") == 1.0);
}

TEST_CASE("refit and retune cadence") {
    const TradePanel p = synthetic_panel(300, 9);
    CvScheme scheme;
    scheme.refit_every = 4;
    scheme.retune_every = 8;
    const auto cell = run_outer(p, ModelSpec::defaults(ModelFamily::ridge), scheme, 3);
    REQUIRE(cell.records.size() == 300 - 104);
    for (std::size_t i = 1; i < cell.records.size(); ++i) {
        if (i % 4 != 0) {
            CHECK(cell.records[i].train_end == cell.records[i - 1].train_end);
            CHECK(cell.records[i].train_rows == cell.records[i - 1].train_rows);
        } else {
            CHECK(cell.records[i].train_end == cell.records[i - 1].train_end.plus_weeks(4));
        }
        if (i % 8 != 0) CHECK(cell.records[i].hyper == cell.records[i - 1].hyper);
        CHECK(cell.records[i].train_end <= cell.records[i].date.plus_weeks(-52));
    }
}

TEST_CASE("rows with absent inputs are skipped") {
    TradePanel p = synthetic_panel(150, 10);
    p.rows[120].inputs[4].reset();
    const auto cell = run_outer(p, ModelSpec::defaults(ModelFamily::ridge), fast_scheme(), 1);
    REQUIRE(cell.skipped.size() == 1);
    CHECK(cell.skipped[0].date == p.rows[120].date);
    CHECK(cell.records.size() == 150 - 104 - 1);
}

TEST_CASE("z-score rule") {
    CHECK(zscore_signal(3.0) == 1.0);
    CHECK(zscore_signal(7.0) == 1.0);
    CHECK(zscore_signal(0.5) == 0.0);
    CHECK(zscore_signal(-0.999) == 0.0);
    CHECK(zscore_signal(-2.0) == doctest::Approx(-2.0 / 3.0));
    CHECK(zscore_signal(1.0) == doctest::Approx(1.0 / 3.0));

    const TradePanel p = synthetic_panel(120, 11);
    for (auto [metric, column] : {std::pair{ZMetric::be_width, std::size_t{3}}, std::pair{ZMetric::carry_at_expiry, std::size_t{2}}}) {
        const auto s = zscore_benchmark(p, metric);
        REQUIRE(s.size() == p.rows.size());
        for (std::size_t i = 0; i < 52; ++i) CHECK(s[i] == 0.0);
        for (std::size_t i = 52; i < p.rows.size(); ++i) {
            double m = 0.0, v = 0.0;
            for (std::size_t k = i - 52; k < i; ++k) m += *p.rows[k].inputs[column] / 52.0;
            for (std::size_t k = i - 52; k < i; ++k) v += std::pow(*p.rows[k].inputs[column] - m, 2) / 52.0;
            const double zval = (*p.rows[i].inputs[column] - m) / std::sqrt(v);
            const double expect = std::abs(zval) < 1.0 ? 0.0 : std::clamp(zval / 3.0, -1.0, 1.0);
            CHECK(s[i] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
    TradePanel flat = p;
    for (auto& r : flat.rows) r.inputs[3] = 0.2;
    for (double v : zscore_benchmark(flat, ZMetric::be_width)) CHECK(v == 0.0);
}

TEST_CASE("strategy names") {
    CHECK(all_strategies().size() == 15);
    for (const auto& s : all_strategies()) {
        CHECK(parse_strategy(s.name()) == s);
        CHECK(parse_strategy(s.slug()) == s);
    }
    CHECK(parse_strategy("zscore-carry").emits_signal());
    CHECK_FALSE(parse_strategy("lasso").emits_signal());
    CHECK_THROWS_AS(parse_strategy("oracle"), ArgumentError);
}

TEST_CASE("the grid backtest does not depend on the thread count") {
    const std::vector<TradePanel> panels{synthetic_panel(200, 12, 0.5, "EUR1y1y2y"),
                                         synthetic_panel(200, 13, 0.5, "EUR2y1y5y")};
    const std::vector<Strategy> strategies{Strategy::model(ModelFamily::ridge),
                                           Strategy::model(ModelFamily::random_forest), parse_strategy("mean"),
                                           parse_strategy("zscore-carry")};
    CvScheme scheme;
    scheme.refit_every = 13;
    scheme.retune_every = 52;
    const auto one = run_backtest(panels, strategies, scheme, 21, 1);
    const auto three = run_backtest(panels, strategies, scheme, 21, 3);
    REQUIRE(one.size() == 8);
    REQUIRE(three.size() == 8);
    for (std::size_t c = 0; c < one.size(); ++c) {
        REQUIRE(one[c].records.size() == three[c].records.size());
        CHECK(one[c].records.front().trade == panels[c / 4].trade);
        CHECK(one[c].records.front().model == strategies[c % 4].name());
        for (std::size_t i = 0; i < one[c].records.size(); ++i) {
            CHECK(one[c].records[i].prediction == three[c].records[i].prediction);
            CHECK(one[c].records[i].hyper == three[c].records[i].hyper);
        }
    }
    CHECK(resolve_threads(3) >= 1);
}

TEST_CASE("prediction archive round trip") {
    const TradePanel p = synthetic_panel(160, 14);
    const auto cell = run_outer(p, ModelSpec::defaults(ModelFamily::ridge), fast_scheme(), 1);
    const auto path = std::filesystem::temp_directory_path() / "mccs_test_backtest_predictions.csv";
    write_predictions_csv(path, cell.records);
    const auto back = read_predictions_csv(path);
    REQUIRE(back.size() == cell.records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].date == cell.records[i].date);
        CHECK(back[i].prediction == cell.records[i].prediction);
        CHECK(back[i].realized == cell.records[i].realized);
        CHECK(back[i].hyper == cell.records[i].hyper);
        CHECK(back[i].train_end == cell.records[i].train_end);
        CHECK(back[i].train_rows == cell.records[i].train_rows);
    }
}
