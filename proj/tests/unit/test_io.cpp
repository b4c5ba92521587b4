#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "mccs/config.hpp"
#include "mccs/csv.hpp"
#include "mccs/errors.hpp"
#include "mccs/evaluator.hpp"
#include "mccs/svg.hpp"

using namespace mccs;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("mccs_test_io_" + name);
}

}  // namespace

TEST_CASE("numbers round trip through their text form") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 30.0));
        CHECK(csv::parse_number(csv::format_number(x)) == x);
    }
    CHECK(csv::format_number(0.25) == "0.25");
    CHECK(csv::format_number(3.0) == "3");
    CHECK(csv::parse_number(csv::format_number(std::numeric_limits<double>::denorm_min())) ==
          std::numeric_limits<double>::denorm_min());
    CHECK(csv::format_optional(std::nullopt).empty());
    CHECK_FALSE(csv::parse_optional("").has_value());
    CHECK(*csv::parse_optional("-1.5") == -1.5);
    CHECK_THROWS_AS(csv::parse_number("abc"), DataError);
    CHECK_THROWS_AS(csv::parse_number("1.5x"), DataError);
}

TEST_CASE("csv tables") {
    CHECK(csv::split("a,,b") == std::vector<std::string>{"a", "", "b"});
    CHECK(csv::join({"x", "y"}) == "x,y");
    csv::Table t;
    t.header = {"k", "v"};
    t.rows = {{"a", "1"}, {"b", ""}};
    const auto path = temp_file("table.csv");
    csv::write(path, t);
    const csv::Table back = csv::read(path);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    CHECK(back.column("v") == 1);
    CHECK_THROWS_AS(back.column("missing"), DataError);

    std::ofstream(path) << "a,b\n1,2,3\n";
    CHECK_THROWS_AS(csv::read(path), DataError);
    CHECK_THROWS(csv::read(temp_file("does_not_exist.csv")));
}

TEST_CASE("signal and metric archives round trip") {
    std::vector<SignalRecord> signals;
    for (int i = 0; i < 5; ++i) {
        SignalRecord s;
        s.date = Date{2015, 1, 7}.plus_weeks(i);
        s.trade = "EUR1y1y2y";
        s.model = "Z-Score: BE-Width";
        s.expected = 0.1 * i - 0.2;
        if (i % 2 == 0) s.credit = 0.3 / (i + 1);
        s.signal = -0.25 * i / 3.0;
        if (i < 3) {
            s.realized = 0.017 * i;
            s.strategy_return = s.signal * *s.realized;
        }
        signals.push_back(s);
    }
    const auto sp = temp_file("signals.csv");
    write_signals_csv(sp, signals);
    const auto sb = read_signals_csv(sp);
    REQUIRE(sb.size() == signals.size());
    for (std::size_t i = 0; i < sb.size(); ++i) {
        CHECK(sb[i].date == signals[i].date);
        CHECK(sb[i].model == signals[i].model);
        CHECK(sb[i].expected == signals[i].expected);
        CHECK(sb[i].credit == signals[i].credit);
        CHECK(sb[i].signal == signals[i].signal);
        CHECK(sb[i].realized == signals[i].realized);
        CHECK(sb[i].strategy_return == signals[i].strategy_return);
    }

    const auto metrics = evaluate(signals);
    const auto mp = temp_file("metrics.csv");
    write_metrics_csv(mp, metrics);
    const auto mb = read_metrics_csv(mp);
    REQUIRE(mb.size() == 1);
    CHECK(mb[0].trade == metrics[0].trade);
    CHECK(mb[0].model == metrics[0].model);
    CHECK(mb[0].avg_return == metrics[0].avg_return);
    CHECK(mb[0].std_dev == metrics[0].std_dev);
    CHECK(mb[0].information_ratio == metrics[0].information_ratio);
    CHECK(mb[0].rho == metrics[0].rho);
    CHECK(mb[0].success_rate == metrics[0].success_rate);
    CHECK(mb[0].auc == metrics[0].auc);
    CHECK(mb[0].observations == 3);
}

TEST_CASE("heatmap rendering") {
    svg::Heatmap h;
    h.title = "IR <net>";
    h.row_labels = {"EUR1y1y2y", "EUR2y1y5y"};
    h.column_labels = {"Lasso Regression", "Naive"};
    h.values = {{0.5, -0.25}, {std::nullopt, 0.125}};
    const std::string s = svg::render(h);
    CHECK(s.rfind("<svg", 0) == 0);
    CHECK(s.find("IR &lt;net&gt;") != std::string::npos);
    CHECK(s.find("data-value=\"0.5\"") != std::string::npos);
    CHECK(s.find("data-value=\"-0.25\"") != std::string::npos);
    CHECK(s.find("data-value=\"0.125\"") != std::string::npos);
    CHECK(s.find("#cccccc") != std::string::npos);
    CHECK(s.find("data-scale=\"0.5\"") != std::string::npos);
    std::size_t rects = 0;
    for (auto pos = s.find("<rect"); pos != std::string::npos; pos = s.find("<rect", pos + 1)) ++rects;
    CHECK(rects == 4);
    CHECK(svg::render(h) == s);
}

TEST_CASE("configuration text") {
    RunConfig c;
    apply_config_text(c, R"(
seed = 42   # comment
[scenario]
years = 6
level_vol = 0.01
[plant]
enabled = true
features = atmf_implied_vol:-1, Vega:1, vol_carry_1y:-1
snr = 2
[trades]
list = EUR1y1y2y, EUR2y1y5y
[models]
list = lasso, baselines
[cv]
refit_every = 13
)");
    CHECK(c.seed == 42);
    CHECK(c.scenario.years == 6);
    CHECK(c.scenario.level.vol == 0.01);
    CHECK(c.plant_enabled);
    CHECK(c.plant.coefficients[6] == -1.0);
    CHECK(c.plant.coefficients[8] == 1.0);
    CHECK(c.plant.coefficients[11] == -1.0);
    CHECK(c.plant.coefficients[0] == 0.0);
    CHECK(c.plant.snr == 2.0);
    REQUIRE(c.trades.size() == 2);
    CHECK(c.trades[1].id() == "EUR2y1y5y");
    REQUIRE(c.strategies.size() == 5);
    CHECK(c.strategies[0].slug() == "lasso");
    CHECK(c.strategies[1].slug() == "mean");
    CHECK(c.cv.refit_every == 13);
    CHECK_NOTHROW(c.validate());

    RunConfig d;
    CHECK_THROWS_AS(apply_config_text(d, "[scenario]\nunknown = 1\n"), ArgumentError);
    CHECK_THROWS_AS(apply_config_text(d, "[nowhere]\nseed = 1\n"), ArgumentError);
    CHECK_THROWS_AS(apply_config_text(d, "seed = -3\n"), ArgumentError);
    CHECK_THROWS_AS(apply_config_text(d, "[cv]\ninner_folds = 2.5\n"), ArgumentError);
    CHECK_THROWS_AS(apply_config_text(d, "[plant]\nfeatures = theta\n"), ArgumentError);
    CHECK_THROWS_AS(apply_config_text(d, "[plant]\nenabled = maybe\n"), ArgumentError);
    CHECK_THROWS_AS(apply_config_text(d, "[trades]\nlist = EUR1y\n"), ArgumentError);
    CHECK_THROWS_AS(apply_config_text(d, "[models]\nlist = oracle\n"), ArgumentError);
    CHECK_THROWS_AS(apply_config_text(d, "just words\n"), ArgumentError);
    CHECK_THROWS_AS(load_config(temp_file("missing.ini")), ArgumentError);

    RunConfig bad;
    bad.cv.purge_weeks = 10;
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("feature keys and lists") {
    CHECK(feature_index("pv") == 0);
    CHECK(feature_index("be_width") == 3);
    CHECK(feature_index("vol_carry_1y") == 11);
    CHECK(feature_index(FeatureVector::names()[8]) == 8);
    CHECK_THROWS_AS(feature_index("lag1"), ArgumentError);
    CHECK(parse_trade_list("all").size() == 35);
    CHECK(parse_strategy_list("all").size() == 15);
    CHECK(parse_strategy_list("models").size() == 11);
    CHECK(parse_strategy_list("baselines").size() == 4);
    CHECK_THROWS_AS(parse_strategy_list(" , "), ArgumentError);
}
