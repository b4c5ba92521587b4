#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mccs/errors.hpp"
#include "mccs/recommender.hpp"

using namespace mccs;

namespace {

const Date kStart{2009, 1, 7};

std::vector<PredictionRecord> stream(int weeks, double noise, std::uint64_t seed, const std::string& model = "Lasso Regression") {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<PredictionRecord> out;
    for (int w = 0; w < weeks; ++w) {
        PredictionRecord r;
        r.date = kStart.plus_weeks(w);
        r.trade = "EUR1y1y2y";
        r.model = model;
        const double truth = 0.1 * z(rng);
        r.prediction = truth + noise * z(rng);
        if (w + 52 < weeks) r.realized = truth;
        out.push_back(r);
    }
    return out;
}

/// Credit and signal recomputed from their definitions, one date at a time.
std::pair<double, double> brute_force_signal(const std::vector<PredictionRecord>& rs, std::size_t t) {
    auto credit_at = [&](std::size_t i) {
        std::vector<double> p, r;
        for (std::size_t j = 0; j < rs.size(); ++j)
            if (rs[j].date <= rs[i].date.plus_weeks(-52) && rs[j].realized) {
                p.push_back(rs[j].prediction);
                r.push_back(*rs[j].realized);
            }
        if (p.size() < 8) return 0.0;
        return pearson(p, r).value_or(0.0);
    };
    double denom = 0.0;
    for (std::size_t j = 0; j <= t; ++j)
        if (rs[j].date > rs[t].date.plus_weeks(-52)) denom = std::max(denom, std::abs(rs[j].prediction * credit_at(j)));
    const double credit = credit_at(t);
    const double num = rs[t].prediction * credit;
    return {credit, denom > 0.0 ? num / denom : 0.0};
}

SignalRecord signal_of(const std::string& trade, double s) {
    SignalRecord r;
    r.date = kStart;
    r.trade = trade;
    r.signal = s;
    return r;
}

}  // namespace

TEST_CASE("pearson") {
    const std::vector<double> a{1, 2, 3}, b{2, 4, 7};
    CHECK(*pearson(a, b) == doctest::Approx(0.9934).epsilon(1e-4));
    CHECK(*pearson(a, a) == doctest::Approx(1.0));
    const std::vector<double> neg{-1, -2, -3};
    CHECK(*pearson(a, neg) == doctest::Approx(-1.0));
    const std::vector<double> c{5, 5, 5};
    CHECK_FALSE(pearson(a, c).has_value());
    CHECK_FALSE(pearson(std::vector<double>{1}, std::vector<double>{2}).has_value());

    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    std::vector<double> x(50), y(50), ax(50);
    for (int i = 0; i < 50; ++i) x[i] = z(rng), y[i] = x[i] + z(rng);
    for (double scale : {3.0, -0.5}) {
        for (int i = 0; i < 50; ++i) ax[i] = scale * x[i] + 7.0;
        CHECK(*pearson(ax, y) == doctest::Approx((scale > 0 ? 1 : -1) * *pearson(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("normalized signal and strategy return") {
    CHECK(normalized_signal(0.1 * 0.5, std::vector<double>{0.2, -0.1}) == doctest::Approx(0.25));
    CHECK(normalized_signal(0.0, std::vector<double>{0.2}) == 0.0);
    CHECK(normalized_signal(-0.3, std::vector<double>{0.2, -0.3}) == -1.0);
    CHECK(normalized_signal(0.0, std::vector<double>{0.0, 0.0}) == 0.0);
    CHECK(strategy_return(0.0, 0.3) == 0.0);
    CHECK(strategy_return(-1.0, -0.1) == doctest::Approx(0.1));
    CHECK(strategy_return(0.25, 0.08) == doctest::Approx(0.02));
}

TEST_CASE("signals follow their definition") {
    const auto rs = stream(200, 0.05, 2);
    const auto signals = compute_signals(rs, false);
    REQUIRE(signals.size() == rs.size());
    for (std::size_t t = 0; t < rs.size(); ++t) {
        const auto [credit, s] = brute_force_signal(rs, t);
        CHECK(*signals[t].credit == doctest::Approx(credit).epsilon(1e-12));
        CHECK(signals[t].signal == doctest::Approx(s).epsilon(1e-12));
        CHECK(std::abs(signals[t].signal) <= 1.0);
        if (t < 52 + 7) CHECK(signals[t].signal == 0.0);
        if (signals[t].realized)
            CHECK(*signals[t].strategy_return == doctest::Approx(signals[t].signal * *signals[t].realized));
        else
            CHECK_FALSE(signals[t].strategy_return.has_value());
    }
    CHECK(signals[59].credit.value() != 0.0);
}

TEST_CASE("credit uses matured pairs only") {
    const auto rs = stream(160, 0.05, 3);
    const auto base = compute_signals(rs, false);
    for (std::size_t t : {70u, 100u, 130u}) {
        auto altered = rs;
        // Outcomes not yet matured at t must not matter.
        for (auto& r : altered)
            if (r.date > rs[t].date.plus_weeks(-52) && r.realized) *r.realized = -5.0 * *r.realized + 1.0;
        const auto s = compute_signals(altered, false);
        for (std::size_t i = 0; i <= t; ++i) CHECK(s[i].signal == base[i].signal);
    }
}

TEST_CASE("signals are invariant to a positive scale of the whole prediction stream") {
    auto rs = stream(150, 0.05, 4);
    const auto base = compute_signals(rs, false);
    for (auto& r : rs) r.prediction *= 7.5;
    const auto scaled = compute_signals(rs, false);
    for (std::size_t i = 0; i < rs.size(); ++i) CHECK(scaled[i].signal == doctest::Approx(base[i].signal).epsilon(1e-12));
}

TEST_CASE("zero credit gives zero signal") {
    auto rs = stream(120, 0.05, 5);
    for (auto& r : rs)
        if (r.realized) r.realized = 0.01;  // constant outcome: undefined correlation
    for (const auto& s : compute_signals(rs, false)) {
        CHECK(s.signal == 0.0);
        CHECK(*s.credit == 0.0);
    }
}

TEST_CASE("pass-through streams are clamped rule signals") {
    auto rs = stream(10, 0.0, 6, "Z-Score: BE-Width");
    rs[0].prediction = 2.0;
    rs[1].prediction = -0.4;
    const auto s = compute_signals(rs, true);
    CHECK(s[0].signal == 1.0);
    CHECK(s[1].signal == -0.4);
    CHECK_FALSE(s[0].credit.has_value());
}

TEST_CASE("compute_all_signals groups streams") {
    auto a = stream(80, 0.05, 7);
    auto b = stream(80, 0.05, 8, "Z-Score: CarryAtExpiry");
    for (auto& r : b) r.prediction = std::clamp(r.prediction * 10.0, -1.0, 1.0);
    std::vector<PredictionRecord> mixed;
    for (std::size_t i = 0; i < 80; ++i) {
        mixed.push_back(b[79 - i]);
        mixed.push_back(a[i]);
    }
    const auto all = compute_all_signals(mixed);
    REQUIRE(all.size() == 160);
    CHECK(all.front().model == "Z-Score: CarryAtExpiry");
    CHECK(all.front().date == kStart);
    CHECK(all[80].model == "Lasso Regression");
    const auto direct = compute_signals(a, false);
    for (std::size_t i = 0; i < 80; ++i) CHECK(all[80 + i].signal == direct[i].signal);
    for (std::size_t i = 0; i < 80; ++i) CHECK(all[i].signal == b[i].prediction);
}

TEST_CASE("dates must be strictly increasing") {
    auto rs = stream(10, 0.05, 9);
    rs[5].date = rs[4].date;
    CHECK_THROWS_AS(compute_signals(rs, false), DataError);
}

TEST_CASE("rank table") {
    const std::vector<SignalRecord> s{signal_of("A", 0.2), signal_of("B", -0.7), signal_of("C", 0.9)};
    const RankTable t = rank_trades(s);
    REQUIRE(t.longs.size() == 2);
    CHECK(t.longs[0].trade == "C");
    CHECK(t.longs[1].trade == "A");
    REQUIRE(t.shorts.size() == 1);
    CHECK(t.shorts[0].trade == "B");

    const std::vector<SignalRecord> flat{signal_of("X", 0.0), signal_of("Y", 0.0), signal_of("Z", 0.0)};
    const RankTable f = rank_trades(flat);
    CHECK(f.longs.empty());
    CHECK(f.shorts.empty());
    REQUIRE(f.flats.size() == 3);
    CHECK(f.flats[0].trade == "X");
    CHECK(f.flats[2].trade == "Z");

    const std::vector<SignalRecord> shorts{signal_of("P", -0.1), signal_of("Q", -0.9), signal_of("R", -0.5)};
    const RankTable sh = rank_trades(shorts);
    CHECK(sh.shorts[0].trade == "Q");
    CHECK(sh.shorts[1].trade == "R");
    CHECK(sh.shorts[2].trade == "P");

    auto mixed = s;
    mixed[1].date = kStart.plus_weeks(1);
    CHECK_THROWS_AS(rank_trades(mixed), ArgumentError);
    CHECK_THROWS_AS(rank_trades(std::span<const SignalRecord>{}), ArgumentError);
}
