#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "mccs/errors.hpp"
#include "mccs/evaluator.hpp"

using namespace mccs;

namespace {

/// Probability that a random successful call outscores a random failed one, ties counting half.
double pairwise_auc(const std::vector<double>& s, const std::vector<double>& r) {
    double wins = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == 0.0 || !((s[i] > 0) == (r[i] > 0)) || r[i] == 0.0) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (s[j] == 0.0 || ((s[j] > 0) == (r[j] > 0) && r[j] != 0.0)) continue;
            ++pairs;
            const double a = std::abs(s[i]), b = std::abs(s[j]);
            wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
        }
    }
    return wins / static_cast<double>(pairs);
}

using RankMatrix = std::vector<std::vector<std::optional<double>>>;

}  // namespace

TEST_CASE("mean, dispersion and information ratio") {
    const std::vector<double> r{-0.1, 0.3};
    CHECK(mean(r) == doctest::Approx(0.1));
    CHECK(population_std(r) == doctest::Approx(0.2));
    CHECK(*information_ratio(r) == doctest::Approx(0.5));
    CHECK(*information_ratio(r, 0.1) == doctest::Approx(0.0));
    const std::vector<double> doubled{-0.2, 0.6};
    CHECK(*information_ratio(doubled) == doctest::Approx(*information_ratio(r)));
    const std::vector<double> flat{0.02, 0.02, 0.02};
    CHECK_FALSE(information_ratio(flat, 0.02).has_value());
    CHECK_FALSE(information_ratio(std::vector<double>{}).has_value());
}

TEST_CASE("success rate and ROC degenerate cases") {
    const std::vector<double> s{0.5, -0.2, 1.0}, right{0.1, -0.3, 0.2}, wrong{-0.1, 0.3, -0.2};
    const auto all = success_rate_and_roc(s, right);
    REQUIRE(all);
    CHECK(all->success_rate == 1.0);
    CHECK(all->auc == 1.0);
    CHECK(all->calls == 3);
    const auto none = success_rate_and_roc(s, wrong);
    CHECK(none->success_rate == 0.0);
    CHECK(none->auc == 0.0);
    CHECK_FALSE(success_rate_and_roc(std::vector<double>{0.0, 0.0}, std::vector<double>{0.1, -0.1}).has_value());

    // One tie group spanning both classes is a single diagonal segment.
    const std::vector<double> tied{0.5, 0.5, -0.5, -0.5};
    const auto t = success_rate_and_roc(tied, std::vector<double>{1, -1, -1, 1});
    CHECK(t->auc == doctest::Approx(0.5));
    CHECK(t->curve.size() == 2);
    CHECK(t->curve.back().fpr == 1.0);
    CHECK(t->curve.back().tpr == 1.0);
}

TEST_CASE("AUC matches the pairwise definition and flips with the sign") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> z;
    std::uniform_int_distribution<int> level(-4, 4);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> s(60), r(60), flipped(60);
        for (int i = 0; i < 60; ++i) {
            s[i] = level(rng) / 4.0;  // coarse scores create ties and zero signals
            r[i] = 0.3 * s[i] + z(rng);
            flipped[i] = -s[i];
        }
        const auto roc = success_rate_and_roc(s, r);
        REQUIRE(roc);
        CHECK(roc->auc == doctest::Approx(pairwise_auc(s, r)).epsilon(1e-12));
        CHECK(success_rate_and_roc(flipped, r)->auc == doctest::Approx(1.0 - roc->auc).epsilon(1e-12));
        for (std::size_t i = 1; i < roc->curve.size(); ++i) {
            CHECK(roc->curve[i].fpr >= roc->curve[i - 1].fpr);
            CHECK(roc->curve[i].tpr >= roc->curve[i - 1].tpr);
        }
    }
}

TEST_CASE("AUC of uninformative signals is about one half") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    double total = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> s(100), r(100);
        for (int i = 0; i < 100; ++i) s[i] = std::tanh(z(rng)), r[i] = z(rng);
        total += success_rate_and_roc(s, r)->auc;
    }
    CHECK(std::abs(total / 1000.0 - 0.5) < 0.05);
}

TEST_CASE("average ranks") {
    const RankMatrix dominated{{0.9, 0.1, 0.5}, {0.8, 0.2, 0.3}, {0.7, -0.1, 0.6}};
    const auto r = average_ranks(dominated, true);
    CHECK(r[0] == 1.0);
    CHECK(r[1] == 3.0);
    CHECK(r[2] == 2.0);
    CHECK(average_ranks(dominated, false)[0] == 3.0);

    const RankMatrix ties{{1.0, 1.0, 0.5, 1.0}};
    const auto t = average_ranks(ties, true);
    CHECK(t[0] == 2.0);
    CHECK(t[1] == 2.0);
    CHECK(t[3] == 2.0);
    CHECK(t[2] == 4.0);

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> v(0, 5);
    RankMatrix grid(30, std::vector<std::optional<double>>(15));
    for (auto& row : grid)
        for (auto& c : row) c = v(rng);
    grid[4][7].reset();
    int used = 0;
    const auto avg = average_ranks(grid, true, &used);
    CHECK(used == 29);
    CHECK(std::accumulate(avg.begin(), avg.end(), 0.0) == doctest::Approx(15.0 * 16.0 / 2.0));
    for (std::size_t row = 0; row < grid.size(); ++row) {
        if (row == 4) continue;
        const auto single = average_ranks(RankMatrix{grid[row]}, true);
        CHECK(std::accumulate(single.begin(), single.end(), 0.0) == doctest::Approx(120.0));
    }
    CHECK_THROWS_AS(average_ranks(RankMatrix{{std::nullopt, 1.0, 2.0}}, true), DataError);
}

TEST_CASE("published average ranks sum to k(k+1)/2") {
    const std::vector<double> published{12.86, 11.89, 10.60, 10.11, 9.31, 8.23, 8.17, 7.69,
                                        7.49,  7.20,  6.37,  6.09,  5.91, 4.86, 3.23};
    CHECK(std::accumulate(published.begin(), published.end(), 0.0) == doctest::Approx(120.0).epsilon(1e-3));
}

TEST_CASE("Holm thresholds") {
    const auto h = holm_thresholds(14);
    REQUIRE(h.size() == 14);
    const double published[] = {0.0036, 0.0038, 0.0042, 0.0045, 0.0050, 0.0056, 0.0063,
                                0.0071, 0.0083, 0.0100, 0.0125, 0.0167, 0.0250, 0.0500};
    for (std::size_t i = 0; i < 14; ++i) {
        CHECK(std::round(h[i] * 1e4) / 1e4 == doctest::Approx(published[i]).epsilon(1e-12));
        if (i > 0) CHECK(h[i] > h[i - 1]);
    }
    CHECK(h.front() == doctest::Approx(0.05 / 14));
    CHECK(h.back() == 0.05);
    CHECK_THROWS_AS(holm_thresholds(0), ArgumentError);
}

TEST_CASE("Friedman statistic") {
    const std::vector<std::string> names{"A", "B", "C"};
    CHECK(friedman_holm(names, {2.0, 2.0, 2.0}, 10).chi_square == 0.0);
    CHECK(friedman_holm(names, {2.0, 2.0, 2.0}, 10).chi_square_p == doctest::Approx(1.0));

    // Three models, four trades, the same strict order on every trade.
    const RankMatrix strict{{3.0, 2.0, 1.0}, {0.9, 0.5, 0.1}, {10, 5, 1}, {0.3, 0.2, 0.1}};
    const auto ranks = average_ranks(strict, true);
    const auto a = friedman_holm(names, ranks, 4);
    CHECK(a.chi_square == doctest::Approx(8.0));
    CHECK(a.chi_square_p == doctest::Approx(std::exp(-4.0)));  // chi-square with 2 dof
    CHECK(a.best == 0);

    const auto relabeled = friedman_holm({"C", "A", "B"}, {ranks[2], ranks[0], ranks[1]}, 4);
    CHECK(relabeled.chi_square == doctest::Approx(a.chi_square));
    CHECK(relabeled.best == 1);

    const double se = std::sqrt(3.0 * 4.0 / (6.0 * 4.0));
    CHECK(*a.z[2] == doctest::Approx(2.0 / se));
    CHECK(*a.p_value[2] == doctest::Approx(0.5 * std::erfc(2.0 / se / std::sqrt(2.0))));
    CHECK_FALSE(a.z[0].has_value());
    CHECK(*a.holm_threshold[2] == doctest::Approx(0.025));
    CHECK(*a.holm_threshold[1] == doctest::Approx(0.05));

    CHECK_THROWS_AS(friedman_holm({"A", "B"}, {1.0, 2.0}, 4), ArgumentError);
}

TEST_CASE("Holm step-down stops at the first acceptance") {
    const std::vector<std::string> names{"best", "far", "mid", "near"};
    // se = sqrt(4*5/(6*30)) = 1/3
    const auto a = friedman_holm(names, {1.0, 3.5, 1.9, 1.3}, 30);
    CHECK(a.significant[1]);   // z = 7.5
    CHECK(a.significant[2]);   // z = 2.7, p = 0.0035 < 0.025
    CHECK_FALSE(a.significant[3]);  // z = 0.9
    CHECK_FALSE(a.significant[0]);
}

TEST_CASE("evaluate a signal stream") {
    std::vector<SignalRecord> signals;
    const Date start{2010, 1, 6};
    const double s[] = {0.5, -0.5, 1.0, 0.0, -1.0};
    const double r[] = {0.1, 0.2, 0.3, -0.1, -0.2};
    for (int i = 0; i < 5; ++i) {
        SignalRecord x;
        x.date = start.plus_weeks(i);
        x.trade = "EUR1y1y2y";
        x.model = "Lasso Regression";
        x.expected = r[i] + 0.01 * i;
        x.signal = s[i];
        x.realized = r[i];
        x.strategy_return = s[i] * r[i];
        signals.push_back(x);
    }
    SignalRecord pending = signals.back();
    pending.date = start.plus_weeks(5);
    pending.realized.reset();
    pending.strategy_return.reset();
    signals.push_back(pending);

    const auto reports = evaluate(signals);
    REQUIRE(reports.size() == 1);
    const MetricReport& m = reports[0];
    CHECK(m.observations == 5);
    const std::vector<double> ret{0.05, -0.1, 0.3, 0.0, 0.2};
    CHECK(m.avg_return == doctest::Approx(mean(ret)));
    CHECK(m.std_dev == doctest::Approx(population_std(ret)));
    CHECK(*m.information_ratio == doctest::Approx(mean(ret) / population_std(ret)));
    CHECK(*m.success_rate == doctest::Approx(0.75));
    CHECK(*m.rho > 0.99);
    // Calls: |S| 0.5 right, 0.5 wrong, 1 right, 1 right -> AUC = P(score_right > score_wrong) with ties halved
    CHECK(*m.auc == doctest::Approx((1.0 + 1.0 + 0.5) / 3.0));
}
