#include "mccs/scenario.hpp"

#include <cmath>
#include <numbers>

#include "mccs/errors.hpp"

namespace mccs {
namespace {

constexpr double kStep = 7.0 / 364.0;

double ou_step(double x, const OuParams& p, double dt, double shock) {
    if (p.kappa <= 0.0) return x + p.vol * std::sqrt(dt) * shock;
    const double decay = std::exp(-p.kappa * dt);
    const double sd = p.vol * std::sqrt((1.0 - decay * decay) / (2.0 * p.kappa));
    return p.mean + (x - p.mean) * decay + sd * shock;
}

DiscountCurve make_curve(const ScenarioConfig& c, Date date, double level, double slope) {
    std::vector<double> rates;
    rates.reserve(c.curve_times.size());
    for (double t : c.curve_times) {
        const double x = t / c.slope_decay;
        rates.push_back(level - slope * (1.0 - std::exp(-x)) / x);
    }
    return DiscountCurve(date, c.curve_times, std::move(rates));
}

bool respects_floor(const DiscountCurve& curve) {
    for (double t = 0.0; t + 1.0 <= curve.max_time() + 1e-12; t += 0.5) {
        const double fwd = curve.discount(t) / curve.discount(t + 1.0) - 1.0;
        if (fwd < kForwardFloor) return false;
    }
    return true;
}

void check_ou(const OuParams& p, const char* name) {
    if (!(p.vol >= 0.0) || !(p.kappa >= 0.0)) throw ArgumentError(std::string(name) + ": negative vol or kappa");
}

}  // namespace

void ScenarioConfig::validate() const {
    if (years < 3) throw ArgumentError("scenario must span at least 3 years");
    check_ou(level, "level process");
    check_ou(slope, "slope process");
    check_ou(alpha_common, "alpha common process");
    check_ou(alpha_bucket, "alpha bucket process");
    if (!(alpha_base > 0.0) || alpha_hump < 0.0 || !(alpha_hump_decay > 0.0) || !(slope_decay > 0.0))
        throw ArgumentError("alpha term structure parameters out of range");
    if (expiry_buckets.empty() || tenor_buckets.empty() || curve_times.empty())
        throw ArgumentError("empty bucket grid");
    SabrParams{alpha_base, beta, sabr_rho, sabr_nu}.validate();
    if (max_resamples < 1) throw ArgumentError("max_resamples must be positive");
}

double base_alpha(const ScenarioConfig& c, double expiry, double tenor) {
    return (c.alpha_base + c.alpha_hump * std::exp(-expiry / c.alpha_hump_decay)) *
           (1.0 + 0.1 * std::exp(-tenor / 3.0));
}

std::vector<Date> weekly_wednesdays(Date start, int years) {
    constexpr unsigned kWednesday = 3;
    Date d = start.plus_days((kWednesday + 7 - start.weekday()) % 7);
    const Date end = start.plus_years(years);
    std::vector<Date> out;
    for (; d < end; d = d.plus_weeks(1)) out.push_back(d);
    return out;
}

std::vector<MarketSnapshot> generate_history(const ScenarioConfig& c) {
    c.validate();
    const std::vector<Date> dates = weekly_wednesdays(c.start, c.years);
    const std::size_t buckets = c.expiry_buckets.size() * c.tenor_buckets.size();

    double level = c.level.mean;
    double slope = c.slope.mean;
    double common = c.alpha_common.mean;
    std::vector<double> bucket(buckets, c.alpha_bucket.mean);

    std::vector<MarketSnapshot> history;
    history.reserve(dates.size());
    for (std::size_t step = 0; step < dates.size(); ++step) {
        const Date date = dates[step];
        const auto serial = static_cast<std::uint64_t>(date.serial());
        DiscountCurve curve;
        if (step == 0) {
            curve = make_curve(c, date, level, slope);
            if (!respects_floor(curve)) throw DataError("initial curve violates the forward floor");
        } else {
            bool accepted = false;
            for (int attempt = 0; attempt < c.max_resamples && !accepted; ++attempt) {
                StreamRng rng(stream_key({c.seed, serial, 0, static_cast<std::uint64_t>(attempt)}));
                const double next_level = ou_step(level, c.level, kStep, rng.normal());
                const double next_slope = ou_step(slope, c.slope, kStep, rng.normal());
                DiscountCurve candidate = make_curve(c, date, next_level, next_slope);
                if (respects_floor(candidate)) {
                    level = next_level;
                    slope = next_slope;
                    curve = std::move(candidate);
                    accepted = true;
                }
            }
            if (!accepted) throw DataError("scenario generation: forward floor violated on " + date.iso());

            StreamRng common_rng(stream_key({c.seed, serial, 1}));
            common = ou_step(common, c.alpha_common, kStep, common_rng.normal());
            for (std::size_t b = 0; b < buckets; ++b) {
                StreamRng rng(stream_key({c.seed, serial, 2 + b}));
                bucket[b] = ou_step(bucket[b], c.alpha_bucket, kStep, rng.normal());
            }
        }

        std::vector<SabrParams> cells;
        cells.reserve(buckets);
        for (std::size_t i = 0; i < c.expiry_buckets.size(); ++i)
            for (std::size_t j = 0; j < c.tenor_buckets.size(); ++j) {
                const double alpha = base_alpha(c, c.expiry_buckets[i], c.tenor_buckets[j]) *
                                     std::exp(common + bucket[i * c.tenor_buckets.size() + j]);
                cells.push_back(SabrParams{alpha, c.beta, c.sabr_rho, c.sabr_nu});
            }

        MarketSnapshot snap;
        snap.date = date;
        snap.funding_rate = (1.0 / curve.discount(0.25) - 1.0) / 0.25 + c.funding_spread;
        snap.curve = std::move(curve);
        snap.surface = SabrSurface(c.expiry_buckets, c.tenor_buckets, std::move(cells));
        history.push_back(std::move(snap));
    }
    return history;
}

}  // namespace mccs
