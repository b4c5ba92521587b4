#include "mccs/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mccs/errors.hpp"

namespace mccs {

void SabrParams::validate() const {
    if (!(alpha > 0.0)) throw DomainError("SABR alpha must be positive");
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("SABR beta must lie in [0, 1]");
    if (!(std::abs(rho) < 1.0)) throw DomainError("SABR rho must lie in (-1, 1)");
    if (!(nu >= 0.0)) throw DomainError("SABR nu must be non-negative");
}

DiscountCurve::DiscountCurve(Date valuation, std::vector<double> times, std::vector<double> zero_rates)
    : valuation_(valuation), times_(std::move(times)), rates_(std::move(zero_rates)) {
    if (times_.empty() || times_.size() != rates_.size())
        throw ArgumentError("discount curve needs matching, non-empty knot vectors");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!(times_[i] > 0.0) || (i > 0 && !(times_[i] > times_[i - 1])))
            throw ArgumentError("discount curve knot times must be positive and increasing");
        if (!std::isfinite(rates_[i])) throw ArgumentError("discount curve zero rate is not finite");
    }
}

DiscountCurve DiscountCurve::flat(Date valuation, double rate, double max_time) {
    return DiscountCurve(valuation, {max_time}, {rate});
}

double DiscountCurve::zero_rate(double t) const {
    if (times_.empty()) throw CoverageError("empty discount curve");
    if (t > times_.back() * (1.0 + 1e-12))
        throw CoverageError("discount curve ends at " + std::to_string(times_.back()) + "y, asked for " +
                            std::to_string(t) + "y");
    if (t <= times_.front()) return rates_.front();
    if (t >= times_.back()) return rates_.back();
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times_.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
    return rates_[lo] + w * (rates_[hi] - rates_[lo]);
}

double DiscountCurve::discount(double t) const {
    if (t < 0.0) throw DomainError("negative discount time");
    if (t == 0.0) return 1.0;
    return std::exp(-zero_rate(t) * t);
}

DiscountCurve DiscountCurve::rolled(double horizon, Date new_valuation) const {
    if (horizon < 0.0) throw DomainError("negative roll horizon");
    if (horizon == 0.0) return DiscountCurve(new_valuation, times_, rates_);
    const double df_h = discount(horizon);
    std::vector<double> times;
    std::vector<double> rates;
    for (double t : times_) {
        if (t + horizon > times_.back()) break;
        times.push_back(t);
        rates.push_back(-std::log(discount(t + horizon) / df_h) / t);
    }
    const double tail = times_.back() - horizon;
    if (times.empty() || times.back() < tail) {
        times.push_back(tail);
        rates.push_back(-std::log(discount(times_.back()) / df_h) / tail);
    }
    return DiscountCurve(new_valuation, std::move(times), std::move(rates));
}

void SwapSpec::validate() const {
    if (!(start >= 0.0)) throw DomainError("swap start must be non-negative");
    if (!(tenor > 0.0)) throw DomainError("swap tenor must be positive");
    if (fixed_frequency < 1) throw DomainError("swap fixed frequency must be at least 1");
}

double annuity(const DiscountCurve& curve, const SwapSpec& swap) {
    swap.validate();
    const double period = 1.0 / swap.fixed_frequency;
    const double end = swap.start + swap.tenor;
    // Regular periods from the start; a remainder shorter than a period becomes a final stub.
    const long full = static_cast<long>(std::floor(swap.tenor * swap.fixed_frequency + 1e-9));
    double level = 0.0;
    double prev = swap.start;
    for (long i = 1; i <= full; ++i) {
        const double pay = (i == full && std::abs(swap.start + i * period - end) < 1e-9) ? end
                                                                                        : swap.start + i * period;
        level += (pay - prev) * curve.discount(pay);
        prev = pay;
    }
    if (end - prev > 1e-9) level += (end - prev) * curve.discount(end);
    return level;
}

double forward_swap_rate(const DiscountCurve& curve, const SwapSpec& swap) {
    const double level = annuity(curve, swap);
    if (!(level > 0.0)) throw DomainError("non-positive annuity");
    return (curve.discount(swap.start) - curve.discount(swap.start + swap.tenor)) / level;
}

double hagan_lognormal_vol(double f, double k, double t, const SabrParams& p) {
    if (!(f > 0.0) || !(k > 0.0) || !(t > 0.0))
        throw DomainError("hagan_lognormal_vol needs positive forward, strike and expiry");
    p.validate();

    const double one_minus_beta = 1.0 - p.beta;
    const double log_fk = std::log(f / k);
    const double fk_pow = std::pow(f * k, 0.5 * one_minus_beta);  // (FK)^((1-b)/2)

    const double b2 = one_minus_beta * one_minus_beta;
    const double denom = fk_pow * (1.0 + b2 / 24.0 * log_fk * log_fk +
                                   b2 * b2 / 1920.0 * log_fk * log_fk * log_fk * log_fk);
    const double correction = 1.0 + (b2 / 24.0 * p.alpha * p.alpha / (fk_pow * fk_pow) +
                                     0.25 * p.rho * p.beta * p.nu * p.alpha / fk_pow +
                                     (2.0 - 3.0 * p.rho * p.rho) / 24.0 * p.nu * p.nu) *
                                        t;

    // z / x(z), with a series near z = 0 so the ATM limit is continuous.
    const double z = p.nu / p.alpha * fk_pow * log_fk;
    double z_over_x;
    if (std::abs(z) < 1e-6) {
        z_over_x = 1.0 - 0.5 * p.rho * z + (2.0 - 3.0 * p.rho * p.rho) / 12.0 * z * z;
    } else {
        const double x = std::log((std::sqrt(1.0 - 2.0 * p.rho * z + z * z) + z - p.rho) / (1.0 - p.rho));
        z_over_x = z / x;
    }
    return p.alpha / denom * z_over_x * correction;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

double norm_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double black_price(double f, double k, double t, double vol, double level, OptionKind kind) {
    if (vol < 0.0) throw DomainError("black_price: negative vol");
    if (level < 0.0) throw DomainError("black_price: negative annuity level");
    if (t < 0.0) throw DomainError("black_price: negative expiry");

    const double total_vol = vol * std::sqrt(t);
    double payer;
    double receiver;
    if (total_vol <= 0.0 || f <= 0.0 || k <= 0.0) {
        payer = std::max(f - k, 0.0);
        receiver = std::max(k - f, 0.0);
    } else {
        const double d1 = std::log(f / k) / total_vol + 0.5 * total_vol;
        const double d2 = d1 - total_vol;
        payer = f * norm_cdf(d1) - k * norm_cdf(d2);
        receiver = k * norm_cdf(-d2) - f * norm_cdf(-d1);
    }
    switch (kind) {
        case OptionKind::payer:
            return level * payer;
        case OptionKind::receiver:
            return level * receiver;
        case OptionKind::straddle:
            return level * (payer + receiver);
    }
    return 0.0;
}

}  // namespace mccs
