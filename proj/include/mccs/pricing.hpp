#pragma once

#include <span>
#include <vector>

#include "mccs/date.hpp"

namespace mccs {

/// SABR parameters for one expiry/tenor cell.
struct SabrParams {
    double alpha = 0.2;  // initial vol level, > 0
    double beta = 1.0;   // CEV exponent, [0, 1]
    double rho = 0.0;    // spot-vol correlation, (-1, 1)
    double nu = 0.0;     // vol of vol, >= 0

    /// Throws DomainError if any field violates its range.
    void validate() const;
};

/// Zero-rate term structure. Continuous compounding, linear interpolation in the
/// zero rate between knots, flat below the first knot. Points past the last knot
/// raise CoverageError.
class DiscountCurve {
public:
    DiscountCurve() = default;
    DiscountCurve(Date valuation, std::vector<double> times, std::vector<double> zero_rates);

    static DiscountCurve flat(Date valuation, double rate, double max_time = 30.0);

    const Date& valuation_date() const { return valuation_; }
    std::span<const double> times() const { return times_; }
    std::span<const double> zero_rates() const { return rates_; }
    double max_time() const { return times_.empty() ? 0.0 : times_.back(); }

    double zero_rate(double t) const;
    double discount(double t) const;

    /// Curve seen from `horizon` years ahead when today's forwards realize:
    /// df_h(t) = df(h + t) / df(h), re-expressed on the same knot times.
    DiscountCurve rolled(double horizon, Date new_valuation) const;

private:
    Date valuation_{};
    std::vector<double> times_;
    std::vector<double> rates_;
};

/// Fixed leg of a (possibly forward-starting) swap, in years from valuation.
struct SwapSpec {
    double start = 0.0;
    double tenor = 1.0;
    int fixed_frequency = 1;  // payments per year

    void validate() const;
};

enum class OptionKind { payer, receiver, straddle };

/// Sum of accrual * df over the fixed payment dates. A short final period is a stub.
double annuity(const DiscountCurve& curve, const SwapSpec& swap);

/// Par rate of the swap: (df(start) - df(end)) / annuity.
double forward_swap_rate(const DiscountCurve& curve, const SwapSpec& swap);

/// Hagan et al. (2002) lognormal implied-volatility expansion.
/// Requires forward, strike, expiry > 0.
double hagan_lognormal_vol(double forward, double strike, double expiry, const SabrParams& p);

/// Black-76 value under the annuity measure, scaled by `level`.
/// Zero vol or zero expiry collapses to intrinsic value.
double black_price(double forward, double strike, double expiry, double vol, double level,
                   OptionKind kind);

/// Standard normal cdf, accurate in both tails.
double norm_cdf(double x);
double norm_pdf(double x);

}  // namespace mccs
