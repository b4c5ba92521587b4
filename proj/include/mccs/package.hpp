#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mccs/market.hpp"

namespace mccs {

/// Mid-curve calendar spread: short an option expiring at `expiry` on the swap
/// [expiry + forward, expiry + forward + swap], long the spot swaption on the same
/// swap expiring at expiry + forward. All tenors in years.
struct MccsSpec {
    std::string currency = "EUR";
    double expiry = 1.0;
    double forward = 1.0;
    double swap = 1.0;

    void validate() const;
    /// Trader notation, e.g. "EUR1y1y2y".
    std::string id() const;
    static MccsSpec parse(std::string_view id);
};

/// The 35 trades of the study configuration, in table order.
const std::vector<MccsSpec>& standard_trades();

struct OptionLeg {
    double expiry = 0.0;  // years from inception
    SwapSpec swap;        // start measured from inception
    OptionKind kind = OptionKind::straddle;
    double position = 0.0;  // +1 long, -1 short
};

struct PackageState {
    MccsSpec spec;
    Date inception;
    double strike = 0.0;
    OptionLeg short_leg;  // mid-curve
    OptionLeg long_leg;   // spot swaption
};

/// Feature set computed for a package at inception, in the column order used
/// throughout (CSV headers, design matrices).
struct FeatureVector {
    double pv = 0.0;
    double strike = 0.0;
    double carry_at_expiry = 0.0;
    std::optional<double> be_width;
    double aged_1y_carry = 0.0;
    double theta = 0.0;
    double atmf_implied_vol = 0.0;
    double gamma = 0.0;
    double vega = 0.0;  // per vol point
    double curve_carry_1y = 0.0;
    double time_carry_1y = 0.0;
    double vol_carry_1y = 0.0;

    static constexpr std::size_t size = 12;
    static const std::array<std::string_view, size>& names();
    std::array<std::optional<double>, size> values() const;
};

struct Greeks {
    double theta = 0.0;  // value per year of elapsed time
    double vega = 0.0;   // value per 1 vol point on every leg alpha
    double gamma = 0.0;  // second derivative in the forward rate
};

struct CarryDecomposition {
    double curve = 0.0;
    double time = 0.0;
    double vol = 0.0;
    double residual = 0.0;
    double total = 0.0;  // aged carry being decomposed
};

struct BreakevenRange {
    std::optional<double> lower;
    std::optional<double> upper;
    std::optional<double> width() const;
};

/// ATMF package struck at the forward swap rate of the common underlying.
PackageState build_package(const MccsSpec& spec, const MarketSnapshot& market);

/// Long leg minus short leg, each priced with its own SABR-implied vol.
double package_pv(const PackageState& pkg, const MarketSnapshot& market);

/// Package value at `horizon` years after the market date with forwards
/// realized, the forward moved to each grid rate and every alpha shifted by
/// `vol_shift`, minus the value today.
std::vector<std::pair<double, double>> payoff_profile(const PackageState& pkg, const MarketSnapshot& market,
                                                      double horizon, const std::vector<double>& rate_grid,
                                                      double vol_shift = 0.0);

double carry_at_expiry(const PackageState& pkg, const MarketSnapshot& market);

/// Roots of the expiry payoff on each side of the strike, searched within
/// strike +/- 500 bp by bisection.
BreakevenRange breakevens(const PackageState& pkg, const MarketSnapshot& market, double vol_shift = 0.0);
std::optional<double> breakeven_width(const PackageState& pkg, const MarketSnapshot& market,
                                      double vol_shift = 0.0);

/// Carry after ageing one year (clipped to the short expiry).
double aged_carry_1y(const PackageState& pkg, const MarketSnapshot& market);

Greeks greeks(const PackageState& pkg, const MarketSnapshot& market);

/// One-factor attribution of the aged carry at `horizon` (default: one year,
/// clipped to the short expiry). Residual closes the sum.
CarryDecomposition carry_decomposition(const PackageState& pkg, const MarketSnapshot& market);
CarryDecomposition carry_decomposition(const PackageState& pkg, const MarketSnapshot& market, double horizon);

FeatureVector compute_features(const PackageState& pkg, const MarketSnapshot& market);

/// Vol the long leg is quoted at for an ATMF strike.
double atmf_implied_vol(const PackageState& pkg, const MarketSnapshot& market);

/// Lower-level repricing knobs. Each field moves one ingredient relative to the
/// market date; the default leaves the package as of the market date.
struct Reprice {
    double time_shift = 0.0;     // years removed from each leg's time to expiry
    double surface_shift = 0.0;  // years removed from the expiry used to read SABR params
    double level_scale = 1.0;    // multiplies the annuity
    std::optional<double> forward;  // overrides the forward swap rate
    double alpha_shift = 0.0;
};
double reprice(const PackageState& pkg, const MarketSnapshot& market, const Reprice& how);

}  // namespace mccs
