#include "mccs/package.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mccs/errors.hpp"
#include "mccs/log.hpp"

namespace mccs {
namespace {

constexpr double kBreakevenSearch = 0.05;  // 500 bp either side of the strike
constexpr int kBisectionIterations = 80;
constexpr double kLowestRate = 1e-6;
constexpr double kThetaBump = 1.0 / 365.0;
constexpr double kVolPoint = 0.01;
constexpr double kGammaBump = 0.0025;

std::string format_tenor(double years) {
    char buf[32];
    const double rounded = std::round(years);
    if (std::abs(years - rounded) < 1e-9) {
        std::snprintf(buf, sizeof buf, "%dy", static_cast<int>(rounded));
    } else {
        std::snprintf(buf, sizeof buf, "%dm", static_cast<int>(std::lround(years * 12.0)));
    }
    return buf;
}

struct LegValue {
    double value = 0.0;
    double alpha = 0.0;
};

double elapsed_years(const PackageState& pkg, const MarketSnapshot& market) {
    const double tau = year_fraction(pkg.inception, market.date);
    if (tau < -1e-12) throw ArgumentError("market date precedes package inception");
    return std::max(tau, 0.0);
}

SwapSpec swap_from_today(const OptionLeg& leg, double elapsed) {
    SwapSpec s = leg.swap;
    s.start = std::max(leg.swap.start - elapsed, 0.0);
    return s;
}

LegValue value_leg(const OptionLeg& leg, const SabrSurface& surface, double strike, double forward,
                   double level, double elapsed, const Reprice& how) {
    const double time_to_expiry = leg.expiry - elapsed - how.time_shift;
    const double read_expiry = std::max(leg.expiry - elapsed - how.surface_shift, 0.0);
    SabrParams p = surface.at(read_expiry, leg.swap.tenor);
    p.alpha += how.alpha_shift;
    LegValue out{0.0, p.alpha};
    double vol = 0.0;
    if (time_to_expiry > 0.0) vol = hagan_lognormal_vol(forward, strike, time_to_expiry, p);
    out.value = leg.position * black_price(forward, strike, std::max(time_to_expiry, 0.0), vol, level, leg.kind);
    return out;
}

double remaining_short_expiry(const PackageState& pkg, const MarketSnapshot& market) {
    return std::max(pkg.short_leg.expiry - elapsed_years(pkg, market), 0.0);
}

double horizon_value(const PackageState& pkg, const MarketSnapshot& market, double horizon,
                     std::optional<double> forward, double vol_shift) {
    Reprice how;
    how.time_shift = horizon;
    how.surface_shift = horizon;
    how.level_scale = 1.0 / market.curve.discount(horizon);
    how.forward = forward;
    how.alpha_shift = vol_shift;
    return reprice(pkg, market, how);
}

}  // namespace

void MccsSpec::validate() const {
    if (!(expiry > 0.0) || !(forward > 0.0) || !(swap > 0.0))
        throw ArgumentError("MCCS expiry, forward and swap must be positive");
}

std::string MccsSpec::id() const {
    return currency + format_tenor(expiry) + format_tenor(forward) + format_tenor(swap);
}

MccsSpec MccsSpec::parse(std::string_view id) {
    MccsSpec spec;
    std::size_t pos = 0;
    while (pos < id.size() && std::isalpha(static_cast<unsigned char>(id[pos]))) ++pos;
    spec.currency = std::string(id.substr(0, pos));
    if (spec.currency.empty()) throw ArgumentError("trade id lacks a currency: '" + std::string(id) + "'");
    double parts[3];
    for (double& part : parts) {
        std::size_t start = pos;
        while (pos < id.size() && std::isdigit(static_cast<unsigned char>(id[pos]))) ++pos;
        if (pos == start || pos >= id.size()) throw ArgumentError("malformed trade id '" + std::string(id) + "'");
        const int n = std::stoi(std::string(id.substr(start, pos - start)));
        const char unit = id[pos++];
        if (unit == 'y') {
            part = n;
        } else if (unit == 'm') {
            part = n / 12.0;
        } else {
            throw ArgumentError("malformed trade id '" + std::string(id) + "'");
        }
    }
    if (pos != id.size()) throw ArgumentError("malformed trade id '" + std::string(id) + "'");
    spec.expiry = parts[0];
    spec.forward = parts[1];
    spec.swap = parts[2];
    spec.validate();
    return spec;
}

const std::vector<MccsSpec>& standard_trades() {
    static const std::vector<MccsSpec> trades = [] {
        // Per expiry the table repeats the same seven (forward, swap) pairs.
        constexpr std::pair<int, int> pairs[] = {{1, 1}, {1, 4}, {2, 3}, {2, 8}, {3, 2}, {4, 1}, {5, 5}};
        std::vector<MccsSpec> out;
        for (int e = 1; e <= 5; ++e)
            for (auto [f, s] : pairs) out.push_back(MccsSpec{"EUR", double(e), double(f), double(s)});
        return out;
    }();
    return trades;
}

const std::array<std::string_view, FeatureVector::size>& FeatureVector::names() {
    static const std::array<std::string_view, size> n = {
        "PV",    "Strike",  "Carry at Expiry", "Breakeven Width", "Aged 1y Carry", "Theta", "ATMF Implied Volatility",
        "Gamma", "Vega",    "Curve Carry (Aged 1y)", "Time Carry (Aged 1y)", "Volatility Carry (Aged 1y)"};
    return n;
}

std::array<std::optional<double>, FeatureVector::size> FeatureVector::values() const {
    return {pv,    strike, carry_at_expiry, be_width,       aged_1y_carry, theta, atmf_implied_vol,
            gamma, vega,   curve_carry_1y,  time_carry_1y, vol_carry_1y};
}

std::optional<double> BreakevenRange::width() const {
    if (!lower || !upper) return std::nullopt;
    return *upper - *lower;
}

PackageState build_package(const MccsSpec& spec, const MarketSnapshot& market) {
    spec.validate();
    PackageState pkg;
    pkg.spec = spec;
    pkg.inception = market.date;
    const SwapSpec underlying{spec.expiry + spec.forward, spec.swap, 1};
    pkg.strike = forward_swap_rate(market.curve, underlying);
    pkg.short_leg = OptionLeg{spec.expiry, underlying, OptionKind::straddle, -1.0};
    pkg.long_leg = OptionLeg{spec.expiry + spec.forward, underlying, OptionKind::straddle, +1.0};
    return pkg;
}

double reprice(const PackageState& pkg, const MarketSnapshot& market, const Reprice& how) {
    const double elapsed = elapsed_years(pkg, market);
    const SwapSpec swap = swap_from_today(pkg.long_leg, elapsed);
    const double level = annuity(market.curve, swap) * how.level_scale;
    const double forward = how.forward ? *how.forward : forward_swap_rate(market.curve, swap);
    const LegValue shorter = value_leg(pkg.short_leg, market.surface, pkg.strike, forward, level, elapsed, how);
    const LegValue longer = value_leg(pkg.long_leg, market.surface, pkg.strike, forward, level, elapsed, how);
    return longer.value + shorter.value;
}

double package_pv(const PackageState& pkg, const MarketSnapshot& market) { return reprice(pkg, market, {}); }

std::vector<std::pair<double, double>> payoff_profile(const PackageState& pkg, const MarketSnapshot& market,
                                                      double horizon, const std::vector<double>& rate_grid,
                                                      double vol_shift) {
    if (rate_grid.empty()) throw ArgumentError("payoff_profile: empty rate grid");
    if (horizon < 0.0) throw ArgumentError("payoff_profile: negative horizon");
    if (horizon > remaining_short_expiry(pkg, market) + 1e-12)
        throw ArgumentError("payoff_profile: horizon beyond the short-leg expiry");
    const double entry = package_pv(pkg, market);
    std::vector<std::pair<double, double>> out;
    out.reserve(rate_grid.size());
    for (double rate : rate_grid) out.emplace_back(rate, horizon_value(pkg, market, horizon, rate, vol_shift) - entry);
    return out;
}

double carry_at_expiry(const PackageState& pkg, const MarketSnapshot& market) {
    const double horizon = remaining_short_expiry(pkg, market);
    if (horizon <= 0.0) return 0.0;
    return horizon_value(pkg, market, horizon, std::nullopt, 0.0) - package_pv(pkg, market);
}

BreakevenRange breakevens(const PackageState& pkg, const MarketSnapshot& market, double vol_shift) {
    const double horizon = remaining_short_expiry(pkg, market);
    const double entry = package_pv(pkg, market);
    auto payoff = [&](double rate) { return horizon_value(pkg, market, horizon, rate, vol_shift) - entry; };

    BreakevenRange out;
    const double k = pkg.strike;
    const double at_strike = payoff(k);
    if (!(at_strike > 0.0)) return out;

    auto bisect = [&](double inside, double outside) -> std::optional<double> {
        if (payoff(outside) >= 0.0) return std::nullopt;
        double pos = inside;
        double neg = outside;
        for (int i = 0; i < kBisectionIterations && std::abs(pos - neg) > 1e-12; ++i) {
            const double mid = 0.5 * (pos + neg);
            (payoff(mid) > 0.0 ? pos : neg) = mid;
        }
        return 0.5 * (pos + neg);
    };
    out.lower = bisect(k, std::max(k - kBreakevenSearch, kLowestRate));
    out.upper = bisect(k, k + kBreakevenSearch);
    return out;
}

std::optional<double> breakeven_width(const PackageState& pkg, const MarketSnapshot& market, double vol_shift) {
    return breakevens(pkg, market, vol_shift).width();
}

double aged_carry_1y(const PackageState& pkg, const MarketSnapshot& market) {
    const double horizon = std::min(1.0, remaining_short_expiry(pkg, market));
    return horizon_value(pkg, market, horizon, std::nullopt, 0.0) - package_pv(pkg, market);
}

Greeks greeks(const PackageState& pkg, const MarketSnapshot& market) {
    Greeks g;
    const double elapsed = elapsed_years(pkg, market);

    Reprice later;
    later.time_shift = kThetaBump;
    Reprice earlier;
    earlier.time_shift = -kThetaBump;
    g.theta = (reprice(pkg, market, later) - reprice(pkg, market, earlier)) / (2.0 * kThetaBump);

    const double tenor = pkg.long_leg.swap.tenor;
    const double min_alpha =
        std::min(market.surface.at(std::max(pkg.short_leg.expiry - elapsed, 0.0), tenor).alpha,
                 market.surface.at(std::max(pkg.long_leg.expiry - elapsed, 0.0), tenor).alpha);
    double vol_bump = kVolPoint;
    if (vol_bump >= min_alpha) {
        vol_bump = 0.5 * min_alpha;
        log::warn("vega bump shrunk to keep alpha positive for " + pkg.spec.id());
    }
    Reprice up;
    up.alpha_shift = vol_bump;
    Reprice down;
    down.alpha_shift = -vol_bump;
    g.vega = (reprice(pkg, market, up) - reprice(pkg, market, down)) / (2.0 * vol_bump) * kVolPoint;

    const SwapSpec swap = swap_from_today(pkg.long_leg, elapsed);
    const double forward = forward_swap_rate(market.curve, swap);
    double rate_bump = kGammaBump;
    if (forward - rate_bump < kForwardFloor) {
        rate_bump = forward - kForwardFloor > 0.0 ? forward - kForwardFloor : 0.5 * forward;
        rate_bump = std::max(rate_bump, 1e-6);
        log::warn("gamma bump shrunk to respect the forward floor for " + pkg.spec.id());
    }
    Reprice f_up;
    f_up.forward = forward + rate_bump;
    Reprice f_down;
    f_down.forward = forward - rate_bump;
    Reprice f_mid;
    f_mid.forward = forward;
    g.gamma = (reprice(pkg, market, f_up) - 2.0 * reprice(pkg, market, f_mid) + reprice(pkg, market, f_down)) /
              (rate_bump * rate_bump);
    return g;
}

CarryDecomposition carry_decomposition(const PackageState& pkg, const MarketSnapshot& market, double horizon) {
    if (horizon < 0.0) throw ArgumentError("carry_decomposition: negative horizon");
    const double entry = package_pv(pkg, market);
    CarryDecomposition out;

    Reprice curve_only;
    curve_only.level_scale = 1.0 / market.curve.discount(horizon);
    out.curve = reprice(pkg, market, curve_only) - entry;

    Reprice time_only;
    time_only.time_shift = horizon;
    out.time = reprice(pkg, market, time_only) - entry;

    Reprice vol_only;
    vol_only.surface_shift = horizon;
    out.vol = reprice(pkg, market, vol_only) - entry;

    out.total = horizon_value(pkg, market, horizon, std::nullopt, 0.0) - entry;
    out.residual = out.total - (out.curve + out.time + out.vol);
    return out;
}

CarryDecomposition carry_decomposition(const PackageState& pkg, const MarketSnapshot& market) {
    return carry_decomposition(pkg, market, std::min(1.0, remaining_short_expiry(pkg, market)));
}

double atmf_implied_vol(const PackageState& pkg, const MarketSnapshot& market) {
    const double elapsed = elapsed_years(pkg, market);
    const double expiry = pkg.long_leg.expiry - elapsed;
    if (expiry <= 0.0) return 0.0;
    const double forward = forward_swap_rate(market.curve, swap_from_today(pkg.long_leg, elapsed));
    return hagan_lognormal_vol(forward, forward, expiry, market.surface.at(expiry, pkg.long_leg.swap.tenor));
}

FeatureVector compute_features(const PackageState& pkg, const MarketSnapshot& market) {
    FeatureVector f;
    f.pv = package_pv(pkg, market);
    f.strike = pkg.strike;
    f.carry_at_expiry = carry_at_expiry(pkg, market);
    f.be_width = breakeven_width(pkg, market);
    const CarryDecomposition carry = carry_decomposition(pkg, market);
    f.aged_1y_carry = carry.total;
    const Greeks g = greeks(pkg, market);
    f.theta = g.theta;
    f.atmf_implied_vol = atmf_implied_vol(pkg, market);
    f.gamma = g.gamma;
    f.vega = g.vega;
    f.curve_carry_1y = carry.curve;
    f.time_carry_1y = carry.time;
    f.vol_carry_1y = carry.vol;
    return f;
}

}  // namespace mccs
