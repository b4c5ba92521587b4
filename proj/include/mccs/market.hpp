#pragma once

#include <map>
#include <string>
#include <vector>

#include "mccs/date.hpp"
#include "mccs/pricing.hpp"

namespace mccs {

/// SABR parameters on an (option expiry x swap tenor) bucket grid.
/// Lookup interpolates every parameter bilinearly and extrapolates flat.
class SabrSurface {
public:
    SabrSurface() = default;
    SabrSurface(std::vector<double> expiries, std::vector<double> tenors, std::vector<SabrParams> cells);

    std::size_t expiry_count() const { return expiries_.size(); }
    std::size_t tenor_count() const { return tenors_.size(); }
    const std::vector<double>& expiries() const { return expiries_; }
    const std::vector<double>& tenors() const { return tenors_; }

    /// Row-major: cell(i_expiry, j_tenor).
    const SabrParams& cell(std::size_t i, std::size_t j) const { return cells_[i * tenors_.size() + j]; }
    SabrParams& cell(std::size_t i, std::size_t j) { return cells_[i * tenors_.size() + j]; }
    const std::vector<SabrParams>& cells() const { return cells_; }

    SabrParams at(double expiry, double tenor) const;

private:
    std::vector<double> expiries_;
    std::vector<double> tenors_;
    std::vector<SabrParams> cells_;
};

/// Bucket id used in archives: "<expiry>x<tenor>", e.g. "2x5".
std::string bucket_id(double expiry, double tenor);

/// One dated market state.
struct MarketSnapshot {
    Date date;
    DiscountCurve curve;
    SabrSurface surface;
    double funding_rate = 0.0;  // 3-month rate, simple annualized
    /// Return overlay for the trade entered one holding period before `date`,
    /// keyed by trade id. Empty unless a signal has been planted.
    std::map<std::string, double> planted_return;
};

/// Forward swap rate floor enforced by the scenario generator.
inline constexpr double kForwardFloor = 0.0010;

/// Weekly calendar convention: 52 weeks is exactly one year.
inline double year_fraction(const Date& from, const Date& to) { return days_between(from, to) / 364.0; }

}  // namespace mccs
