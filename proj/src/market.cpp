#include "mccs/market.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mccs/errors.hpp"

namespace mccs {
namespace {

// Bracketing index and weight for flat-extrapolated linear interpolation.
std::pair<std::size_t, double> locate(const std::vector<double>& knots, double x) {
    if (knots.size() == 1 || x <= knots.front()) return {0, 0.0};
    if (x >= knots.back()) return {knots.size() - 2, 1.0};
    const auto it = std::upper_bound(knots.begin(), knots.end(), x);
    const std::size_t lo = static_cast<std::size_t>(it - knots.begin()) - 1;
    return {lo, (x - knots[lo]) / (knots[lo + 1] - knots[lo])};
}

}  // namespace

SabrSurface::SabrSurface(std::vector<double> expiries, std::vector<double> tenors, std::vector<SabrParams> cells)
    : expiries_(std::move(expiries)), tenors_(std::move(tenors)), cells_(std::move(cells)) {
    if (expiries_.empty() || tenors_.empty() || cells_.size() != expiries_.size() * tenors_.size())
        throw ArgumentError("SABR surface dimensions do not match its bucket grid");
    if (!std::is_sorted(expiries_.begin(), expiries_.end()) || !std::is_sorted(tenors_.begin(), tenors_.end()))
        throw ArgumentError("SABR surface buckets must be increasing");
    for (const auto& c : cells_) c.validate();
}

SabrParams SabrSurface::at(double expiry, double tenor) const {
    if (cells_.empty()) throw ArgumentError("empty SABR surface");
    const auto [i, wi] = locate(expiries_, expiry);
    const auto [j, wj] = locate(tenors_, tenor);
    const std::size_t i1 = std::min(i + 1, expiries_.size() - 1);
    const std::size_t j1 = std::min(j + 1, tenors_.size() - 1);
    auto blend = [&](auto field) {
        const double a = (1.0 - wj) * cell(i, j).*field + wj * cell(i, j1).*field;
        const double b = (1.0 - wj) * cell(i1, j).*field + wj * cell(i1, j1).*field;
        return (1.0 - wi) * a + wi * b;
    };
    return SabrParams{blend(&SabrParams::alpha), blend(&SabrParams::beta), blend(&SabrParams::rho),
                      blend(&SabrParams::nu)};
}

std::string bucket_id(double expiry, double tenor) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%gx%g", expiry, tenor);
    return buf;
}

}  // namespace mccs
