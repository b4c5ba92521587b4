#include <algorithm>
#include <numeric>

#include "models/internal.hpp"

namespace mccs::detail {

Vector predict_knn(const NeighborState& state, const Matrix& x) {
    const Eigen::Index n = state.points.rows();
    const Eigen::Index k = std::min<Eigen::Index>(std::max(state.k, 1), n);
    Vector out(x.rows());
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (Eigen::Index q = 0; q < x.rows(); ++q) {
        for (Eigen::Index i = 0; i < n; ++i)
            dist[static_cast<std::size_t>(i)] = (state.points.row(i) - x.row(q)).squaredNorm();
        std::iota(order.begin(), order.end(), 0);
        // Distance ties resolve toward the earlier training row.
        std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Eigen::Index a, Eigen::Index b) {
            const double da = dist[static_cast<std::size_t>(a)];
            const double db = dist[static_cast<std::size_t>(b)];
            return da < db || (da == db && a < b);
        });
        double sum = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) sum += state.targets(order[static_cast<std::size_t>(i)]);
        out(q) = sum / static_cast<double>(k);
    }
    return out;
}

}  // namespace mccs::detail
