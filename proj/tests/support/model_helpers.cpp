#include "model_helpers.hpp"

#include <cmath>

namespace mccs::testing {
namespace {

std::vector<double> flatten(const MlpState& s) {
    std::vector<double> out(s.w1.data(), s.w1.data() + s.w1.size());
    out.insert(out.end(), s.b1.data(), s.b1.data() + s.b1.size());
    out.insert(out.end(), s.w2.data(), s.w2.data() + s.w2.size());
    out.push_back(s.b2);
    return out;
}

double* parameter(MlpState& s, std::size_t k) {
    const auto n1 = static_cast<std::size_t>(s.w1.size()), n2 = static_cast<std::size_t>(s.b1.size());
    const auto n3 = static_cast<std::size_t>(s.w2.size());
    if (k < n1) return s.w1.data() + k;
    if (k < n1 + n2) return s.b1.data() + (k - n1);
    if (k < n1 + n2 + n3) return s.w2.data() + (k - n1 - n2);
    return &s.b2;
}

}  // namespace

Matrix random_matrix(Eigen::Index n, Eigen::Index p, std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    Matrix x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = z(rng);
    return x;
}

Vector random_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = z(rng);
    return v;
}

Matrix standardized(const Matrix& x) {
    Matrix out = x.rowwise() - x.colwise().mean();
    for (Eigen::Index j = 0; j < out.cols(); ++j) out.col(j) /= std::sqrt(out.col(j).squaredNorm() / out.rows());
    return out;
}

double max_kkt_violation(const Matrix& x, const Vector& y, const Vector& b, double lambda) {
    const double n = static_cast<double>(x.rows());
    const Vector grad = -x.transpose() * (y - x * b) / n;
    double worst = 0.0;
    for (Eigen::Index j = 0; j < b.size(); ++j) {
        const double v = b(j) == 0.0 ? std::max(0.0, std::abs(grad(j)) - lambda)
                                     : std::abs(grad(j) + lambda * (b(j) > 0 ? 1.0 : -1.0));
        worst = std::max(worst, v);
    }
    return worst;
}

double mlp_gradient_error(MlpState net, const Matrix& x, const Vector& y, double lambda) {
    MlpState grad;
    zoo::mlp_loss_and_gradient(net, x, y, lambda, &grad);
    const std::vector<double> g = flatten(grad);
    double diff = 0.0, norm = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        double* w = parameter(net, k);
        const double keep = *w, h = 1e-6;
        *w = keep + h;
        const double up = zoo::mlp_loss_and_gradient(net, x, y, lambda, nullptr);
        *w = keep - h;
        const double down = zoo::mlp_loss_and_gradient(net, x, y, lambda, nullptr);
        *w = keep;
        const double fd = (up - down) / (2.0 * h);
        diff += (g[k] - fd) * (g[k] - fd);
        norm += g[k] * g[k];
    }
    return std::sqrt(diff / norm);
}

}  // namespace mccs::testing
