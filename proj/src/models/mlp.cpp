#include <cmath>

#include "mccs/errors.hpp"
#include "mccs/random.hpp"
#include "models/internal.hpp"

namespace mccs {

namespace zoo {

MlpState mlp_init(Eigen::Index inputs, int hidden, std::uint64_t seed) {
    if (inputs < 1 || hidden < 1) throw ArgumentError("mlp: need at least one input and one hidden unit");
    MlpState net;
    StreamRng rng(stream_key({seed, 0x6d6c70, static_cast<std::uint64_t>(inputs), static_cast<std::uint64_t>(hidden)}));
    const double limit1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
    const double limit2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
    net.w1.resize(hidden, inputs);
    for (Eigen::Index i = 0; i < net.w1.rows(); ++i)
        for (Eigen::Index j = 0; j < net.w1.cols(); ++j) net.w1(i, j) = limit1 * (2.0 * rng.uniform() - 1.0);
    net.b1 = Vector::Zero(hidden);
    net.w2.resize(hidden);
    for (Eigen::Index i = 0; i < net.w2.size(); ++i) net.w2(i) = limit2 * (2.0 * rng.uniform() - 1.0);
    net.b2 = 0.0;
    return net;
}

double mlp_loss_and_gradient(const MlpState& net, const Matrix& x, const Vector& y, double lambda,
                             MlpState* gradient) {
    const double n = static_cast<double>(x.rows());
    // hidden activations: n x h
    const Matrix h = ((x * net.w1.transpose()).rowwise() + net.b1.transpose()).array().tanh().matrix();
    const Vector err = (h * net.w2).array() + net.b2 - y.array();
    const double loss =
        0.5 * err.squaredNorm() / n + 0.5 * lambda * (net.w1.squaredNorm() + net.w2.squaredNorm());
    if (gradient) {
        const Vector d_out = err / n;
        gradient->w2 = h.transpose() * d_out + lambda * net.w2;
        gradient->b2 = d_out.sum();
        const Matrix d_hidden = ((d_out * net.w2.transpose()).array() * (1.0 - h.array().square())).matrix();
        gradient->w1 = d_hidden.transpose() * x + lambda * net.w1;
        gradient->b1 = d_hidden.colwise().sum().transpose();
    }
    return loss;
}

}  // namespace zoo

namespace detail {

MlpState fit_mlp(const Matrix& x, const Vector& y, int hidden, double lambda, int epochs, double step,
                 std::uint64_t seed) {
    if (epochs < 0 || !(step > 0.0) || !(lambda >= 0.0)) throw ArgumentError("mlp: invalid training settings");
    MlpState net = zoo::mlp_init(x.cols(), hidden, seed);
    MlpState grad;
    for (int e = 0; e < epochs; ++e) {
        zoo::mlp_loss_and_gradient(net, x, y, lambda, &grad);
        net.w1 -= step * grad.w1;
        net.b1 -= step * grad.b1;
        net.w2 -= step * grad.w2;
        net.b2 -= step * grad.b2;
    }
    if (!net.w1.allFinite() || !net.w2.allFinite() || !std::isfinite(net.b2))
        throw ConvergenceError("mlp: training diverged", epochs);
    return net;
}

Vector predict_mlp(const MlpState& net, const Matrix& x) {
    const Matrix h = ((x * net.w1.transpose()).rowwise() + net.b1.transpose()).array().tanh().matrix();
    return (h * net.w2).array() + net.b2;
}

}  // namespace detail
}  // namespace mccs
