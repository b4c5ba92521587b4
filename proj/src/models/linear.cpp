#include <cmath>

#include "mccs/errors.hpp"
#include "mccs/log.hpp"
#include "models/internal.hpp"

namespace mccs {
namespace {

constexpr double kJitter = 1e-10;

Matrix columns(const Matrix& x, const std::vector<bool>& active) {
    Eigen::Index k = 0;
    for (bool a : active) k += a;
    Matrix out(x.rows(), k);
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (active[static_cast<std::size_t>(j)]) out.col(c++) = x.col(j);
    return out;
}

double residual_ss(const Matrix& x, const Vector& y, const Vector& coef) { return (y - x * coef).squaredNorm(); }

double aic(double rss, double n, Eigen::Index slopes) {
    return n * std::log(std::max(rss, 1e-300) / n) + 2.0 * static_cast<double>(slopes + 1);
}

}  // namespace

namespace zoo {

Vector ols(const Matrix& x, const Vector& y) {
    if (x.cols() == 0) return Vector(0);
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    if (qr.rank() == x.cols()) return qr.solve(y);
    log::warn("singular least-squares system; solving with diagonal jitter");
    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += kJitter;
    return gram.ldlt().solve(x.transpose() * y);
}

Vector ridge(const Matrix& x, const Vector& y, double lambda) {
    if (lambda < 0.0) throw ArgumentError("ridge: negative lambda");
    const double n = static_cast<double>(x.rows());
    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += n * lambda;
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14) {
        log::warn("singular ridge system; adding diagonal jitter");
        gram.diagonal().array() += kJitter;
        ldlt.compute(gram);
    }
    return ldlt.solve(x.transpose() * y);
}

Vector lasso(const Matrix& x, const Vector& y, double lambda, long max_sweeps, double tol) {
    if (lambda < 0.0) throw ArgumentError("lasso: negative lambda");
    const double n = static_cast<double>(x.rows());
    const Eigen::Index p = x.cols();
    const Matrix gram = x.transpose() * x / n;
    Vector grad = x.transpose() * y / n;  // (1/n) X' r with r = y - Xb, b = 0
    Vector b = Vector::Zero(p);
    for (long sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            const double cj = gram(j, j);
            if (cj <= 0.0) continue;
            const double rho = grad(j) + cj * b(j);
            const double shrunk = rho > lambda ? rho - lambda : (rho < -lambda ? rho + lambda : 0.0);
            const double next = shrunk / cj;
            const double delta = next - b(j);
            if (delta == 0.0) continue;
            grad -= delta * gram.col(j);
            b(j) = next;
            max_change = std::max(max_change, std::abs(delta));
        }
        if (max_change < tol) return b;
    }
    throw ConvergenceError("lasso coordinate descent did not converge", max_sweeps);
}

std::vector<bool> backward_select(const Matrix& x, const Vector& y) {
    const double n = static_cast<double>(x.rows());
    std::vector<bool> active(static_cast<std::size_t>(x.cols()), true);
    Eigen::Index k = x.cols();
    double current = aic(residual_ss(columns(x, active), y, ols(columns(x, active), y)), n, k);
    while (k > 0) {
        double best = current;
        std::size_t drop = active.size();
        for (std::size_t j = 0; j < active.size(); ++j) {
            if (!active[j]) continue;
            active[j] = false;
            const Matrix sub = columns(x, active);
            const double candidate = aic(residual_ss(sub, y, ols(sub, y)), n, k - 1);
            active[j] = true;
            if (candidate < best) {
                best = candidate;
                drop = j;
            }
        }
        if (drop == active.size()) break;
        active[drop] = false;
        --k;
        current = best;
    }
    return active;
}

Vector t_stats(const Matrix& x, const Vector& y) {
    const Eigen::Index n = x.rows();
    const Eigen::Index k = x.cols();
    if (n - k - 1 <= 0) throw DataError("t_stats: not enough rows for the residual degrees of freedom");
    Matrix design(n, k + 1);
    design.col(0).setOnes();
    design.rightCols(k) = x;
    const Vector coef = ols(design, y);
    const double sigma2 = std::max(residual_ss(design, y, coef) / static_cast<double>(n - k - 1), 1e-300);
    Matrix gram = design.transpose() * design;
    Eigen::LDLT<Matrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-14) {
        gram.diagonal().array() += kJitter;
        ldlt.compute(gram);
    }
    const Matrix inverse = ldlt.solve(Matrix::Identity(k + 1, k + 1));
    Vector t(k);
    for (Eigen::Index j = 0; j < k; ++j) t(j) = coef(j + 1) / std::sqrt(sigma2 * inverse(j + 1, j + 1));
    return t;
}

}  // namespace zoo

namespace detail {

Vector ols_on_subset(const Matrix& x, const Vector& y, const std::vector<bool>& active) {
    const Vector sub = zoo::ols(columns(x, active), y);
    Vector coef = Vector::Zero(x.cols());
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (active[static_cast<std::size_t>(j)]) coef(j) = sub(c++);
    return coef;
}

}  // namespace detail

Vector lasso_feature_significance(const FittedModel& model, const Matrix& x, const Vector& y) {
    if (model.family != ModelFamily::lasso) throw ArgumentError("feature significance needs a lasso model");
    const auto& state = std::get<LinearState>(model.state);
    Vector out = Vector::Zero(model.input_count());
    const Matrix xs = model.standardizer.transform(x);
    const Matrix sub = columns(xs, state.active);
    if (sub.cols() == 0) return out;
    const Vector t = zoo::t_stats(sub, model.standardizer.transform_y(y));
    const double total = t.cwiseAbs().sum();
    if (!(total > 0.0) || !std::isfinite(total)) return out;
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < out.size(); ++j)
        if (state.active[static_cast<std::size_t>(j)]) out(j) = t(c++) / total;
    return out;
}

}  // namespace mccs
