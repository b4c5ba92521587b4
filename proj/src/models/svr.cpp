#include <algorithm>
#include <cmath>
#include <limits>

#include "mccs/errors.hpp"
#include "models/internal.hpp"

namespace mccs {

namespace zoo {

// The dual is solved over 2n variables a = (alpha, alpha*) with signs
// s = (+1, -1): minimize 0.5 a'Qa + p'a subject to s'a = 0, 0 <= a <= C,
// where Q_ij = s_i s_j K(i mod n, j mod n).
SvrSolution svr_smo(const Matrix& kernel, const Vector& y, double c, double epsilon, double tol) {
    const Eigen::Index n = y.size();
    if (kernel.rows() != n || kernel.cols() != n) throw ArgumentError("svr: kernel size does not match labels");
    if (n == 0) throw DataError("svr: no training rows");
    if (!(c > 0.0) || !(epsilon >= 0.0) || !(tol > 0.0)) throw ArgumentError("svr: invalid C, epsilon or tolerance");

    constexpr double kTau = 1e-12;
    const Eigen::Index m = 2 * n;
    const auto sign = [n](Eigen::Index t) { return t < n ? 1.0 : -1.0; };
    const auto q = [&](Eigen::Index a, Eigen::Index b) { return sign(a) * sign(b) * kernel(a % n, b % n); };

    Vector a = Vector::Zero(m);
    Vector g(m);
    for (Eigen::Index t = 0; t < n; ++t) {
        g(t) = epsilon - y(t);
        g(t + n) = epsilon + y(t);
    }
    const auto at_upper = [&](Eigen::Index t) { return a(t) >= c; };
    const auto at_lower = [&](Eigen::Index t) { return a(t) <= 0.0; };

    const long max_iter = std::max<long>(10'000'000L, 100L * static_cast<long>(m));
    long iter = 0;
    for (;; ++iter) {
        if (iter >= max_iter) throw ConvergenceError("svr: SMO did not reach the KKT tolerance", iter);

        // First index: maximal violation.
        double gmax = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < m; ++t) {
            if (sign(t) > 0) {
                if (!at_upper(t) && -g(t) >= gmax) gmax = -g(t), i = t;
            } else if (!at_lower(t) && g(t) >= gmax) {
                gmax = g(t), i = t;
            }
        }
        // Second index: largest guaranteed objective decrease.
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index j = -1;
        for (Eigen::Index t = 0; t < m; ++t) {
            if (sign(t) > 0) {
                if (at_lower(t)) continue;
                gmax2 = std::max(gmax2, g(t));
                const double diff = gmax + g(t);
                if (diff > 0.0 && i >= 0) {
                    double quad = q(i, i) + q(t, t) - 2.0 * sign(i) * q(i, t);
                    if (quad <= 0.0) quad = kTau;
                    const double gain = -diff * diff / quad;
                    if (gain <= best) best = gain, j = t;
                }
            } else {
                if (at_upper(t)) continue;
                gmax2 = std::max(gmax2, -g(t));
                const double diff = gmax - g(t);
                if (diff > 0.0 && i >= 0) {
                    double quad = q(i, i) + q(t, t) + 2.0 * sign(i) * q(i, t);
                    if (quad <= 0.0) quad = kTau;
                    const double gain = -diff * diff / quad;
                    if (gain <= best) best = gain, j = t;
                }
            }
        }
        if (i < 0 || j < 0 || gmax + gmax2 < tol) break;

        const double ai_old = a(i), aj_old = a(j);
        const double qij = q(i, j);
        if (sign(i) != sign(j)) {
            double quad = q(i, i) + q(j, j) + 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-g(i) - g(j)) / quad;
            const double diff = a(i) - a(j);
            a(i) += delta;
            a(j) += delta;
            if (diff > 0.0) {
                if (a(j) < 0.0) a(j) = 0.0, a(i) = diff;
            } else if (a(i) < 0.0) {
                a(i) = 0.0, a(j) = -diff;
            }
            if (diff > 0.0) {
                if (a(i) > c) a(i) = c, a(j) = c - diff;
            } else if (a(j) > c) {
                a(j) = c, a(i) = c + diff;
            }
        } else {
            double quad = q(i, i) + q(j, j) - 2.0 * qij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (g(i) - g(j)) / quad;
            const double sum = a(i) + a(j);
            a(i) -= delta;
            a(j) += delta;
            if (sum > c) {
                if (a(i) > c) a(i) = c, a(j) = sum - c;
            } else if (a(j) < 0.0) {
                a(j) = 0.0, a(i) = sum;
            }
            if (sum > c) {
                if (a(j) > c) a(j) = c, a(i) = sum - c;
            } else if (a(i) < 0.0) {
                a(i) = 0.0, a(j) = sum;
            }
        }
        const double di = a(i) - ai_old, dj = a(j) - aj_old;
        for (Eigen::Index t = 0; t < m; ++t) g(t) += q(t, i) * di + q(t, j) * dj;
    }

    // Bias from the free variables, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0.0;
    long free_count = 0;
    for (Eigen::Index t = 0; t < m; ++t) {
        const double yg = sign(t) * g(t);
        if (at_upper(t)) {
            if (sign(t) < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (at_lower(t)) {
            if (sign(t) > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            ++free_count;
            free_sum += yg;
        }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;

    SvrSolution sol;
    sol.beta = a.head(n) - a.tail(n);
    sol.bias = -rho;
    sol.iterations = iter;
    // 0.5 a'Qa + p'a = 0.5 a'(G + p)
    Vector p(m);
    for (Eigen::Index t = 0; t < n; ++t) {
        p(t) = epsilon - y(t);
        p(t + n) = epsilon + y(t);
    }
    sol.objective = 0.5 * a.dot(g + p);
    return sol;
}

double svr_dual_objective(const Matrix& kernel, const Vector& y, const Vector& beta, double epsilon) {
    return 0.5 * beta.dot(kernel * beta) - y.dot(beta) + epsilon * beta.lpNorm<1>();
}

}  // namespace zoo

namespace detail {

KernelState fit_svr(const Matrix& x, const Vector& y, double c, double gamma, double epsilon) {
    if (!(gamma > 0.0)) throw ArgumentError("svr: gamma must be positive");
    const zoo::SvrSolution sol = zoo::svr_smo(zoo::rbf_kernel(x, x, gamma), y, c, epsilon);
    // Keep support vectors only.
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < sol.beta.size(); ++i)
        if (sol.beta(i) != 0.0) support.push_back(i);
    KernelState s;
    s.gamma = gamma;
    s.bias = sol.bias;
    s.support.resize(static_cast<Eigen::Index>(support.size()), x.cols());
    s.dual.resize(static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) {
        s.support.row(static_cast<Eigen::Index>(k)) = x.row(support[k]);
        s.dual(static_cast<Eigen::Index>(k)) = sol.beta(support[k]);
    }
    return s;
}

}  // namespace detail
}  // namespace mccs
