#include "mccs/errors.hpp"
#include "mccs/log.hpp"
#include "models/internal.hpp"

namespace mccs {

Matrix zoo::rbf_kernel(const Matrix& a, const Matrix& b, double gamma) {
    if (a.cols() != b.cols()) throw ArgumentError("rbf_kernel: column mismatch");
    const Vector an = a.rowwise().squaredNorm();
    const Vector bn = b.rowwise().squaredNorm();
    Matrix d2 = (-2.0 * a * b.transpose()).colwise() + an;
    d2.rowwise() += bn.transpose();
    return (-gamma * d2.cwiseMax(0.0)).array().exp();
}

KernelState detail::fit_krr(const Matrix& x, const Vector& y, double lambda, double gamma) {
    if (lambda < 0.0 || gamma <= 0.0) throw ArgumentError("KRR: lambda must be >= 0 and gamma > 0");
    Matrix k = zoo::rbf_kernel(x, x, gamma);
    k.diagonal().array() += lambda;
    Eigen::LLT<Matrix> llt(k);
    if (llt.info() != Eigen::Success) {
        log::warn("singular kernel system; adding diagonal jitter");
        k.diagonal().array() += 1e-10;
        llt.compute(k);
        if (llt.info() != Eigen::Success) throw DataError("KRR: kernel system is not positive definite");
    }
    return KernelState{x, llt.solve(y), gamma, 0.0};
}

}  // namespace mccs
