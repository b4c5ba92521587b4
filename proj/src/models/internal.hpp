#pragma once

#include "mccs/models.hpp"

namespace mccs::detail {

/// OLS restricted to the active columns; inactive coefficients are zero.
Vector ols_on_subset(const Matrix& x, const Vector& y, const std::vector<bool>& active);

KernelState fit_krr(const Matrix& x, const Vector& y, double lambda, double gamma);
KernelState fit_svr(const Matrix& x, const Vector& y, double c, double gamma, double epsilon);

Vector predict_knn(const NeighborState& state, const Matrix& x);

EnsembleState fit_cart(const Matrix& x, const Vector& y, int max_depth, int min_leaf);
EnsembleState fit_forest(const Matrix& x, const Vector& y, int trees, int max_depth, int min_leaf,
                         std::uint64_t seed);
EnsembleState fit_boosting(const Matrix& x, const Vector& y, int trees, int max_depth, int min_leaf,
                           double learning_rate);
Vector predict_ensemble(const EnsembleState& state, const Matrix& x);

MlpState fit_mlp(const Matrix& x, const Vector& y, int hidden, double lambda, int epochs, double step,
                 std::uint64_t seed);
Vector predict_mlp(const MlpState& state, const Matrix& x);

}  // namespace mccs::detail
