#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mccs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class ModelFamily {
    classic,
    backsel,
    ridge,
    lasso,
    krr_rbf,
    knn,
    cart,
    random_forest,
    grad_boost,
    mlp,
    svr_rbf,
};

const std::vector<ModelFamily>& all_families();
/// Display name, e.g. "Lasso Regression".
std::string_view family_name(ModelFamily family);
/// Short command-line name, e.g. "lasso".
std::string_view family_slug(ModelFamily family);
/// Accepts either the display name or the slug.
ModelFamily parse_family(std::string_view text);

/// Hyperparameter assignment; keys are ordered so the text form is canonical.
using HyperParams = std::map<std::string, double>;
std::string format_hyper(const HyperParams& h);
HyperParams parse_hyper(std::string_view text);

struct ModelSpec {
    ModelFamily family = ModelFamily::classic;
    HyperParams fixed;
    /// Candidate assignments. On equal validation error the earlier entry wins,
    /// so grids list the most regularized setting first.
    std::vector<HyperParams> grid;

    /// Defaults of the study: fixed values and cross-validated grids per family.
    static ModelSpec defaults(ModelFamily family);
    /// fixed merged with one grid point.
    HyperParams resolve(const HyperParams& chosen) const;
};

/// Per-column centring and scaling fitted on training rows. Constant columns get scale 1.
struct Standardizer {
    Vector x_mean;
    Vector x_scale;
    double y_mean = 0.0;
    double y_scale = 1.0;

    static Standardizer fit(const Matrix& x, const Vector& y);
    Matrix transform(const Matrix& x) const;
    Vector transform_y(const Vector& y) const;
};

struct LinearState {
    Vector coef;  // standardized space; intercept is zero there
    std::vector<bool> active;
};

struct KernelState {
    Matrix support;  // standardized training inputs
    Vector dual;
    double gamma = 1.0;
    double bias = 0.0;
};

struct NeighborState {
    Matrix points;
    Vector targets;
    int k = 1;
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(const double* x, Eigen::Index stride) const;
};

struct EnsembleState {
    double base = 0.0;
    double weight = 1.0;  // per-tree multiplier: learning rate, or 1/trees for averaging
    std::vector<Tree> trees;
};

struct MlpState {
    Matrix w1;  // hidden x inputs
    Vector b1;
    Vector w2;
    double b2 = 0.0;
};

using ModelState = std::variant<LinearState, KernelState, NeighborState, EnsembleState, MlpState>;

struct FittedModel {
    ModelFamily family = ModelFamily::classic;
    HyperParams hyper;
    Standardizer standardizer;
    ModelState state;

    Eigen::Index input_count() const { return standardizer.x_mean.size(); }
};

/// Smallest training set any family accepts for `features` inputs.
std::size_t minimum_rows(std::size_t features);

/// Fits `spec.family` with `chosen` merged over the fixed hyperparameters.
/// Throws DataError on too few rows or non-finite inputs, ConvergenceError when
/// an iterative solver runs out of iterations.
FittedModel fit(const ModelSpec& spec, const HyperParams& chosen, const Matrix& x, const Vector& y,
                std::uint64_t seed);

Vector predict(const FittedModel& model, const Matrix& x);

/// OLS refit on the lasso active set; classical t-stats divided by the sum of
/// their absolute values. Inactive features report 0.
Vector lasso_feature_significance(const FittedModel& model, const Matrix& x, const Vector& y);

double baseline_mean(std::span<const double> train_labels);
double baseline_naive(std::span<const double> realized_labels);

void save_model(std::ostream& out, const FittedModel& model);
FittedModel load_model(std::istream& in);

// Building blocks, exposed for tests and reuse. All operate in standardized space.
namespace zoo {

Vector ols(const Matrix& x, const Vector& y);
Vector ridge(const Matrix& x, const Vector& y, double lambda);
/// Minimizes (1/2n)|y - Xb|^2 + lambda |b|_1 by cyclic coordinate descent.
Vector lasso(const Matrix& x, const Vector& y, double lambda, long max_sweeps = 100000, double tol = 1e-8);
/// Backward elimination by AIC; returns the active mask.
std::vector<bool> backward_select(const Matrix& x, const Vector& y);
/// Classical OLS t-statistics (intercept counted in the residual dof).
Vector t_stats(const Matrix& x, const Vector& y);

Matrix rbf_kernel(const Matrix& a, const Matrix& b, double gamma);

struct TreeOptions {
    int max_depth = 5;
    int min_leaf = 5;
    int features_per_split = 0;  // 0 = all
    std::uint64_t seed = 0;
};
/// Greedy squared-error regression tree. Rows are used in the order given.
Tree build_tree(const Matrix& x, const Vector& y, const std::vector<int>& sample, const TreeOptions& options);
/// Lexicographic row order by (inputs, target); makes tree fits independent of row order.
std::vector<int> canonical_order(const Matrix& x, const Vector& y);

double mlp_loss_and_gradient(const MlpState& net, const Matrix& x, const Vector& y, double lambda,
                             MlpState* gradient);
MlpState mlp_init(Eigen::Index inputs, int hidden, std::uint64_t seed);

struct SvrSolution {
    Vector beta;  // alpha - alpha*
    double bias = 0.0;
    long iterations = 0;
    double objective = 0.0;  // dual objective, minimization form
};
/// SMO on the 2n-variable epsilon-SVR dual (maximal-violating pair with
/// second-order working-set selection).
SvrSolution svr_smo(const Matrix& kernel, const Vector& y, double c, double epsilon, double tol = 1e-3);
/// 0.5 b'Kb - y'b + epsilon |b|_1.
double svr_dual_objective(const Matrix& kernel, const Vector& y, const Vector& beta, double epsilon);

}  // namespace zoo

}  // namespace mccs
