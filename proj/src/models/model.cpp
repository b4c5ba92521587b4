#include <algorithm>
#include <cmath>
#include <numeric>

#include "mccs/csv.hpp"
#include "mccs/errors.hpp"
#include "mccs/models.hpp"
#include "models/internal.hpp"

namespace mccs {
namespace {

struct FamilyInfo {
    ModelFamily family;
    std::string_view name;
    std::string_view slug;
};

constexpr FamilyInfo kFamilies[] = {
    {ModelFamily::classic, "Classic Regression", "classic"},
    {ModelFamily::backsel, "BackSel Regression", "backsel"},
    {ModelFamily::ridge, "Ridge Regression", "ridge"},
    {ModelFamily::lasso, "Lasso Regression", "lasso"},
    {ModelFamily::krr_rbf, "KRR-RBF", "krr"},
    {ModelFamily::knn, "kNN", "knn"},
    {ModelFamily::cart, "CART", "cart"},
    {ModelFamily::random_forest, "Random Forest", "rf"},
    {ModelFamily::grad_boost, "Grad Boost Reg", "gbm"},
    {ModelFamily::mlp, "MLP", "mlp"},
    {ModelFamily::svr_rbf, "SVR-RBF", "svr"},
};

const FamilyInfo& info(ModelFamily family) {
    for (const auto& f : kFamilies)
        if (f.family == family) return f;
    throw ArgumentError("unknown model family");
}

constexpr double kLambdas[] = {1.0, 0.1, 0.01, 0.001};
constexpr double kGammas[] = {0.01, 0.1, 1.0, 10.0, 100.0};

std::vector<HyperParams> grid_of(std::string_view key, std::initializer_list<double> values) {
    std::vector<HyperParams> out;
    for (double v : values) out.push_back({{std::string(key), v}});
    return out;
}

std::vector<HyperParams> product(const std::vector<HyperParams>& outer, const std::vector<HyperParams>& inner) {
    std::vector<HyperParams> out;
    for (const auto& a : outer)
        for (const auto& b : inner) {
            HyperParams h = a;
            h.insert(b.begin(), b.end());
            out.push_back(std::move(h));
        }
    return out;
}

std::vector<HyperParams> lambda_grid() {
    std::vector<HyperParams> out;
    for (double l : kLambdas) out.push_back({{"lambda", l}});
    return out;
}

std::vector<HyperParams> gamma_grid() {
    std::vector<HyperParams> out;
    for (double g : kGammas) out.push_back({{"gamma", g}});
    return out;
}

double require(const HyperParams& h, const char* key) {
    const auto it = h.find(key);
    if (it == h.end()) throw ArgumentError(std::string("missing hyperparameter '") + key + "'");
    return it->second;
}

}  // namespace

const std::vector<ModelFamily>& all_families() {
    static const std::vector<ModelFamily> families = [] {
        std::vector<ModelFamily> out;
        for (const auto& f : kFamilies) out.push_back(f.family);
        return out;
    }();
    return families;
}

std::string_view family_name(ModelFamily family) { return info(family).name; }
std::string_view family_slug(ModelFamily family) { return info(family).slug; }

ModelFamily parse_family(std::string_view text) {
    for (const auto& f : kFamilies)
        if (f.name == text || f.slug == text) return f.family;
    throw ArgumentError("unknown model '" + std::string(text) + "'");
}

std::string format_hyper(const HyperParams& h) {
    std::string out;
    for (const auto& [key, value] : h) {
        if (!out.empty()) out += ';';
        out += key + "=" + csv::format_number(value);
    }
    return out;
}

HyperParams parse_hyper(std::string_view text) {
    HyperParams h;
    if (text.empty()) return h;
    for (const auto& part : csv::split(text, ';')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) throw DataError("malformed hyperparameter '" + part + "'");
        h[part.substr(0, eq)] = csv::parse_number(std::string_view(part).substr(eq + 1));
    }
    return h;
}

ModelSpec ModelSpec::defaults(ModelFamily family) {
    ModelSpec s;
    s.family = family;
    switch (family) {
        case ModelFamily::classic:
        case ModelFamily::backsel:
            s.grid = {{}};
            break;
        case ModelFamily::ridge:
        case ModelFamily::lasso:
            s.grid = lambda_grid();
            break;
        case ModelFamily::krr_rbf:
            s.grid = product(lambda_grid(), gamma_grid());
            break;
        case ModelFamily::knn:
            s.grid = grid_of("k", {3, 5, 7, 9});
            break;
        case ModelFamily::cart:
            s.fixed = {{"min_leaf", 5}};
            s.grid = grid_of("max_depth", {2, 3, 5, 7});
            break;
        case ModelFamily::random_forest:
            s.fixed = {{"trees", 333}, {"max_depth", 5}, {"min_leaf", 5}};
            s.grid = {{}};
            break;
        case ModelFamily::grad_boost:
            s.fixed = {{"trees", 333}, {"max_depth", 5}, {"min_leaf", 5}};
            s.grid = grid_of("learning_rate", {0.1, 0.3, 0.5});
            break;
        case ModelFamily::mlp:
            s.fixed = {{"epochs", 2000}, {"step", 0.01}};
            s.grid = product(lambda_grid(), grid_of("hidden", {5, 7, 12}));
            break;
        case ModelFamily::svr_rbf:
            s.fixed = {{"epsilon", 0.1}};
            s.grid = product(grid_of("C", {1, 10, 100, 1000}), gamma_grid());
            break;
    }
    return s;
}

HyperParams ModelSpec::resolve(const HyperParams& chosen) const {
    HyperParams h = fixed;
    for (const auto& [k, v] : chosen) h[k] = v;
    return h;
}

Standardizer Standardizer::fit(const Matrix& x, const Vector& y) {
    Standardizer s;
    const double n = static_cast<double>(x.rows());
    s.x_mean = x.colwise().mean().transpose();
    s.x_scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double sd = std::sqrt((x.col(j).array() - s.x_mean(j)).square().sum() / n);
        s.x_scale(j) = sd > 1e-12 * std::max(1.0, std::abs(s.x_mean(j))) ? sd : 1.0;
    }
    s.y_mean = y.mean();
    const double ysd = std::sqrt((y.array() - s.y_mean).square().sum() / n);
    s.y_scale = ysd > 1e-12 * std::max(1.0, std::abs(s.y_mean)) ? ysd : 1.0;
    return s;
}

Matrix Standardizer::transform(const Matrix& x) const {
    if (x.cols() != x_mean.size()) throw ArgumentError("input column count does not match the fitted model");
    return (x.rowwise() - x_mean.transpose()).array().rowwise() / x_scale.transpose().array();
}

Vector Standardizer::transform_y(const Vector& y) const { return (y.array() - y_mean) / y_scale; }

std::size_t minimum_rows(std::size_t features) { return std::max<std::size_t>(10, features + 2); }

FittedModel fit(const ModelSpec& spec, const HyperParams& chosen, const Matrix& x, const Vector& y,
                std::uint64_t seed) {
    if (x.rows() != y.size()) throw ArgumentError("fit: row count of inputs and labels differ");
    if (static_cast<std::size_t>(x.rows()) < minimum_rows(static_cast<std::size_t>(x.cols())))
        throw DataError("fit: " + std::to_string(x.rows()) + " rows is below the minimum of " +
                        std::to_string(minimum_rows(static_cast<std::size_t>(x.cols()))));
    if (!x.allFinite() || !y.allFinite()) throw DataError("fit: non-finite training values");

    FittedModel m;
    m.family = spec.family;
    m.hyper = spec.resolve(chosen);
    m.standardizer = Standardizer::fit(x, y);
    const Matrix xs = m.standardizer.transform(x);
    const Vector ys = m.standardizer.transform_y(y);
    const HyperParams& h = m.hyper;

    switch (spec.family) {
        case ModelFamily::classic:
            m.state = LinearState{zoo::ols(xs, ys), std::vector<bool>(static_cast<std::size_t>(x.cols()), true)};
            break;
        case ModelFamily::backsel: {
            const std::vector<bool> active = zoo::backward_select(xs, ys);
            m.state = LinearState{detail::ols_on_subset(xs, ys, active), active};
            break;
        }
        case ModelFamily::ridge:
            m.state = LinearState{zoo::ridge(xs, ys, require(h, "lambda")),
                                  std::vector<bool>(static_cast<std::size_t>(x.cols()), true)};
            break;
        case ModelFamily::lasso: {
            Vector coef = zoo::lasso(xs, ys, require(h, "lambda"));
            std::vector<bool> active(static_cast<std::size_t>(x.cols()));
            for (Eigen::Index j = 0; j < coef.size(); ++j) active[static_cast<std::size_t>(j)] = coef(j) != 0.0;
            m.state = LinearState{std::move(coef), std::move(active)};
            break;
        }
        case ModelFamily::krr_rbf:
            m.state = detail::fit_krr(xs, ys, require(h, "lambda"), require(h, "gamma"));
            break;
        case ModelFamily::knn:
            m.state = NeighborState{xs, ys, static_cast<int>(require(h, "k"))};
            break;
        case ModelFamily::cart:
            m.state = detail::fit_cart(xs, ys, static_cast<int>(require(h, "max_depth")),
                                       static_cast<int>(require(h, "min_leaf")));
            break;
        case ModelFamily::random_forest:
            m.state = detail::fit_forest(xs, ys, static_cast<int>(require(h, "trees")),
                                         static_cast<int>(require(h, "max_depth")),
                                         static_cast<int>(require(h, "min_leaf")), seed);
            break;
        case ModelFamily::grad_boost:
            m.state = detail::fit_boosting(xs, ys, static_cast<int>(require(h, "trees")),
                                           static_cast<int>(require(h, "max_depth")),
                                           static_cast<int>(require(h, "min_leaf")), require(h, "learning_rate"));
            break;
        case ModelFamily::mlp:
            m.state = detail::fit_mlp(xs, ys, static_cast<int>(require(h, "hidden")), require(h, "lambda"),
                                      static_cast<int>(require(h, "epochs")), require(h, "step"), seed);
            break;
        case ModelFamily::svr_rbf:
            m.state = detail::fit_svr(xs, ys, require(h, "C"), require(h, "gamma"), require(h, "epsilon"));
            break;
    }
    return m;
}

Vector predict(const FittedModel& model, const Matrix& x) {
    const Matrix xs = model.standardizer.transform(x);
    Vector z = std::visit(
        [&](const auto& state) -> Vector {
            using T = std::decay_t<decltype(state)>;
            if constexpr (std::is_same_v<T, LinearState>) {
                return xs * state.coef;
            } else if constexpr (std::is_same_v<T, KernelState>) {
                return (zoo::rbf_kernel(xs, state.support, state.gamma) * state.dual).array() + state.bias;
            } else if constexpr (std::is_same_v<T, NeighborState>) {
                return detail::predict_knn(state, xs);
            } else if constexpr (std::is_same_v<T, EnsembleState>) {
                return detail::predict_ensemble(state, xs);
            } else {
                return detail::predict_mlp(state, xs);
            }
        },
        model.state);
    Vector out = (z.array() * model.standardizer.y_scale + model.standardizer.y_mean).matrix();
    if (!out.allFinite()) throw DataError("predict: non-finite prediction");
    return out;
}

double baseline_mean(std::span<const double> train_labels) {
    if (train_labels.empty()) throw DataError("mean baseline needs training labels");
    return std::accumulate(train_labels.begin(), train_labels.end(), 0.0) / static_cast<double>(train_labels.size());
}

double baseline_naive(std::span<const double> realized_labels) {
    if (realized_labels.empty()) throw DataError("naive baseline needs a realized label");
    return realized_labels.back();
}

}  // namespace mccs
