#include <algorithm>
#include <cmath>
#include <numeric>

#include "mccs/errors.hpp"
#include "mccs/random.hpp"
#include "models/internal.hpp"

namespace mccs {
namespace {

constexpr int kMaxFeatures = 64;

/// Row indices sorted by each feature (ties by row index), shared by every tree of a fit.
struct Presort {
    std::vector<std::vector<int>> by_feature;

    explicit Presort(const Matrix& x) : by_feature(static_cast<std::size_t>(x.cols())) {
        for (Eigen::Index f = 0; f < x.cols(); ++f) {
            auto& order = by_feature[static_cast<std::size_t>(f)];
            order.resize(static_cast<std::size_t>(x.rows()));
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x(a, f) < x(b, f); });
        }
    }
};

/// Node-wise greedy builder. Each feature keeps the slots of the current node
/// sorted by that feature, so a split is a stable partition instead of a sort.
class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const Vector& y, const std::vector<int>& sample, const Presort& presort,
                const zoo::TreeOptions& options)
        : x_(x), y_(y), sample_(sample), options_(options), m_(static_cast<int>(sample.size())),
          p_(static_cast<int>(x.cols())) {
        goes_left_.assign(static_cast<std::size_t>(m_), 0);
        buffer_.resize(static_cast<std::size_t>(m_));
        // Expand the per-row order into per-slot order: rows repeated in the
        // sample contribute their slots in ascending slot order.
        std::vector<int> first(static_cast<std::size_t>(x.rows()) + 1, 0);
        for (int r : sample) ++first[static_cast<std::size_t>(r) + 1];
        for (std::size_t r = 1; r < first.size(); ++r) first[r] += first[r - 1];
        std::vector<int> slots(static_cast<std::size_t>(m_));
        std::vector<int> fill(first.begin(), first.end() - 1);
        for (int s = 0; s < m_; ++s) slots[static_cast<std::size_t>(fill[static_cast<std::size_t>(sample[static_cast<std::size_t>(s)])]++)] = s;
        orders_.assign(static_cast<std::size_t>(p_), std::vector<int>());
        for (int f = 0; f < p_; ++f) {
            auto& order = orders_[static_cast<std::size_t>(f)];
            order.reserve(static_cast<std::size_t>(m_));
            for (int r : presort.by_feature[static_cast<std::size_t>(f)])
                for (int k = first[static_cast<std::size_t>(r)]; k < first[static_cast<std::size_t>(r) + 1]; ++k)
                    order.push_back(slots[static_cast<std::size_t>(k)]);
        }
    }

    Tree build(std::vector<double>* slot_predictions) {
        predictions_ = slot_predictions;
        if (predictions_) predictions_->assign(static_cast<std::size_t>(m_), 0.0);
        grow(0, m_, 0);
        return std::move(tree_);
    }

private:
    double value(int slot, int f) const { return x_(sample_[static_cast<std::size_t>(slot)], f); }
    double target(int slot) const { return y_(sample_[static_cast<std::size_t>(slot)]); }

    int grow(int begin, int end, int depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        const auto& base = orders_[0];
        double sum = 0.0, sq = 0.0;
        for (int i = begin; i < end; ++i) {
            const double t = target(base[static_cast<std::size_t>(i)]);
            sum += t;
            sq += t * t;
        }
        const int n = end - begin;
        const double mean = sum / n;
        tree_.nodes[static_cast<std::size_t>(id)].value = mean;

        int best_feature = -1, best_pos = -1;
        double best_gain = 0.0;
        if (depth < options_.max_depth && n >= 2 * options_.min_leaf) {
            const double parent = sum * sum / n;
            const double floor = 1e-12 * std::max(sq, 1e-300);
            for (int f : candidate_features(id)) {
                const auto& order = orders_[static_cast<std::size_t>(f)];
                double left_sum = 0.0;
                for (int i = begin; i < end - options_.min_leaf; ++i) {
                    const int slot = order[static_cast<std::size_t>(i)];
                    left_sum += target(slot);
                    const int nl = i - begin + 1;
                    if (nl < options_.min_leaf) continue;
                    const double v = value(slot, f);
                    const double next = value(order[static_cast<std::size_t>(i + 1)], f);
                    if (!(v < next)) continue;
                    const int nr = n - nl;
                    const double right_sum = sum - left_sum;
                    const double gain = left_sum * left_sum / nl + right_sum * right_sum / nr - parent;
                    if (gain > best_gain + floor) {
                        best_gain = gain;
                        best_feature = f;
                        best_pos = i;
                    }
                }
            }
        }

        if (best_feature < 0) {
            if (predictions_)
                for (int i = begin; i < end; ++i) (*predictions_)[static_cast<std::size_t>(base[static_cast<std::size_t>(i)])] = mean;
            return id;
        }

        const auto& split_order = orders_[static_cast<std::size_t>(best_feature)];
        const double lo = value(split_order[static_cast<std::size_t>(best_pos)], best_feature);
        const double hi = value(split_order[static_cast<std::size_t>(best_pos + 1)], best_feature);
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        for (int i = begin; i < end; ++i)
            goes_left_[static_cast<std::size_t>(split_order[static_cast<std::size_t>(i)])] = i <= best_pos;
        const int mid = best_pos + 1;
        for (int f = 0; f < p_; ++f) {
            auto& order = orders_[static_cast<std::size_t>(f)];
            int l = begin, r = 0;
            for (int i = begin; i < end; ++i) {
                const int slot = order[static_cast<std::size_t>(i)];
                if (goes_left_[static_cast<std::size_t>(slot)])
                    order[static_cast<std::size_t>(l++)] = slot;
                else
                    buffer_[static_cast<std::size_t>(r++)] = slot;
            }
            std::copy(buffer_.begin(), buffer_.begin() + r, order.begin() + l);
        }

        const int left = grow(begin, mid, depth + 1);
        const int right = grow(mid, end, depth + 1);
        TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = threshold;
        node.left = left;
        node.right = right;
        return id;
    }

    std::vector<int> candidate_features(int node) const {
        std::vector<int> all(static_cast<std::size_t>(p_));
        std::iota(all.begin(), all.end(), 0);
        const int k = options_.features_per_split;
        if (k <= 0 || k >= p_) return all;
        StreamRng rng(stream_key({options_.seed, static_cast<std::uint64_t>(node)}));
        // Partial Fisher-Yates draw without replacement, then sorted scan order.
        for (int i = 0; i < k; ++i) {
            const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(p_ - i)));
            std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(j)]);
        }
        all.resize(static_cast<std::size_t>(k));
        std::sort(all.begin(), all.end());
        return all;
    }

    const Matrix& x_;
    const Vector& y_;
    const std::vector<int>& sample_;
    zoo::TreeOptions options_;
    int m_;
    int p_;
    std::vector<std::vector<int>> orders_;
    std::vector<char> goes_left_;
    std::vector<int> buffer_;
    std::vector<double>* predictions_ = nullptr;
    Tree tree_;
};

void check_tree_inputs(const Matrix& x, const Vector& y, int max_depth, int min_leaf) {
    if (x.rows() != y.size()) throw ArgumentError("tree: row count of inputs and labels differ");
    if (x.rows() == 0) throw DataError("tree: no training rows");
    if (x.cols() > kMaxFeatures) throw ArgumentError("tree: too many features");
    if (max_depth < 0 || min_leaf < 1) throw ArgumentError("tree: max_depth must be >= 0 and min_leaf >= 1");
}

/// Inputs and labels permuted into canonical order.
std::pair<Matrix, Vector> canonical(const Matrix& x, const Vector& y) {
    const std::vector<int> order = zoo::canonical_order(x, y);
    Matrix xc(x.rows(), x.cols());
    Vector yc(y.size());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        xc.row(i) = x.row(order[static_cast<std::size_t>(i)]);
        yc(i) = y(order[static_cast<std::size_t>(i)]);
    }
    return {std::move(xc), std::move(yc)};
}

std::vector<int> identity_sample(Eigen::Index n) {
    std::vector<int> s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), 0);
    return s;
}

}  // namespace

double Tree::predict(const double* x, Eigen::Index stride) const {
    if (nodes.empty()) throw ArgumentError("tree: predict on an empty tree");
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const TreeNode& n = nodes[i];
        i = static_cast<std::size_t>(x[n.feature * stride] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

namespace zoo {

Tree build_tree(const Matrix& x, const Vector& y, const std::vector<int>& sample, const TreeOptions& options) {
    check_tree_inputs(x, y, options.max_depth, options.min_leaf);
    if (sample.empty()) throw DataError("tree: empty sample");
    for (int r : sample)
        if (r < 0 || r >= x.rows()) throw ArgumentError("tree: sample index out of range");
    return TreeBuilder(x, y, sample, Presort(x), options).build(nullptr);
}

std::vector<int> canonical_order(const Matrix& x, const Vector& y) {
    std::vector<int> order = identity_sample(x.rows());
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            if (x(a, j) < x(b, j)) return true;
            if (x(b, j) < x(a, j)) return false;
        }
        return y(a) < y(b);
    });
    return order;
}

}  // namespace zoo

namespace detail {

EnsembleState fit_cart(const Matrix& x, const Vector& y, int max_depth, int min_leaf) {
    check_tree_inputs(x, y, max_depth, min_leaf);
    const auto [xc, yc] = canonical(x, y);
    EnsembleState s;
    const std::vector<int> sample = identity_sample(xc.rows());
    s.trees.push_back(TreeBuilder(xc, yc, sample, Presort(xc), {max_depth, min_leaf, 0, 0}).build(nullptr));
    return s;
}

EnsembleState fit_forest(const Matrix& x, const Vector& y, int trees, int max_depth, int min_leaf,
                         std::uint64_t seed) {
    check_tree_inputs(x, y, max_depth, min_leaf);
    if (trees < 1) throw ArgumentError("forest: need at least one tree");
    const auto [xc, yc] = canonical(x, y);
    const auto n = static_cast<std::uint64_t>(xc.rows());
    const int per_split = static_cast<int>((xc.cols() + 2) / 3);
    EnsembleState s;
    s.weight = 1.0 / trees;
    s.trees.reserve(static_cast<std::size_t>(trees));
    const Presort presort(xc);
    std::vector<int> sample(n);
    for (int t = 0; t < trees; ++t) {
        StreamRng rng(stream_key({seed, 0x62, static_cast<std::uint64_t>(t)}));
        for (auto& r : sample) r = static_cast<int>(rng.below(n));
        const zoo::TreeOptions opts{max_depth, min_leaf, per_split,
                                    stream_key({seed, 0x66, static_cast<std::uint64_t>(t)})};
        s.trees.push_back(TreeBuilder(xc, yc, sample, presort, opts).build(nullptr));
    }
    return s;
}

EnsembleState fit_boosting(const Matrix& x, const Vector& y, int trees, int max_depth, int min_leaf,
                           double learning_rate) {
    check_tree_inputs(x, y, max_depth, min_leaf);
    if (trees < 0) throw ArgumentError("boosting: negative tree count");
    if (!(learning_rate >= 0.0)) throw ArgumentError("boosting: negative learning rate");
    auto [xc, yc] = canonical(x, y);
    EnsembleState s;
    s.base = yc.mean();
    s.weight = learning_rate;
    if (learning_rate == 0.0) return s;
    const std::vector<int> sample = identity_sample(xc.rows());
    Vector residual = yc.array() - s.base;
    const Presort presort(xc);
    std::vector<double> fitted;
    s.trees.reserve(static_cast<std::size_t>(trees));
    for (int t = 0; t < trees; ++t) {
        s.trees.push_back(TreeBuilder(xc, residual, sample, presort, {max_depth, min_leaf, 0, 0}).build(&fitted));
        for (Eigen::Index i = 0; i < residual.size(); ++i)
            residual(i) -= learning_rate * fitted[static_cast<std::size_t>(i)];
    }
    return s;
}

Vector predict_ensemble(const EnsembleState& state, const Matrix& x) {
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double* row = x.data() + i;
        double total = 0.0;
        for (const auto& tree : state.trees) total += tree.predict(row, x.rows());
        out(i) = state.base + state.weight * total;
    }
    return out;
}

}  // namespace detail
}  // namespace mccs
