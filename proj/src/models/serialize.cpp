#include <istream>
#include <ostream>

#include <json.hpp>

#include "mccs/errors.hpp"
#include "mccs/models.hpp"

namespace mccs {
namespace {

using json = nlohmann::json;
constexpr const char* kFormat = "mccs-model/1";

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Vector vector_from(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix matrix_from(const json& j) {
    Matrix m(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
    const json& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != m.rows()) throw DataError("model file: matrix row count mismatch");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const Vector row = vector_from(data[static_cast<std::size_t>(i)]);
        if (row.size() != m.cols()) throw DataError("model file: matrix column count mismatch");
        m.row(i) = row.transpose();
    }
    return m;
}

json state_to_json(const ModelState& state) {
    return std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, LinearState>) {
                return {{"kind", "linear"}, {"coef", to_json(s.coef)}, {"active", std::vector<bool>(s.active)}};
            } else if constexpr (std::is_same_v<T, KernelState>) {
                return {{"kind", "kernel"}, {"support", to_json(s.support)}, {"dual", to_json(s.dual)},
                        {"gamma", s.gamma}, {"bias", s.bias}};
            } else if constexpr (std::is_same_v<T, NeighborState>) {
                return {{"kind", "neighbors"}, {"points", to_json(s.points)}, {"targets", to_json(s.targets)},
                        {"k", s.k}};
            } else if constexpr (std::is_same_v<T, EnsembleState>) {
                json trees = json::array();
                for (const auto& tree : s.trees) {
                    json nodes = json::array();
                    for (const auto& n : tree.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
                    trees.push_back(std::move(nodes));
                }
                return {{"kind", "ensemble"}, {"base", s.base}, {"weight", s.weight}, {"trees", trees}};
            } else {
                return {{"kind", "mlp"}, {"w1", to_json(s.w1)}, {"b1", to_json(s.b1)}, {"w2", to_json(s.w2)},
                        {"b2", s.b2}};
            }
        },
        state);
}

ModelState state_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "linear") return LinearState{vector_from(j.at("coef")), j.at("active").get<std::vector<bool>>()};
    if (kind == "kernel")
        return KernelState{matrix_from(j.at("support")), vector_from(j.at("dual")), j.at("gamma").get<double>(),
                           j.at("bias").get<double>()};
    if (kind == "neighbors")
        return NeighborState{matrix_from(j.at("points")), vector_from(j.at("targets")), j.at("k").get<int>()};
    if (kind == "ensemble") {
        EnsembleState s;
        s.base = j.at("base").get<double>();
        s.weight = j.at("weight").get<double>();
        for (const auto& nodes : j.at("trees")) {
            Tree tree;
            for (const auto& n : nodes)
                tree.nodes.push_back(TreeNode{n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                              n.at(3).get<int>(), n.at(4).get<double>()});
            s.trees.push_back(std::move(tree));
        }
        return s;
    }
    if (kind == "mlp")
        return MlpState{matrix_from(j.at("w1")), vector_from(j.at("b1")), vector_from(j.at("w2")),
                        j.at("b2").get<double>()};
    throw DataError("model file: unknown state kind '" + kind + "'");
}

}  // namespace

void save_model(std::ostream& out, const FittedModel& model) {
    const json j = {
        {"format", kFormat},
        {"family", std::string(family_slug(model.family))},
        {"hyper", model.hyper},
        {"standardizer",
         {{"x_mean", to_json(model.standardizer.x_mean)},
          {"x_scale", to_json(model.standardizer.x_scale)},
          {"y_mean", model.standardizer.y_mean},
          {"y_scale", model.standardizer.y_scale}}},
        {"state", state_to_json(model.state)},
    };
    out << j.dump() << '\n';
    if (!out) throw Error("save_model: write failed");
}

FittedModel load_model(std::istream& in) {
    try {
        const json j = json::parse(in);
        if (j.at("format") != kFormat) throw DataError("model file: unsupported format");
        FittedModel m;
        m.family = parse_family(j.at("family").get<std::string>());
        m.hyper = j.at("hyper").get<HyperParams>();
        const json& s = j.at("standardizer");
        m.standardizer.x_mean = vector_from(s.at("x_mean"));
        m.standardizer.x_scale = vector_from(s.at("x_scale"));
        m.standardizer.y_mean = s.at("y_mean").get<double>();
        m.standardizer.y_scale = s.at("y_scale").get<double>();
        m.state = state_from_json(j.at("state"));
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

}  // namespace mccs
