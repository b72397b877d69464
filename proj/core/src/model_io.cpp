#include "genflow/error.hpp"
#include "genflow/model.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>

namespace genflow {

namespace {

using nlohmann::json;

std::string hex(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

double unhex(const json& j) {
    const auto& s = j.get_ref<const std::string&>();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw DataError("bad hex float '" + s + "' in model file");
    return v;
}

json encode(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) data.push_back(hex(m(i, j)));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

json encode(const Vector& v) { return encode(Matrix(v)); }

Matrix decode_matrix(const json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
        throw DataError("model file: matrix payload size mismatch");
    }
    Matrix m(rows, cols);
    std::size_t k = 0;
    for (Eigen::Index c = 0; c < cols; ++c) {
        for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = unhex(data[k++]);
    }
    return m;
}

Vector decode_vector(const json& j) { return decode_matrix(j).col(0); }

json encode(const Standardizer& s) { return {{"mean", encode(s.mean)}, {"scale", encode(s.scale)}}; }

Standardizer decode_standardizer(const json& j) {
    return {decode_vector(j.at("mean")), decode_vector(j.at("scale"))};
}

json encode(const std::vector<TreeNode>& nodes) {
    json feature = json::array(), threshold = json::array(), left = json::array(),
         right = json::array(), value = json::array(), leaf = json::array();
    for (const auto& n : nodes) {
        feature.push_back(n.feature);
        threshold.push_back(hex(n.threshold));
        left.push_back(n.left);
        right.push_back(n.right);
        value.push_back(hex(n.value));
        leaf.push_back(n.leaf);
    }
    return {{"feature", feature}, {"threshold", threshold}, {"left", left},
            {"right", right},     {"value", value},         {"leaf", leaf}};
}

std::vector<TreeNode> decode_nodes(const json& j) {
    std::vector<TreeNode> nodes(j.at("feature").size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i].feature = j.at("feature")[i].get<int>();
        nodes[i].threshold = unhex(j.at("threshold")[i]);
        nodes[i].left = j.at("left")[i].get<int>();
        nodes[i].right = j.at("right")[i].get<int>();
        nodes[i].value = unhex(j.at("value")[i]);
        nodes[i].leaf = j.at("leaf")[i].get<int>();
    }
    return nodes;
}

json encode_model(const TrainedModel& model);
TrainedModel decode_model(const json& j);

json encode_params(const ModelParams& params) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, LsSvmParams>) {
                return {{"scaler", encode(p.scaler)}, {"support", encode(p.support)},
                        {"alpha", encode(p.alpha)},   {"sign_labels", encode(p.sign_labels)},
                        {"bias", hex(p.bias)},        {"kernel_gamma", hex(p.kernel_gamma)}};
            } else if constexpr (std::is_same_v<T, LogisticParams>) {
                return {{"scaler", encode(p.scaler)},
                        {"intercept", hex(p.intercept)},
                        {"weights", encode(p.weights)}};
            } else if constexpr (std::is_same_v<T, BoostedParams>) {
                json trees = json::array();
                for (const auto& t : p.trees) trees.push_back(encode(t.nodes));
                return {{"base_score", hex(p.base_score)}, {"trees", trees}};
            } else if constexpr (std::is_same_v<T, ForestParams>) {
                json trees = json::array();
                for (const auto& t : p.trees) {
                    json dist = json::array();
                    for (double v : t.distributions) dist.push_back(hex(v));
                    trees.push_back({{"nodes", encode(t.nodes)}, {"distributions", dist}});
                }
                return {{"trees", trees}};
            } else if constexpr (std::is_same_v<T, NeuralNetParams>) {
                return {{"scaler", encode(p.scaler)},
                        {"hidden_weights", encode(p.hidden_weights)},
                        {"hidden_bias", encode(p.hidden_bias)},
                        {"output_weights", encode(p.output_weights)},
                        {"output_bias", encode(p.output_bias)}};
            } else if constexpr (std::is_same_v<T, MultinomialParams>) {
                return {{"scaler", encode(p.scaler)}, {"coefficients", encode(p.coefficients)}};
            } else {
                json members = json::array();
                for (const auto& m : p.members) members.push_back(encode_model(m));
                return {{"members", members}};
            }
        },
        params);
}

ModelParams decode_params(Family family, const json& j) {
    switch (family) {
        case Family::lssvm: {
            LsSvmParams p;
            p.scaler = decode_standardizer(j.at("scaler"));
            p.support = decode_matrix(j.at("support"));
            p.alpha = decode_vector(j.at("alpha"));
            p.sign_labels = decode_vector(j.at("sign_labels"));
            p.bias = unhex(j.at("bias"));
            p.kernel_gamma = unhex(j.at("kernel_gamma"));
            return p;
        }
        case Family::logreg: {
            LogisticParams p;
            p.scaler = decode_standardizer(j.at("scaler"));
            p.intercept = unhex(j.at("intercept"));
            p.weights = decode_vector(j.at("weights"));
            return p;
        }
        case Family::boosted_tree: {
            BoostedParams p;
            p.base_score = unhex(j.at("base_score"));
            for (const auto& t : j.at("trees")) p.trees.push_back({decode_nodes(t)});
            return p;
        }
        case Family::decision_forest: {
            ForestParams p;
            for (const auto& t : j.at("trees")) {
                ClassificationTree tree;
                tree.nodes = decode_nodes(t.at("nodes"));
                for (const auto& v : t.at("distributions")) tree.distributions.push_back(unhex(v));
                p.trees.push_back(std::move(tree));
            }
            return p;
        }
        case Family::neural_net: {
            NeuralNetParams p;
            p.scaler = decode_standardizer(j.at("scaler"));
            p.hidden_weights = decode_matrix(j.at("hidden_weights"));
            p.hidden_bias = decode_vector(j.at("hidden_bias"));
            p.output_weights = decode_matrix(j.at("output_weights"));
            p.output_bias = decode_vector(j.at("output_bias"));
            return p;
        }
        case Family::multinomial_logreg: {
            MultinomialParams p;
            p.scaler = decode_standardizer(j.at("scaler"));
            p.coefficients = decode_matrix(j.at("coefficients"));
            return p;
        }
        case Family::one_vs_all: {
            OneVsAllParams p;
            for (const auto& m : j.at("members")) p.members.push_back(decode_model(m));
            return p;
        }
    }
    throw DataError("model file: unknown family");
}

json encode_model(const TrainedModel& model) {
    json hp = json::object();
    for (const auto& [k, v] : model.spec.params) hp[k] = hex(v);
    return {
        {"format", "genflow-model"},
        {"version", 1},
        {"family", model.spec.name()},
        {"hyperparameters", hp},
        {"seed", model.spec.seed},
        {"feature_names", model.feature_names},
        {"class_names", model.class_names},
        {"training_accuracy", hex(model.training_accuracy)},
        {"diagnostics",
         {{"converged", model.diagnostics.converged},
          {"iterations", model.diagnostics.iterations},
          {"iteration_cap", model.diagnostics.iteration_cap},
          {"final_gradient_norm", hex(model.diagnostics.final_gradient_norm)},
          {"warnings", model.diagnostics.warnings}}},
        {"params", encode_params(model.params)},
    };
}

TrainedModel decode_model(const json& j) {
    if (j.value("format", "") != "genflow-model") throw DataError("not a genflow model document");
    TrainedModel model;
    model.spec = ModelSpec::from_name(j.at("family").get<std::string>());
    for (const auto& [k, v] : j.at("hyperparameters").items()) model.spec.params[k] = unhex(v);
    model.spec.seed = j.at("seed").get<std::uint64_t>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    model.class_names = j.at("class_names").get<std::vector<std::string>>();
    model.training_accuracy = unhex(j.at("training_accuracy"));
    const auto& d = j.at("diagnostics");
    model.diagnostics.converged = d.at("converged").get<bool>();
    model.diagnostics.iterations = d.at("iterations").get<int>();
    model.diagnostics.iteration_cap = d.at("iteration_cap").get<int>();
    model.diagnostics.final_gradient_norm = unhex(d.at("final_gradient_norm"));
    model.diagnostics.warnings = d.at("warnings").get<std::vector<std::string>>();
    model.params = decode_params(model.spec.family, j.at("params"));
    return model;
}

}  // namespace

std::string serialize_model(const TrainedModel& model) { return encode_model(model).dump(1); }

TrainedModel deserialize_model(std::string_view text) {
    try {
        return decode_model(json::parse(text));
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model document: ") + e.what());
    }
}

}  // namespace genflow
