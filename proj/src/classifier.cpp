#include "bibmatch/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "bibmatch/errors.hpp"
#include "bibmatch/rng.hpp"

namespace bibmatch {

double DecisionTree::score(const FeatureVector& fv) const {
    std::size_t node = 0;
    while (!nodes[node].is_leaf()) {
        const TreeNode& n = nodes[node];
        node = static_cast<std::size_t>(fv[static_cast<std::size_t>(n.feature)] <= n.threshold
                                            ? n.left
                                            : n.right);
    }
    return nodes[node].leaf_probability;
}

double Model::score(const FeatureVector& fv) const {
    if (kind == ModelKind::linear) {
        double z = bias;
        for (std::size_t i = 0; i < weights.size(); ++i) z += weights[i] * fv[i];
        return 1.0 / (1.0 + std::exp(-z));
    }
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.score(fv);
    return trees.empty() ? 0.0 : sum / static_cast<double>(trees.size());
}

namespace {

double gini(std::size_t positives, std::size_t total) {
    if (total == 0) return 0.0;
    double p = static_cast<double>(positives) / static_cast<double>(total);
    return 2.0 * p * (1.0 - p);
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const std::vector<TrainingRow>& rows, const ModelConfig& config,
                std::mt19937_64& rng)
        : rows_(rows), config_(config), rng_(rng) {}

    DecisionTree build(const std::vector<std::size_t>& sample) {
        tree_.nodes.clear();
        grow(sample, 0);
        return std::move(tree_);
    }

private:
    std::size_t grow(const std::vector<std::size_t>& indices, std::size_t depth) {
        std::size_t positives = 0;
        for (std::size_t idx : indices) positives += rows_[idx].match ? 1 : 0;

        bool pure = positives == 0 || positives == indices.size();
        if (depth >= config_.max_depth || pure || indices.size() < 2)
            return make_leaf(positives, indices.size());

        SplitChoice split = choose_split(indices, positives);
        if (split.feature < 0) return make_leaf(positives, indices.size());

        std::vector<std::size_t> left, right;
        for (std::size_t idx : indices) {
            auto& side = rows_[idx].features[static_cast<std::size_t>(split.feature)]
                                 <= split.threshold
                             ? left
                             : right;
            side.push_back(idx);
        }

        std::size_t node = tree_.nodes.size();
        tree_.nodes.push_back({split.feature, split.threshold, -1, -1, 0.0});
        std::size_t left_child = grow(left, depth + 1);
        std::size_t right_child = grow(right, depth + 1);
        tree_.nodes[node].left = static_cast<int>(left_child);
        tree_.nodes[node].right = static_cast<int>(right_child);
        return node;
    }

    std::size_t make_leaf(std::size_t positives, std::size_t total) {
        TreeNode leaf;
        leaf.leaf_probability =
            total ? static_cast<double>(positives) / static_cast<double>(total) : 0.0;
        tree_.nodes.push_back(leaf);
        return tree_.nodes.size() - 1;
    }

    // Evaluates `feature_subsample` features from a fresh permutation; when
    // none of them yields an improving split, keeps drawing further features
    // until one does or all are exhausted.
    SplitChoice choose_split(const std::vector<std::size_t>& indices, std::size_t positives) {
        std::vector<std::size_t> order(kFeatureNames.size());
        std::iota(order.begin(), order.end(), 0);
        shuffle_vector(order, rng_);

        double parent = gini(positives, indices.size());
        SplitChoice best;
        std::size_t evaluated = 0;
        for (std::size_t feature : order) {
            evaluate_feature(indices, positives, parent, feature, best);
            ++evaluated;
            if (evaluated >= config_.feature_subsample && best.gain > 0.0) break;
        }
        return best;
    }

    void evaluate_feature(const std::vector<std::size_t>& indices, std::size_t positives,
                          double parent_gini, std::size_t feature, SplitChoice& best) {
        std::vector<std::pair<double, bool>> values;
        values.reserve(indices.size());
        for (std::size_t idx : indices)
            values.push_back({rows_[idx].features[feature], rows_[idx].match});
        std::sort(values.begin(), values.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        std::size_t total = values.size();
        std::size_t left_count = 0, left_positives = 0;
        for (std::size_t i = 0; i + 1 < total; ++i) {
            ++left_count;
            left_positives += values[i].second ? 1 : 0;
            if (values[i].first == values[i + 1].first) continue;

            double threshold = values[i].first + (values[i + 1].first - values[i].first) / 2.0;
            std::size_t right_count = total - left_count;
            std::size_t right_positives = positives - left_positives;
            double weighted = (static_cast<double>(left_count) * gini(left_positives, left_count)
                               + static_cast<double>(right_count)
                                     * gini(right_positives, right_count))
                              / static_cast<double>(total);
            double gain = parent_gini - weighted;
            if (gain > best.gain + 1e-12) {
                best = {static_cast<int>(feature), threshold, gain};
            }
        }
    }

    const std::vector<TrainingRow>& rows_;
    const ModelConfig& config_;
    std::mt19937_64& rng_;
    DecisionTree tree_;
};

Model train_forest(const TrainingSet& data, const ModelConfig& config) {
    Model model;
    model.kind = ModelKind::forest;
    model.max_depth = config.max_depth;
    model.feature_subsample = config.feature_subsample;
    model.seed = config.seed;

    std::size_t positives = 0;
    for (const auto& row : data.rows) positives += row.match ? 1 : 0;
    if (positives == 0 || positives == data.rows.size()) {
        // Degenerate single-class data: a constant model, flagged.
        DecisionTree tree;
        TreeNode leaf;
        leaf.leaf_probability = positives ? 1.0 : 0.0;
        tree.nodes.push_back(leaf);
        model.trees.push_back(std::move(tree));
        model.single_class_warning = true;
        return model;
    }

    std::mt19937_64 rng(config.seed);
    std::size_t n = data.rows.size();
    for (std::size_t t = 0; t < config.tree_count; ++t) {
        std::vector<std::size_t> sample(n);
        for (std::size_t i = 0; i < n; ++i)
            sample[i] = static_cast<std::size_t>(uniform_index(rng, n));
        TreeBuilder builder(data.rows, config, rng);
        model.trees.push_back(builder.build(sample));
    }
    return model;
}

Model train_linear(const TrainingSet& data, const ModelConfig& config) {
    std::size_t positives = 0;
    for (const auto& row : data.rows) positives += row.match ? 1 : 0;
    if (positives == 0 || positives == data.rows.size())
        throw SingleClassDataError("linear training needs both labels present");

    Model model;
    model.kind = ModelKind::linear;
    double n = static_cast<double>(data.rows.size());
    for (std::size_t iter = 0; iter < config.linear_iterations; ++iter) {
        std::array<double, 8> grad{};
        double grad_bias = 0.0;
        for (const auto& row : data.rows) {
            double z = model.bias;
            for (std::size_t i = 0; i < 8; ++i) z += model.weights[i] * row.features[i];
            double p = 1.0 / (1.0 + std::exp(-z));
            double d = p - (row.match ? 1.0 : 0.0);
            for (std::size_t i = 0; i < 8; ++i) grad[i] += d * row.features[i];
            grad_bias += d;
        }
        for (std::size_t i = 0; i < 8; ++i)
            model.weights[i] -= config.linear_learning_rate * grad[i] / n;
        model.bias -= config.linear_learning_rate * grad_bias / n;
    }
    return model;
}

}  // namespace

Model train(const TrainingSet& data, const ModelConfig& config) {
    if (data.rows.empty()) throw EmptyTrainingSetError();
    return config.kind == ModelKind::forest ? train_forest(data, config)
                                            : train_linear(data, config);
}

namespace {

constexpr const char* kModelVersion = "1";

nlohmann::json tree_to_json(const DecisionTree& tree) {
    auto nodes = nlohmann::json::array();
    for (const TreeNode& n : tree.nodes) {
        if (n.is_leaf())
            nodes.push_back(nlohmann::json::array({-1, n.leaf_probability}));
        else
            nodes.push_back(nlohmann::json::array({n.feature, n.threshold, n.left, n.right}));
    }
    return nodes;
}

DecisionTree tree_from_json(const nlohmann::json& j) {
    DecisionTree tree;
    if (!j.is_array()) throw ParseError("tree nodes must be an array");
    for (const auto& jn : j) {
        if (!jn.is_array() || jn.empty()) throw ParseError("malformed tree node");
        TreeNode node;
        int feature = jn[0].get<int>();
        if (feature < 0) {
            if (jn.size() != 2) throw ParseError("malformed leaf node");
            node.leaf_probability = jn[1].get<double>();
        } else {
            if (jn.size() != 4) throw ParseError("malformed split node");
            node.feature = feature;
            node.threshold = jn[1].get<double>();
            node.left = jn[2].get<int>();
            node.right = jn[3].get<int>();
            if (feature >= static_cast<int>(kFeatureNames.size()))
                throw ParseError("split feature index out of range");
        }
        tree.nodes.push_back(node);
    }
    if (tree.nodes.empty()) throw ParseError("empty tree");
    for (const TreeNode& n : tree.nodes) {
        if (n.is_leaf()) continue;
        if (n.left < 0 || n.right < 0 || n.left >= static_cast<int>(tree.nodes.size())
            || n.right >= static_cast<int>(tree.nodes.size()))
            throw ParseError("tree child index out of range");
    }
    return tree;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& path) {
    nlohmann::json j;
    j["version"] = kModelVersion;
    j["kind"] = model.kind == ModelKind::linear ? "linear" : "forest";
    auto names = nlohmann::json::array();
    for (const char* name : kFeatureNames) names.push_back(name);
    j["feature_names"] = std::move(names);

    nlohmann::json params;
    if (model.kind == ModelKind::linear) {
        params["weights"] = model.weights;
        params["bias"] = model.bias;
    } else {
        params["tree_count"] = model.trees.size();
        params["max_depth"] = model.max_depth;
        params["feature_subsample"] = model.feature_subsample;
        params["seed"] = model.seed;
        params["single_class_warning"] = model.single_class_warning;
        auto trees = nlohmann::json::array();
        for (const auto& tree : model.trees) trees.push_back(tree_to_json(tree));
        params["trees"] = std::move(trees);
    }
    j["parameters"] = std::move(params);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
    if (!out.flush()) throw IoError("write failure on '" + path.string() + "'");
}

Model load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model file '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }

    if (!j.contains("version") || !j["version"].is_string())
        throw ParseError("model file missing 'version'");
    if (j["version"].get<std::string>() != kModelVersion)
        throw VersionMismatchError("unsupported model version '"
                                   + j["version"].get<std::string>() + "'");

    if (!j.contains("feature_names") || !j["feature_names"].is_array()
        || j["feature_names"].size() != kFeatureNames.size())
        throw FeatureOrderMismatchError("model feature_names must list all 8 features");
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i) {
        if (j["feature_names"][i] != kFeatureNames[i])
            throw FeatureOrderMismatchError("feature order mismatch at position "
                                            + std::to_string(i));
    }

    std::string kind = j.value("kind", "");
    const nlohmann::json& params = j.at("parameters");
    Model model;
    try {
        if (kind == "linear") {
            model.kind = ModelKind::linear;
            auto weights = params.at("weights");
            if (!weights.is_array() || weights.size() != 8)
                throw ParseError("linear model needs exactly 8 weights");
            for (std::size_t i = 0; i < 8; ++i) model.weights[i] = weights[i].get<double>();
            model.bias = params.at("bias").get<double>();
        } else if (kind == "forest") {
            model.kind = ModelKind::forest;
            model.max_depth = params.value("max_depth", 0u);
            model.feature_subsample = params.value("feature_subsample", 0u);
            model.seed = params.value("seed", 0u);
            model.single_class_warning = params.value("single_class_warning", false);
            for (const auto& jt : params.at("trees")) model.trees.push_back(tree_from_json(jt));
            if (model.trees.empty()) throw ParseError("forest model has no trees");
        } else {
            throw ParseError("unknown model kind '" + kind + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
    return model;
}

}  // namespace bibmatch
