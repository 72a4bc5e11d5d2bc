#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bibmatch/features.hpp"

namespace bibmatch {

enum class ModelKind { linear, forest };

struct TrainingRow {
    FeatureVector features;
    bool match = false;
};

struct TrainingSet {
    std::vector<TrainingRow> rows;
};

struct ModelConfig {
    ModelKind kind = ModelKind::forest;
    std::size_t tree_count = 50;
    std::size_t max_depth = 8;
    std::size_t feature_subsample = 3;  // ceil(sqrt(8))
    std::uint64_t seed = 42;
    std::size_t linear_iterations = 500;
    double linear_learning_rate = 0.5;
};

// Axis-aligned split node; feature < 0 marks a leaf.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double leaf_probability = 0.0;

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    double score(const FeatureVector& fv) const;
};

struct Model {
    ModelKind kind = ModelKind::forest;
    // linear
    std::array<double, 8> weights{};
    double bias = 0.0;
    // forest
    std::vector<DecisionTree> trees;
    std::size_t max_depth = 0;
    std::size_t feature_subsample = 0;
    std::uint64_t seed = 0;
    // Set when forest training saw a single class and degenerated to a
    // constant model instead of failing.
    bool single_class_warning = false;

    double score(const FeatureVector& fv) const;
};

// Deterministic given (data, config). Throws EmptyTrainingSetError;
// SingleClassDataError for the linear kind (the forest degenerates to a
// constant model with a warning flag instead).
Model train(const TrainingSet& data, const ModelConfig& config);

// Threshold acceptance, boundary inclusive.
inline bool accept(double score, double min_score) { return score >= min_score; }

// JSON model file: {version, kind, feature_names, parameters}; version "1".
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

}  // namespace bibmatch
