#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "bibmatch/matcher.hpp"

namespace bibmatch {

// One gold-dataset item; an absent expected_id marks a real negative.
struct GoldItem {
    MatchInput input;
    std::optional<long long> expected_id;
};

struct ConfusionCounts {
    std::uint64_t tp = 0;  // matched to the expected id
    std::uint64_t fm = 0;  // matched to a wrong id
    std::uint64_t fn = 0;  // expected id present, no match returned
    std::uint64_t fp = 0;  // no expected id, but a match returned
    std::uint64_t tn = 0;  // no expected id, no match returned

    std::uint64_t rp() const { return tp + fm + fn; }
    std::uint64_t rn() const { return fp + tn; }
    std::uint64_t n() const { return rp() + rn(); }

    bool operator==(const ConfusionCounts&) const = default;
};

// Penalty weights: alpha for a false match, beta for a false positive;
// a false negative carries implicit weight 1.
struct PenaltyParams {
    double alpha = 1.0;
    double beta = 1.0;
};

struct GoldPartition {
    std::vector<GoldItem> train;
    std::vector<GoldItem> eval;
    std::vector<GoldItem> test;
};

// Deterministic seeded shuffle, sizes within +-1 of ratio * n.
// Throws BadRatiosError unless ratios are positive and sum to 1.
GoldPartition partition_gold(const std::vector<GoldItem>& gold, std::uint64_t seed,
                             std::array<double, 3> ratios);

ConfusionCounts confusion_counts(const std::vector<std::pair<GoldItem, MatchResult>>& results);

// TP/RP - (alpha-1) * FM/RP - beta * FP/RN, with terms over an empty class
// (rp = 0 or rn = 0) defined as 0.
double informedness(const ConfusionCounts& counts, const PenaltyParams& params);

struct SweepRow {
    double threshold = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    ConfusionCounts counts;
    double informedness = 0.0;
};

// Runs the pipeline once per gold item, caches the argmax score, then
// reapplies every threshold to the cached scores.
std::vector<SweepRow> threshold_sweep(const Model& model, const std::vector<GoldItem>& gold,
                                      const Index& index, const Corpus& corpus,
                                      const std::vector<double>& thresholds,
                                      const std::vector<PenaltyParams>& penalties,
                                      std::size_t k = 20);

// Columns: threshold,alpha,beta,tp,fm,fn,fp,tn,informedness
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

// JSONL of {"input": <string or object>, "expected_id": <id or null>}.
std::vector<GoldItem> load_gold(const std::filesystem::path& path);
void save_gold(const std::vector<GoldItem>& gold, const std::filesystem::path& path);

// Labeled candidate pairs for classifier training: every candidate of every
// gold item becomes one row, labeled by whether it is the expected record.
TrainingSet build_training_set(const std::vector<GoldItem>& gold, const Index& index,
                               const Corpus& corpus, std::size_t k = 20);

}  // namespace bibmatch
