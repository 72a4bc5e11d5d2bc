#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bibmatch/classifier.hpp"
#include "bibmatch/corpus.hpp"
#include "bibmatch/index.hpp"

namespace bibmatch {

// Either a raw citation string or a structured field map.
using MatchInput = std::variant<std::string, std::map<std::string, std::string>>;

struct MatchConfig {
    std::size_t k = 20;        // candidate set size
    double min_score = 0.5;    // acceptance threshold
};

struct MatchResult {
    std::string query_raw;
    std::optional<long long> matched_id;
    std::optional<double> score;
    std::size_t candidates_considered = 0;
    // (record id, classifier score), non-increasing score, ties by lower id.
    std::vector<std::pair<long long, double>> ranked;
    std::optional<std::string> error;  // set by match_batch for failed items
};

// Extraction step shared by the matcher and the evaluation harness: raw
// strings go through the rule cascade, falling back to raw-text-as-title
// when nothing could be located; structured maps are validated.
ExtractedReference extract_query(const MatchInput& input);

// Full pipeline. Throws EmptyInputError; every other degradation yields a
// no-match result instead of an error.
MatchResult match_one(const MatchInput& input, const Index& index, const Corpus& corpus,
                      const Model& model, const MatchConfig& config);

// Elementwise match_one; per-item errors are recorded in the result, the
// batch never aborts.
std::vector<MatchResult> match_batch(const std::vector<MatchInput>& inputs, const Index& index,
                                     const Corpus& corpus, const Model& model,
                                     const MatchConfig& config);

nlohmann::json match_result_to_json(const MatchResult& result);

}  // namespace bibmatch
