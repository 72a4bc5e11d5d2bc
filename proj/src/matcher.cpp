#include "bibmatch/matcher.hpp"

#include <algorithm>
#include <cctype>

#include <nlohmann/json.hpp>

#include "bibmatch/errors.hpp"
#include "bibmatch/features.hpp"
#include "bibmatch/refextract.hpp"

namespace bibmatch {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

ExtractedReference extract_query(const MatchInput& input) {
    if (std::holds_alternative<std::string>(input)) {
        const std::string& citation = std::get<std::string>(input);
        try {
            return extract_fields(citation);
        } catch (const UnparseableError&) {
            // Bag-of-words fallback: the whole string becomes title tokens.
            ExtractedReference ref;
            ref.raw = citation;
            ref.title = trimmed(citation);
            return ref;
        }
    }
    return extract_structured(std::get<std::map<std::string, std::string>>(input));
}

MatchResult match_one(const MatchInput& input, const Index& index, const Corpus& corpus,
                      const Model& model, const MatchConfig& config) {
    ExtractedReference query;
    try {
        query = extract_query(input);
    } catch (const EmptyInputError&) {
        throw;
    } catch (const Error& e) {
        // e.g. InvalidField on structured input: degrade to a no-match result
        MatchResult failed;
        if (std::holds_alternative<std::string>(input))
            failed.query_raw = std::get<std::string>(input);
        failed.error = e.what();
        return failed;
    }

    MatchResult result;
    result.query_raw = query.raw;

    std::vector<Candidate> candidates = index.candidates(query, config.k);
    result.candidates_considered = candidates.size();
    if (candidates.empty()) return result;

    double max_retrieval = candidates.front().retrieval_score;
    for (const Candidate& c : candidates) {
        const BibRecord* record = corpus.find(c.record_id);
        if (!record) continue;  // index/corpus out of sync; skip defensively
        FeatureVector fv = feature_vector(query, *record, c.retrieval_score, max_retrieval);
        result.ranked.push_back({c.record_id, model.score(fv)});
    }
    std::sort(result.ranked.begin(), result.ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    if (!result.ranked.empty() && accept(result.ranked.front().second, config.min_score)) {
        result.matched_id = result.ranked.front().first;
        result.score = result.ranked.front().second;
    }
    return result;
}

std::vector<MatchResult> match_batch(const std::vector<MatchInput>& inputs, const Index& index,
                                     const Corpus& corpus, const Model& model,
                                     const MatchConfig& config) {
    std::vector<MatchResult> results;
    results.reserve(inputs.size());
    for (const MatchInput& input : inputs) {
        try {
            results.push_back(match_one(input, index, corpus, model, config));
        } catch (const EmptyInputError&) {
            MatchResult failed;
            if (std::holds_alternative<std::string>(input))
                failed.query_raw = std::get<std::string>(input);
            failed.error = "EmptyInput";
            results.push_back(std::move(failed));
        }
    }
    return results;
}

nlohmann::json match_result_to_json(const MatchResult& result) {
    nlohmann::json j;
    j["query_raw"] = result.query_raw;
    j["matched_id"] = result.matched_id ? nlohmann::json(*result.matched_id)
                                        : nlohmann::json(nullptr);
    j["score"] = result.score ? nlohmann::json(*result.score) : nlohmann::json(nullptr);
    j["candidates_considered"] = result.candidates_considered;
    auto ranked = nlohmann::json::array();
    for (const auto& [id, score] : result.ranked)
        ranked.push_back(nlohmann::json::array({id, score}));
    j["ranked"] = std::move(ranked);
    if (result.error) j["error"] = *result.error;
    return j;
}

}  // namespace bibmatch
