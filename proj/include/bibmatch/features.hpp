#pragma once

#include <array>
#include <string>
#include <string_view>

#include "bibmatch/corpus.hpp"
#include "bibmatch/refextract.hpp"

namespace bibmatch {

// Fixed feature order; part of the model file contract.
inline constexpr std::array<const char*, 8> kFeatureNames = {
    "title_jaccard",  "title_edit_sim", "author_overlap", "year_sim",
    "volume_match",   "pages_match",    "serial_sim",     "retrieval_score_norm",
};

struct FeatureVector {
    std::array<double, 8> values{};

    double operator[](std::size_t i) const { return values[i]; }
    bool operator==(const FeatureVector&) const = default;
};

std::size_t levenshtein(std::string_view a, std::string_view b);

// Similarity components between one extracted reference and one candidate
// record, each in [0, 1]. Absent fields take the neutral value: 0.5 for the
// equality-style components (year, volume, pages, serial) and 0 for the
// overlap-style ones (titles, authors).
FeatureVector feature_vector(const ExtractedReference& query, const BibRecord& record,
                             double retrieval_score, double max_retrieval_score);

}  // namespace bibmatch
