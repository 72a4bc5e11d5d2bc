#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bibmatch/corpus.hpp"
#include "bibmatch/refextract.hpp"

namespace bibmatch {

// BM25 parameters and the IDF variant used by both the index and the
// brute-force oracle in the tests.
constexpr double kBm25K1 = 1.2;
constexpr double kBm25B = 0.75;

double bm25_idf(std::size_t doc_count, std::size_t doc_freq);

// Lowercases and folds Latin diacritics to ASCII where a fold exists;
// characters without a fold pass through unchanged.
std::string fold_text(std::string_view text);

// Lowercase, diacritic-fold, split on non-alphanumerics, drop tokens shorter
// than 2 chars and stopwords. The stopword list ships in stopwords.cpp since
// it affects every downstream number.
std::vector<std::string> normalize(std::string_view text);

bool is_stopword(std::string_view folded_token);

struct Posting {
    long long record_id;
    std::uint32_t term_frequency;
};

struct Candidate {
    long long record_id;
    double retrieval_score;
};

// Inverted index over normalized title tokens plus author surnames, with
// BM25-ranked candidate generation. Immutable after build.
class Index {
public:
    static Index build(const Corpus& corpus);

    // Top-k by BM25 over the union of normalized query-title tokens and
    // query-author surnames. Non-increasing score, ties by ascending id;
    // records sharing no token are excluded.
    std::vector<Candidate> candidates(const ExtractedReference& query, std::size_t k) const;
    std::vector<Candidate> candidates_for_tokens(const std::vector<std::string>& tokens,
                                                 std::size_t k) const;

    std::size_t doc_count() const { return doc_count_; }
    double avg_doc_length() const { return avg_doc_length_; }
    std::uint32_t doc_length(long long id) const;
    const std::vector<Posting>* postings(const std::string& token) const;

    // Binary snapshot, magic "ZBIX1".
    void save(const std::filesystem::path& path) const;
    static Index load(const std::filesystem::path& path);

    // Query token set for an extracted reference (sorted, deduplicated).
    static std::vector<std::string> query_tokens(const ExtractedReference& query);

private:
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::unordered_map<long long, std::uint32_t> doc_lengths_;
    std::size_t doc_count_ = 0;
    double avg_doc_length_ = 0.0;
};

}  // namespace bibmatch
