#include "bibmatch/features.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <vector>

#include "bibmatch/index.hpp"

namespace bibmatch {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::set<std::string> token_set(std::string_view text) {
    auto tokens = normalize(text);
    return {tokens.begin(), tokens.end()};
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b,
               double empty_value) {
    if (a.empty() && b.empty()) return empty_value;
    std::size_t shared = 0;
    for (const auto& t : a) shared += b.count(t);
    return static_cast<double>(shared) / static_cast<double>(a.size() + b.size() - shared);
}

std::string joined_tokens(std::string_view text) {
    std::string out;
    for (const auto& t : normalize(text)) {
        if (!out.empty()) out += ' ';
        out += t;
    }
    return out;
}

double equality_feature(const std::optional<std::string>& a, const std::optional<std::string>& b) {
    if (!a || !b) return 0.5;
    return trim(*a) == trim(*b) ? 1.0 : 0.0;
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            std::size_t cost = (a[i - 1] == b[j - 1]) ? 0 : 1;
            std::size_t next = std::min({row[j] + 1, row[j - 1] + 1, diag + cost});
            diag = row[j];
            row[j] = next;
        }
    }
    return row[b.size()];
}

FeatureVector feature_vector(const ExtractedReference& query, const BibRecord& record,
                             double retrieval_score, double max_retrieval_score) {
    FeatureVector fv;

    // title_jaccard
    fv.values[0] = 0.0;
    if (query.title) fv.values[0] = jaccard(token_set(*query.title), token_set(record.title), 0.0);

    // title_edit_sim over the token-joined normalized strings
    fv.values[1] = 0.0;
    if (query.title) {
        std::string a = joined_tokens(*query.title);
        std::string b = joined_tokens(record.title);
        std::size_t longest = std::max<std::size_t>({a.size(), b.size(), 1});
        fv.values[1] = 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
    }

    // author_overlap: shared case-folded surnames over query author count
    if (query.authors.empty()) {
        fv.values[2] = 0.0;
    } else {
        std::set<std::string> query_surnames, record_surnames;
        for (const auto& a : query.authors) query_surnames.insert(fold_text(a.surname));
        for (const auto& a : record.authors) record_surnames.insert(fold_text(a.surname));
        std::size_t shared = 0;
        for (const auto& s : query_surnames) shared += record_surnames.count(s);
        fv.values[2] = static_cast<double>(shared)
                       / static_cast<double>(std::max<std::size_t>(query.authors.size(), 1));
    }

    // year_sim
    if (!query.year || !record.year) {
        fv.values[3] = 0.5;
    } else {
        int delta = std::abs(*query.year - *record.year);
        fv.values[3] = delta == 0 ? 1.0 : (delta == 1 ? 0.5 : 0.0);
    }

    fv.values[4] = equality_feature(query.volume, record.volume);
    fv.values[5] = equality_feature(query.pages, record.pages);

    // serial_sim: token Jaccard of container vs serial
    if (!query.container || !record.serial) {
        fv.values[6] = 0.5;
    } else {
        fv.values[6] = jaccard(token_set(*query.container), token_set(*record.serial), 0.5);
    }

    fv.values[7] = max_retrieval_score > 0.0 ? retrieval_score / max_retrieval_score : 0.0;
    fv.values[7] = std::clamp(fv.values[7], 0.0, 1.0);

    return fv;
}

}  // namespace bibmatch
