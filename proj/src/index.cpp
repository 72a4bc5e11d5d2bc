#include "bibmatch/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>

#include "bibmatch/errors.hpp"

namespace bibmatch {

double bm25_idf(std::size_t doc_count, std::size_t doc_freq) {
    double n = static_cast<double>(doc_count);
    double df = static_cast<double>(doc_freq);
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

Index Index::build(const Corpus& corpus) {
    Index index;
    std::uint64_t total_tokens = 0;
    for (const auto& [id, record] : corpus) {
        std::vector<std::string> tokens = normalize(record.title);
        for (const auto& author : record.authors) {
            auto surname_tokens = normalize(author.surname);
            tokens.insert(tokens.end(), surname_tokens.begin(), surname_tokens.end());
        }
        std::map<std::string, std::uint32_t> tf;
        for (const auto& token : tokens) ++tf[token];
        for (const auto& [token, freq] : tf) index.postings_[token].push_back({id, freq});
        index.doc_lengths_[id] = static_cast<std::uint32_t>(tokens.size());
        total_tokens += tokens.size();
        ++index.doc_count_;
    }
    index.avg_doc_length_ =
        index.doc_count_ ? static_cast<double>(total_tokens) / index.doc_count_ : 0.0;
    return index;
}

std::uint32_t Index::doc_length(long long id) const {
    auto it = doc_lengths_.find(id);
    return it == doc_lengths_.end() ? 0 : it->second;
}

const std::vector<Posting>* Index::postings(const std::string& token) const {
    auto it = postings_.find(token);
    return it == postings_.end() ? nullptr : &it->second;
}

std::vector<std::string> Index::query_tokens(const ExtractedReference& query) {
    std::set<std::string> tokens;
    if (query.title) {
        for (auto& t : normalize(*query.title)) tokens.insert(std::move(t));
    }
    for (const auto& author : query.authors) {
        for (auto& t : normalize(author.surname)) tokens.insert(std::move(t));
    }
    return {tokens.begin(), tokens.end()};
}

std::vector<Candidate> Index::candidates(const ExtractedReference& query, std::size_t k) const {
    return candidates_for_tokens(query_tokens(query), k);
}

std::vector<Candidate> Index::candidates_for_tokens(const std::vector<std::string>& tokens,
                                                    std::size_t k) const {
    // Tokens are iterated in sorted order so each document accumulates its
    // term contributions in a fixed order (scores stay bit-reproducible).
    std::vector<std::string> sorted_tokens(tokens);
    std::sort(sorted_tokens.begin(), sorted_tokens.end());
    sorted_tokens.erase(std::unique(sorted_tokens.begin(), sorted_tokens.end()),
                        sorted_tokens.end());

    std::unordered_map<long long, double> scores;
    for (const auto& token : sorted_tokens) {
        const std::vector<Posting>* plist = postings(token);
        if (!plist) continue;
        double idf = bm25_idf(doc_count_, plist->size());
        for (const Posting& p : *plist) {
            double tf = p.term_frequency;
            double len_norm = 1.0 - kBm25B + kBm25B * doc_length(p.record_id) / avg_doc_length_;
            scores[p.record_id] += idf * (tf * (kBm25K1 + 1.0)) / (tf + kBm25K1 * len_norm);
        }
    }

    std::vector<Candidate> ranked;
    ranked.reserve(scores.size());
    for (const auto& [id, score] : scores) ranked.push_back({id, score});
    std::sort(ranked.begin(), ranked.end(), [](const Candidate& a, const Candidate& b) {
        if (a.retrieval_score != b.retrieval_score) return a.retrieval_score > b.retrieval_score;
        return a.record_id < b.record_id;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

namespace {

constexpr char kMagic[] = "ZBIX1";
constexpr std::size_t kMagicLen = 5;

void put_u64(std::ofstream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(buf, 8);
}

std::uint64_t get_u64(std::ifstream& in) {
    char buf[8];
    in.read(buf, 8);
    if (!in) throw ParseError("truncated index snapshot");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    return v;
}

}  // namespace

void Index::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(kMagic, kMagicLen);

    put_u64(out, doc_count_);
    std::vector<std::pair<long long, std::uint32_t>> lengths(doc_lengths_.begin(),
                                                             doc_lengths_.end());
    std::sort(lengths.begin(), lengths.end());
    put_u64(out, lengths.size());
    for (const auto& [id, len] : lengths) {
        put_u64(out, static_cast<std::uint64_t>(id));
        put_u64(out, len);
    }

    std::vector<std::string> terms;
    terms.reserve(postings_.size());
    for (const auto& [token, plist] : postings_) terms.push_back(token);
    std::sort(terms.begin(), terms.end());
    put_u64(out, terms.size());
    for (const auto& token : terms) {
        put_u64(out, token.size());
        out.write(token.data(), static_cast<std::streamsize>(token.size()));
        const auto& plist = postings_.at(token);
        put_u64(out, plist.size());
        for (const Posting& p : plist) {
            put_u64(out, static_cast<std::uint64_t>(p.record_id));
            put_u64(out, p.term_frequency);
        }
    }
    if (!out.flush()) throw IoError("write failure on '" + path.string() + "'");
}

Index Index::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open index snapshot '" + path.string() + "'");
    char magic[kMagicLen];
    in.read(magic, kMagicLen);
    if (!in || std::memcmp(magic, kMagic, kMagicLen) != 0)
        throw ParseError("not a ZBIX1 index snapshot");

    Index index;
    index.doc_count_ = get_u64(in);
    std::uint64_t n_docs = get_u64(in);
    std::uint64_t total_tokens = 0;
    for (std::uint64_t i = 0; i < n_docs; ++i) {
        long long id = static_cast<long long>(get_u64(in));
        std::uint32_t len = static_cast<std::uint32_t>(get_u64(in));
        index.doc_lengths_[id] = len;
        total_tokens += len;
    }
    std::uint64_t n_terms = get_u64(in);
    for (std::uint64_t i = 0; i < n_terms; ++i) {
        std::uint64_t token_len = get_u64(in);
        std::string token(token_len, '\0');
        in.read(token.data(), static_cast<std::streamsize>(token_len));
        if (!in) throw ParseError("truncated index snapshot");
        std::uint64_t n_postings = get_u64(in);
        std::vector<Posting> plist;
        plist.reserve(n_postings);
        for (std::uint64_t p = 0; p < n_postings; ++p) {
            long long id = static_cast<long long>(get_u64(in));
            std::uint32_t tf = static_cast<std::uint32_t>(get_u64(in));
            plist.push_back({id, tf});
        }
        index.postings_.emplace(std::move(token), std::move(plist));
    }
    index.avg_doc_length_ =
        index.doc_count_ ? static_cast<double>(total_tokens) / index.doc_count_ : 0.0;
    return index;
}

}  // namespace bibmatch
