#include "bibmatch/links.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <nlohmann/json.hpp>

#include "bibmatch/errors.hpp"

namespace bibmatch {

namespace {

bool looks_like_url(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos || scheme_end == 0) return false;
    for (std::size_t i = 0; i < scheme_end; ++i) {
        char c = url[i];
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9')
                  || c == '+' || c == '.' || c == '-';
        if (!ok) return false;
    }
    return scheme_end + 3 < url.size();
}

bool is_iso_date(const std::string& date) {
    if (date.size() != 10 || date[4] != '-' || date[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(date[i]))) return false;
    int month = (date[5] - '0') * 10 + (date[6] - '0');
    int day = (date[8] - '0') * 10 + (date[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

// Reason a link violates its invariants, empty when valid.
std::string link_problem(const ScholixLink& link, const Corpus& corpus) {
    if (!corpus.find(link.target_id))
        return "target " + std::to_string(link.target_id) + " not in corpus";
    if (link.source.url.empty() || !looks_like_url(link.source.url))
        return "source url '" + link.source.url + "' is not a URL";
    if (link.relationship.empty()) return "relationship must be non-empty";
    if (!is_iso_date(link.link_publication_date))
        return "link_publication_date '" + link.link_publication_date + "' is not YYYY-MM-DD";
    return {};
}

}  // namespace

LinkSet::LinkSet(std::vector<ScholixLink> links, const Corpus& corpus)
    : links_(std::move(links)) {
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const ScholixLink& link = links_[i];
        by_provider_[link.source.provider].push_back(i);
        by_target_[link.target_id].push_back(i);
        if (const BibRecord* record = corpus.find(link.target_id)) {
            for (const std::string& code : record->msc) {
                // register every prefix length a query may use
                by_msc_prefix_[code.substr(0, 2)].push_back(i);
                if (code.size() >= 3) by_msc_prefix_[code.substr(0, 3)].push_back(i);
                if (code.size() == 5) by_msc_prefix_[code].push_back(i);
            }
            for (const AuthorName& author : record->authors) {
                if (author.author_id) by_author_[*author.author_id].push_back(i);
            }
        }
    }
    // A record can carry several codes with the same prefix; dedupe.
    for (auto& [prefix, indices] : by_msc_prefix_) {
        std::sort(indices.begin(), indices.end());
        indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    }
}

std::vector<ScholixLink> LinkSet::select(const std::vector<std::size_t>& indices,
                                         bool sort) const {
    std::vector<ScholixLink> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(links_[i]);
    if (sort) {
        std::sort(out.begin(), out.end(), [](const ScholixLink& a, const ScholixLink& b) {
            if (a.target_id != b.target_id) return a.target_id < b.target_id;
            return a.source.object_id < b.source.object_id;
        });
    }
    return out;
}

std::vector<ScholixLink> LinkSet::by_msc(const std::string& code) const {
    if (!is_valid_msc_code(code)) throw BadMscCodeError(code);
    auto it = by_msc_prefix_.find(code);
    if (it == by_msc_prefix_.end()) return {};
    return select(it->second, true);
}

std::vector<ScholixLink> LinkSet::by_author(const std::string& author_id) const {
    auto it = by_author_.find(author_id);
    if (it == by_author_.end()) return {};
    return select(it->second, true);
}

std::vector<ScholixLink> LinkSet::by_provider(const std::string& provider) const {
    auto it = by_provider_.find(provider);
    if (it == by_provider_.end()) return {};
    return select(it->second, false);
}

std::vector<ScholixLink> LinkSet::by_target(long long record_id) const {
    auto it = by_target_.find(record_id);
    if (it == by_target_.end()) return {};
    return select(it->second, false);
}

namespace {

ScholixLink link_from_flat_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("link must be a JSON object");
    static const char* const kKeys[] = {"source_provider",       "source_object_id",
                                        "source_url",            "target_id",
                                        "relationship",          "link_publication_date",
                                        "link_provider"};
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(std::begin(kKeys), std::end(kKeys),
                         [&](const char* k) { return key == k; })
            == std::end(kKeys))
            throw ParseError("unknown link key '" + key + "'");
    }
    ScholixLink link;
    link.source.provider = j.at("source_provider").get<std::string>();
    link.source.object_id = j.at("source_object_id").get<std::string>();
    link.source.url = j.at("source_url").get<std::string>();
    if (!j.at("target_id").is_number_integer())
        throw ParseError("link field 'target_id' must be an integer");
    link.target_id = j.at("target_id").get<long long>();
    if (j.contains("relationship")) link.relationship = j.at("relationship").get<std::string>();
    link.link_publication_date = j.at("link_publication_date").get<std::string>();
    link.link_provider = j.value("link_provider", "");
    return link;
}

}  // namespace

LinkLoadResult load_links(const std::filesystem::path& path, const Corpus& corpus) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open links file '" + path.string() + "'");

    std::vector<ScholixLink> valid;
    std::vector<LinkReject> rejects;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;

        ScholixLink link;
        try {
            link = link_from_flat_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        std::string problem = link_problem(link, corpus);
        if (!problem.empty()) {
            rejects.push_back({line_no, problem});
            continue;
        }
        valid.push_back(std::move(link));
    }
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return {LinkSet(std::move(valid), corpus), std::move(rejects)};
}

LinkStats link_stats(const LinkSet& set, const Corpus& corpus) {
    LinkStats stats;
    for (const ScholixLink& link : set.links()) {
        const BibRecord* record = corpus.find(link.target_id);
        if (!record) continue;
        if (!record->msc.empty()) ++stats.msc_histogram[record->msc.front().substr(0, 2)];
        if (record->year) ++stats.year_histogram[*record->year];
    }
    return stats;
}

nlohmann::json link_to_scholix_json(const ScholixLink& link) {
    nlohmann::json j;
    j["Source"] = {{"Provider", link.source.provider},
                   {"ObjectId", link.source.object_id},
                   {"Url", link.source.url}};
    j["Target"] = {{"Id", link.target_id}};
    j["RelationshipType"] = link.relationship;
    j["LinkPublicationDate"] = link.link_publication_date;
    j["LinkProvider"] = link.link_provider;
    return j;
}

nlohmann::json scholix_export(const std::vector<ScholixLink>& links) {
    nlohmann::json j;
    j["SchemaVersion"] = kScholixSchemaVersion;
    auto arr = nlohmann::json::array();
    for (const ScholixLink& link : links) arr.push_back(link_to_scholix_json(link));
    j["Links"] = std::move(arr);
    return j;
}

std::vector<ScholixLink> scholix_import(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("Links") || !j["Links"].is_array())
        throw ParseError("Scholix document needs a 'Links' array");
    if (j.value("SchemaVersion", "") != kScholixSchemaVersion)
        throw VersionMismatchError("unsupported Scholix schema version '"
                                   + j.value("SchemaVersion", "") + "'");
    std::vector<ScholixLink> links;
    try {
        for (const auto& jl : j["Links"]) {
            ScholixLink link;
            link.source.provider = jl.at("Source").at("Provider").get<std::string>();
            link.source.object_id = jl.at("Source").at("ObjectId").get<std::string>();
            link.source.url = jl.at("Source").at("Url").get<std::string>();
            link.target_id = jl.at("Target").at("Id").get<long long>();
            link.relationship = jl.at("RelationshipType").get<std::string>();
            link.link_publication_date = jl.at("LinkPublicationDate").get<std::string>();
            link.link_provider = jl.at("LinkProvider").get<std::string>();
            links.push_back(std::move(link));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("Scholix document: ") + e.what());
    }
    return links;
}

}  // namespace bibmatch
