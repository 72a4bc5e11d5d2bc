#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bibmatch/corpus.hpp"

namespace bibmatch {

struct ScholixSource {
    std::string provider;   // e.g. "DLMF", "OEIS"
    std::string object_id;
    std::string url;

    bool operator==(const ScholixSource&) const = default;
};

// One source -> target link between an external object and a corpus record.
struct ScholixLink {
    ScholixSource source;
    long long target_id = 0;
    std::string relationship = "References";
    std::string link_publication_date;  // YYYY-MM-DD
    std::string link_provider;

    bool operator==(const ScholixLink&) const = default;
};

struct LinkReject {
    std::size_t line = 0;
    std::string reason;
};

// Immutable after construction; filter indexes are built against the corpus
// the links were validated with.
class LinkSet {
public:
    LinkSet() = default;
    LinkSet(std::vector<ScholixLink> links, const Corpus& corpus);

    const std::vector<ScholixLink>& links() const { return links_; }
    std::size_t size() const { return links_.size(); }

    // Links whose target record carries an MSC code with the given prefix
    // (2-, 3- or 5-char shape), sorted by target id then source object id.
    // Throws BadMscCodeError.
    std::vector<ScholixLink> by_msc(const std::string& code) const;

    // Links whose target record has an author with this disambiguated id.
    std::vector<ScholixLink> by_author(const std::string& author_id) const;

    std::vector<ScholixLink> by_provider(const std::string& provider) const;

    // Reverse view: source objects linked to one corpus record.
    std::vector<ScholixLink> by_target(long long record_id) const;

private:
    std::vector<ScholixLink> select(const std::vector<std::size_t>& indices, bool sort) const;

    std::vector<ScholixLink> links_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_provider_;
    std::unordered_map<long long, std::vector<std::size_t>> by_target_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_msc_prefix_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_author_;
};

struct LinkLoadResult {
    LinkSet set;
    std::vector<LinkReject> rejects;  // links with unknown targets or bad fields
};

// JSONL with fields source_provider, source_object_id, source_url, target_id,
// relationship, link_publication_date, link_provider. Structurally broken
// lines raise ParseError; semantically invalid links land in the rejects
// report instead of being silently dropped.
LinkLoadResult load_links(const std::filesystem::path& path, const Corpus& corpus);

struct LinkStats {
    // primary MSC = first listed code of the target, 2-char prefix
    std::map<std::string, std::uint64_t> msc_histogram;
    std::map<int, std::uint64_t> year_histogram;
};

LinkStats link_stats(const LinkSet& set, const Corpus& corpus);

constexpr const char* kScholixSchemaVersion = "bibmatch-scholix-subset-1";

// {"SchemaVersion": ..., "Links": [{Source, Target, RelationshipType,
//  LinkPublicationDate, LinkProvider}, ...]}
nlohmann::json scholix_export(const std::vector<ScholixLink>& links);
std::vector<ScholixLink> scholix_import(const nlohmann::json& j);

nlohmann::json link_to_scholix_json(const ScholixLink& link);

}  // namespace bibmatch
