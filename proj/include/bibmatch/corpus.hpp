#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace bibmatch {

struct AuthorName {
    std::string surname;
    std::optional<std::string> given;
    std::optional<std::string> author_id;

    bool operator==(const AuthorName&) const = default;
};

// One indexed publication, keyed by a positive integer id.
struct BibRecord {
    long long id = 0;
    std::string title;
    std::vector<AuthorName> authors;
    std::optional<int> year;
    std::optional<std::string> serial;
    std::optional<std::string> volume;
    std::optional<std::string> pages;
    std::optional<std::string> doi;
    std::vector<std::string> msc;
    bool abstract_redacted = false;

    bool operator==(const BibRecord&) const = default;
};

// MSC code shape: 2 digits, optionally one uppercase letter or '-',
// optionally 2 more alphanumerics. Lengths 2, 3 and 5 only.
bool is_valid_msc_code(std::string_view code);

constexpr int kMinYear = 1500;
constexpr int kMaxYear = 2100;

// Throws InvalidRecordError naming the offending field.
void validate_record(const BibRecord& record);

class Corpus {
public:
    // Returns the new record's id. Throws DuplicateIdError or InvalidRecordError.
    long long add(BibRecord record);

    // nullptr when the id is not stored; absence is not an error.
    const BibRecord* find(long long id) const;

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    // Id-ordered iteration.
    auto begin() const { return records_.begin(); }
    auto end() const { return records_.end(); }

private:
    std::map<long long, BibRecord> records_;
};

nlohmann::json record_to_json(const BibRecord& record);
BibRecord record_from_json(const nlohmann::json& j);

// JSONL, one record per line, UTF-8. Unknown keys are rejected.
Corpus load_corpus(const std::filesystem::path& path);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace bibmatch
