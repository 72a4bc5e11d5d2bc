#include "bibmatch/corpus.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bibmatch/errors.hpp"

namespace bibmatch {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_alnum(char c) { return is_digit(c) || is_upper(c) || (c >= 'a' && c <= 'z'); }

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

bool is_valid_msc_code(std::string_view code) {
    if (code.size() != 2 && code.size() != 3 && code.size() != 5) return false;
    if (!is_digit(code[0]) || !is_digit(code[1])) return false;
    if (code.size() == 2) return true;
    if (!is_upper(code[2]) && code[2] != '-') return false;
    if (code.size() == 3) return true;
    return is_alnum(code[3]) && is_alnum(code[4]);
}

void validate_record(const BibRecord& record) {
    if (record.id < 1) throw InvalidRecordError("id", "must be a positive integer");
    if (trim(record.title).empty()) throw InvalidRecordError("title", "must be non-empty");
    for (const auto& author : record.authors) {
        if (trim(author.surname).empty())
            throw InvalidRecordError("authors", "author surname must be non-empty");
    }
    if (record.year && (*record.year < kMinYear || *record.year > kMaxYear))
        throw InvalidRecordError("year", "must be in [" + std::to_string(kMinYear) + ", "
                                             + std::to_string(kMaxYear) + "]");
    for (const auto& code : record.msc) {
        if (!is_valid_msc_code(code))
            throw InvalidRecordError("msc", "malformed MSC code '" + code + "'");
    }
}

long long Corpus::add(BibRecord record) {
    validate_record(record);
    if (records_.count(record.id)) throw DuplicateIdError(record.id);
    long long id = record.id;
    records_.emplace(id, std::move(record));
    return id;
}

const BibRecord* Corpus::find(long long id) const {
    auto it = records_.find(id);
    return it == records_.end() ? nullptr : &it->second;
}

nlohmann::json record_to_json(const BibRecord& record) {
    nlohmann::json j;
    j["id"] = record.id;
    j["title"] = record.title;
    auto authors = nlohmann::json::array();
    for (const auto& a : record.authors) {
        nlohmann::json ja;
        ja["surname"] = a.surname;
        if (a.given) ja["given"] = *a.given;
        if (a.author_id) ja["author_id"] = *a.author_id;
        authors.push_back(std::move(ja));
    }
    j["authors"] = std::move(authors);
    if (record.year) j["year"] = *record.year;
    if (record.serial) j["serial"] = *record.serial;
    if (record.volume) j["volume"] = *record.volume;
    if (record.pages) j["pages"] = *record.pages;
    if (record.doi) j["doi"] = *record.doi;
    j["msc"] = record.msc;
    j["abstract_redacted"] = record.abstract_redacted;
    return j;
}

namespace {

const char* const kRecordKeys[] = {"id",    "title", "authors", "year", "serial",
                                   "volume", "pages", "doi",     "msc",  "abstract_redacted"};
const char* const kAuthorKeys[] = {"surname", "given", "author_id"};

template <std::size_t N>
void reject_unknown_keys(const nlohmann::json& j, const char* const (&known)[N],
                         const char* what) {
    for (const auto& [key, value] : j.items()) {
        bool found = false;
        for (const char* k : known)
            if (key == k) { found = true; break; }
        if (!found) throw ParseError(std::string("unknown ") + what + " key '" + key + "'");
    }
}

std::optional<std::string> opt_string(const nlohmann::json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw ParseError(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

BibRecord record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("record must be a JSON object");
    reject_unknown_keys(j, kRecordKeys, "record");

    BibRecord r;
    if (!j.contains("id") || !j["id"].is_number_integer())
        throw ParseError("field 'id' must be an integer");
    r.id = j["id"].get<long long>();
    if (!j.contains("title") || !j["title"].is_string())
        throw ParseError("field 'title' must be a string");
    r.title = j["title"].get<std::string>();

    if (auto it = j.find("authors"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw ParseError("field 'authors' must be an array");
        for (const auto& ja : *it) {
            if (!ja.is_object()) throw ParseError("author entry must be an object");
            reject_unknown_keys(ja, kAuthorKeys, "author");
            AuthorName a;
            if (!ja.contains("surname") || !ja["surname"].is_string())
                throw ParseError("author field 'surname' must be a string");
            a.surname = ja["surname"].get<std::string>();
            a.given = opt_string(ja, "given");
            a.author_id = opt_string(ja, "author_id");
            r.authors.push_back(std::move(a));
        }
    }

    if (auto it = j.find("year"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) throw ParseError("field 'year' must be an integer");
        r.year = it->get<int>();
    }
    r.serial = opt_string(j, "serial");
    r.volume = opt_string(j, "volume");
    r.pages = opt_string(j, "pages");
    r.doi = opt_string(j, "doi");

    if (auto it = j.find("msc"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw ParseError("field 'msc' must be an array");
        for (const auto& code : *it) {
            if (!code.is_string()) throw ParseError("msc entries must be strings");
            r.msc.push_back(code.get<std::string>());
        }
    }
    if (auto it = j.find("abstract_redacted"); it != j.end() && !it->is_null()) {
        if (!it->is_boolean()) throw ParseError("field 'abstract_redacted' must be a boolean");
        r.abstract_redacted = it->get<bool>();
    }
    return r;
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file '" + path.string() + "'");

    Corpus corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        BibRecord record;
        try {
            record = record_from_json(j);
            validate_record(record);
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
        }
        corpus.add(std::move(record));  // DuplicateIdError propagates with the offending id
    }
    if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    for (const auto& [id, record] : corpus) out << record_to_json(record).dump() << '\n';
    if (!out.flush()) throw IoError("write failure on '" + path.string() + "'");
}

}  // namespace bibmatch
