#include "bibmatch/oai.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <ctime>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include "bibmatch/msc_titles.hpp"

namespace bibmatch {

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

namespace {

constexpr const char* kDcPrefix = "oai_dc";
constexpr const char* kMscPrefix = "oai_msc";
constexpr const char* kMscNamespace = "urn:x-bibmatch:oai_msc";

// In-band protocol error; converted to an <error> element at the top level.
struct OaiProtocolError {
    std::string code;
    std::string message;
};

std::string response_date(bool deterministic) {
    if (deterministic) return "1970-01-01T00:00:00Z";
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

std::string record_datestamp(const BibRecord& record) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-01-01", record.year.value_or(kMinYear));
    return buf;
}

std::string oai_identifier(const ServiceConfig& config, long long id) {
    return "oai:" + config.repository_name + ":" + std::to_string(id);
}

std::optional<long long> parse_oai_identifier(const ServiceConfig& config,
                                              const std::string& identifier) {
    std::string prefix = "oai:" + config.repository_name + ":";
    if (identifier.rfind(prefix, 0) != 0) return std::nullopt;
    std::string rest = identifier.substr(prefix.size());
    if (rest.empty()
        || !std::all_of(rest.begin(), rest.end(),
                        [](char c) { return c >= '0' && c <= '9'; }))
        return std::nullopt;
    return std::stoll(rest);
}

const char kBase64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::string base64url_encode(std::string_view data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 2 < data.size()) {
        std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16)
                          | (static_cast<unsigned char>(data[i + 1]) << 8)
                          | static_cast<unsigned char>(data[i + 2]);
        out.push_back(kBase64Chars[(v >> 18) & 63]);
        out.push_back(kBase64Chars[(v >> 12) & 63]);
        out.push_back(kBase64Chars[(v >> 6) & 63]);
        out.push_back(kBase64Chars[v & 63]);
        i += 3;
    }
    std::size_t rest = data.size() - i;
    if (rest == 1) {
        std::uint32_t v = static_cast<unsigned char>(data[i]) << 16;
        out.push_back(kBase64Chars[(v >> 18) & 63]);
        out.push_back(kBase64Chars[(v >> 12) & 63]);
    } else if (rest == 2) {
        std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16)
                          | (static_cast<unsigned char>(data[i + 1]) << 8);
        out.push_back(kBase64Chars[(v >> 18) & 63]);
        out.push_back(kBase64Chars[(v >> 12) & 63]);
        out.push_back(kBase64Chars[(v >> 6) & 63]);
    }
    return out;
}

std::optional<std::string> base64url_decode(std::string_view data) {
    auto value_of = [](char c) -> int {
        const char* p = std::strchr(kBase64Chars, c);
        return (p && c != '\0') ? static_cast<int>(p - kBase64Chars) : -1;
    };
    std::string out;
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : data) {
        int v = value_of(c);
        if (v < 0) return std::nullopt;
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

struct ListState {
    std::size_t cursor = 0;
    std::string metadata_prefix;
    std::string set;
    std::string from;
    std::string until;
    std::size_t page_size = 0;
    std::uint64_t generation = 0;
};

std::string encode_token(const ListState& s) {
    std::ostringstream raw;
    raw << s.cursor << '|' << s.metadata_prefix << '|' << s.set << '|' << s.from << '|' << s.until
        << '|' << s.page_size << '|' << s.generation;
    return base64url_encode(raw.str());
}

ListState decode_token(const std::string& token, std::uint64_t generation) {
    auto raw = base64url_decode(token);
    if (!raw) throw OaiProtocolError{"badResumptionToken", "token is not decodable"};
    std::vector<std::string> fields;
    std::string cur;
    for (char c : *raw) {
        if (c == '|') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    if (fields.size() != 7) throw OaiProtocolError{"badResumptionToken", "malformed token"};
    ListState s;
    try {
        s.cursor = std::stoull(fields[0]);
        s.metadata_prefix = fields[1];
        s.set = fields[2];
        s.from = fields[3];
        s.until = fields[4];
        s.page_size = std::stoull(fields[5]);
        s.generation = std::stoull(fields[6]);
    } catch (const std::exception&) {
        throw OaiProtocolError{"badResumptionToken", "malformed token"};
    }
    if (s.generation != generation)
        throw OaiProtocolError{"badResumptionToken", "token from a previous corpus generation"};
    return s;
}

void check_args(const std::map<std::string, std::string>& params,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : params) {
        (void)value;
        if (key == "verb") continue;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) throw OaiProtocolError{"badArgument", "argument '" + key + "' is not allowed"};
    }
}

std::string require_arg(const std::map<std::string, std::string>& params, const char* name) {
    auto it = params.find(name);
    if (it == params.end() || it->second.empty())
        throw OaiProtocolError{"badArgument", std::string("missing required argument '") + name
                                                  + "'"};
    return it->second;
}

void check_metadata_prefix(const std::string& prefix) {
    if (prefix != kDcPrefix && prefix != kMscPrefix)
        throw OaiProtocolError{"cannotDisseminateFormat",
                               "metadata format '" + prefix + "' is not supported"};
}

std::vector<std::string> record_set_specs(const BibRecord& record) {
    std::set<std::string> specs;
    for (const std::string& code : record.msc) specs.insert(code.substr(0, 2));
    return {specs.begin(), specs.end()};
}

std::string creator_name(const AuthorName& author) {
    std::string name = author.surname;
    if (author.given) name += ", " + *author.given;
    return name;
}

std::string source_line(const BibRecord& record) {
    std::string src = record.serial.value_or("");
    if (record.volume) src += (src.empty() ? "" : " ") + *record.volume;
    if (record.pages) src += (src.empty() ? "" : ", ") + *record.pages;
    return src;
}

void append_common_elements(std::ostream& xml, const BibRecord& record,
                            const ServiceConfig& config, const std::string& ns) {
    xml << "<" << ns << ":title>" << xml_escape(record.title) << "</" << ns << ":title>";
    for (const AuthorName& author : record.authors)
        xml << "<" << ns << ":creator>" << xml_escape(creator_name(author)) << "</" << ns
            << ":creator>";
    if (record.year) xml << "<" << ns << ":date>" << *record.year << "</" << ns << ":date>";
    std::string src = source_line(record);
    if (!src.empty()) xml << "<" << ns << ":source>" << xml_escape(src) << "</" << ns << ":source>";
    xml << "<" << ns << ":identifier>" << xml_escape(oai_identifier(config, record.id)) << "</"
        << ns << ":identifier>";
    if (record.doi)
        xml << "<" << ns << ":identifier>doi:" << xml_escape(*record.doi) << "</" << ns
            << ":identifier>";
    // Abstracts are licensing-sensitive and never exposed; redacted records
    // carry no description element by construction.
}

std::string render_metadata(const BibRecord& record, const ServiceConfig& config,
                            const std::string& prefix) {
    std::ostringstream xml;
    if (prefix == kDcPrefix) {
        xml << "<oai_dc:dc xmlns:oai_dc=\"http://www.openarchives.org/OAI/2.0/oai_dc/\" "
               "xmlns:dc=\"http://purl.org/dc/elements/1.1/\">";
        append_common_elements(xml, record, config, "dc");
        xml << "</oai_dc:dc>";
    } else {
        xml << "<zbm:record xmlns:zbm=\"" << kMscNamespace << "\">";
        append_common_elements(xml, record, config, "zbm");
        for (const std::string& code : record.msc)
            xml << "<zbm:msc>" << xml_escape(code) << "</zbm:msc>";
        xml << "</zbm:record>";
    }
    return xml.str();
}

std::string render_header(const BibRecord& record, const ServiceConfig& config) {
    std::ostringstream xml;
    xml << "<header><identifier>" << xml_escape(oai_identifier(config, record.id))
        << "</identifier><datestamp>" << record_datestamp(record) << "</datestamp>";
    for (const std::string& spec : record_set_specs(record))
        xml << "<setSpec>" << xml_escape(spec) << "</setSpec>";
    xml << "</header>";
    return xml.str();
}

std::string render_record(const BibRecord& record, const ServiceConfig& config,
                          const std::string& prefix) {
    return "<record>" + render_header(record, config) + "<metadata>"
           + render_metadata(record, config, prefix) + "</metadata></record>";
}

struct Selection {
    std::vector<const BibRecord*> page;
    std::size_t total = 0;
    std::size_t cursor = 0;
    bool has_more = false;
    ListState next;
};

Selection select_records(const Corpus& corpus, const ListState& state) {
    Selection sel;
    sel.cursor = state.cursor;
    std::vector<const BibRecord*> filtered;
    for (const auto& [id, record] : corpus) {
        if (!state.set.empty()) {
            auto specs = record_set_specs(record);
            if (std::find(specs.begin(), specs.end(), state.set) == specs.end()) continue;
        }
        std::string stamp = record_datestamp(record);
        if (!state.from.empty() && stamp < state.from) continue;
        if (!state.until.empty() && stamp > state.until) continue;
        filtered.push_back(&record);
    }
    sel.total = filtered.size();
    std::size_t end = std::min(filtered.size(), state.cursor + state.page_size);
    for (std::size_t i = state.cursor; i < end; ++i) sel.page.push_back(filtered[i]);
    sel.has_more = end < filtered.size();
    if (sel.has_more) {
        sel.next = state;
        sel.next.cursor = end;
    }
    return sel;
}

ListState make_list_state(const std::map<std::string, std::string>& params,
                          const ServiceConfig& config, std::uint64_t generation,
                          bool& resumed) {
    resumed = params.count("resumptionToken") > 0;
    if (resumed) {
        // exclusive argument
        check_args(params, {"resumptionToken"});
        ListState state = decode_token(params.at("resumptionToken"), generation);
        check_metadata_prefix(state.metadata_prefix);
        return state;
    }
    check_args(params, {"metadataPrefix", "from", "until", "set"});
    ListState state;
    state.metadata_prefix = require_arg(params, "metadataPrefix");
    check_metadata_prefix(state.metadata_prefix);
    if (auto it = params.find("set"); it != params.end()) state.set = it->second;
    if (auto it = params.find("from"); it != params.end()) {
        if (!is_iso_date(it->second))
            throw OaiProtocolError{"badArgument", "'from' must be YYYY-MM-DD"};
        state.from = it->second;
    }
    if (auto it = params.find("until"); it != params.end()) {
        if (!is_iso_date(it->second))
            throw OaiProtocolError{"badArgument", "'until' must be YYYY-MM-DD"};
        state.until = it->second;
    }
    state.page_size = config.page_size;
    state.generation = generation;
    return state;
}

void append_resumption(std::ostream& xml, const Selection& sel, bool resumed) {
    if (sel.has_more) {
        xml << "<resumptionToken completeListSize=\"" << sel.total << "\" cursor=\"" << sel.cursor
            << "\">" << encode_token(sel.next) << "</resumptionToken>";
    } else if (resumed) {
        // closing an in-progress list: empty token per protocol
        xml << "<resumptionToken completeListSize=\"" << sel.total << "\" cursor=\"" << sel.cursor
            << "\"/>";
    }
}

std::string verb_identify(const Corpus& corpus, const ServiceConfig& config,
                          const std::map<std::string, std::string>& params) {
    check_args(params, {});
    std::string earliest = "9999-12-31";
    for (const auto& [id, record] : corpus) earliest = std::min(earliest, record_datestamp(record));
    if (corpus.empty()) earliest = "1500-01-01";
    std::ostringstream xml;
    xml << "<Identify><repositoryName>" << xml_escape(config.repository_name)
        << "</repositoryName><baseURL>" << xml_escape(config.base_url + "/oai")
        << "</baseURL><protocolVersion>2.0</protocolVersion><adminEmail>"
        << xml_escape(config.admin_email) << "</adminEmail><earliestDatestamp>" << earliest
        << "</earliestDatestamp><deletedRecord>no</deletedRecord>"
           "<granularity>YYYY-MM-DD</granularity></Identify>";
    return xml.str();
}

std::string verb_list_metadata_formats(const Corpus& corpus, const ServiceConfig& config,
                                       const std::map<std::string, std::string>& params) {
    check_args(params, {"identifier"});
    if (auto it = params.find("identifier"); it != params.end()) {
        auto id = parse_oai_identifier(config, it->second);
        if (!id || !corpus.find(*id))
            throw OaiProtocolError{"idDoesNotExist", "unknown identifier '" + it->second + "'"};
    }
    std::ostringstream xml;
    xml << "<ListMetadataFormats>"
        << "<metadataFormat><metadataPrefix>" << kDcPrefix
        << "</metadataPrefix><schema>http://www.openarchives.org/OAI/2.0/oai_dc.xsd</schema>"
           "<metadataNamespace>http://www.openarchives.org/OAI/2.0/oai_dc/"
           "</metadataNamespace></metadataFormat>"
        << "<metadataFormat><metadataPrefix>" << kMscPrefix
        << "</metadataPrefix><schema>" << kMscNamespace << ".xsd</schema><metadataNamespace>"
        << kMscNamespace << "</metadataNamespace></metadataFormat>"
        << "</ListMetadataFormats>";
    return xml.str();
}

std::string verb_list_sets(const Corpus& corpus, const std::map<std::string, std::string>& params) {
    if (params.count("resumptionToken"))
        throw OaiProtocolError{"badResumptionToken", "set list is never partial"};
    check_args(params, {});
    std::set<std::string> prefixes;
    for (const auto& [id, record] : corpus)
        for (const std::string& code : record.msc) prefixes.insert(code.substr(0, 2));
    if (prefixes.empty()) throw OaiProtocolError{"noRecordsMatch", "no sets defined"};
    std::ostringstream xml;
    xml << "<ListSets>";
    for (const std::string& prefix : prefixes) {
        auto title = msc_title(prefix);
        xml << "<set><setSpec>" << xml_escape(prefix) << "</setSpec><setName>"
            << xml_escape(title.value_or(prefix)) << "</setName></set>";
    }
    xml << "</ListSets>";
    return xml.str();
}

std::string verb_list_records(const Corpus& corpus, const ServiceConfig& config,
                              std::uint64_t generation,
                              const std::map<std::string, std::string>& params,
                              bool identifiers_only) {
    bool resumed = false;
    ListState state = make_list_state(params, config, generation, resumed);
    Selection sel = select_records(corpus, state);
    if (sel.total == 0)
        throw OaiProtocolError{"noRecordsMatch", "no records match the given criteria"};

    const char* tag = identifiers_only ? "ListIdentifiers" : "ListRecords";
    std::ostringstream xml;
    xml << "<" << tag << ">";
    for (const BibRecord* record : sel.page) {
        xml << (identifiers_only ? render_header(*record, config)
                                 : render_record(*record, config, state.metadata_prefix));
    }
    append_resumption(xml, sel, resumed);
    xml << "</" << tag << ">";
    return xml.str();
}

std::string verb_get_record(const Corpus& corpus, const ServiceConfig& config,
                            const std::map<std::string, std::string>& params) {
    check_args(params, {"identifier", "metadataPrefix"});
    std::string identifier = require_arg(params, "identifier");
    std::string prefix = require_arg(params, "metadataPrefix");
    check_metadata_prefix(prefix);
    auto id = parse_oai_identifier(config, identifier);
    const BibRecord* record = id ? corpus.find(*id) : nullptr;
    if (!record)
        throw OaiProtocolError{"idDoesNotExist", "unknown identifier '" + identifier + "'"};
    return "<GetRecord>" + render_record(*record, config, prefix) + "</GetRecord>";
}

std::string request_attributes(const std::map<std::string, std::string>& params) {
    std::ostringstream attrs;
    for (const auto& [key, value] : params)
        attrs << ' ' << key << "=\"" << xml_escape(value) << "\"";
    return attrs.str();
}

}  // namespace

std::string handle_oai_request(const Corpus& corpus, const ServiceConfig& config,
                               std::uint64_t generation,
                               const std::map<std::string, std::string>& params) {
    std::string payload;
    std::string error_code;
    std::string error_message;
    std::string verb;
    if (auto it = params.find("verb"); it != params.end()) verb = it->second;

    try {
        if (verb == "Identify")
            payload = verb_identify(corpus, config, params);
        else if (verb == "ListMetadataFormats")
            payload = verb_list_metadata_formats(corpus, config, params);
        else if (verb == "ListSets")
            payload = verb_list_sets(corpus, params);
        else if (verb == "ListIdentifiers")
            payload = verb_list_records(corpus, config, generation, params, true);
        else if (verb == "ListRecords")
            payload = verb_list_records(corpus, config, generation, params, false);
        else if (verb == "GetRecord")
            payload = verb_get_record(corpus, config, params);
        else
            throw OaiProtocolError{"badVerb", "unknown or missing verb '" + verb + "'"};
    } catch (const OaiProtocolError& e) {
        error_code = e.code;
        error_message = e.message;
    }

    std::ostringstream xml;
    xml << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<OAI-PMH xmlns=\"http://www.openarchives.org/OAI/2.0/\" "
           "xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" "
           "xsi:schemaLocation=\"http://www.openarchives.org/OAI/2.0/ "
           "http://www.openarchives.org/OAI/2.0/OAI-PMH.xsd\">";
    xml << "<responseDate>" << response_date(config.deterministic_time) << "</responseDate>";
    if (error_code.empty()) {
        xml << "<request" << request_attributes(params) << ">" << xml_escape(config.base_url + "/oai")
            << "</request>";
        xml << payload;
    } else {
        // per protocol, arguments are not echoed on badVerb/badArgument
        xml << "<request>" << xml_escape(config.base_url + "/oai") << "</request>";
        xml << "<error code=\"" << error_code << "\">" << xml_escape(error_message) << "</error>";
    }
    xml << "</OAI-PMH>";
    return xml.str();
}

}  // namespace bibmatch
