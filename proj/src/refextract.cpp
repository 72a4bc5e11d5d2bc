#include "bibmatch/refextract.hpp"

#include <algorithm>
#include <cctype>
#include <regex>

#include <nlohmann/json.hpp>

#include "bibmatch/errors.hpp"

namespace bibmatch {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

void blank_span(std::string& text, std::size_t pos, std::size_t len) {
    for (std::size_t i = pos; i < pos + len && i < text.size(); ++i) text[i] = ' ';
}

bool is_ascii_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_ascii_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ascii_alpha(char c) { return is_ascii_upper(c) || is_ascii_lower(c); }
bool is_ascii_alnum(char c) { return is_ascii_alpha(c) || is_ascii_digit(c); }

std::vector<std::string> whitespace_split(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

// "A.", "Ch.", "A.-B.", "J. R." style initials token.
bool is_initials_token(const std::string& t) {
    std::size_t i = 0;
    while (i < t.size()) {
        std::size_t letters = 0;
        while (i < t.size() && is_ascii_alpha(t[i]) && letters < 2) ++i, ++letters;
        if (letters == 0 || i >= t.size() || t[i] != '.') return false;
        ++i;  // consume '.'
        if (i < t.size()) {
            if (t[i] != '-') return false;
            ++i;
        }
    }
    return true;
}

bool is_initials_segment(const std::vector<std::string>& tokens) {
    if (tokens.empty() || tokens.size() > 3) return false;
    return std::all_of(tokens.begin(), tokens.end(), is_initials_token);
}

// Capitalized word with no digits or internal periods; leading non-ASCII
// bytes are accepted since their case cannot be checked cheaply.
bool is_capitalized_word(const std::string& t) {
    if (t.empty()) return false;
    unsigned char first = static_cast<unsigned char>(t[0]);
    if (!(is_ascii_upper(t[0]) || first >= 0x80)) return false;
    for (char c : t) {
        if (is_ascii_digit(c) || c == '.') return false;
    }
    return true;
}

bool is_surname_words(const std::vector<std::string>& tokens) {
    if (tokens.empty() || tokens.size() > 2) return false;
    return std::all_of(tokens.begin(), tokens.end(), is_capitalized_word);
}

std::string join(const std::vector<std::string>& tokens, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (!out.empty()) out += ' ';
        out += tokens[i];
    }
    return out;
}

// One name in natural order: "A. Einstein", "Albert Einstein", "Einstein A.".
std::optional<AuthorName> parse_single_name(const std::vector<std::string>& tokens) {
    if (tokens.empty() || tokens.size() > 3) return std::nullopt;
    // initials... surname
    std::size_t n_initials = 0;
    while (n_initials < tokens.size() && is_initials_token(tokens[n_initials])) ++n_initials;
    if (n_initials > 0 && n_initials < tokens.size()) {
        for (std::size_t i = n_initials; i < tokens.size(); ++i)
            if (!is_capitalized_word(tokens[i])) return std::nullopt;
        AuthorName a;
        a.surname = join(tokens, n_initials, tokens.size());
        a.given = join(tokens, 0, n_initials);
        return a;
    }
    // surname initials ("Einstein A.")
    if (tokens.size() == 2 && is_capitalized_word(tokens[0]) && is_initials_token(tokens[1])) {
        AuthorName a;
        a.surname = tokens[0];
        a.given = tokens[1];
        return a;
    }
    // given [middle] surname, all capitalized words
    if (tokens.size() >= 2 && std::all_of(tokens.begin(), tokens.end(), is_capitalized_word)) {
        AuthorName a;
        a.surname = tokens.back();
        a.given = join(tokens, 0, tokens.size() - 1);
        return a;
    }
    return std::nullopt;
}

// Splits on " and " and "&" at the top level of one comma segment.
std::vector<std::string> split_and(const std::string& segment) {
    std::vector<std::string> parts;
    static const std::regex and_re(R"(\s+and\s+|\s*&\s*)");
    std::sregex_token_iterator it(segment.begin(), segment.end(), and_re, -1), end;
    for (; it != end; ++it) {
        std::string part = trim(it->str());
        if (!part.empty()) parts.push_back(std::move(part));
    }
    return parts;
}

std::optional<std::vector<AuthorName>> parse_author_segment(const std::string& segment) {
    std::vector<AuthorName> authors;
    for (const std::string& part : split_and(segment)) {
        auto name = parse_single_name(whitespace_split(part));
        if (!name) return std::nullopt;
        authors.push_back(std::move(*name));
    }
    if (authors.empty()) return std::nullopt;
    return authors;
}

// First 4-digit token in range that is parenthesized or comma-delimited.
std::optional<int> find_year(const std::string& text) {
    static const std::regex year_re(R"(\d{4})");
    for (auto it = std::sregex_iterator(text.begin(), text.end(), year_re);
         it != std::sregex_iterator(); ++it) {
        std::size_t pos = static_cast<std::size_t>(it->position(0));
        std::size_t end = pos + 4;
        if (pos > 0 && is_ascii_alnum(text[pos - 1])) continue;
        if (end < text.size() && is_ascii_alnum(text[end])) continue;

        auto prev_nonspace = [&]() -> char {
            for (std::size_t i = pos; i > 0; --i)
                if (!std::isspace(static_cast<unsigned char>(text[i - 1]))) return text[i - 1];
            return '\0';
        };
        auto next_nonspace = [&]() -> char {
            for (std::size_t i = end; i < text.size(); ++i)
                if (!std::isspace(static_cast<unsigned char>(text[i]))) return text[i];
            return '\0';
        };
        char prev = prev_nonspace();
        char next = next_nonspace();
        bool parenthesized = prev == '(' && next == ')';
        bool comma_delimited =
            prev == ',' && (next == ',' || next == '.' || next == ';' || next == '\0');
        if (!parenthesized && !comma_delimited) continue;

        int year = std::stoi(it->str());
        if (year >= kMinYear && year <= kMaxYear) return year;
    }
    return std::nullopt;
}

std::vector<std::string> comma_segments(const std::string& text) {
    std::vector<std::string> segments;
    std::string cur;
    for (char c : text) {
        if (c == ',' || c == ';') {
            std::string t = trim(cur);
            if (!t.empty()) segments.push_back(std::move(t));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    std::string t = trim(cur);
    if (!t.empty()) segments.push_back(std::move(t));
    return segments;
}

}  // namespace

std::vector<AuthorName> split_author_list(std::string_view text) {
    std::vector<AuthorName> authors;
    std::string input(text);
    static const std::regex group_re(R"(;)");
    std::sregex_token_iterator group(input.begin(), input.end(), group_re, -1), group_end;
    for (; group != group_end; ++group) {
        for (const std::string& part : split_and(trim(group->str()))) {
            std::size_t comma = part.find(',');
            AuthorName a;
            if (comma != std::string::npos) {
                // "Surname, Given"
                a.surname = trim(part.substr(0, comma));
                std::string given = trim(part.substr(comma + 1));
                if (!given.empty()) a.given = given;
            } else {
                auto tokens = whitespace_split(part);
                if (tokens.empty()) continue;
                if (auto parsed = parse_single_name(tokens)) {
                    a = std::move(*parsed);
                } else {
                    a.surname = tokens.back();
                    if (tokens.size() > 1) a.given = join(tokens, 0, tokens.size() - 1);
                }
            }
            if (!a.surname.empty()) authors.push_back(std::move(a));
        }
    }
    return authors;
}

ExtractedReference RuleBasedExtractor::extract(std::string_view citation) const {
    if (trim(citation).empty()) throw EmptyInputError();

    ExtractedReference out;
    out.raw = std::string(citation);
    std::string text = out.raw;

    // 1. DOI by regex; the span (plus a "doi:" marker) is blanked so its
    // digits cannot be mistaken for years or pages.
    static const std::regex doi_re(R"(10\.\d{4,9}/\S+)");
    std::smatch doi_match;
    if (std::regex_search(text, doi_match, doi_re)) {
        std::string doi = doi_match.str();
        while (!doi.empty() && (doi.back() == '.' || doi.back() == ',' || doi.back() == ';'
                                || doi.back() == ')')) {
            doi.pop_back();
        }
        out.doi = doi;
        std::size_t pos = static_cast<std::size_t>(doi_match.position(0));
        std::size_t start = pos;
        // strip a "doi:" / "DOI:" prefix marker
        if (pos >= 4) {
            std::string marker = text.substr(pos - 4, 4);
            for (char& c : marker) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (marker == "doi:") start = pos - 4;
        }
        blank_span(text, start, pos - start + doi_match.length(0));
    }

    // 2. Trailing "<container> <vol> (<year>)[, <pages>]".
    static const std::regex tail_re(
        R"(([^,;]+?)\s+(\d+[A-Za-z]?)\s*\(\s*(\d{4})\s*\)\s*(?:,\s*(?:pp?\.\s*)?([0-9]+(?:\s*(?:-|–|—)\s*[0-9]+)?))?\s*\.?\s*$)");
    std::smatch tail;
    std::size_t prefix_end = text.size();
    if (std::regex_search(text, tail, tail_re)) {
        std::string container = trim(tail.str(1));
        if (!container.empty()) out.container = container;
        out.volume = tail.str(2);
        int year = std::stoi(tail.str(3));
        if (year >= kMinYear && year <= kMaxYear) out.year = year;
        if (tail[4].matched) out.pages = tail.str(4);
        prefix_end = static_cast<std::size_t>(tail.position(0));
    }

    // 3. Year, when the trailing pattern did not supply one.
    if (!out.year) out.year = find_year(text);

    // 4. Authors, then title, from the prefix.
    std::string prefix = text.substr(0, prefix_end);
    while (!prefix.empty()
           && (prefix.back() == '.' || prefix.back() == ' ' || prefix.back() == ','))
        prefix.pop_back();
    std::vector<std::string> segments = comma_segments(prefix);

    std::size_t i = 0;
    // Units of (segments consumed, authors added); needed to give back the
    // last segment as the title when the author run swallowed everything.
    std::vector<std::pair<std::size_t, std::size_t>> units;
    while (i < segments.size()) {
        auto tokens = whitespace_split(segments[i]);
        if (i + 1 < segments.size() && is_surname_words(tokens)
            && is_initials_segment(whitespace_split(segments[i + 1]))) {
            AuthorName a;
            a.surname = segments[i];
            a.given = segments[i + 1];
            out.authors.push_back(std::move(a));
            units.push_back({2, 1});
            i += 2;
            continue;
        }
        auto parsed = parse_author_segment(segments[i]);
        if (!parsed) break;
        units.push_back({1, parsed->size()});
        for (auto& a : *parsed) out.authors.push_back(std::move(a));
        ++i;
    }

    if (i >= segments.size() && segments.size() >= 2 && !units.empty()
        && units.back() == std::make_pair(std::size_t{1}, std::size_t{1})) {
        // Every segment parsed as a name; a citation virtually always has a
        // title, so the last single-name segment is reclaimed as one.
        out.authors.pop_back();
        --i;
    }

    // The title needs an anchor (a found author block or container);
    // otherwise leftover words are not promoted to a title.
    if ((!out.authors.empty() || out.container) && i < segments.size()) {
        std::size_t best = i;
        for (std::size_t s = i; s < segments.size(); ++s)
            if (segments[s].size() > segments[best].size()) best = s;
        out.title = segments[best];
    }

    if (out.authors.empty() && !out.title && !out.doi)
        throw UnparseableError("no author, title or DOI located in citation");
    return out;
}

ExtractedReference extract_fields(std::string_view citation) {
    static const RuleBasedExtractor extractor;
    return extractor.extract(citation);
}

ExtractedReference extract_structured(const std::map<std::string, std::string>& fields) {
    static const char* const kKeys[] = {"authors", "title", "container", "year",
                                        "volume",  "pages", "doi"};
    for (const auto& [key, value] : fields) {
        if (std::find_if(std::begin(kKeys), std::end(kKeys),
                         [&](const char* k) { return key == k; })
            == std::end(kKeys)) {
            throw InvalidFieldError(key, "unknown structured-input key");
        }
        (void)value;
    }

    ExtractedReference out;
    nlohmann::json canonical = nlohmann::json::object();
    for (const auto& [key, value] : fields) canonical[key] = value;
    out.raw = canonical.dump();

    if (auto it = fields.find("authors"); it != fields.end())
        out.authors = split_author_list(it->second);
    if (auto it = fields.find("title"); it != fields.end() && !trim(it->second).empty())
        out.title = it->second;
    if (auto it = fields.find("container"); it != fields.end() && !trim(it->second).empty())
        out.container = it->second;
    if (auto it = fields.find("volume"); it != fields.end() && !trim(it->second).empty())
        out.volume = it->second;
    if (auto it = fields.find("pages"); it != fields.end() && !trim(it->second).empty())
        out.pages = it->second;
    if (auto it = fields.find("doi"); it != fields.end() && !trim(it->second).empty())
        out.doi = it->second;
    if (auto it = fields.find("year"); it != fields.end()) {
        const std::string& v = it->second;
        try {
            std::size_t consumed = 0;
            int year = std::stoi(v, &consumed);
            if (consumed != v.size() || year < kMinYear || year > kMaxYear)
                throw InvalidFieldError("year", "'" + v + "' out of range");
            out.year = year;
        } catch (const InvalidFieldError&) {
            throw;
        } catch (const std::exception&) {
            throw InvalidFieldError("year", "'" + v + "' is not a year");
        }
    }

    if (out.authors.empty() && !out.title && !out.doi)
        throw UnparseableError("structured input carries no author, title or DOI");
    return out;
}

}  // namespace bibmatch
