#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bibmatch/corpus.hpp"

namespace bibmatch {

// Structured fields parsed out of one raw citation string. `raw` always
// preserves the input byte-for-byte; every extracted text field is a
// substring of the input (nothing is fabricated).
struct ExtractedReference {
    std::vector<AuthorName> authors;
    std::optional<std::string> title;
    std::optional<std::string> container;  // journal or series name
    std::optional<int> year;
    std::optional<std::string> volume;
    std::optional<std::string> pages;
    std::optional<std::string> doi;
    std::string raw;

    bool operator==(const ExtractedReference&) const = default;
};

// Pluggable extractor so a learned model can replace the rule cascade
// without touching the matcher.
class ReferenceExtractor {
public:
    virtual ~ReferenceExtractor() = default;
    virtual ExtractedReference extract(std::string_view citation) const = 0;
};

// Deterministic rule cascade: DOI regex, delimited year, author block,
// longest-segment title, trailing "<container> <vol> (<year>), <pages>".
class RuleBasedExtractor : public ReferenceExtractor {
public:
    ExtractedReference extract(std::string_view citation) const override;
};

// Throws EmptyInputError or UnparseableError (no author, title or DOI found).
ExtractedReference extract_fields(std::string_view citation);

// Validating pass-through for pre-structured input. Keys are drawn from
// {authors, title, container, year, volume, pages, doi}; `raw` is set to the
// canonical JSON serialization of the map. Throws InvalidFieldError.
ExtractedReference extract_structured(const std::map<std::string, std::string>& fields);

// "Surname, Given" inversion plus ";" / "and" / "&" separators.
std::vector<AuthorName> split_author_list(std::string_view text);

}  // namespace bibmatch
