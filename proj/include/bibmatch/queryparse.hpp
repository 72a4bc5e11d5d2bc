#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "bibmatch/corpus.hpp"

namespace bibmatch {

// Search fields: au author surname, ti title tokens, py year or range,
// so serial tokens, cc MSC prefix, an exact record id.
enum class QueryField { au, ti, py, so, cc, an };

const char* query_field_name(QueryField field);

struct QueryNode {
    enum class Kind { term, conjunction, disjunction, negation };

    Kind kind = Kind::term;
    // term
    QueryField field = QueryField::ti;
    std::string value;
    int year_lo = 0, year_hi = 0;  // py terms only
    // operators (negation uses left only)
    std::unique_ptr<QueryNode> left;
    std::unique_ptr<QueryNode> right;
};

using QueryAst = std::unique_ptr<QueryNode>;

// Grammar: term := field ":" (word | quoted phrase); expr := term |
// "(" expr ")" | "!" expr | expr "&" expr | expr "|" expr, with precedence
// ! > & > | and left associativity. Bare words default to field ti.
// Throws QuerySyntaxError (with byte offset) or UnknownFieldError.
QueryAst parse_query(std::string_view q);

// Canonical fully-parenthesized form; parsing it reproduces the AST.
std::string print_query(const QueryNode& node);

bool query_equal(const QueryNode& a, const QueryNode& b);

// Set semantics over the corpus id universe; negation complements against
// the full id set.
std::set<long long> evaluate_query(const QueryNode& node, const Corpus& corpus);

// Per-record predicate used both by evaluate_query and as the brute-force
// oracle route in tests.
bool query_matches_record(const QueryNode& node, const BibRecord& record);

}  // namespace bibmatch
