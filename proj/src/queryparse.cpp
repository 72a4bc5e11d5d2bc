#include "bibmatch/queryparse.hpp"

#include <algorithm>
#include <cctype>

#include "bibmatch/errors.hpp"
#include "bibmatch/index.hpp"

namespace bibmatch {

const char* query_field_name(QueryField field) {
    switch (field) {
        case QueryField::au: return "au";
        case QueryField::ti: return "ti";
        case QueryField::py: return "py";
        case QueryField::so: return "so";
        case QueryField::cc: return "cc";
        case QueryField::an: return "an";
    }
    return "?";
}

namespace {

bool is_special(char c) {
    return c == '(' || c == ')' || c == '&' || c == '|' || c == '!' || c == '"' || c == ':';
}

bool is_word_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && !is_special(c);
}

struct Token {
    enum class Kind { lparen, rparen, amp, pipe, bang, term, end };
    Kind kind = Kind::end;
    std::size_t offset = 0;
    bool has_field = false;
    std::string field;
    std::string value;
};

class Lexer {
public:
    explicit Lexer(std::string_view q) : q_(q) { advance(); }

    const Token& peek() const { return token_; }

    Token take() {
        Token t = std::move(token_);
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < q_.size() && std::isspace(static_cast<unsigned char>(q_[pos_]))) ++pos_;
        token_ = Token{};
        token_.offset = pos_;
        if (pos_ >= q_.size()) {
            token_.kind = Token::Kind::end;
            return;
        }
        char c = q_[pos_];
        switch (c) {
            case '(': token_.kind = Token::Kind::lparen; ++pos_; return;
            case ')': token_.kind = Token::Kind::rparen; ++pos_; return;
            case '&': token_.kind = Token::Kind::amp; ++pos_; return;
            case '|': token_.kind = Token::Kind::pipe; ++pos_; return;
            case '!': token_.kind = Token::Kind::bang; ++pos_; return;
            default: break;
        }
        token_.kind = Token::Kind::term;
        if (c == '"') {
            token_.value = read_quoted();
            return;
        }
        std::string word = read_word();
        if (pos_ < q_.size() && q_[pos_] == ':') {
            ++pos_;
            token_.has_field = true;
            token_.field = std::move(word);
            if (pos_ < q_.size() && q_[pos_] == '"')
                token_.value = read_quoted();
            else
                token_.value = read_word();
        } else {
            token_.value = std::move(word);
        }
    }

    std::string read_word() {
        std::string word;
        while (pos_ < q_.size() && is_word_char(q_[pos_])) word.push_back(q_[pos_++]);
        return word;
    }

    std::string read_quoted() {
        std::size_t start = pos_;
        ++pos_;  // opening quote
        std::string value;
        while (pos_ < q_.size() && q_[pos_] != '"') {
            if (q_[pos_] == '\\' && pos_ + 1 < q_.size()
                && (q_[pos_ + 1] == '"' || q_[pos_ + 1] == '\\'))
                ++pos_;
            value.push_back(q_[pos_++]);
        }
        if (pos_ >= q_.size()) throw QuerySyntaxError("unterminated quote", start);
        ++pos_;  // closing quote
        return value;
    }

    std::string_view q_;
    std::size_t pos_ = 0;
    Token token_;
};

class Parser {
public:
    explicit Parser(std::string_view q) : lexer_(q) {}

    QueryAst parse() {
        QueryAst ast = parse_or();
        const Token& t = lexer_.peek();
        if (t.kind != Token::Kind::end)
            throw QuerySyntaxError("unexpected trailing input", t.offset);
        return ast;
    }

private:
    QueryAst parse_or() {
        QueryAst left = parse_and();
        while (lexer_.peek().kind == Token::Kind::pipe) {
            lexer_.take();
            QueryAst right = parse_and();
            auto node = std::make_unique<QueryNode>();
            node->kind = QueryNode::Kind::disjunction;
            node->left = std::move(left);
            node->right = std::move(right);
            left = std::move(node);
        }
        return left;
    }

    QueryAst parse_and() {
        QueryAst left = parse_unary();
        while (lexer_.peek().kind == Token::Kind::amp) {
            lexer_.take();
            QueryAst right = parse_unary();
            auto node = std::make_unique<QueryNode>();
            node->kind = QueryNode::Kind::conjunction;
            node->left = std::move(left);
            node->right = std::move(right);
            left = std::move(node);
        }
        return left;
    }

    QueryAst parse_unary() {
        if (lexer_.peek().kind == Token::Kind::bang) {
            lexer_.take();
            auto node = std::make_unique<QueryNode>();
            node->kind = QueryNode::Kind::negation;
            node->left = parse_unary();
            return node;
        }
        return parse_primary();
    }

    QueryAst parse_primary() {
        Token t = lexer_.take();
        if (t.kind == Token::Kind::lparen) {
            QueryAst inner = parse_or();
            Token close = lexer_.take();
            if (close.kind != Token::Kind::rparen)
                throw QuerySyntaxError("expected ')'", close.offset);
            return inner;
        }
        if (t.kind != Token::Kind::term)
            throw QuerySyntaxError("expected a search term", t.offset);
        return make_term(t);
    }

    QueryAst make_term(const Token& t) {
        auto node = std::make_unique<QueryNode>();
        node->kind = QueryNode::Kind::term;
        node->value = t.value;
        if (!t.has_field) {
            node->field = QueryField::ti;
            if (t.value.empty()) throw QuerySyntaxError("empty search term", t.offset);
            return node;
        }
        if (t.field == "au") node->field = QueryField::au;
        else if (t.field == "ti") node->field = QueryField::ti;
        else if (t.field == "py") node->field = QueryField::py;
        else if (t.field == "so") node->field = QueryField::so;
        else if (t.field == "cc") node->field = QueryField::cc;
        else if (t.field == "an") node->field = QueryField::an;
        else throw UnknownFieldError(t.field);

        if (node->field == QueryField::py) {
            parse_year_value(*node, t);
        } else if (node->field == QueryField::an) {
            if (t.value.empty()
                || !std::all_of(t.value.begin(), t.value.end(),
                                [](char c) { return c >= '0' && c <= '9'; }))
                throw QuerySyntaxError("an: expects a numeric id", t.offset);
        } else if (t.value.empty()) {
            throw QuerySyntaxError("empty search term", t.offset);
        }
        return node;
    }

    static void parse_year_value(QueryNode& node, const Token& t) {
        const std::string& v = t.value;
        auto is_year = [](std::string_view s) {
            return s.size() == 4
                   && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
        };
        std::size_t dash = v.find('-');
        if (dash == std::string::npos) {
            if (!is_year(v)) throw QuerySyntaxError("py: expects a 4-digit year", t.offset);
            node.year_lo = node.year_hi = std::stoi(v);
            return;
        }
        std::string lo = v.substr(0, dash), hi = v.substr(dash + 1);
        if (!is_year(lo) || !is_year(hi))
            throw QuerySyntaxError("py: expects y1-y2 with 4-digit years", t.offset);
        node.year_lo = std::stoi(lo);
        node.year_hi = std::stoi(hi);
        if (node.year_lo > node.year_hi)
            throw QuerySyntaxError("py: range start exceeds range end", t.offset);
    }

    Lexer lexer_;
};

bool needs_quoting(const std::string& value) {
    if (value.empty()) return true;
    return std::any_of(value.begin(), value.end(), [](char c) {
        return !is_word_char(c);
    });
}

std::string quoted(const std::string& value) {
    std::string out = "\"";
    for (char c : value) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

}  // namespace

QueryAst parse_query(std::string_view q) {
    bool blank = q.empty()
                 || std::all_of(q.begin(), q.end(),
                                [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
    if (blank) throw QuerySyntaxError("empty query", 0);
    Parser parser(q);
    return parser.parse();
}

std::string print_query(const QueryNode& node) {
    switch (node.kind) {
        case QueryNode::Kind::term: {
            std::string value;
            if (node.field == QueryField::py) {
                value = std::to_string(node.year_lo);
                if (node.year_hi != node.year_lo) value += "-" + std::to_string(node.year_hi);
            } else {
                value = needs_quoting(node.value) ? quoted(node.value) : node.value;
            }
            return std::string(query_field_name(node.field)) + ":" + value;
        }
        case QueryNode::Kind::conjunction:
            return "(" + print_query(*node.left) + " & " + print_query(*node.right) + ")";
        case QueryNode::Kind::disjunction:
            return "(" + print_query(*node.left) + " | " + print_query(*node.right) + ")";
        case QueryNode::Kind::negation:
            return "!" + print_query(*node.left);
    }
    return {};
}

bool query_equal(const QueryNode& a, const QueryNode& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == QueryNode::Kind::term) {
        if (a.field != b.field) return false;
        if (a.field == QueryField::py) return a.year_lo == b.year_lo && a.year_hi == b.year_hi;
        return a.value == b.value;
    }
    if (a.kind == QueryNode::Kind::negation) return query_equal(*a.left, *b.left);
    return query_equal(*a.left, *b.left) && query_equal(*a.right, *b.right);
}

namespace {

bool tokens_subset(const std::vector<std::string>& needles, const std::string& haystack_text) {
    auto haystack = normalize(haystack_text);
    for (const auto& needle : needles) {
        if (std::find(haystack.begin(), haystack.end(), needle) == haystack.end()) return false;
    }
    return true;
}

bool term_matches(const QueryNode& node, const BibRecord& record) {
    switch (node.field) {
        case QueryField::au: {
            std::string wanted = fold_text(node.value);
            for (const AuthorName& author : record.authors)
                if (fold_text(author.surname) == wanted) return true;
            return false;
        }
        case QueryField::ti:
            return tokens_subset(normalize(node.value), record.title);
        case QueryField::py:
            return record.year && *record.year >= node.year_lo && *record.year <= node.year_hi;
        case QueryField::so:
            return record.serial && tokens_subset(normalize(node.value), *record.serial);
        case QueryField::cc: {
            std::string prefix = node.value;
            for (char& c : prefix) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
            for (const std::string& code : record.msc)
                if (code.rfind(prefix, 0) == 0) return true;
            return false;
        }
        case QueryField::an:
            return std::to_string(record.id) == node.value;
    }
    return false;
}

}  // namespace

bool query_matches_record(const QueryNode& node, const BibRecord& record) {
    switch (node.kind) {
        case QueryNode::Kind::term: return term_matches(node, record);
        case QueryNode::Kind::conjunction:
            return query_matches_record(*node.left, record)
                   && query_matches_record(*node.right, record);
        case QueryNode::Kind::disjunction:
            return query_matches_record(*node.left, record)
                   || query_matches_record(*node.right, record);
        case QueryNode::Kind::negation: return !query_matches_record(*node.left, record);
    }
    return false;
}

std::set<long long> evaluate_query(const QueryNode& node, const Corpus& corpus) {
    switch (node.kind) {
        case QueryNode::Kind::term: {
            std::set<long long> ids;
            for (const auto& [id, record] : corpus)
                if (term_matches(node, record)) ids.insert(id);
            return ids;
        }
        case QueryNode::Kind::conjunction: {
            std::set<long long> left = evaluate_query(*node.left, corpus);
            std::set<long long> right = evaluate_query(*node.right, corpus);
            std::set<long long> out;
            std::set_intersection(left.begin(), left.end(), right.begin(), right.end(),
                                  std::inserter(out, out.begin()));
            return out;
        }
        case QueryNode::Kind::disjunction: {
            std::set<long long> out = evaluate_query(*node.left, corpus);
            std::set<long long> right = evaluate_query(*node.right, corpus);
            out.insert(right.begin(), right.end());
            return out;
        }
        case QueryNode::Kind::negation: {
            std::set<long long> inner = evaluate_query(*node.left, corpus);
            std::set<long long> out;
            for (const auto& [id, record] : corpus)
                if (!inner.count(id)) out.insert(id);
            return out;
        }
    }
    return {};
}

}  // namespace bibmatch
