#pragma once

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "provkit/algebra.hpp"
#include "provkit/errors.hpp"
#include "provkit/value.hpp"

namespace provkit {

/// Parses the supported query dialect into an algebra expression:
///
///   SELECT <attr[, attr]* | *>
///   FROM <relation> [NATURAL JOIN <relation>]*
///   [WHERE <predicate>]
///
/// Predicates combine comparisons (< <= = != <> >= >) over attributes and
/// literals with AND, OR, NOT, TRUE, FALSE and parentheses. Keywords are
/// case-insensitive. The result always has a projection at the root.
class QueryParser {
public:
    static std::shared_ptr<const AlgebraExpr> parse(const std::string& sql) {
        QueryParser parser(sql);
        return parser.parse_query();
    }

private:
    struct Token {
        enum class Kind { Keyword, Identifier, Number, String, Symbol, End };
        Kind kind;
        std::string text; // keywords are stored uppercase
    };

    explicit QueryParser(const std::string& sql) { tokenize(sql); }

    static const std::set<std::string>& keywords() {
        static const std::set<std::string> kw = {"SELECT", "FROM",  "NATURAL", "JOIN", "WHERE",
                                                 "AND",    "OR",    "NOT",     "TRUE", "FALSE"};
        return kw;
    }

    void tokenize(const std::string& sql) {
        size_t i = 0;
        const size_t n = sql.size();
        while (i < n) {
            char c = sql[i];
            if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                size_t start = i;
                while (i < n && (std::isalnum(static_cast<unsigned char>(sql[i])) || sql[i] == '_'))
                    ++i;
                std::string word = sql.substr(start, i - start);
                std::string upper = word;
                for (char& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
                if (keywords().count(upper))
                    tokens_.push_back({Token::Kind::Keyword, upper});
                else
                    tokens_.push_back({Token::Kind::Identifier, word});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '-' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
                size_t start = i;
                if (c == '-') ++i;
                while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
                if (i < n && sql[i] == '.') {
                    ++i;
                    if (i >= n || !std::isdigit(static_cast<unsigned char>(sql[i])))
                        fail_at(tokens_.size() + 1, "malformed number '" + sql.substr(start, i - start) + "'");
                    while (i < n && std::isdigit(static_cast<unsigned char>(sql[i]))) ++i;
                }
                tokens_.push_back({Token::Kind::Number, sql.substr(start, i - start)});
                continue;
            }
            if (c == '\'') {
                ++i;
                std::string text;
                bool closed = false;
                while (i < n) {
                    if (sql[i] == '\'') {
                        if (i + 1 < n && sql[i + 1] == '\'') { // '' escapes a quote
                            text += '\'';
                            i += 2;
                            continue;
                        }
                        ++i;
                        closed = true;
                        break;
                    }
                    text += sql[i++];
                }
                if (!closed) fail_at(tokens_.size() + 1, "unterminated string literal");
                tokens_.push_back({Token::Kind::String, std::move(text)});
                continue;
            }
            // Symbols, longest match first.
            static const std::vector<std::string> symbols = {"<=", ">=", "!=", "<>", "<", ">",
                                                             "=",  ",",  "(",  ")",  "*"};
            bool matched = false;
            for (const auto& sym : symbols) {
                if (sql.compare(i, sym.size(), sym) == 0) {
                    tokens_.push_back({Token::Kind::Symbol, sym});
                    i += sym.size();
                    matched = true;
                    break;
                }
            }
            if (!matched)
                fail_at(tokens_.size() + 1, std::string("unexpected character '") + c + "'");
        }
        tokens_.push_back({Token::Kind::End, ""});
    }

    [[noreturn]] static void fail_at(size_t token_number, const std::string& message) {
        throw DataError("syntax error at token " + std::to_string(token_number) + ": " + message);
    }

    [[noreturn]] void fail(const std::string& message) const { fail_at(pos_ + 1, message); }

    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }

    bool at_keyword(const std::string& kw) const {
        return peek().kind == Token::Kind::Keyword && peek().text == kw;
    }
    bool at_symbol(const std::string& sym) const {
        return peek().kind == Token::Kind::Symbol && peek().text == sym;
    }

    void expect_keyword(const std::string& kw) {
        if (!at_keyword(kw)) fail("expected " + kw + ", got " + describe(peek()));
        ++pos_;
    }
    void expect_symbol(const std::string& sym) {
        if (!at_symbol(sym)) fail("expected '" + sym + "', got " + describe(peek()));
        ++pos_;
    }

    static std::string describe(const Token& token) {
        if (token.kind == Token::Kind::End) return "end of input";
        return "'" + token.text + "'";
    }

    std::string expect_identifier(const std::string& what) {
        if (peek().kind != Token::Kind::Identifier)
            fail("expected " + what + ", got " + describe(peek()));
        return advance().text;
    }

    std::shared_ptr<const AlgebraExpr> parse_query() {
        expect_keyword("SELECT");
        bool all = false;
        std::vector<std::string> attributes;
        if (at_symbol("*")) {
            ++pos_;
            all = true;
        } else {
            attributes.push_back(expect_identifier("attribute name"));
            while (at_symbol(",")) {
                ++pos_;
                attributes.push_back(expect_identifier("attribute name"));
            }
        }

        expect_keyword("FROM");
        auto expr = AlgebraExpr::scan(expect_identifier("relation name"));
        while (at_keyword("NATURAL")) {
            ++pos_;
            expect_keyword("JOIN");
            expr = AlgebraExpr::natural_join(expr, AlgebraExpr::scan(expect_identifier("relation name")));
        }

        if (at_keyword("WHERE")) {
            ++pos_;
            expr = AlgebraExpr::select(expr, parse_or());
        }

        if (peek().kind != Token::Kind::End) fail("expected end of input, got " + describe(peek()));

        return all ? AlgebraExpr::project_everything(expr)
                   : AlgebraExpr::project(expr, std::move(attributes));
    }

    std::shared_ptr<const Predicate> parse_or() {
        auto lhs = parse_and();
        while (at_keyword("OR")) {
            ++pos_;
            lhs = Predicate::disjunction(std::move(lhs), parse_and());
        }
        return lhs;
    }

    std::shared_ptr<const Predicate> parse_and() {
        auto lhs = parse_not();
        while (at_keyword("AND")) {
            ++pos_;
            lhs = Predicate::conjunction(std::move(lhs), parse_not());
        }
        return lhs;
    }

    std::shared_ptr<const Predicate> parse_not() {
        if (at_keyword("NOT")) {
            ++pos_;
            return Predicate::negation(parse_not());
        }
        return parse_primary();
    }

    std::shared_ptr<const Predicate> parse_primary() {
        if (at_symbol("(")) {
            ++pos_;
            auto inner = parse_or();
            expect_symbol(")");
            return inner;
        }
        if (at_keyword("TRUE")) {
            ++pos_;
            return Predicate::literal(true);
        }
        if (at_keyword("FALSE")) {
            ++pos_;
            return Predicate::literal(false);
        }
        Operand lhs = parse_operand();
        ComparisonOp op = parse_comparison_op();
        Operand rhs = parse_operand();
        return Predicate::comparison(std::move(lhs), op, std::move(rhs));
    }

    ComparisonOp parse_comparison_op() {
        if (peek().kind != Token::Kind::Symbol)
            fail("expected comparison operator, got " + describe(peek()));
        const std::string& sym = advance().text;
        if (sym == "<") return ComparisonOp::Lt;
        if (sym == "<=") return ComparisonOp::Le;
        if (sym == "=") return ComparisonOp::Eq;
        if (sym == "!=" || sym == "<>") return ComparisonOp::Ne;
        if (sym == ">=") return ComparisonOp::Ge;
        if (sym == ">") return ComparisonOp::Gt;
        --pos_;
        fail("expected comparison operator, got '" + sym + "'");
    }

    Operand parse_operand() {
        const Token& token = peek();
        switch (token.kind) {
            case Token::Kind::Identifier:
                return AttributeRef{advance().text};
            case Token::Kind::Number: {
                std::string text = advance().text;
                return parse_number_literal(text);
            }
            case Token::Kind::String:
                return Value::text(advance().text);
            case Token::Kind::Keyword:
                if (token.text == "TRUE" || token.text == "FALSE")
                    return Value::boolean(advance().text == "TRUE");
                [[fallthrough]];
            default:
                fail("expected attribute or literal, got " + describe(token));
        }
    }

    /// Numeric literals without a dot become integers; with a dot they become
    /// decimals with exactly the written scale, so comparisons stay exact.
    Value parse_number_literal(const std::string& text) const {
        auto dot = text.find('.');
        if (dot == std::string::npos) {
            try {
                return Value::parse(AttributeType::integer(), text);
            } catch (const DataError& e) {
                fail_at(pos_, e.what()); // pos_ already moved past the number
            }
        }
        size_t digits = 0;
        for (char c : text)
            if (std::isdigit(static_cast<unsigned char>(c))) ++digits;
        uint32_t scale = static_cast<uint32_t>(text.size() - dot - 1);
        uint32_t precision = static_cast<uint32_t>(digits);
        try {
            return Value::parse(AttributeType::decimal(precision, scale), text);
        } catch (const Error& e) {
            fail_at(pos_, e.what());
        }
    }

    std::vector<Token> tokens_;
    size_t pos_ = 0;
};

inline std::shared_ptr<const AlgebraExpr> parse_query(const std::string& sql) {
    return QueryParser::parse(sql);
}

} // namespace provkit
