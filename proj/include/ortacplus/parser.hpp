// Lexer and recursive-descent parser for .ortac mission files, plus the
// canonical printer. Selectors are left unresolved; cross-reference checks
// (agent inits, constraint targets) belong to the analysis module.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ortacplus/model.hpp"

namespace ortac::parser {

struct SourceSpan {
    int line = 1;
    int column = 1;
    int length = 0;
    auto operator<=>(const SourceSpan &) const = default;
};

enum class Severity { Error, Warning };

struct ParseDiagnostic {
    Severity severity = Severity::Error;
    SourceSpan span;
    std::string message;
};

enum class TokenKind {
    Identifier,
    Keyword,
    Integer,
    Decimal,
    String,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Dot,
    DotDot,
    Minus,
    Less,
    LessEq,
    Greater,
    GreaterEq,
    EqEq,
    NotEq,
    EndOfFile,
};

struct Token {
    TokenKind kind = TokenKind::EndOfFile;
    std::string text;        // identifier/keyword spelling, or unescaped string body
    SourceSpan span;
    long long int_value = 0; // Integer tokens
    double number = 0.0;     // Decimal tokens
};

struct TokenizeResult {
    std::vector<Token> tokens;  // always terminated by EndOfFile
    std::vector<ParseDiagnostic> diagnostics;
    bool ok() const;
};

TokenizeResult tokenize(const std::string &text);

struct ParseResult {
    std::optional<Mission> mission;  // absent iff an Error diagnostic exists
    std::vector<ParseDiagnostic> diagnostics;
    bool ok() const { return mission.has_value(); }
};

ParseResult parse_mission(const std::string &text);

// Canonical textual form; parse_mission(print_mission(m)) is structurally
// equal to m for any mission produced by parse_mission.
std::string print_mission(const Mission &m);

// The propositional sub-language used inside string selectors.
struct FilterParseResult {
    FilterPtr root;            // null on error
    std::string error;         // empty on success
};

FilterParseResult parse_filter(const std::string &text);

}  // namespace ortac::parser
