#include "ortacplus/parser.hpp"

#include <algorithm>
#include <limits>
#include <cctype>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

namespace ortac::parser {

namespace {

const std::set<std::string> kKeywords = {
    "graph", "nodes", "node", "edge", "ontology", "agent", "constraints",
    "init",  "capacity",
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

bool is_identifier(const std::string &s) {
    if (s.empty() || !is_ident_start(s[0])) return false;
    return std::all_of(s.begin(), s.end(), is_ident_char);
}

}  // namespace

bool TokenizeResult::ok() const {
    return std::none_of(diagnostics.begin(), diagnostics.end(),
                        [](const ParseDiagnostic &d) { return d.severity == Severity::Error; });
}

// ---------------------------------------------------------------------------
// Lexer

TokenizeResult tokenize(const std::string &text) {
    TokenizeResult result;
    size_t i = 0;
    int line = 1, col = 1;

    auto here = [&](int length) { return SourceSpan{line, col, length}; };
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n && i < text.size(); ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](TokenKind kind, SourceSpan span, std::string tok_text = "") {
        result.tokens.push_back(Token{kind, std::move(tok_text), span, 0, 0.0});
    };
    auto error = [&](SourceSpan span, std::string msg) {
        result.diagnostics.push_back({Severity::Error, span, std::move(msg)});
    };

    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
            SourceSpan span = here(2);
            advance(2);
            bool closed = false;
            while (i < text.size()) {
                if (text[i] == '*' && i + 1 < text.size() && text[i + 1] == '/') {
                    advance(2);
                    closed = true;
                    break;
                }
                advance(1);
            }
            if (!closed) error(span, "unterminated block comment");
            continue;
        }
        if (c == '"') {
            SourceSpan span = here(1);
            advance(1);
            std::string body;
            bool closed = false;
            while (i < text.size()) {
                char s = text[i];
                if (s == '"') {
                    advance(1);
                    closed = true;
                    break;
                }
                if (s == '\n') break;  // strings do not span lines
                if (s == '\\' && i + 1 < text.size() &&
                    (text[i + 1] == '"' || text[i + 1] == '\\')) {
                    body.push_back(text[i + 1]);
                    advance(2);
                    continue;
                }
                body.push_back(s);
                advance(1);
            }
            if (!closed) {
                error(span, "unterminated string literal");
                continue;
            }
            span.length = col - span.column;
            push(TokenKind::String, span, std::move(body));
            continue;
        }
        if (is_digit(c)) {
            size_t start = i;
            SourceSpan span = here(0);
            while (i < text.size() && is_digit(text[i])) advance(1);
            bool decimal = false;
            if (i < text.size() && text[i] == '.' && i + 1 < text.size() &&
                is_digit(text[i + 1])) {
                decimal = true;
                advance(1);
                while (i < text.size() && is_digit(text[i])) advance(1);
            }
            std::string lexeme = text.substr(start, i - start);
            span.length = static_cast<int>(lexeme.size());
            Token tok;
            tok.span = span;
            tok.text = lexeme;
            if (decimal) {
                tok.kind = TokenKind::Decimal;
                auto [p, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(),
                                               tok.number);
                if (ec != std::errc{} || p != lexeme.data() + lexeme.size()) {
                    error(span, "malformed decimal literal '" + lexeme + "'");
                    continue;
                }
            } else {
                tok.kind = TokenKind::Integer;
                auto [p, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(),
                                               tok.int_value);
                if (ec == std::errc::result_out_of_range) {
                    error(span, "integer literal out of range: '" + lexeme + "'");
                    continue;
                }
            }
            result.tokens.push_back(std::move(tok));
            continue;
        }
        if (is_ident_start(c)) {
            size_t start = i;
            SourceSpan span = here(0);
            while (i < text.size() && is_ident_char(text[i])) advance(1);
            std::string lexeme = text.substr(start, i - start);
            span.length = static_cast<int>(lexeme.size());
            TokenKind kind =
                kKeywords.count(lexeme) ? TokenKind::Keyword : TokenKind::Identifier;
            push(kind, span, std::move(lexeme));
            continue;
        }

        auto two = [&](char a, char b) {
            return c == a && i + 1 < text.size() && text[i + 1] == b;
        };
        if (two('.', '.')) { push(TokenKind::DotDot, here(2), ".."); advance(2); continue; }
        if (two('<', '=')) { push(TokenKind::LessEq, here(2), "<="); advance(2); continue; }
        if (two('>', '=')) { push(TokenKind::GreaterEq, here(2), ">="); advance(2); continue; }
        if (two('=', '=')) { push(TokenKind::EqEq, here(2), "=="); advance(2); continue; }
        if (two('!', '=')) { push(TokenKind::NotEq, here(2), "!="); advance(2); continue; }

        TokenKind kind;
        switch (c) {
        case '(': kind = TokenKind::LParen; break;
        case ')': kind = TokenKind::RParen; break;
        case '{': kind = TokenKind::LBrace; break;
        case '}': kind = TokenKind::RBrace; break;
        case '[': kind = TokenKind::LBracket; break;
        case ']': kind = TokenKind::RBracket; break;
        case ',': kind = TokenKind::Comma; break;
        case ':': kind = TokenKind::Colon; break;
        case '.': kind = TokenKind::Dot; break;
        case '-': kind = TokenKind::Minus; break;
        case '<': kind = TokenKind::Less; break;
        case '>': kind = TokenKind::Greater; break;
        default:
            error(here(1), std::string("illegal character '") + c + "'");
            advance(1);
            continue;
        }
        push(kind, here(1), std::string(1, c));
        advance(1);
    }
    result.tokens.push_back(Token{TokenKind::EndOfFile, "", here(0), 0, 0.0});
    return result;
}

// ---------------------------------------------------------------------------
// Filter expressions

namespace {

struct FilterParser {
    const std::vector<Token> &toks;
    size_t pos = 0;
    std::string error;

    const Token &peek() const { return toks[pos]; }
    bool at(TokenKind k) const { return toks[pos].kind == k; }
    bool at_word(const char *w) const {
        return toks[pos].kind == TokenKind::Identifier && toks[pos].text == w;
    }
    Token take() { return toks[pos++]; }

    void fail(const std::string &msg) {
        if (error.empty()) error = msg;
    }

    FilterPtr parse_or() {
        FilterPtr left = parse_and();
        if (!left) return nullptr;
        std::vector<FilterPtr> parts{left};
        while (at_word("or")) {
            take();
            FilterPtr next = parse_and();
            if (!next) return nullptr;
            parts.push_back(next);
        }
        return parts.size() == 1 ? parts[0] : FilterNode::disj(std::move(parts));
    }

    FilterPtr parse_and() {
        FilterPtr left = parse_not();
        if (!left) return nullptr;
        std::vector<FilterPtr> parts{left};
        while (at_word("and")) {
            take();
            FilterPtr next = parse_not();
            if (!next) return nullptr;
            parts.push_back(next);
        }
        return parts.size() == 1 ? parts[0] : FilterNode::conj(std::move(parts));
    }

    FilterPtr parse_not() {
        if (at_word("not")) {
            take();
            FilterPtr child = parse_not();
            if (!child) return nullptr;
            return FilterNode::negate(child);
        }
        return parse_atom();
    }

    FilterPtr parse_atom() {
        if (at(TokenKind::LParen)) {
            take();
            FilterPtr inner = parse_or();
            if (!inner) return nullptr;
            if (!at(TokenKind::RParen)) {
                fail("expected ')' in filter expression");
                return nullptr;
            }
            take();
            return inner;
        }
        if (at(TokenKind::Identifier) || at(TokenKind::Keyword)) {
            if (at_word("and") || at_word("or") || at_word("not")) {
                fail("'" + peek().text + "' is reserved in filter expressions");
                return nullptr;
            }
            Token name = take();
            std::optional<CompareOp> op;
            switch (peek().kind) {
            case TokenKind::Less: op = CompareOp::Less; break;
            case TokenKind::LessEq: op = CompareOp::LessEq; break;
            case TokenKind::Greater: op = CompareOp::Greater; break;
            case TokenKind::GreaterEq: op = CompareOp::GreaterEq; break;
            case TokenKind::EqEq: op = CompareOp::Eq; break;
            case TokenKind::NotEq: op = CompareOp::NotEq; break;
            default: break;
            }
            if (!op) {
                if (name.kind == TokenKind::Keyword) {
                    fail("'" + name.text + "' is reserved and cannot be a tag");
                    return nullptr;
                }
                return FilterNode::tag_atom(name.text);
            }
            take();
            auto literal = parse_literal();
            if (!literal) return nullptr;
            return FilterNode::compare(name.text, *op, *literal);
        }
        fail("expected attribute comparison, tag, or '(' in filter expression");
        return nullptr;
    }

    std::optional<AttrValue> parse_literal() {
        bool negative = false;
        if (at(TokenKind::Minus)) {
            take();
            negative = true;
        }
        if (at(TokenKind::Integer)) {
            Token t = take();
            double v = static_cast<double>(t.int_value);
            return AttrValue{negative ? -v : v};
        }
        if (at(TokenKind::Decimal)) {
            Token t = take();
            return AttrValue{negative ? -t.number : t.number};
        }
        if (negative) {
            fail("expected a number after '-'");
            return std::nullopt;
        }
        if (at(TokenKind::String)) return AttrValue{take().text};
        if (at(TokenKind::Identifier)) return AttrValue{TagValue{take().text}};
        fail("expected a literal in filter comparison");
        return std::nullopt;
    }
};

}  // namespace

FilterParseResult parse_filter(const std::string &text) {
    TokenizeResult lexed = tokenize(text);
    if (!lexed.ok()) {
        return {nullptr, lexed.diagnostics.front().message};
    }
    FilterParser fp{lexed.tokens, 0, {}};
    FilterPtr root = fp.parse_or();
    if (!root) return {nullptr, fp.error.empty() ? "malformed filter expression" : fp.error};
    if (!fp.at(TokenKind::EndOfFile))
        return {nullptr, "unexpected trailing input in filter expression"};
    return {root, ""};
}

// ---------------------------------------------------------------------------
// Mission parser

namespace {

// Internal signal for syntax errors; converted to diagnostics at section level.
struct SyntaxError {
    ParseDiagnostic diag;
};

[[noreturn]] void syntax_error(SourceSpan span, std::string msg) {
    throw SyntaxError{{Severity::Error, span, std::move(msg)}};
}

// Parsed predicate argument, before semantic classification.
struct Arg {
    enum class Kind { Int, Edge, Ident, Str, List };
    Kind kind;
    SourceSpan span;
    long long int_value = 0;            // Int
    std::pair<long long, long long> edge;  // Edge (as written)
    std::string text;                   // Ident / Str
    std::vector<Arg> items;             // List
};

class MissionParser {
public:
    MissionParser(std::vector<Token> tokens, std::vector<ParseDiagnostic> &diags)
        : toks_(std::move(tokens)), diags_(diags) {}

    std::optional<Mission> run() {
        while (!at(TokenKind::EndOfFile)) {
            try {
                parse_section();
            } catch (const SyntaxError &e) {
                diags_.push_back(e.diag);
                recover();
            }
        }
        finalize();
        if (has_error()) return std::nullopt;
        return std::move(m_);
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    std::vector<ParseDiagnostic> &diags_;
    Mission m_;

    struct PendingEdge {
        EdgeId edge;
        SourceSpan span;
        int capacity = 1;
        AttrMap attrs;
    };
    std::vector<PendingEdge> pending_edges_;
    struct PendingAttr {
        std::string agent;
        std::string name;
        AttrValue value;
        SourceSpan span;
    };
    std::vector<PendingAttr> pending_attrs_;
    std::map<std::string, SourceSpan> agent_spans_;
    std::set<NodeId> node_blocks_;
    std::set<EdgeId> edge_blocks_;
    // First span seen for each agent tag value, for auto-registration warnings.
    std::vector<std::pair<std::string, SourceSpan>> agent_tag_uses_;

    bool has_error() const {
        return std::any_of(diags_.begin(), diags_.end(), [](const ParseDiagnostic &d) {
            return d.severity == Severity::Error;
        });
    }

    // --- token helpers ---

    const Token &peek() const { return toks_[pos_]; }
    bool at(TokenKind k) const { return peek().kind == k; }
    bool at_keyword(const char *kw) const {
        return peek().kind == TokenKind::Keyword && peek().text == kw;
    }
    Token take() {
        Token t = toks_[pos_];
        if (!at(TokenKind::EndOfFile)) ++pos_;
        return t;
    }
    Token expect(TokenKind k, const char *what) {
        if (!at(k)) syntax_error(peek().span, std::string("expected ") + what);
        return take();
    }
    Token expect_keyword(const char *kw) {
        if (!at_keyword(kw)) syntax_error(peek().span, std::string("expected '") + kw + "'");
        return take();
    }

    void error_at(SourceSpan span, std::string msg) {
        diags_.push_back({Severity::Error, span, std::move(msg)});
    }
    void warn_at(SourceSpan span, std::string msg) {
        diags_.push_back({Severity::Warning, span, std::move(msg)});
    }

    // Skip to the start of the next plausible section.
    void recover() {
        int depth = 0;
        while (!at(TokenKind::EndOfFile)) {
            if (depth == 0 &&
                (at_keyword("graph") || at_keyword("ontology") || at_keyword("agent") ||
                 at_keyword("constraints")))
                return;
            TokenKind k = take().kind;
            if (k == TokenKind::LBrace) ++depth;
            if (k == TokenKind::RBrace && depth > 0) --depth;
        }
    }

    // --- sections ---

    void parse_section() {
        if (at_keyword("graph")) return parse_graph_section();
        if (at_keyword("ontology")) return parse_ontology_section();
        if (at_keyword("agent")) return parse_agent_decl();
        if (at_keyword("constraints")) return parse_constraints_section();
        syntax_error(peek().span,
                     "expected a section ('graph', 'ontology', 'agent', or 'constraints')");
    }

    NodeId node_id_from(const Token &t) {
        if (t.int_value > std::numeric_limits<int>::max())
            syntax_error(t.span, "node id out of range: '" + t.text + "'");
        return NodeId{static_cast<int>(t.int_value)};
    }

    void parse_graph_section() {
        expect_keyword("graph");
        expect(TokenKind::LBrace, "'{'");
        while (!at(TokenKind::RBrace)) {
            if (at_keyword("nodes")) {
                parse_nodes_item();
            } else if (at_keyword("node")) {
                parse_node_item();
            } else if (at_keyword("edge")) {
                parse_edge_item();
            } else {
                syntax_error(peek().span, "expected 'nodes', 'node', or 'edge'");
            }
        }
        expect(TokenKind::RBrace, "'}'");
    }

    void parse_nodes_item() {
        expect_keyword("nodes");
        expect(TokenKind::LBrace, "'{'");
        while (true) {
            Token first = expect(TokenKind::Integer, "a node id");
            NodeId lo = node_id_from(first);
            NodeId hi = lo;
            if (at(TokenKind::DotDot)) {
                take();
                Token second = expect(TokenKind::Integer, "a node id");
                hi = node_id_from(second);
                if (hi < lo)
                    syntax_error(second.span, "descending node range " + to_string(lo) +
                                                  ".." + to_string(hi));
            }
            for (int v = lo.value; v <= hi.value; ++v) m_.graph.add_node(NodeId{v});
            if (!at(TokenKind::Comma)) break;
            take();
        }
        expect(TokenKind::RBrace, "'}'");
    }

    void parse_node_item() {
        expect_keyword("node");
        Token id = expect(TokenKind::Integer, "a node id");
        NodeId n = node_id_from(id);
        if (!node_blocks_.insert(n).second)
            error_at(id.span, "duplicate node " + to_string(n));
        m_.graph.add_node(n);
        auto [cap, attrs] = parse_prop_block(id.span);
        if (cap > 1) m_.graph.set_capacity(Location{n}, cap);
        for (auto &[name, value] : attrs) m_.graph.set_attr(Location{n}, name, value);
    }

    void parse_edge_item() {
        expect_keyword("edge");
        expect(TokenKind::LParen, "'('");
        Token ut = expect(TokenKind::Integer, "a node id");
        expect(TokenKind::Comma, "','");
        Token vt = expect(TokenKind::Integer, "a node id");
        Token close = expect(TokenKind::RParen, "')'");
        SourceSpan span = ut.span;
        NodeId u = node_id_from(ut);
        NodeId v = node_id_from(vt);
        (void)close;
        EdgeId e;
        try {
            e = normalize_edge(u, v);
        } catch (const InvalidEdgeError &err) {
            error_at(span, err.what());
            parse_prop_block(span);
            return;
        }
        if (!edge_blocks_.insert(e).second) error_at(span, "duplicate edge " + to_string(e));
        auto [cap, attrs] = parse_prop_block(span);
        pending_edges_.push_back({e, span, cap, std::move(attrs)});
    }

    // Shared "{ prop, prop }" block; extracts a capacity prop when present.
    std::pair<int, AttrMap> parse_prop_block(SourceSpan owner) {
        expect(TokenKind::LBrace, "'{'");
        int capacity = 1;
        bool saw_capacity = false;
        AttrMap attrs;
        bool first = true;
        while (!at(TokenKind::RBrace)) {
            if (!first) expect(TokenKind::Comma, "','");
            first = false;
            auto [name, name_span] = parse_prop_name();
            expect(TokenKind::Colon, "':'");
            if (name == "capacity") {
                Token cap = expect(TokenKind::Integer, "a positive integer capacity");
                if (cap.int_value < 1 || cap.int_value > std::numeric_limits<int>::max())
                    syntax_error(cap.span, "capacity must be a positive integer");
                if (saw_capacity) error_at(name_span, "duplicate property 'capacity'");
                saw_capacity = true;
                capacity = static_cast<int>(cap.int_value);
                continue;
            }
            if (attrs.count(name)) error_at(name_span, "duplicate property '" + name + "'");
            attrs[name] = parse_value();
        }
        expect(TokenKind::RBrace, "'}'");
        (void)owner;
        return {capacity, std::move(attrs)};
    }

    std::pair<std::string, SourceSpan> parse_prop_name() {
        if (at(TokenKind::Identifier) || at(TokenKind::Keyword)) {
            Token t = take();
            return {t.text, t.span};
        }
        syntax_error(peek().span, "expected a property name");
    }

    AttrValue parse_value() {
        if (at(TokenKind::Integer)) {
            Token t = take();
            return AttrValue{static_cast<double>(t.int_value)};
        }
        if (at(TokenKind::Decimal)) return AttrValue{take().number};
        if (at(TokenKind::String)) return AttrValue{take().text};
        if (at(TokenKind::Identifier)) {
            Token t = take();
            agent_tag_uses_.push_back({t.text, t.span});
            return AttrValue{TagValue{t.text}};
        }
        syntax_error(peek().span, "expected a value (number, string, or identifier)");
    }

    void parse_ontology_section() {
        expect_keyword("ontology");
        expect(TokenKind::LBrace, "'{'");
        while (!at(TokenKind::RBrace)) parse_onto_node(std::nullopt);
        expect(TokenKind::RBrace, "'}'");
    }

    void parse_onto_node(const std::optional<std::string> &parent) {
        Token name = expect(TokenKind::Identifier, "a tag name");
        try {
            if (parent)
                m_.ontology.add_child(*parent, name.text);
            else
                m_.ontology.add_root(name.text);
        } catch (const ModelError &err) {
            error_at(name.span, err.what());
        }
        if (at(TokenKind::LBrace)) {
            take();
            while (!at(TokenKind::RBrace)) parse_onto_node(name.text);
            expect(TokenKind::RBrace, "'}'");
        }
    }

    Location parse_loc_ref() {
        if (at(TokenKind::Integer)) return Location{node_id_from(take())};
        if (at(TokenKind::LParen)) {
            Token open = take();
            Token ut = expect(TokenKind::Integer, "a node id");
            expect(TokenKind::Comma, "','");
            Token vt = expect(TokenKind::Integer, "a node id");
            expect(TokenKind::RParen, "')'");
            NodeId u = node_id_from(ut), v = node_id_from(vt);
            if (u == v)
                syntax_error(open.span, "self-loop edge (" + to_string(u) + ", " +
                                            to_string(v) + ")");
            return Location{normalize_edge(u, v)};
        }
        syntax_error(peek().span, "expected a location (node id or '(u, v)' edge)");
    }

    void parse_agent_decl() {
        expect_keyword("agent");
        Token name = expect(TokenKind::Identifier, "an agent name");
        expect(TokenKind::LBrace, "'{'");
        expect_keyword("init");
        expect(TokenKind::Colon, "':'");
        Location init = parse_loc_ref();
        Agent agent{name.text, init, {}};
        while (at(TokenKind::Comma)) {
            take();
            auto [prop, prop_span] = parse_prop_name();
            expect(TokenKind::Colon, "':'");
            if (prop == "init") syntax_error(prop_span, "duplicate 'init'");
            if (agent.attrs.count(prop))
                error_at(prop_span, "duplicate property '" + prop + "'");
            agent.attrs[prop] = parse_value();
        }
        expect(TokenKind::RBrace, "'}'");
        declare_agent(std::move(agent), name.span);
    }

    void declare_agent(Agent agent, SourceSpan span) {
        if (agent_spans_.count(agent.name)) {
            error_at(span, "duplicate agent '" + agent.name + "'");
            return;
        }
        agent_spans_[agent.name] = span;
        m_.agents.push_back(std::move(agent));
    }

    // --- constraints ---

    void parse_constraints_section() {
        expect_keyword("constraints");
        expect(TokenKind::LBrace, "'{'");
        while (!at(TokenKind::RBrace)) parse_predicate();
        expect(TokenKind::RBrace, "'}'");
    }

    Arg parse_arg() {
        Arg arg;
        arg.span = peek().span;
        if (at(TokenKind::Integer)) {
            arg.kind = Arg::Kind::Int;
            arg.int_value = take().int_value;
            return arg;
        }
        if (at(TokenKind::LParen)) {
            take();
            Token ut = expect(TokenKind::Integer, "a node id");
            expect(TokenKind::Comma, "','");
            Token vt = expect(TokenKind::Integer, "a node id");
            expect(TokenKind::RParen, "')'");
            arg.kind = Arg::Kind::Edge;
            arg.edge = {ut.int_value, vt.int_value};
            return arg;
        }
        if (at(TokenKind::Identifier)) {
            arg.kind = Arg::Kind::Ident;
            arg.text = take().text;
            return arg;
        }
        if (at(TokenKind::String)) {
            arg.kind = Arg::Kind::Str;
            arg.text = take().text;
            return arg;
        }
        if (at(TokenKind::LBracket)) {
            take();
            arg.kind = Arg::Kind::List;
            while (true) {
                arg.items.push_back(parse_arg());
                if (!at(TokenKind::Comma)) break;
                take();
            }
            expect(TokenKind::RBracket, "']'");
            return arg;
        }
        syntax_error(peek().span, "expected a predicate argument");
    }

    NodeId arg_to_node(const Arg &a) {
        if (a.kind != Arg::Kind::Int)
            syntax_error(a.span, "expected a node id");
        if (a.int_value > std::numeric_limits<int>::max())
            syntax_error(a.span, "node id out of range");
        return NodeId{static_cast<int>(a.int_value)};
    }

    EdgeId arg_to_edge(const Arg &a) {
        if (a.kind != Arg::Kind::Edge)
            syntax_error(a.span, "expected an edge '(u, v)'");
        auto [u, v] = a.edge;
        if (u > std::numeric_limits<int>::max() || v > std::numeric_limits<int>::max())
            syntax_error(a.span, "node id out of range");
        if (u == v)
            syntax_error(a.span, "self-loop edge (" + std::to_string(u) + ", " +
                                     std::to_string(v) + ")");
        return normalize_edge(NodeId{static_cast<int>(u)}, NodeId{static_cast<int>(v)});
    }

    // String selectors: a lone tag is a TagQuery, anything else a FilterExpr.
    Selector string_selector(const Arg &a) {
        FilterParseResult fp = parse_filter(a.text);
        if (!fp.root) {
            if (is_identifier(a.text)) return TagQuery{a.text};
            syntax_error(a.span, "malformed filter expression: " + fp.error);
        }
        if (fp.root->kind == FilterNode::Kind::Tag) return TagQuery{fp.root->tag};
        return FilterExpr{fp.root};
    }

    Selector location_selector(const Arg &a, bool want_edges, const char *pred) {
        switch (a.kind) {
        case Arg::Kind::Int:
            if (want_edges)
                syntax_error(a.span, std::string(pred) + " expects edges, got a node id");
            return ExplicitNodes{{arg_to_node(a)}};
        case Arg::Kind::Edge:
            if (!want_edges)
                syntax_error(a.span, std::string(pred) + " expects nodes, got an edge");
            return ExplicitEdges{{arg_to_edge(a)}};
        case Arg::Kind::Str:
            return string_selector(a);
        case Arg::Kind::List: {
            if (a.items.empty()) syntax_error(a.span, "empty list argument");
            if (want_edges) {
                ExplicitEdges out;
                for (const Arg &item : a.items) out.edges.push_back(arg_to_edge(item));
                return out;
            }
            ExplicitNodes out;
            for (const Arg &item : a.items) out.nodes.push_back(arg_to_node(item));
            return out;
        }
        default:
            syntax_error(a.span, "expected a location list or a string selector");
        }
    }

    Selector agent_selector(const Arg &a) {
        switch (a.kind) {
        case Arg::Kind::Ident:
            return ExplicitAgents{{a.text}};
        case Arg::Kind::Str:
            return string_selector(a);
        case Arg::Kind::List: {
            if (a.items.empty()) syntax_error(a.span, "empty list argument");
            ExplicitAgents out;
            for (const Arg &item : a.items) {
                if (item.kind != Arg::Kind::Ident)
                    syntax_error(item.span, "expected an agent name");
                out.names.push_back(item.text);
            }
            return out;
        }
        default:
            syntax_error(a.span, "expected an agent, an agent list, or a string selector");
        }
    }

    void check_arity(const Token &name, const std::vector<Arg> &args, size_t lo, size_t hi) {
        if (args.size() >= lo && args.size() <= hi) return;
        std::string want = std::to_string(lo);
        if (hi != lo) want += ".." + std::to_string(hi);
        syntax_error(name.span, name.text + " expects " + want + " arguments, got " +
                                    std::to_string(args.size()));
    }

    void parse_predicate() {
        Token name = expect(TokenKind::Identifier, "a predicate name");
        expect(TokenKind::LParen, "'('");
        std::vector<Arg> args;
        if (!at(TokenKind::RParen)) {
            while (true) {
                args.push_back(parse_arg());
                if (!at(TokenKind::Comma)) break;
                take();
            }
        }
        expect(TokenKind::RParen, "')'");
        const std::string &p = name.text;

        if (p == "node_goal" || p == "node_visit" || p == "node_avoid") {
            check_arity(name, args, 2, 2);
            Selector locs = location_selector(args[0], false, p.c_str());
            Selector agents = agent_selector(args[1]);
            if (p == "node_goal")
                m_.constraints.push_back(NodeGoal{std::move(locs), std::move(agents)});
            else if (p == "node_visit")
                m_.constraints.push_back(NodeVisit{std::move(locs), std::move(agents)});
            else
                m_.constraints.push_back(NodeAvoid{std::move(locs), std::move(agents)});
            return;
        }
        if (p == "edge_visit" || p == "edge_avoid") {
            check_arity(name, args, 2, 2);
            Selector locs = location_selector(args[0], true, p.c_str());
            Selector agents = agent_selector(args[1]);
            if (p == "edge_visit")
                m_.constraints.push_back(EdgeVisit{std::move(locs), std::move(agents)});
            else
                m_.constraints.push_back(EdgeAvoid{std::move(locs), std::move(agents)});
            return;
        }
        if (p == "node_supported_from") {
            check_arity(name, args, 2, 2);
            Selector locs = location_selector(args[0], false, p.c_str());
            NodeId from = arg_to_node(args[1]);
            m_.constraints.push_back(NodeSupportedFrom{std::move(locs), from});
            return;
        }
        if (p == "support") {
            check_arity(name, args, 4, 4);
            if (args[0].kind != Arg::Kind::Ident)
                syntax_error(args[0].span, "expected an agent name");
            if (args[2].kind != Arg::Kind::Ident)
                syntax_error(args[2].span, "expected an agent name");
            m_.constraints.push_back(Support{args[0].text, arg_to_node(args[1]),
                                             args[2].text, arg_to_node(args[3])});
            return;
        }
        if (p == "agent_define") {
            check_arity(name, args, 2, 3);
            if (args[0].kind != Arg::Kind::Ident)
                syntax_error(args[0].span, "expected an agent name");
            Location init;
            if (args[1].kind == Arg::Kind::Int)
                init = Location{arg_to_node(args[1])};
            else if (args[1].kind == Arg::Kind::Edge)
                init = Location{arg_to_edge(args[1])};
            else
                syntax_error(args[1].span, "expected an initial location");
            Agent agent{args[0].text, init, {}};
            if (args.size() == 3) {
                if (args[2].kind != Arg::Kind::List)
                    syntax_error(args[2].span, "expected a list of characteristic tags");
                for (const Arg &item : args[2].items) {
                    if (item.kind != Arg::Kind::Ident && item.kind != Arg::Kind::Str)
                        syntax_error(item.span, "expected a characteristic tag");
                    agent.attrs[item.text] = TagValue{item.text};
                    agent_tag_uses_.push_back({item.text, item.span});
                }
            }
            declare_agent(std::move(agent), args[0].span);
            return;
        }
        if (p == "attribute") {
            check_arity(name, args, 3, 3);
            if (args[0].kind != Arg::Kind::Ident)
                syntax_error(args[0].span, "expected an agent name");
            if (args[1].kind != Arg::Kind::Ident)
                syntax_error(args[1].span, "expected an attribute name");
            AttrValue value;
            switch (args[2].kind) {
            case Arg::Kind::Int:
                value = static_cast<double>(args[2].int_value);
                break;
            case Arg::Kind::Str:
                value = args[2].text;
                break;
            case Arg::Kind::Ident:
                value = TagValue{args[2].text};
                agent_tag_uses_.push_back({args[2].text, args[2].span});
                break;
            default:
                syntax_error(args[2].span, "expected an attribute value");
            }
            pending_attrs_.push_back({args[0].text, args[1].text, value, args[0].span});
            return;
        }
        syntax_error(name.span, "unknown predicate '" + p + "'");
    }

    void finalize() {
        for (PendingEdge &pe : pending_edges_) {
            if (!m_.graph.has_node(pe.edge.a) || !m_.graph.has_node(pe.edge.b)) {
                error_at(pe.span, "edge " + to_string(pe.edge) +
                                      " references an undeclared node");
                continue;
            }
            m_.graph.add_edge(pe.edge);
            if (pe.capacity > 1) m_.graph.set_capacity(Location{pe.edge}, pe.capacity);
            for (auto &[name, value] : pe.attrs)
                m_.graph.set_attr(Location{pe.edge}, name, value);
        }
        for (PendingAttr &pa : pending_attrs_) {
            int idx = m_.agent_index(pa.agent);
            if (idx < 0) {
                error_at(pa.span, "attribute() references unknown agent '" + pa.agent + "'");
                continue;
            }
            m_.agents[idx].attrs[pa.name] = pa.value;
        }
        // Tags used on agents but never declared become ontology roots.
        std::set<std::string> warned;
        for (const Agent &a : m_.agents) {
            for (const auto &[name, value] : a.attrs) {
                const auto *tv = std::get_if<TagValue>(&value);
                if (!tv || m_.ontology.contains(tv->name)) continue;
                m_.ontology.add_root(tv->name);
                if (warned.insert(tv->name).second) {
                    SourceSpan span;
                    for (const auto &[tag, use_span] : agent_tag_uses_)
                        if (tag == tv->name) {
                            span = use_span;
                            break;
                        }
                    warn_at(span, "tag '" + tv->name +
                                      "' is not declared in the ontology; registered as a root");
                }
            }
        }
    }
};

}  // namespace

ParseResult parse_mission(const std::string &text) {
    ParseResult result;
    TokenizeResult lexed = tokenize(text);
    result.diagnostics = lexed.diagnostics;
    if (!lexed.ok()) return result;
    MissionParser mp(std::move(lexed.tokens), result.diagnostics);
    result.mission = mp.run();
    return result;
}

// ---------------------------------------------------------------------------
// Printer

namespace {

std::string quote(const std::string &s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void print_node_ranges(const std::set<NodeId> &nodes, std::string &out) {
    out += "  nodes { ";
    bool first = true;
    auto it = nodes.begin();
    while (it != nodes.end()) {
        int lo = it->value;
        int hi = lo;
        auto run = std::next(it);
        while (run != nodes.end() && run->value == hi + 1) {
            hi = run->value;
            ++run;
        }
        if (!first) out += ", ";
        first = false;
        out += std::to_string(lo);
        if (hi > lo) out += ".." + std::to_string(hi);
        it = run;
    }
    out += " }\n";
}

void print_props(int capacity, const AttrMap &attrs, std::string &out) {
    out += "{";
    bool first = true;
    auto append = [&](const std::string &piece) {
        out += first ? " " : ", ";
        first = false;
        out += piece;
    };
    if (capacity > 1) append("capacity: " + std::to_string(capacity));
    for (const auto &[name, value] : attrs) append(name + ": " + to_string(value));
    out += first ? "}" : " }";
}

std::string selector_to_string(const Selector &sel) {
    struct Visitor {
        std::string operator()(const ExplicitAgents &s) const {
            std::string out = "[";
            for (size_t i = 0; i < s.names.size(); ++i) {
                if (i) out += ", ";
                out += s.names[i];
            }
            return out + "]";
        }
        std::string operator()(const ExplicitNodes &s) const {
            std::string out = "[";
            for (size_t i = 0; i < s.nodes.size(); ++i) {
                if (i) out += ", ";
                out += to_string(s.nodes[i]);
            }
            return out + "]";
        }
        std::string operator()(const ExplicitEdges &s) const {
            std::string out = "[";
            for (size_t i = 0; i < s.edges.size(); ++i) {
                if (i) out += ", ";
                out += to_string(s.edges[i]);
            }
            return out + "]";
        }
        std::string operator()(const TagQuery &s) const { return quote(s.tag); }
        std::string operator()(const FilterExpr &s) const {
            return quote(filter_to_string(s.root));
        }
    };
    return std::visit(Visitor{}, sel);
}

std::string constraint_to_string(const Constraint &c) {
    struct Visitor {
        std::string operator()(const NodeGoal &x) const {
            return "node_goal(" + selector_to_string(x.nodes) + ", " +
                   selector_to_string(x.agents) + ")";
        }
        std::string operator()(const NodeVisit &x) const {
            return "node_visit(" + selector_to_string(x.nodes) + ", " +
                   selector_to_string(x.agents) + ")";
        }
        std::string operator()(const EdgeVisit &x) const {
            return "edge_visit(" + selector_to_string(x.edges) + ", " +
                   selector_to_string(x.agents) + ")";
        }
        std::string operator()(const NodeAvoid &x) const {
            return "node_avoid(" + selector_to_string(x.nodes) + ", " +
                   selector_to_string(x.agents) + ")";
        }
        std::string operator()(const EdgeAvoid &x) const {
            return "edge_avoid(" + selector_to_string(x.edges) + ", " +
                   selector_to_string(x.agents) + ")";
        }
        std::string operator()(const NodeSupportedFrom &x) const {
            return "node_supported_from(" + selector_to_string(x.nodes) + ", " +
                   to_string(x.from) + ")";
        }
        std::string operator()(const Support &x) const {
            return "support(" + x.unit1 + ", " + to_string(x.node1) + ", " + x.unit2 +
                   ", " + to_string(x.node2) + ")";
        }
    };
    return std::visit(Visitor{}, c);
}

std::string loc_ref_to_string(const Location &l) {
    if (is_node(l)) return to_string(std::get<NodeId>(l));
    return to_string(std::get<EdgeId>(l));
}

void print_onto_node(const Ontology &ont, const std::string &tag, int indent,
                     std::string &out) {
    out.append(indent, ' ');
    out += tag;
    std::vector<std::string> children = ont.children_of(tag);
    if (children.empty()) {
        out += "\n";
        return;
    }
    out += " {\n";
    for (const std::string &child : children) print_onto_node(ont, child, indent + 2, out);
    out.append(indent, ' ');
    out += "}\n";
}

}  // namespace

std::string print_mission(const Mission &m) {
    std::string out;

    out += "graph {\n";
    if (!m.graph.nodes().empty()) print_node_ranges(m.graph.nodes(), out);
    for (const NodeId &n : m.graph.nodes()) {
        int cap = m.graph.capacity(Location{n});
        const AttrMap &attrs = m.graph.attrs(Location{n});
        if (cap == 1 && attrs.empty()) continue;
        out += "  node " + to_string(n) + " ";
        print_props(cap, attrs, out);
        out += "\n";
    }
    for (const EdgeId &e : m.graph.edges()) {
        out += "  edge " + to_string(e) + " ";
        print_props(m.graph.capacity(Location{e}), m.graph.attrs(Location{e}), out);
        out += "\n";
    }
    out += "}\n";

    if (!m.ontology.tags().empty()) {
        out += "\nontology {\n";
        for (const std::string &root : m.ontology.roots())
            print_onto_node(m.ontology, root, 2, out);
        out += "}\n";
    }

    for (const Agent &a : m.agents) {
        out += "\nagent " + a.name + " {\n";
        out += "  init: " + loc_ref_to_string(a.init);
        for (const auto &[name, value] : a.attrs)
            out += ",\n  " + name + ": " + to_string(value);
        out += "\n}\n";
    }

    if (!m.constraints.empty()) {
        out += "\nconstraints {\n";
        for (const Constraint &c : m.constraints)
            out += "  " + constraint_to_string(c) + "\n";
        out += "}\n";
    }

    return out;
}

}  // namespace ortac::parser
