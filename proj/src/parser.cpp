#include "njexl/parser.hpp"

#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <utility>

namespace njexl {

namespace {

constexpr int kMaxNesting = 400;

struct BinaryLevel {
    std::initializer_list<std::pair<std::string_view, Op>> ops;
};

// Lowest to highest precedence; ternary sits above all of these.
const BinaryLevel kLevels[] = {
    {{{"or", Op::Or}}},
    {{{"and", Op::And}}},
    {{{"xor", Op::Xor}}},
    {{{"==", Op::Eq}, {"!=", Op::Ne}, {"eq", Op::Eq}}},
    {{{"<", Op::Lt},
      {"<=", Op::Le},
      {">", Op::Gt},
      {">=", Op::Ge},
      {"lt", Op::Lt},
      {"le", Op::Le},
      {"gt", Op::Gt},
      {"ge", Op::Ge},
      {"@", Op::In}}},
    {{{"+", Op::Add}, {"-", Op::Sub}}},
    {{{"*", Op::Mul}, {"/", Op::Div}, {"%", Op::Mod}}},
};
constexpr std::size_t kLevelCount = std::size(kLevels);

class Parser {
  public:
    explicit Parser(const std::vector<Token>& toks) : toks_(toks) {
        if (toks_.empty() || toks_.back().kind != TokenKind::EndOfInput) {
            throw ScriptError("ParseError", "token sequence must end with end-of-input", Position{1, 1});
        }
    }

    NodePtr program() {
        auto node = make(NodeKind::Program, peek().position());
        node->pos = {1, 1};
        statements_into(*node, /*in_braces=*/false);
        return node;
    }

    NodePtr single_expression() {
        auto e = expression();
        if (!at_end()) fail("end of expression");
        return e;
    }

  private:
    // ---- token helpers --------------------------------------------------

    const Token& peek(std::size_t ahead = 0) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& advance() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    bool at_end() const { return peek().kind == TokenKind::EndOfInput; }

    // A token continues the current expression unless a newline separates it
    // at bracket depth zero.
    bool continues() const { return nest_ > 0 || !peek().newline_before; }

    [[noreturn]] void fail(std::string_view expected) const { fail_at(peek(), expected); }

    [[noreturn]] static void fail_at(const Token& t, std::string_view expected) {
        std::string found = t.kind == TokenKind::EndOfInput ? "end of input" : "'" + t.lexeme + "'";
        throw ScriptError("ParseError", "expected " + std::string(expected) + ", found " + found, t.position());
    }

    void expect_punct(std::string_view p) {
        if (!peek().is_punct(p)) fail("'" + std::string(p) + "'");
        advance();
    }
    void expect_op(std::string_view p) {
        if (!peek().is_op(p)) fail("'" + std::string(p) + "'");
        advance();
    }
    std::string expect_identifier(std::string_view what) {
        if (peek().kind != TokenKind::Identifier) {
            check_reserved(peek());
            fail(what);
        }
        return advance().lexeme;
    }

    static void check_reserved(const Token& t) {
        if (t.is_keyword("where") || t.is_keyword("new")) {
            throw ScriptError("ParseError", "reserved keyword '" + t.lexeme + "'", t.position());
        }
    }

    static NodePtr make(NodeKind k, Position p) { return std::make_unique<Node>(k, p); }

    struct DepthGuard {
        explicit DepthGuard(Parser& p) : parser(p) {
            if (++parser.depth_ > kMaxNesting) {
                throw ScriptError("ParseError", "program nested too deeply", parser.peek().position());
            }
        }
        ~DepthGuard() { --parser.depth_; }
        Parser& parser;
    };

    struct NestGuard {
        NestGuard(Parser& p, int value) : parser(p), saved(p.nest_) { parser.nest_ = value; }
        ~NestGuard() { parser.nest_ = saved; }
        Parser& parser;
        int saved;
    };

    // ---- statements -----------------------------------------------------

    void statements_into(Node& parent, bool in_braces) {
        NestGuard nest(*this, 0);
        for (;;) {
            while (peek().is_punct(";")) advance();
            if (at_end()) {
                if (in_braces) fail("'}'");
                return;
            }
            if (in_braces && peek().is_punct("}")) return;
            parent.kids.push_back(statement());
            const Token& t = peek();
            if (t.is_punct(";")) {
                advance();
            } else if (t.kind == TokenKind::EndOfInput || t.newline_before || (in_braces && t.is_punct("}"))) {
                // statement boundary
            } else {
                fail("';' or newline");
            }
        }
    }

    NodePtr braced_block(NodeKind kind = NodeKind::Block) {
        auto node = make(kind, peek().position());
        expect_punct("{");
        statements_into(*node, true);
        expect_punct("}");
        return node;
    }

    NodePtr body() {
        if (peek().is_punct("{")) return braced_block();
        auto node = make(NodeKind::Block, peek().position());
        node->kids.push_back(statement());
        return node;
    }

    NodePtr statement() {
        DepthGuard guard(*this);
        const Token& t = peek();
        check_reserved(t);
        if (t.kind == TokenKind::Keyword) {
            if (t.lexeme == "var") return var_decl();
            if (t.lexeme == "def" && peek(1).kind == TokenKind::Identifier) return func_def();
            if (t.lexeme == "import") return import_stmt();
            if (t.lexeme == "if") return if_stmt();
            if (t.lexeme == "for") return for_stmt();
            if (t.lexeme == "while") return while_stmt();
            if (t.lexeme == "break" || t.lexeme == "continue") return jump_stmt();
            if (t.lexeme == "return") return return_stmt();
        }
        if (t.is_op("#(")) return multi_assign();
        if (t.is_punct("{")) return braced_block();

        auto expr = expression();
        const Token& next = peek();
        if ((next.is_op("=") || next.is_op("+=")) && continues()) {
            check_assignable(*expr);
            auto node = make(NodeKind::Assign, next.position());
            node->op = next.lexeme == "=" ? Op::Assign : Op::AddAssign;
            advance();
            node->kids.push_back(std::move(expr));
            node->kids.push_back(expression());
            return node;
        }
        auto stmt = make(NodeKind::ExprStmt, expr->pos);
        stmt->kids.push_back(std::move(expr));
        return stmt;
    }

    static void check_assignable(const Node& target) {
        bool ok = target.kind == NodeKind::Identifier || target.kind == NodeKind::Index ||
                  (target.kind == NodeKind::Member && !target.flag);
        if (!ok) throw ScriptError("ParseError", "expected an assignable target before '='", target.pos);
    }

    NodePtr var_decl() {
        auto node = make(NodeKind::VarDecl, advance().position());
        node->text = expect_identifier("variable name after 'var'");
        if (peek().is_op("=")) {
            advance();
            node->kids.push_back(expression());
        }
        return node;
    }

    void params_into(Node& node) {
        expect_punct("(");
        NestGuard nest(*this, 1);
        if (!peek().is_punct(")")) {
            for (;;) {
                node.names.push_back(expect_identifier("parameter name"));
                if (!peek().is_punct(",")) break;
                advance();
            }
        }
        expect_punct(")");
    }

    NodePtr func_def() {
        auto node = make(NodeKind::FuncDef, advance().position());
        node->text = advance().lexeme;
        params_into(*node);
        node->kids.push_back(braced_block());
        return node;
    }

    NodePtr import_stmt() {
        auto node = make(NodeKind::Import, advance().position());
        if (peek().kind != TokenKind::StringLiteral) fail("module path string after 'import'");
        node->text = advance().text;
        if (!peek().is_keyword("as")) fail("'as'");
        advance();
        node->names.push_back(expect_identifier("alias after 'as'"));
        return node;
    }

    NodePtr paren_condition() {
        expect_punct("(");
        NestGuard nest(*this, 1);
        auto cond = expression();
        expect_punct(")");
        return cond;
    }

    NodePtr if_stmt() {
        auto node = make(NodeKind::If, advance().position());
        node->kids.push_back(paren_condition());
        node->kids.push_back(body());
        std::size_t save = pos_;
        while (peek().is_punct(";")) advance();
        if (peek().is_keyword("else")) {
            advance();
            if (peek().is_keyword("if")) {
                auto wrapper = make(NodeKind::Block, peek().position());
                wrapper->kids.push_back(if_stmt());
                node->kids.push_back(std::move(wrapper));
            } else {
                node->kids.push_back(body());
            }
        } else {
            pos_ = save;
        }
        return node;
    }

    NodePtr for_stmt() {
        auto node = make(NodeKind::For, advance().position());
        expect_punct("(");
        {
            NestGuard nest(*this, 1);
            node->text = expect_identifier("loop variable");
            expect_op(":");
            node->kids.push_back(expression());
            expect_punct(")");
        }
        node->kids.push_back(body());
        return node;
    }

    NodePtr while_stmt() {
        auto node = make(NodeKind::While, advance().position());
        node->kids.push_back(paren_condition());
        node->kids.push_back(body());
        return node;
    }

    NodePtr jump_stmt() {
        const Token& kw = advance();
        auto node = make(kw.lexeme == "break" ? NodeKind::Break : NodeKind::Continue, kw.position());
        if (peek().is_punct("(") && !peek().newline_before) node->kids.push_back(paren_condition());
        return node;
    }

    NodePtr return_stmt() {
        auto node = make(NodeKind::Return, advance().position());
        const Token& t = peek();
        bool bare = t.kind == TokenKind::EndOfInput || t.newline_before || t.is_punct(";") || t.is_punct("}");
        if (!bare) node->kids.push_back(expression());
        return node;
    }

    NodePtr multi_assign() {
        auto node = make(NodeKind::MultiAssign, advance().position());
        {
            NestGuard nest(*this, 1);
            for (;;) {
                if (node->flag) fail("')' after the error-capture target");
                if (peek().is_op(":")) {
                    advance();
                    node->flag = true;
                }
                node->names.push_back(expect_identifier("assignment target"));
                if (!peek().is_punct(",")) break;
                advance();
            }
            expect_punct(")");
        }
        if (node->names.size() < 2) {
            throw ScriptError("ParseError", "multiple assignment needs at least two targets", node->pos);
        }
        expect_op("=");
        node->kids.push_back(expression());
        return node;
    }

    // ---- expressions ----------------------------------------------------

    NodePtr expression() {
        DepthGuard guard(*this);
        auto cond = binary(0);
        if (peek().is_op("?") && continues()) {
            auto node = make(NodeKind::Ternary, advance().position());
            node->kids.push_back(std::move(cond));
            {
                bool saved = no_static_;
                no_static_ = true;
                node->kids.push_back(expression());
                no_static_ = saved;
            }
            expect_op(":");
            node->kids.push_back(expression());
            return node;
        }
        return cond;
    }

    std::optional<Op> match_level(std::size_t level) const {
        const Token& t = peek();
        if (t.kind != TokenKind::Operator && t.kind != TokenKind::Keyword) return std::nullopt;
        for (const auto& [lex, op] : kLevels[level].ops) {
            if (t.lexeme == lex) return op;
        }
        return std::nullopt;
    }

    NodePtr binary(std::size_t level) {
        if (level == kLevelCount) return unary();
        auto lhs = binary(level + 1);
        while (continues()) {
            auto op = match_level(level);
            if (!op) break;
            auto node = make(NodeKind::Binary, advance().position());
            node->op = *op;
            node->kids.push_back(std::move(lhs));
            node->kids.push_back(binary(level + 1));
            lhs = std::move(node);
        }
        return lhs;
    }

    NodePtr unary() {
        DepthGuard guard(*this);
        const Token& t = peek();
        if (t.is_keyword("not") || t.is_op("!")) {
            auto node = make(NodeKind::Unary, advance().position());
            node->op = Op::Not;
            node->kids.push_back(unary());
            return node;
        }
        if (t.is_op("-")) {
            Position at = advance().position();
            auto operand = unary();
            if (operand->kind == NodeKind::Literal && operand->literal.is_numeric()) {
                Value v = negate(operand->literal);
                if (v.is(Tag::BigInt)) v = Value::integral(v.as_big());
                operand->literal = std::move(v);
                operand->pos = at;
                return operand;
            }
            auto node = make(NodeKind::Unary, at);
            node->op = Op::Neg;
            node->kids.push_back(std::move(operand));
            return node;
        }
        if (t.is_op("#|")) {
            auto node = make(NodeKind::Cardinality, advance().position());
            {
                NestGuard nest(*this, 1);
                node->kids.push_back(expression());
            }
            expect_op("|");
            return node;
        }
        return postfix(primary());
    }

    void args_into(Node& call) {
        expect_punct("(");
        NestGuard nest(*this, 1);
        bool named_seen = false;
        if (!peek().is_punct(")")) {
            for (;;) {
                if (peek().kind == TokenKind::Identifier && peek(1).is_op("=")) {
                    auto arg = make(NodeKind::NamedArg, peek().position());
                    arg->text = advance().lexeme;
                    advance();
                    arg->kids.push_back(expression());
                    call.kids.push_back(std::move(arg));
                    named_seen = true;
                } else {
                    if (named_seen) fail("named argument (positional arguments must come first)");
                    call.kids.push_back(expression());
                }
                if (!peek().is_punct(",")) break;
                advance();
            }
        }
        expect_punct(")");
    }

    bool static_call_ahead(const Node& expr) const {
        if (no_static_ || expr.kind != NodeKind::Identifier) return false;
        const Token& colon = peek();
        return colon.is_op(":") && colon.trivia.empty() && peek(1).kind == TokenKind::Identifier &&
               peek(1).trivia.empty() && peek(2).is_punct("(");
    }

    NodePtr postfix(NodePtr expr) {
        for (;;) {
            const Token& t = peek();
            if (!continues()) break;
            if (t.is_punct("(")) {
                auto call = make(NodeKind::Call, t.position());
                call->kids.push_back(std::move(expr));
                args_into(*call);
                expr = std::move(call);
            } else if (t.is_punct("{") && expr->kind == NodeKind::Identifier && !t.newline_before) {
                auto call = make(NodeKind::Call, expr->pos);
                call->block = braced_block(NodeKind::AnonBlock);
                call->kids.push_back(std::move(expr));
                if (!peek().is_punct("(")) fail("'(' with arguments after the anonymous block");
                args_into(*call);
                expr = std::move(call);
            } else if (t.is_punct("[")) {
                auto node = make(NodeKind::Index, advance().position());
                node->kids.push_back(std::move(expr));
                {
                    NestGuard nest(*this, 1);
                    node->kids.push_back(expression());
                }
                expect_punct("]");
                expr = std::move(node);
            } else if (t.is_punct(".")) {
                auto node = make(NodeKind::Member, advance().position());
                const Token& name = peek();
                if (name.kind == TokenKind::Identifier) {
                    node->text = advance().lexeme;
                } else if (name.kind == TokenKind::IntLiteral) {
                    node->text = advance().lexeme;
                    node->flag = true;
                    auto parsed = parse_integer(node->text);
                    node->literal = Value::integral(*parsed);
                } else {
                    fail("member name or index after '.'");
                }
                node->kids.push_back(std::move(expr));
                expr = std::move(node);
            } else if (static_call_ahead(*expr)) {
                advance();
                auto node = make(NodeKind::StaticCall, expr->pos);
                node->text = advance().lexeme;
                node->kids.push_back(std::move(expr));
                args_into(*node);
                expr = std::move(node);
            } else {
                break;
            }
        }
        return expr;
    }

    Value decimal_literal(const Token& t) const {
        auto exact = BigDec::parse(t.lexeme);
        if (!exact) throw ScriptError("ParseError", "numeric literal out of range: " + t.lexeme, t.position());
        double d = std::strtod(t.lexeme.c_str(), nullptr);
        if (std::isfinite(d) && compare(BigDec::from_double(d), *exact) == 0) return Value::real(d);
        return Value::decimal(std::move(*exact));
    }

    NodePtr primary() {
        DepthGuard guard(*this);
        const Token& t = peek();
        check_reserved(t);
        switch (t.kind) {
            case TokenKind::IntLiteral: {
                auto node = make(NodeKind::Literal, t.position());
                node->literal = Value::integral(*parse_integer(advance().lexeme));
                return node;
            }
            case TokenKind::DecimalLiteral: {
                auto node = make(NodeKind::Literal, t.position());
                node->literal = decimal_literal(t);
                advance();
                return node;
            }
            case TokenKind::StringLiteral: {
                auto node = make(NodeKind::Literal, t.position());
                node->literal = Value::str(advance().text);
                return node;
            }
            case TokenKind::Identifier: {
                auto node = make(NodeKind::Identifier, t.position());
                node->text = advance().lexeme;
                return node;
            }
            case TokenKind::Keyword: {
                if (t.lexeme == "true" || t.lexeme == "false" || t.lexeme == "null") {
                    auto node = make(NodeKind::Literal, t.position());
                    if (t.lexeme != "null") node->literal = Value::boolean(t.lexeme == "true");
                    advance();
                    return node;
                }
                if (t.lexeme == "def") {
                    auto node = make(NodeKind::FuncDef, advance().position());
                    params_into(*node);
                    node->kids.push_back(braced_block());
                    return node;
                }
                break;
            }
            case TokenKind::Operator:
                if (t.lexeme == "#clock") {
                    advance();
                    auto node = braced_block(NodeKind::ClockBlock);
                    node->pos = t.position();
                    return node;
                }
                break;
            case TokenKind::Punctuation:
                if (t.lexeme == "(") return paren();
                if (t.lexeme == "[") return bracket();
                if (t.lexeme == "{") return map_literal();
                break;
            default: break;
        }
        fail("expression");
    }

    NodePtr paren() {
        Position at = advance().position();
        NestGuard nest(*this, 1);
        auto first = expression();
        if (peek().is_punct(",")) {
            advance();
            auto node = make(NodeKind::PairLit, at);
            node->kids.push_back(std::move(first));
            node->kids.push_back(expression());
            if (peek().is_punct(",")) {
                throw ScriptError("ParseError", "a tuple literal has exactly two components", peek().position());
            }
            expect_punct(")");
            return node;
        }
        expect_punct(")");
        return first;
    }

    NodePtr bracket() {
        Position at = advance().position();
        NestGuard nest(*this, 1);
        if (peek().is_punct("]")) {
            advance();
            return make(NodeKind::ListLit, at);
        }
        auto first = expression();
        if (peek().is_op(":")) {
            auto node = make(NodeKind::RangeLit, at);
            node->kids.push_back(std::move(first));
            advance();
            node->kids.push_back(expression());
            if (peek().is_op(":")) {
                advance();
                node->kids.push_back(expression());
            }
            expect_punct("]");
            return node;
        }
        auto node = make(NodeKind::ListLit, at);
        node->kids.push_back(std::move(first));
        while (peek().is_punct(",")) {
            advance();
            node->kids.push_back(expression());
        }
        expect_punct("]");
        return node;
    }

    NodePtr map_literal() {
        auto node = make(NodeKind::MapLit, advance().position());
        NestGuard nest(*this, 1);
        if (!peek().is_punct("}")) {
            for (;;) {
                bool saved = no_static_;
                no_static_ = true;
                node->kids.push_back(expression());
                no_static_ = saved;
                expect_op(":");
                node->kids.push_back(expression());
                if (!peek().is_punct(",")) break;
                advance();
            }
        }
        expect_punct("}");
        return node;
    }

    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    int nest_ = 0;
    int depth_ = 0;
    bool no_static_ = false;
};

std::string literal_detail(const Value& v) {
    if (v.is(Tag::Str)) {
        std::string out = "'";
        for (char c : v.as_str()) {
            switch (c) {
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\\': out += "\\\\"; break;
                case '\'': out += "\\'"; break;
                default: out += c;
            }
        }
        return out + "'";
    }
    return to_display(v);
}

std::string join_names(const std::vector<std::string>& names, bool capture_last) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ", ";
        if (capture_last && i + 1 == names.size()) out += ":";
        out += names[i];
    }
    return out;
}

std::string node_detail(const Node& n) {
    switch (n.kind) {
        case NodeKind::Literal: return literal_detail(n.literal);
        case NodeKind::Identifier:
        case NodeKind::VarDecl:
        case NodeKind::For:
        case NodeKind::NamedArg:
        case NodeKind::StaticCall: return n.text;
        case NodeKind::Member: return (n.flag ? "." : "") + n.text;
        case NodeKind::Binary:
        case NodeKind::Unary:
        case NodeKind::Assign: return std::string(to_string(n.op));
        case NodeKind::MultiAssign: return join_names(n.names, n.flag);
        case NodeKind::FuncDef: return n.text + "(" + join_names(n.names, false) + ")";
        case NodeKind::Import: return "'" + n.text + "' as " + n.names[0];
        default: return {};
    }
}

void dump_into(const Node& n, int depth, std::string& out) {
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
    out += to_string(n.kind);
    auto detail = node_detail(n);
    if (!detail.empty()) out += " " + detail;
    out += " @" + std::to_string(n.pos.line) + ":" + std::to_string(n.pos.column) + "\n";
    if (n.kind == NodeKind::Call || n.kind == NodeKind::StaticCall) {
        dump_into(*n.kids[0], depth + 1, out);
        if (n.block) dump_into(*n.block, depth + 1, out);
        for (std::size_t i = 1; i < n.kids.size(); ++i) dump_into(*n.kids[i], depth + 1, out);
        return;
    }
    for (const auto& k : n.kids) dump_into(*k, depth + 1, out);
}

}  // namespace

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Program: return "Program";
        case NodeKind::Block: return "Block";
        case NodeKind::ExprStmt: return "ExprStmt";
        case NodeKind::VarDecl: return "VarDecl";
        case NodeKind::Assign: return "Assign";
        case NodeKind::MultiAssign: return "MultiAssign";
        case NodeKind::Import: return "Import";
        case NodeKind::FuncDef: return "FuncDef";
        case NodeKind::AnonBlock: return "AnonBlock";
        case NodeKind::If: return "If";
        case NodeKind::For: return "For";
        case NodeKind::While: return "While";
        case NodeKind::Break: return "Break";
        case NodeKind::Continue: return "Continue";
        case NodeKind::Return: return "Return";
        case NodeKind::Ternary: return "Ternary";
        case NodeKind::Binary: return "Binary";
        case NodeKind::Unary: return "Unary";
        case NodeKind::Cardinality: return "Cardinality";
        case NodeKind::ClockBlock: return "ClockBlock";
        case NodeKind::Call: return "Call";
        case NodeKind::StaticCall: return "StaticCall";
        case NodeKind::NamedArg: return "NamedArg";
        case NodeKind::Index: return "Index";
        case NodeKind::Member: return "Member";
        case NodeKind::RangeLit: return "RangeLit";
        case NodeKind::ListLit: return "ListLit";
        case NodeKind::MapLit: return "MapLit";
        case NodeKind::PairLit: return "PairLit";
        case NodeKind::Literal: return "Literal";
        case NodeKind::Identifier: return "Identifier";
    }
    return "?";
}

std::string_view to_string(Op op) {
    switch (op) {
        case Op::None: return "";
        case Op::Or: return "or";
        case Op::And: return "and";
        case Op::Xor: return "xor";
        case Op::Eq: return "==";
        case Op::Ne: return "!=";
        case Op::Lt: return "<";
        case Op::Le: return "<=";
        case Op::Gt: return ">";
        case Op::Ge: return ">=";
        case Op::In: return "@";
        case Op::Add: return "+";
        case Op::Sub: return "-";
        case Op::Mul: return "*";
        case Op::Div: return "/";
        case Op::Mod: return "%";
        case Op::Not: return "not";
        case Op::Neg: return "-";
        case Op::Assign: return "=";
        case Op::AddAssign: return "+=";
    }
    return "?";
}

std::string dump_ast(const Node& root) {
    std::string out;
    dump_into(root, 0, out);
    return out;
}

std::shared_ptr<const Node> parse_program(const std::vector<Token>& tokens) {
    return std::shared_ptr<const Node>(Parser(tokens).program());
}

NodePtr parse_expression(const std::vector<Token>& tokens) { return Parser(tokens).single_expression(); }

std::shared_ptr<const Node> parse_source(std::string_view source) { return parse_program(tokenize(source)); }

}  // namespace njexl
