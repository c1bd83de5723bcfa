#include "njexl/lexer.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace njexl {

namespace {

constexpr std::array<std::string_view, 25> kKeywords = {
    "if",  "else", "where", "for", "while", "break", "continue", "return",
    "and", "or",   "xor",   "gt",  "ge",    "lt",    "le",       "eq",
    "not", "def",  "var",   "import", "as", "true",  "false",    "null",
    "new",
};

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
           c == '$';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            std::size_t trivia_start = pos_;
            bool newline = skip_trivia();
            Token tok;
            tok.trivia = std::string(src_.substr(trivia_start, pos_ - trivia_start));
            tok.newline_before = newline;
            tok.line = line_;
            tok.column = column_;
            if (pos_ >= src_.size()) {
                tok.kind = TokenKind::EndOfInput;
                out.push_back(std::move(tok));
                return out;
            }
            std::size_t start = pos_;
            lex_one(tok);
            tok.lexeme = std::string(src_.substr(start, pos_ - start));
            out.push_back(std::move(tok));
        }
    }

  private:
    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    [[noreturn]] void fail(const char* kind, std::string msg, Position at) {
        throw ScriptError(kind, std::move(msg), at);
    }

    Position here() const { return {line_, column_}; }

    bool skip_trivia() {
        bool newline = false;
        while (pos_ < src_.size()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
                advance();
            } else if (c == '\n') {
                newline = true;
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else if (c == '/' && peek(1) == '*') {
                Position at = here();
                advance();
                advance();
                for (;;) {
                    if (pos_ >= src_.size()) {
                        fail("UnterminatedComment", "block comment is never closed", at);
                    }
                    if (peek() == '*' && peek(1) == '/') {
                        advance();
                        advance();
                        break;
                    }
                    if (peek() == '\n') newline = true;
                    advance();
                }
            } else {
                break;
            }
        }
        return newline;
    }

    void lex_one(Token& tok) {
        char c = peek();
        if (is_ident_start(c)) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && is_ident_char(peek())) advance();
            auto word = src_.substr(start, pos_ - start);
            tok.kind = is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
            return;
        }
        if (is_digit(c)) {
            lex_number(tok);
            return;
        }
        if (c == '\'' || c == '"') {
            lex_string(tok);
            return;
        }
        if (c == '#') {
            char n = peek(1);
            if (n == '(' || n == '|') {
                advance();
                advance();
                tok.kind = TokenKind::Operator;
                return;
            }
            if (src_.substr(pos_, 6) == "#clock" &&
                !is_ident_char(pos_ + 6 < src_.size() ? src_[pos_ + 6] : '\0')) {
                for (int i = 0; i < 6; ++i) advance();
                tok.kind = TokenKind::Operator;
                return;
            }
            fail("InvalidCharacter", "unexpected '#'", here());
        }
        static constexpr std::string_view two_char[] = {"==", "!=", "<=", ">=", "+="};
        for (auto op : two_char) {
            if (src_.substr(pos_, 2) == op) {
                advance();
                advance();
                tok.kind = TokenKind::Operator;
                return;
            }
        }
        static constexpr std::string_view single_ops = "=<>+-*/%!?:@|";
        static constexpr std::string_view punct = "()[]{},;.";
        if (single_ops.find(c) != std::string_view::npos) {
            advance();
            tok.kind = TokenKind::Operator;
            return;
        }
        if (punct.find(c) != std::string_view::npos) {
            advance();
            tok.kind = TokenKind::Punctuation;
            return;
        }
        std::string shown;
        if (static_cast<unsigned char>(c) >= 0x20 && static_cast<unsigned char>(c) < 0x7F) {
            shown = std::string("'") + c + "'";
        } else {
            char buf[8];
            std::snprintf(buf, sizeof buf, "0x%02X", static_cast<unsigned char>(c));
            shown = buf;
        }
        fail("InvalidCharacter", "unexpected character " + shown, here());
    }

    void lex_number(Token& tok) {
        bool decimal = false;
        while (is_digit(peek())) advance();
        if (peek() == '.' && is_digit(peek(1))) {
            decimal = true;
            advance();
            while (is_digit(peek())) advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t ahead = 1;
            if (peek(1) == '+' || peek(1) == '-') ahead = 2;
            if (is_digit(peek(ahead))) {
                decimal = true;
                for (std::size_t i = 0; i < ahead; ++i) advance();
                while (is_digit(peek())) advance();
            }
        }
        tok.kind = decimal ? TokenKind::DecimalLiteral : TokenKind::IntLiteral;
    }

    int hex_value(char c) const {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }

    void lex_string(Token& tok) {
        Position at = here();
        char quote = peek();
        advance();
        std::string value;
        for (;;) {
            if (pos_ >= src_.size()) {
                fail("UnterminatedString", "string literal is never closed", at);
            }
            char c = peek();
            if (c == quote) {
                advance();
                break;
            }
            if (c != '\\') {
                value.push_back(c);
                advance();
                continue;
            }
            Position esc = here();
            advance();
            if (pos_ >= src_.size()) {
                fail("UnterminatedString", "string literal is never closed", at);
            }
            char e = peek();
            switch (e) {
                case '\\': value.push_back('\\'); advance(); break;
                case '\'': value.push_back('\''); advance(); break;
                case '"': value.push_back('"'); advance(); break;
                case 'n': value.push_back('\n'); advance(); break;
                case 't': value.push_back('\t'); advance(); break;
                case 'u': {
                    advance();
                    std::uint32_t cp = 0;
                    for (int i = 0; i < 4; ++i) {
                        int h = hex_value(peek());
                        if (h < 0) fail("InvalidCharacter", "malformed \\u escape", esc);
                        cp = cp * 16 + static_cast<std::uint32_t>(h);
                        advance();
                    }
                    append_utf8(value, cp);
                    break;
                }
                default:
                    fail("InvalidCharacter",
                         std::string("unknown escape sequence '\\") + e + "'", esc);
            }
        }
        tok.kind = TokenKind::StringLiteral;
        tok.text = std::move(value);
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::uint32_t line_ = 1;
    std::uint32_t column_ = 1;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
    switch (kind) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Keyword: return "keyword";
        case TokenKind::IntLiteral: return "int-literal";
        case TokenKind::DecimalLiteral: return "decimal-literal";
        case TokenKind::StringLiteral: return "string-literal";
        case TokenKind::Operator: return "operator";
        case TokenKind::Punctuation: return "punctuation";
        case TokenKind::EndOfInput: return "end-of-input";
    }
    return "?";
}

const std::vector<std::string_view>& keywords() {
    static const std::vector<std::string_view> words(kKeywords.begin(), kKeywords.end());
    return words;
}

bool is_keyword(std::string_view word) {
    return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::string reassemble(const std::vector<Token>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        out += t.trivia;
        out += t.lexeme;
    }
    return out;
}

}  // namespace njexl
