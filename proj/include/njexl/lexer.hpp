#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "njexl/error.hpp"

namespace njexl {

enum class TokenKind : std::uint8_t {
    Identifier,
    Keyword,
    IntLiteral,
    DecimalLiteral,
    StringLiteral,
    Operator,
    Punctuation,
    EndOfInput,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::EndOfInput;
    std::string lexeme;   // exact source bytes
    std::string trivia;   // whitespace and comments preceding the lexeme
    std::string text;     // decoded contents of a string literal
    std::uint32_t line = 1;
    std::uint32_t column = 1;
    bool newline_before = false;

    Position position() const { return {line, column}; }
    bool is(TokenKind k, std::string_view lex) const {
        return kind == k && lexeme == lex;
    }
    bool is_op(std::string_view lex) const {
        return is(TokenKind::Operator, lex);
    }
    bool is_punct(std::string_view lex) const {
        return is(TokenKind::Punctuation, lex);
    }
    bool is_keyword(std::string_view lex) const {
        return is(TokenKind::Keyword, lex);
    }
};

/// The reserved words of the language, in declaration order.
const std::vector<std::string_view>& keywords();
bool is_keyword(std::string_view word);

/// Splits source into tokens; the last token is always EndOfInput and
/// carries the trailing trivia. Throws ScriptError with kind
/// UnterminatedString, UnterminatedComment or InvalidCharacter.
std::vector<Token> tokenize(std::string_view source);

/// Reassembles source from trivia + lexeme of every token.
std::string reassemble(const std::vector<Token>& tokens);

}  // namespace njexl
