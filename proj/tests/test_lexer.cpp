#include <filesystem>
#include <set>

#include "doctest.h"
#include "njexl/lexer.hpp"
#include "support.hpp"

using namespace njexl;
using njexl::test::Rng;

namespace {

std::string shape(const std::vector<Token>& tokens) {
    std::string out;
    for (const auto& t : tokens) {
        if (t.kind == TokenKind::EndOfInput) break;
        out += "[" + std::string(to_string(t.kind)) + " " + t.lexeme + "]";
    }
    return out;
}

std::string error_of(std::string_view src) {
    try {
        tokenize(src);
    } catch (const ScriptError& e) {
        return e.kind() + "@" + std::to_string(e.position()->line) + ":" + std::to_string(e.position()->column);
    }
    return "none";
}

}  // namespace

TEST_SUITE("lexer") {
    TEST_CASE("cast with a default") {
        CHECK(shape(tokenize("x = int('42', 0)")) ==
              "[identifier x][operator =][identifier int][punctuation (][string-literal '42']"
              "[punctuation ,][int-literal 0][punctuation )]");
    }

    TEST_CASE("empty source is just end of input") {
        auto tokens = tokenize("");
        REQUIRE(tokens.size() == 1);
        CHECK(tokens[0].kind == TokenKind::EndOfInput);
    }

    TEST_CASE("cardinality bars") {
        CHECK(shape(tokenize("#|word|")) == "[operator #|][identifier word][operator |]");
    }

    TEST_CASE("multi-character operators") {
        CHECK(shape(tokenize("a==b!=c<=d>=e+=f")) ==
              "[identifier a][operator ==][identifier b][operator !=][identifier c][operator <=]"
              "[identifier d][operator >=][identifier e][operator +=][identifier f]");
        CHECK(shape(tokenize("#(a,:e) = #clock{ 1 }")) ==
              "[operator #(][identifier a][punctuation ,][operator :][identifier e][punctuation )]"
              "[operator =][operator #clock][punctuation {][int-literal 1][punctuation }]");
        CHECK(shape(tokenize("x @ y ? 1 : 2")) ==
              "[identifier x][operator @][identifier y][operator ?][int-literal 1][operator :][int-literal 2]");
    }

    TEST_CASE("implicit variables are identifiers") {
        for (const char* name : {"$", "_", "$$", "_$_", "__args__"}) {
            auto tokens = tokenize(name);
            REQUIRE(tokens.size() == 2);
            CHECK(tokens[0].kind == TokenKind::Identifier);
            CHECK(tokens[0].lexeme == name);
        }
    }

    TEST_CASE("string literals and escapes") {
        auto tokens = tokenize(R"('a\'b' "c\"d" 'x\ny\tz\\' 'é')");
        REQUIRE(tokens.size() == 5);
        CHECK(tokens[0].text == "a'b");
        CHECK(tokens[1].text == "c\"d");
        CHECK(tokens[2].text == "x\ny\tz\\");
        CHECK(tokens[3].text == "\xc3\xa9");
        CHECK(tokens[0].lexeme == R"('a\'b')");
    }

    TEST_CASE("numeric literals") {
        auto tokens = tokenize("42 3.25 1e3 2.5E-2 7.");
        CHECK(tokens[0].kind == TokenKind::IntLiteral);
        CHECK(tokens[1].kind == TokenKind::DecimalLiteral);
        CHECK(tokens[2].kind == TokenKind::DecimalLiteral);
        CHECK(tokens[3].kind == TokenKind::DecimalLiteral);
        CHECK(tokens[3].lexeme == "2.5E-2");
        // no leading-dot literals
        CHECK(shape(tokenize(".5")) == "[punctuation .][int-literal 5]");
    }

    TEST_CASE("comments are trivia") {
        auto tokens = tokenize("a // line\n/* block\n */ b");
        REQUIRE(tokens.size() == 3);
        CHECK(tokens[1].lexeme == "b");
        CHECK(tokens[1].trivia == " // line\n/* block\n */ ");
        CHECK(tokens[1].line == 3);
        CHECK(tokens[1].column == 5);
        CHECK(tokens[1].newline_before);
    }

    TEST_CASE("errors carry positions") {
        CHECK(error_of("x = 'abc") == "UnterminatedString@1:5");
        CHECK(error_of("x\n  \"abc\\\"") == "UnterminatedString@2:3");
        CHECK(error_of("a /* never") == "UnterminatedComment@1:3");
        CHECK(error_of("a\nb ^ c") == "InvalidCharacter@2:3");
        CHECK(error_of("`") == "InvalidCharacter@1:1");
    }

    TEST_CASE("keyword closure") {
        // control flow, logical, definitions, literal words, object creation
        const std::set<std::string> listed = {"if",  "else", "where", "for", "while", "break", "continue", "return",
                                              "and", "or",   "xor",   "gt",  "ge",    "lt",    "le",       "eq",
                                              "not", "def",  "var",   "import", "as", "true",  "false", "null", "new"};
        CHECK(listed.size() == 25);
        for (const auto& word : listed) {
            auto tokens = tokenize(word);
            CHECK_MESSAGE(tokens[0].kind == TokenKind::Keyword, word);
        }
        CHECK(keywords().size() == listed.size());
        Rng rng(11);
        const std::string alpha = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$0123456789";
        for (int i = 0; i < 2000; ++i) {
            std::string word(1, alpha[rng.index(53)]);
            for (auto n = rng.range(0, 6); n > 0; --n) word.push_back(alpha[rng.index(alpha.size())]);
            auto tokens = tokenize(word);
            REQUIRE(tokens.size() == 2);
            auto expected = listed.count(word) ? TokenKind::Keyword : TokenKind::Identifier;
            CHECK_MESSAGE(tokens[0].kind == expected, word);
        }
    }

    TEST_CASE("corpus round-trips byte for byte") {
        for (const auto& entry : std::filesystem::directory_iterator(test::corpus_dir())) {
            if (entry.path().extension() != ".njxl") continue;
            std::string src = test::read_text(entry.path());
            auto tokens = tokenize(src);
            CHECK_MESSAGE(reassemble(tokens) == src, entry.path().filename().string());
            for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
                CHECK(!tokens[i].lexeme.empty());
                auto a = std::pair(tokens[i].line, tokens[i].column);
                auto b = std::pair(tokens[i + 1].line, tokens[i + 1].column);
                CHECK(a <= b);
            }
        }
    }

    TEST_CASE("positions agree with an independent scanner") {
        const std::vector<std::string> pieces = {"foo", "x1",  "$",  "_$_", "42",  "3.5", "'s t'", "\"q\"",
                                                 "==",  "+=",  "#(", "#|",  "|",   "(",   ")",     "{",
                                                 "}",   "[",   "]",  ",",   ";",   ".",   ":",     "@",
                                                 "?",   "and", "if", "é",   "'ü'"};
        const std::vector<std::string> gaps = {" ", "  ", "\t", "\n", "\r\n", " // c\n", "/* x\ny */", "\n\n  "};
        Rng rng(7);
        for (int round = 0; round < 1000; ++round) {
            std::string src;
            std::vector<std::size_t> offsets;
            std::vector<std::string> lexemes;
            for (auto n = rng.range(1, 25); n > 0; --n) {
                src += rng.pick(gaps);
                const std::string& p = rng.pick(pieces);
                if (p == "é") continue;  // identifiers are ASCII; exercised inside strings instead
                offsets.push_back(src.size());
                lexemes.push_back(p);
                src += p;
            }
            auto tokens = tokenize(src);
            REQUIRE(tokens.size() == offsets.size() + 1);
            for (std::size_t i = 0; i < offsets.size(); ++i) {
                std::uint32_t line = 1, col = 1;
                for (std::size_t k = 0; k < offsets[i]; ++k) {
                    if (src[k] == '\n') {
                        ++line;
                        col = 1;
                    } else {
                        ++col;
                    }
                }
                CHECK(tokens[i].lexeme == lexemes[i]);
                CHECK(tokens[i].line == line);
                CHECK(tokens[i].column == col);
            }
            CHECK(reassemble(tokens) == src);
        }
    }
}
