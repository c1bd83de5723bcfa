#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "njexl/ast.hpp"
#include "njexl/lexer.hpp"

namespace njexl {

/// Parses a whole program. Throws ScriptError(kind "ParseError") at the
/// first error, with position and a description of what was expected.
std::shared_ptr<const Node> parse_program(const std::vector<Token>& tokens);

/// Parses exactly one expression; trailing tokens are a ParseError.
NodePtr parse_expression(const std::vector<Token>& tokens);

/// tokenize + parse_program.
std::shared_ptr<const Node> parse_source(std::string_view source);

}  // namespace njexl
