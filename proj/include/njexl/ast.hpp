#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "njexl/error.hpp"
#include "njexl/value.hpp"

namespace njexl {

enum class NodeKind : std::uint8_t {
    Program,      // kids: statements
    Block,        // kids: statements
    ExprStmt,     // kids: [expr]
    VarDecl,      // text: name; kids: [init]?
    Assign,       // op: Assign|AddAssign; kids: [target, value]
    MultiAssign,  // names: targets; flag: last target captures errors; kids: [value]
    Import,       // text: path; names: [alias]
    FuncDef,      // text: name (empty when anonymous); names: params; kids: [Block]
    AnonBlock,    // kids: statements
    If,           // kids: [cond, then, else?]
    For,          // text: loop variable; kids: [iterable, body]
    While,        // kids: [cond, body]
    Break,        // kids: [cond]?
    Continue,     // kids: [cond]?
    Return,       // kids: [expr]?
    Ternary,      // kids: [cond, then, else]
    Binary,       // op; kids: [lhs, rhs]
    Unary,        // op; kids: [operand]
    Cardinality,  // kids: [expr]
    ClockBlock,   // kids: statements
    Call,         // kids: [callee, args...]; block: AnonBlock?
    StaticCall,   // text: member; kids: [alias Identifier, args...]; block
    NamedArg,     // text: name; kids: [value]   (name __args__ is the splat)
    Index,        // kids: [target, index]
    Member,       // text: name; flag: numeric projection (literal holds the Int)
    RangeLit,     // kids: [start, end, step?]
    ListLit,      // kids: elements
    MapLit,       // kids: key, value, key, value, ...
    PairLit,      // kids: [first, second]
    Literal,      // literal
    Identifier,   // text
};

std::string_view to_string(NodeKind kind);

enum class Op : std::uint8_t {
    None,
    Or,
    And,
    Xor,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,  // @
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Not,
    Neg,
    Assign,
    AddAssign,
};

std::string_view to_string(Op op);

struct Node;
using NodePtr = std::unique_ptr<Node>;

struct Node {
    NodeKind kind;
    Position pos;
    Op op = Op::None;
    bool flag = false;
    std::string text;
    std::vector<std::string> names;
    Value literal;
    std::vector<NodePtr> kids;
    NodePtr block;

    Node(NodeKind k, Position p) : kind(k), pos(p) {}

    const Node& kid(std::size_t i) const { return *kids[i]; }
};

/// Deterministic indentation-structured dump, one node per line:
/// `<indent><Kind>[ <detail>] @<line>:<col>`.
std::string dump_ast(const Node& root);

}  // namespace njexl
