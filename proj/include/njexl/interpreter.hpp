#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "njexl/ast.hpp"
#include "njexl/io.hpp"
#include "njexl/value.hpp"

namespace njexl {

class ModuleRegistry;
class Interpreter;

/// One frame of the lexical environment chain.
class Scope {
  public:
    explicit Scope(std::shared_ptr<Scope> parent = nullptr);

    Value* find(const std::string& name);
    Value* find_local(const std::string& name);
    /// Binds in this frame.
    void define(const std::string& name, Value v);
    /// Rebinds the nearest frame that already has `name`, else this frame.
    void assign(const std::string& name, Value v);

    Scope& global() { return *global_; }
    bool is_global() const { return global_ == this; }
    const std::shared_ptr<Scope>& parent() const { return parent_; }
    const std::unordered_map<std::string, Value>& bindings() const { return vars_; }
    void clear() { vars_.clear(); }

  private:
    std::unordered_map<std::string, Value> vars_;
    std::shared_ptr<Scope> parent_;
    Scope* global_;
};

using ScopePtr = std::shared_ptr<Scope>;

/// Implicit variables bound while an anonymous block runs.
struct BlockContext {
    Value item;                    // $
    std::int64_t index = 0;        // _
    Value source;                  // $$
    std::optional<Value> partial;  // _$_ (folds only)
};

/// An anonymous block together with the scope it was written in.
struct BlockRef {
    const Node* node = nullptr;
    ScopePtr scope;
    std::shared_ptr<const Node> owner;
};

enum class BlockSignal : std::uint8_t { Normal, Continue, Break };

struct BlockResult {
    Value value;
    BlockSignal signal = BlockSignal::Normal;
};

/// Arguments handed to a builtin.
struct NativeCall {
    Interpreter& interp;
    std::vector<Value> args;
    const BlockRef* block = nullptr;
    ScopePtr scope;

    std::size_t argc() const { return args.size(); }
    const Value& arg(std::size_t i) const { return args[i]; }
};

using NamedArgs = std::vector<std::pair<std::string, Value>>;

/// Tree-walking evaluator. One instance is one single-threaded evaluation
/// context: a global scope, a module cache and its I/O ports.
class Interpreter {
  public:
    static constexpr int kMaxCallDepth = 10'000;

    Interpreter(IoPorts io, std::shared_ptr<ModuleRegistry> registry);
    ~Interpreter();
    Interpreter(const Interpreter&) = delete;
    Interpreter& operator=(const Interpreter&) = delete;

    const ScopePtr& globals() const { return globals_; }
    IoPorts& io() { return io_; }
    ModuleRegistry& registry() { return *registry_; }

    /// Runs a Program node; returns the value of its last statement.
    /// `base_dir` anchors relative script imports.
    Value run_program(std::shared_ptr<const Node> program, const ScopePtr& scope,
                      std::filesystem::path base_dir = {});
    /// tokenize + parse + run_program.
    Value run_source(std::string_view source, const ScopePtr& scope, std::filesystem::path base_dir = {});

    Value call_function(const Value& callee, std::vector<Value> positional, NamedArgs named = {},
                        std::optional<Value> splat = std::nullopt, const BlockRef* block = nullptr,
                        ScopePtr caller = nullptr);

    BlockResult invoke_block(const BlockRef& block, const BlockContext& ctx);

    /// Binds `alias` in `scope` to the module at `path`.
    void import_module(const std::string& path, const std::string& alias, const ScopePtr& scope);

    /// Native stack bytes kept free below the deepest frame; the interpreter
    /// raises StackOverflowError before crossing it.
    void set_stack_reserve(std::size_t bytes) { stack_reserve_ = bytes; }

  private:
    enum class Flow : std::uint8_t { Normal, Break, Continue, Return };

    struct CallDepth {
        explicit CallDepth(Interpreter& in);
        ~CallDepth() { --interp.depth_; }
        Interpreter& interp;
    };

    Flow exec_statements(const std::vector<NodePtr>& stmts, const ScopePtr& scope, Value& last);
    Flow exec(const Node& n, const ScopePtr& scope, Value& last);
    Value eval(const Node& n, const ScopePtr& scope);
    Value eval_node(const Node& n, const ScopePtr& scope);

    Value eval_binary(const Node& n, const ScopePtr& scope);
    Value eval_call(const Node& n, const ScopePtr& scope);
    Value eval_member(const Node& n, const ScopePtr& scope);
    Value lookup(const Node& ident, const ScopePtr& scope);
    void assign_to(const Node& target, Value v, const ScopePtr& scope);
    Value compound_add(const Node& target, const Value& rhs, const ScopePtr& scope);
    void multi_assign(const Node& n, const ScopePtr& scope);
    Value make_function(const Node& def, const ScopePtr& scope);
    Value call_user(const Function& f, std::vector<Value> args, NamedArgs named);

    std::optional<std::filesystem::path> resolve_script(const std::string& path) const;

    IoPorts io_;
    std::shared_ptr<ModuleRegistry> registry_;
    ScopePtr globals_;

    std::shared_ptr<const Node> owner_;  // program whose nodes are executing
    std::filesystem::path base_dir_;
    Value return_value_;
    int depth_ = 0;

    std::size_t stack_reserve_ = 256 * 1024;
    const char* stack_floor_ = nullptr;  // lowest usable address of this thread's stack
    int entry_ = 0;

    std::unordered_map<std::string, ModulePtr> module_cache_;
    std::unordered_set<std::string> importing_;
    std::vector<std::weak_ptr<Scope>> captured_;
};

}  // namespace njexl
