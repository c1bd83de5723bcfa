#include "njexl/interpreter.hpp"

#include <pthread.h>

#include <algorithm>
#include <sstream>

#include "njexl/parser.hpp"
#include "njexl/stdlib.hpp"

namespace njexl {

namespace {

template <typename T>
class Restore {
  public:
    Restore(T& slot, T value) : slot_(slot), saved_(std::exchange(slot, std::move(value))) {}
    ~Restore() { slot_ = std::move(saved_); }
    Restore(const Restore&) = delete;
    Restore& operator=(const Restore&) = delete;

  private:
    T& slot_;
    T saved_;
};

const char* current_stack_floor() {
    pthread_attr_t attr;
    if (pthread_getattr_np(pthread_self(), &attr) != 0) return nullptr;
    void* addr = nullptr;
    std::size_t size = 0;
    pthread_attr_getstack(&attr, &addr, &size);
    pthread_attr_destroy(&attr);
    return static_cast<const char*>(addr);
}

bool is_collection(const Value& v) { return v.is(Tag::List) || v.is(Tag::Set) || v.is(Tag::Map); }

bool relational(Op op, const Value& a, const Value& b) {
    if (is_collection(a) || is_collection(b)) {
        // sub_collection rejects mismatched tags
        switch (op) {
            case Op::Le: return sub_collection(a, b);
            case Op::Lt: return sub_collection(a, b) && !equals(a, b);
            case Op::Ge: return sub_collection(b, a);
            case Op::Gt: return sub_collection(b, a) && !equals(a, b);
            default: break;
        }
    }
    int c = order_compare(a, b);
    switch (op) {
        case Op::Lt: return c < 0;
        case Op::Le: return c <= 0;
        case Op::Gt: return c > 0;
        case Op::Ge: return c >= 0;
        default: return false;
    }
}

ArithOp arith_op(Op op) {
    switch (op) {
        case Op::Add: return ArithOp::Add;
        case Op::Sub: return ArithOp::Sub;
        case Op::Mul: return ArithOp::Mul;
        case Op::Div: return ArithOp::Div;
        default: return ArithOp::Mod;
    }
}

std::int64_t range_bound(const Value& v, const char* which) {
    if (!v.is(Tag::Int)) {
        raise("TypeError", std::string("range ") + which + " must be an int, got " + std::string(tag_name(v.tag())));
    }
    return v.as_int();
}

}  // namespace

// ---- Scope --------------------------------------------------------------

Scope::Scope(std::shared_ptr<Scope> parent) : parent_(std::move(parent)) {
    global_ = parent_ ? &parent_->global() : this;
}

Value* Scope::find(const std::string& name) {
    for (Scope* s = this; s; s = s->parent_.get()) {
        auto it = s->vars_.find(name);
        if (it != s->vars_.end()) return &it->second;
    }
    return nullptr;
}

Value* Scope::find_local(const std::string& name) {
    auto it = vars_.find(name);
    return it == vars_.end() ? nullptr : &it->second;
}

void Scope::define(const std::string& name, Value v) { vars_.insert_or_assign(name, std::move(v)); }

void Scope::assign(const std::string& name, Value v) {
    if (Value* slot = find(name)) {
        *slot = std::move(v);
    } else {
        vars_.emplace(name, std::move(v));
    }
}

// ---- Interpreter --------------------------------------------------------

namespace {
struct Entry {
    Entry(int& counter, const char*& floor) : counter_(counter) {
        if (counter_++ == 0) floor = current_stack_floor();
    }
    ~Entry() { --counter_; }
    int& counter_;
};
}  // namespace

Interpreter::CallDepth::CallDepth(Interpreter& in) : interp(in) {
    if (++interp.depth_ > kMaxCallDepth) {
        --interp.depth_;
        raise("StackOverflowError", "call depth exceeded " + std::to_string(kMaxCallDepth));
    }
    char marker;
    if (interp.stack_floor_ && &marker < interp.stack_floor_ + interp.stack_reserve_) {
        --interp.depth_;
        raise("StackOverflowError", "native stack exhausted at call depth " + std::to_string(interp.depth_));
    }
}

Interpreter::Interpreter(IoPorts io, std::shared_ptr<ModuleRegistry> registry)
    : io_(std::move(io)), registry_(std::move(registry)), globals_(std::make_shared<Scope>()) {
    if (!registry_) registry_ = ModuleRegistry::with_defaults();
    if (!io_.loader) io_.loader = std::make_shared<ResourceLoader>();
    if (!io_.clock) io_.clock = steady_clock_ns();
    if (!io_.out) io_.out = [](std::string_view) {};
    if (!io_.err) io_.err = [](std::string_view) {};
}

Interpreter::~Interpreter() {
    // Closures stored in the scopes they capture form reference cycles.
    globals_->clear();
    for (auto& weak : captured_) {
        if (auto s = weak.lock()) s->clear();
    }
    module_cache_.clear();
}

Value Interpreter::run_program(std::shared_ptr<const Node> program, const ScopePtr& scope,
                               std::filesystem::path base_dir) {
    Entry entry(entry_, stack_floor_);
    Restore<std::shared_ptr<const Node>> owner(owner_, program);
    Restore<std::filesystem::path> dir(base_dir_, base_dir.empty() ? base_dir_ : std::move(base_dir));
    Value last;
    Flow flow = exec_statements(program->kids, scope, last);
    switch (flow) {
        case Flow::Return: return std::exchange(return_value_, Value());
        case Flow::Break:
        case Flow::Continue: raise("ControlFlowError", "'break'/'continue' outside of a loop or block");
        case Flow::Normal: break;
    }
    return last;
}

Value Interpreter::run_source(std::string_view source, const ScopePtr& scope, std::filesystem::path base_dir) {
    return run_program(parse_source(source), scope, std::move(base_dir));
}

Interpreter::Flow Interpreter::exec_statements(const std::vector<NodePtr>& stmts, const ScopePtr& scope,
                                               Value& last) {
    for (const auto& stmt : stmts) {
        Flow f = exec(*stmt, scope, last);
        if (f != Flow::Normal) return f;
    }
    return Flow::Normal;
}

Interpreter::Flow Interpreter::exec(const Node& n, const ScopePtr& scope, Value& last) {
    try {
        switch (n.kind) {
            case NodeKind::ExprStmt: last = eval(n.kid(0), scope); return Flow::Normal;
            case NodeKind::Assign:
                if (n.op == Op::AddAssign) {
                    last = compound_add(n.kid(0), eval(n.kid(1), scope), scope);
                } else {
                    Value v = eval(n.kid(1), scope);
                    assign_to(n.kid(0), v, scope);
                    last = std::move(v);
                }
                return Flow::Normal;
            case NodeKind::VarDecl: {
                Value v = n.kids.empty() ? Value() : eval(n.kid(0), scope);
                scope->global().define(n.text, v);
                last = std::move(v);
                return Flow::Normal;
            }
            case NodeKind::MultiAssign:
                multi_assign(n, scope);
                last = Value();
                return Flow::Normal;
            case NodeKind::Import:
                import_module(n.text, n.names[0], scope);
                last = Value();
                return Flow::Normal;
            case NodeKind::FuncDef: {
                Value f = make_function(n, scope);
                if (!n.text.empty()) scope->define(n.text, f);
                last = std::move(f);
                return Flow::Normal;
            }
            case NodeKind::If: {
                last = Value();
                if (truthy(eval(n.kid(0), scope))) return exec_statements(n.kid(1).kids, scope, last);
                if (n.kids.size() > 2) return exec_statements(n.kid(2).kids, scope, last);
                return Flow::Normal;
            }
            case NodeKind::For: {
                Cursor cursor(eval(n.kid(0), scope));
                while (auto item = cursor.next()) {
                    scope->assign(n.text, std::move(*item));
                    Value body_last;
                    Flow f = exec_statements(n.kid(1).kids, scope, body_last);
                    if (f == Flow::Break) break;
                    if (f == Flow::Return) return f;
                }
                last = Value();
                return Flow::Normal;
            }
            case NodeKind::While: {
                while (truthy(eval(n.kid(0), scope))) {
                    Value body_last;
                    Flow f = exec_statements(n.kid(1).kids, scope, body_last);
                    if (f == Flow::Break) break;
                    if (f == Flow::Return) return f;
                }
                last = Value();
                return Flow::Normal;
            }
            case NodeKind::Break:
            case NodeKind::Continue:
                if (!n.kids.empty() && !truthy(eval(n.kid(0), scope))) return Flow::Normal;
                return n.kind == NodeKind::Break ? Flow::Break : Flow::Continue;
            case NodeKind::Return:
                return_value_ = n.kids.empty() ? Value() : eval(n.kid(0), scope);
                return Flow::Return;
            case NodeKind::Block: return exec_statements(n.kids, scope, last);
            default: last = eval(n, scope); return Flow::Normal;
        }
    } catch (ScriptError& e) {
        e.attach_position(n.pos);
        throw;
    }
}

Value Interpreter::eval(const Node& n, const ScopePtr& scope) {
    try {
        return eval_node(n, scope);
    } catch (ScriptError& e) {
        e.attach_position(n.pos);
        throw;
    }
}

Value Interpreter::eval_node(const Node& n, const ScopePtr& scope) {
    switch (n.kind) {
        case NodeKind::Literal: return n.literal;
        case NodeKind::Identifier: return lookup(n, scope);
        case NodeKind::Binary: return eval_binary(n, scope);
        case NodeKind::Unary: {
            Value v = eval(n.kid(0), scope);
            if (n.op == Op::Not) return Value::boolean(!truthy(v));
            return negate(v);
        }
        case NodeKind::Ternary:
            return truthy(eval(n.kid(0), scope)) ? eval(n.kid(1), scope) : eval(n.kid(2), scope);
        case NodeKind::Cardinality: return Value::integer(cardinality(eval(n.kid(0), scope)));
        case NodeKind::ClockBlock: {
            std::int64_t start = io_.clock();
            Value last;
            Flow f = exec_statements(n.kids, scope, last);
            std::int64_t stop = io_.clock();
            if (f != Flow::Normal) raise("ControlFlowError", "cannot break, continue or return out of #clock");
            return Value::pair(Value::integer(stop - start), std::move(last));
        }
        case NodeKind::Call:
        case NodeKind::StaticCall: return eval_call(n, scope);
        case NodeKind::Index: {
            Value target = eval(n.kid(0), scope);
            return index_value(target, eval(n.kid(1), scope));
        }
        case NodeKind::Member: return eval_member(n, scope);
        case NodeKind::RangeLit: {
            Range r;
            r.start = range_bound(eval(n.kid(0), scope), "start");
            r.end = range_bound(eval(n.kid(1), scope), "end");
            if (n.kids.size() > 2) r.step = range_bound(eval(n.kid(2), scope), "step");
            if (r.step == 0) raise("RangeError", "range step must not be zero");
            return Value::range(r);
        }
        case NodeKind::ListLit: {
            std::vector<Value> items;
            items.reserve(n.kids.size());
            for (const auto& k : n.kids) items.push_back(eval(*k, scope));
            return Value::list(std::move(items));
        }
        case NodeKind::MapLit: {
            auto m = std::make_shared<ValueMap>();
            for (std::size_t i = 0; i + 1 < n.kids.size(); i += 2) {
                Value k = eval(*n.kids[i], scope);
                m->set(std::move(k), eval(*n.kids[i + 1], scope));
            }
            return Value::map(std::move(m));
        }
        case NodeKind::PairLit: {
            Value first = eval(n.kid(0), scope);
            return Value::pair(std::move(first), eval(n.kid(1), scope));
        }
        case NodeKind::FuncDef: return make_function(n, scope);
        default: raise("InternalError", "cannot evaluate a " + std::string(to_string(n.kind)) + " node");
    }
}

Value Interpreter::eval_binary(const Node& n, const ScopePtr& scope) {
    switch (n.op) {
        case Op::And:
            if (!truthy(eval(n.kid(0), scope))) return Value::boolean(false);
            return Value::boolean(truthy(eval(n.kid(1), scope)));
        case Op::Or:
            if (truthy(eval(n.kid(0), scope))) return Value::boolean(true);
            return Value::boolean(truthy(eval(n.kid(1), scope)));
        default: break;
    }
    Value a = eval(n.kid(0), scope);
    Value b = eval(n.kid(1), scope);
    switch (n.op) {
        case Op::Xor: return Value::boolean(truthy(a) != truthy(b));
        case Op::Eq: return Value::boolean(equals(a, b));
        case Op::Ne: return Value::boolean(!equals(a, b));
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge: return Value::boolean(relational(n.op, a, b));
        case Op::In: return Value::boolean(member_of(a, b));
        default: return arith(arith_op(n.op), a, b);
    }
}

Value Interpreter::lookup(const Node& ident, const ScopePtr& scope) {
    if (Value* v = scope->find(ident.text)) return *v;
    const auto& table = builtins();
    auto it = table.find(ident.text);
    if (it != table.end()) return it->second;
    raise("NameError", "'" + ident.text + "' is not defined");
}

Value Interpreter::eval_call(const Node& n, const ScopePtr& scope) {
    const Node& callee_node = n.kid(0);
    Value callee;
    std::optional<Value> receiver;

    if (n.kind == NodeKind::StaticCall) {
        Value alias = lookup(callee_node, scope);
        if (!alias.is(Tag::Module)) raise("TypeError", "'" + callee_node.text + "' is not an imported module");
        auto it = alias.as_module()->members.find(n.text);
        if (it == alias.as_module()->members.end()) {
            raise("NameError", "module '" + alias.as_module()->path + "' has no member '" + n.text + "'");
        }
        callee = it->second;
    } else if (callee_node.kind == NodeKind::Member && !callee_node.flag) {
        Value obj = eval(callee_node.kid(0), scope);
        const std::string& name = callee_node.text;
        const Value* found = nullptr;
        if (obj.is(Tag::Module)) {
            auto it = obj.as_module()->members.find(name);
            if (it == obj.as_module()->members.end()) {
                raise("NameError", "module '" + obj.as_module()->path + "' has no member '" + name + "'");
            }
            found = &it->second;
        } else if (obj.is(Tag::Map)) {
            found = obj.as_map()->find(Value::str(name));
        }
        if (found) {
            callee = *found;
        } else {
            // obj.f(args) falls back to the builtin f(obj, args)
            auto it = builtins().find(name);
            if (it == builtins().end()) {
                raise("AttributeError", "a " + std::string(tag_name(obj.tag())) + " has no method '" + name + "'");
            }
            callee = it->second;
            receiver = std::move(obj);
        }
    } else {
        callee = eval(callee_node, scope);
    }

    std::vector<Value> positional;
    NamedArgs named;
    std::optional<Value> splat;
    if (receiver) positional.push_back(std::move(*receiver));
    for (std::size_t i = 1; i < n.kids.size(); ++i) {
        const Node& arg = n.kid(i);
        if (arg.kind == NodeKind::NamedArg) {
            Value v = eval(arg.kid(0), scope);
            if (arg.text == "__args__") {
                splat = std::move(v);
            } else {
                named.emplace_back(arg.text, std::move(v));
            }
        } else {
            positional.push_back(eval(arg, scope));
        }
    }
    if (n.block) {
        BlockRef block{n.block.get(), scope, owner_};
        return call_function(callee, std::move(positional), std::move(named), std::move(splat), &block, scope);
    }
    return call_function(callee, std::move(positional), std::move(named), std::move(splat), nullptr, scope);
}

Value Interpreter::eval_member(const Node& n, const ScopePtr& scope) {
    Value obj = eval(n.kid(0), scope);
    if (n.flag) return index_value(obj, n.literal);
    const std::string& name = n.text;
    switch (obj.tag()) {
        case Tag::Module: {
            auto it = obj.as_module()->members.find(name);
            if (it == obj.as_module()->members.end()) {
                raise("NameError", "module '" + obj.as_module()->path + "' has no member '" + name + "'");
            }
            return it->second;
        }
        case Tag::Map: {
            const Value* v = obj.as_map()->find(Value::str(name));
            return v ? *v : Value();
        }
        case Tag::Error: {
            const auto& e = *obj.as_error();
            if (name == "kind") return Value::str(e.kind);
            if (name == "message") return Value::str(e.message);
            if (name == "cause") return e.cause ? Value::error(e.cause) : Value();
            if (name == "line") return e.position ? Value::integer(e.position->line) : Value();
            if (name == "column") return e.position ? Value::integer(e.position->column) : Value();
            break;
        }
        case Tag::Pair:
            if (name == "first") return obj.as_pair().first;
            if (name == "second") return obj.as_pair().second;
            break;
        case Tag::Date: {
            const auto& d = obj.as_date();
            if (name == "year") return Value::integer(d.year);
            if (name == "month") return Value::integer(d.month);
            if (name == "day") return Value::integer(d.day);
            if (name == "hour") return Value::integer(d.hour);
            if (name == "minute") return Value::integer(d.minute);
            if (name == "second") return Value::integer(d.second);
            break;
        }
        default: break;
    }
    raise("AttributeError", "a " + std::string(tag_name(obj.tag())) + " has no member '" + name + "'");
}

void Interpreter::assign_to(const Node& target, Value v, const ScopePtr& scope) {
    switch (target.kind) {
        case NodeKind::Identifier: scope->assign(target.text, std::move(v)); return;
        case NodeKind::Index: {
            Value container = eval(target.kid(0), scope);
            Value key = eval(target.kid(1), scope);
            if (container.is(Tag::Map)) {
                container.as_map()->set(std::move(key), std::move(v));
                return;
            }
            if (container.is(Tag::List)) {
                auto& items = container.as_list()->items;
                if (!key.is(Tag::Int)) raise("TypeError", "list index must be an int");
                auto i = key.as_int();
                if (i < 0 || static_cast<std::size_t>(i) >= items.size()) {
                    raise("IndexError", "index " + std::to_string(i) + " out of bounds for size " +
                                            std::to_string(items.size()));
                }
                items[static_cast<std::size_t>(i)] = std::move(v);
                return;
            }
            raise("TypeError", "cannot assign into a " + std::string(tag_name(container.tag())));
        }
        case NodeKind::Member: {
            Value container = eval(target.kid(0), scope);
            if (!container.is(Tag::Map)) {
                raise("TypeError", "cannot set member '" + target.text + "' on a " +
                                       std::string(tag_name(container.tag())));
            }
            container.as_map()->set(Value::str(target.text), std::move(v));
            return;
        }
        default: raise("TypeError", "invalid assignment target");
    }
}

Value Interpreter::compound_add(const Node& target, const Value& rhs, const ScopePtr& scope) {
    Value current = eval(target, scope);
    if (current.is(Tag::List)) {
        current.as_list()->items.push_back(rhs);
        return current;
    }
    if (current.is(Tag::Set)) {
        current.as_set()->insert(rhs);
        return current;
    }
    Value result = arith(ArithOp::Add, current, rhs);
    assign_to(target, result, scope);
    return result;
}

void Interpreter::multi_assign(const Node& n, const ScopePtr& scope) {
    const auto& names = n.names;
    auto destructure = [&](const Value& v, std::size_t count) -> std::vector<Value> {
        std::vector<Value> parts;
        if (v.is(Tag::Pair)) {
            parts = {v.as_pair().first, v.as_pair().second};
        } else if (v.is(Tag::List)) {
            parts = v.as_list()->items;
        } else {
            raise("DestructureError", "cannot unpack a " + std::string(tag_name(v.tag())) + " into " +
                                          std::to_string(count) + " targets");
        }
        if (parts.size() != count) {
            raise("DestructureError", "cannot unpack " + std::to_string(parts.size()) + " values into " +
                                          std::to_string(count) + " targets");
        }
        return parts;
    };

    if (!n.flag) {
        auto parts = destructure(eval(n.kid(0), scope), names.size());
        for (std::size_t i = 0; i < names.size(); ++i) scope->assign(names[i], std::move(parts[i]));
        return;
    }

    const std::size_t plain = names.size() - 1;
    auto fail_all = [&](ErrorPtr err) {
        for (std::size_t i = 0; i < plain; ++i) scope->assign(names[i], Value());
        scope->assign(names[plain], Value::error(std::move(err)));
    };
    try {
        Value v = eval(n.kid(0), scope);
        if (plain == 1) {
            scope->assign(names[0], std::move(v));
        } else {
            auto parts = destructure(v, plain);
            for (std::size_t i = 0; i < plain; ++i) scope->assign(names[i], std::move(parts[i]));
        }
        scope->assign(names[plain], Value());
    } catch (ScriptError& e) {
        e.attach_position(n.kid(0).pos);
        fail_all(e.info());
    } catch (const std::exception& e) {
        fail_all(std::make_shared<ErrorInfo>(ErrorInfo{"InternalError", e.what(), n.kid(0).pos, nullptr}));
    }
}

Value Interpreter::make_function(const Node& def, const ScopePtr& scope) {
    auto f = std::make_shared<Function>();
    f->name = def.text;
    f->params = def.names;
    f->body = std::shared_ptr<const Node>(owner_, &def.kid(0));
    f->closure = scope;
    if (scope != globals_) {
        if (captured_.size() >= 64 && captured_.size() % 64 == 0) {
            std::erase_if(captured_, [](const std::weak_ptr<Scope>& w) { return w.expired(); });
        }
        captured_.push_back(scope);
    }
    return Value::function(std::move(f));
}

Value Interpreter::call_function(const Value& callee, std::vector<Value> positional, NamedArgs named,
                                 std::optional<Value> splat, const BlockRef* block, ScopePtr caller) {
    Entry entry(entry_, stack_floor_);
    if (splat) {
        if (!positional.empty()) raise("ArityError", "__args__ cannot be combined with positional arguments");
        if (!splat->is(Tag::List)) {
            raise("TypeError", "__args__ must be a list, got " + std::string(tag_name(splat->tag())));
        }
        positional = splat->as_list()->items;
    }
    if (callee.is(Tag::Function)) {
        const Function& f = *callee.as_function();
        if (block) {
            raise("TypeError", "function '" + (f.name.empty() ? std::string("<anonymous>") : f.name) +
                                   "' does not take an anonymous block");
        }
        return call_user(f, std::move(positional), std::move(named));
    }
    if (callee.is(Tag::NativeFunction)) {
        const NativeFunction& nf = *callee.as_native();
        if (!named.empty()) {
            raise("UnknownParameter", "builtin '" + nf.name + "' has no parameter named '" + named.front().first + "'");
        }
        if (block && !nf.accepts_block) raise("TypeError", "builtin '" + nf.name + "' does not take an anonymous block");
        NativeCall call{*this, std::move(positional), block, caller ? std::move(caller) : globals_};
        return nf.fn(call);
    }
    raise("TypeError", "a " + std::string(tag_name(callee.tag())) + " is not callable");
}

Value Interpreter::call_user(const Function& f, std::vector<Value> args, NamedArgs named) {
    CallDepth depth(*this);
    const std::string display = f.name.empty() ? "<anonymous>" : f.name;
    if (args.size() > f.params.size()) {
        raise("ArityError", "'" + display + "' takes " + std::to_string(f.params.size()) + " argument(s), got " +
                                std::to_string(args.size()));
    }
    auto frame = std::make_shared<Scope>(f.closure);
    for (std::size_t i = 0; i < f.params.size(); ++i) {
        frame->define(f.params[i], i < args.size() ? args[i] : Value());
    }
    for (auto& [name, value] : named) {
        auto it = std::find(f.params.begin(), f.params.end(), name);
        if (it == f.params.end()) raise("UnknownParameter", "'" + display + "' has no parameter named '" + name + "'");
        if (static_cast<std::size_t>(it - f.params.begin()) < args.size()) {
            raise("ArityError", "parameter '" + name + "' of '" + display + "' given twice");
        }
        frame->define(name, std::move(value));
    }
    frame->define("__args__", Value::list(std::move(args)));

    Restore<std::shared_ptr<const Node>> owner(owner_, f.body);
    Value last;
    Flow flow = exec_statements(f.body->kids, frame, last);
    switch (flow) {
        case Flow::Return: return std::exchange(return_value_, Value());
        case Flow::Break:
        case Flow::Continue: raise("ControlFlowError", "'break'/'continue' outside of a loop in '" + display + "'");
        case Flow::Normal: break;
    }
    return last;
}

BlockResult Interpreter::invoke_block(const BlockRef& block, const BlockContext& ctx) {
    Entry entry(entry_, stack_floor_);
    CallDepth depth(*this);
    auto frame = std::make_shared<Scope>(block.scope);
    frame->define("$", ctx.item);
    frame->define("_", Value::integer(ctx.index));
    frame->define("$$", ctx.source);
    if (ctx.partial) frame->define("_$_", *ctx.partial);

    Restore<std::shared_ptr<const Node>> owner(owner_, block.owner ? block.owner : owner_);
    Value last;
    Flow flow = exec_statements(block.node->kids, frame, last);
    switch (flow) {
        case Flow::Return: return {std::exchange(return_value_, Value()), BlockSignal::Normal};
        case Flow::Break: return {std::move(last), BlockSignal::Break};
        case Flow::Continue: return {std::move(last), BlockSignal::Continue};
        case Flow::Normal: break;
    }
    return {std::move(last), BlockSignal::Normal};
}

std::optional<std::filesystem::path> Interpreter::resolve_script(const std::string& path) const {
    namespace fs = std::filesystem;
    std::vector<fs::path> roots;
    fs::path p(path);
    if (p.is_absolute()) {
        roots.emplace_back();
    } else {
        roots.push_back(base_dir_.empty() ? fs::current_path() : base_dir_);
        auto it = io_.env.find("NJEXL_PATH");
        if (it != io_.env.end()) {
            std::stringstream ss(it->second);
            std::string dir;
            while (std::getline(ss, dir, ':')) {
                if (!dir.empty()) roots.emplace_back(dir);
            }
        }
    }
    for (const auto& root : roots) {
        fs::path candidate = root.empty() ? p : root / p;
        for (const fs::path& c : {candidate, fs::path(candidate.string() + ".njxl")}) {
            std::error_code ec;
            if (fs::is_regular_file(c, ec)) return fs::weakly_canonical(c, ec);
        }
    }
    return std::nullopt;
}

void Interpreter::import_module(const std::string& path, const std::string& alias, const ScopePtr& scope) {
    if (auto native = registry_->find(path)) {
        scope->define(alias, Value::module(native));
        return;
    }
    auto file = resolve_script(path);
    if (!file) raise("ModuleNotFound", "no native module or script named '" + path + "'");
    const std::string key = file->string();
    if (auto it = module_cache_.find(key); it != module_cache_.end()) {
        scope->define(alias, Value::module(it->second));
        return;
    }
    if (importing_.count(key)) raise("ImportCycle", "'" + path + "' is already being imported");
    importing_.insert(key);
    struct Done {
        std::unordered_set<std::string>& set;
        const std::string& key;
        ~Done() { set.erase(key); }
    } done{importing_, key};

    auto program = parse_source(ResourceLoader::read_file(*file));
    auto module_scope = std::make_shared<Scope>();
    captured_.push_back(module_scope);
    run_program(program, module_scope, file->parent_path());

    auto module = std::make_shared<Module>();
    module->path = path;
    module->members = module_scope->bindings();
    module_cache_.emplace(key, module);
    scope->define(alias, Value::module(std::move(module)));
}

}  // namespace njexl
