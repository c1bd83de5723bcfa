#include "njexl/engine.hpp"

#include <pthread.h>

#include <exception>
#include <filesystem>
#include <new>

#include "njexl/lexer.hpp"
#include "njexl/parser.hpp"

namespace njexl {

namespace {

constexpr int kMaxHostDepth = 200;

[[noreturn]] void conversion(const std::string& what) { raise("ConversionError", what); }

Value to_value_at(const HostValue& host, int depth) {
    if (depth > kMaxHostDepth) conversion("host data nested deeper than " + std::to_string(kMaxHostDepth));
    return std::visit(
        [&](const auto& x) -> Value {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::monostate>) {
                return Value();
            } else if constexpr (std::is_same_v<T, bool>) {
                return Value::boolean(x);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return Value::integer(x);
            } else if constexpr (std::is_same_v<T, double>) {
                return Value::real(x);
            } else if constexpr (std::is_same_v<T, std::string>) {
                return Value::str(x);
            } else if constexpr (std::is_same_v<T, HostBigNumber>) {
                if (x.decimal) {
                    auto d = BigDec::parse(x.text);
                    if (!d) conversion("'" + x.text + "' is not a decimal number");
                    return Value::decimal(std::move(*d));
                }
                auto i = parse_integer(x.text);
                if (!i) conversion("'" + x.text + "' is not an integer");
                return Value::big(std::move(*i));
            } else if constexpr (std::is_same_v<T, HostList>) {
                std::vector<Value> items;
                items.reserve(x.size());
                for (const auto& e : x) items.push_back(to_value_at(e, depth + 1));
                return Value::list(std::move(items));
            } else if constexpr (std::is_same_v<T, HostMap>) {
                auto m = std::make_shared<ValueMap>();
                for (const auto& [k, v] : x) {
                    Value key = to_value_at(k, depth + 1);
                    if (!is_valid_key(key)) conversion("a " + std::string(tag_name(key.tag())) + " cannot be a map key");
                    m->set(std::move(key), to_value_at(v, depth + 1));
                }
                return Value::map(std::move(m));
            } else {
                conversion("cannot bridge host object " + x.description);
            }
        },
        host.data);
}

HostList to_host_list(const std::vector<Value>& items, int depth);

HostValue to_host_at(const Value& v, int depth) {
    if (depth > kMaxHostDepth) conversion("value nested deeper than " + std::to_string(kMaxHostDepth));
    switch (v.tag()) {
        case Tag::Null: return {};
        case Tag::Bool: return v.as_bool();
        case Tag::Int: return v.as_int();
        case Tag::BigInt: return HostBigNumber{v.as_big().str(), false};
        case Tag::Float: return v.as_float();
        case Tag::BigDec: return HostBigNumber{v.as_decimal().to_string(), true};
        case Tag::Str: return v.as_str();
        case Tag::List: return to_host_list(v.as_list()->items, depth);
        case Tag::Set: return to_host_list(v.as_set()->items(), depth);
        case Tag::Range:
        case Tag::Pair: return to_host_list(materialize(v), depth);
        case Tag::Map: {
            HostMap m;
            m.reserve(v.as_map()->size());
            for (const auto& [k, val] : v.as_map()->entries()) {
                m.emplace_back(to_host_at(k, depth + 1), to_host_at(val, depth + 1));
            }
            return m;
        }
        case Tag::Date:
        case Tag::Error: return to_display(v);
        default: conversion("a " + std::string(tag_name(v.tag())) + " has no host representation");
    }
}

HostList to_host_list(const std::vector<Value>& items, int depth) {
    HostList out;
    out.reserve(items.size());
    for (const auto& e : items) out.push_back(to_host_at(e, depth + 1));
    return out;
}

struct ThreadJob {
    const std::function<void()>* fn;
    std::exception_ptr error;
};

void* thread_main(void* arg) {
    auto* job = static_cast<ThreadJob*>(arg);
    try {
        (*job->fn)();
    } catch (...) {
        job->error = std::current_exception();
    }
    return nullptr;
}

bool is_identifier(const std::string& name) {
    try {
        auto tokens = tokenize(name);
        return tokens.size() == 2 && tokens[0].kind == TokenKind::Identifier && tokens[0].trivia.empty() &&
               tokens[1].trivia.empty();
    } catch (const ScriptError&) {
        return false;
    }
}

EvalError to_eval_error(const ErrorInfo& info) { return {info.kind, info.message, info.position}; }

}  // namespace

Value to_value(const HostValue& host) { return to_value_at(host, 0); }
HostValue to_host(const Value& v) { return to_host_at(v, 0); }

void run_with_stack(std::size_t stack_bytes, const std::function<void()>& fn) {
    ThreadJob job{&fn, nullptr};
    pthread_attr_t attr;
    pthread_attr_init(&attr);
    pthread_attr_setstacksize(&attr, stack_bytes);
    pthread_t thread;
    int rc = pthread_create(&thread, &attr, thread_main, &job);
    pthread_attr_destroy(&attr);
    if (rc != 0) {
        fn();
        return;
    }
    pthread_join(thread, nullptr);
    if (job.error) std::rethrow_exception(job.error);
}

Engine::Engine(EngineOptions options) : stack_bytes_(options.stack_bytes) {
    IoPorts io = IoPorts::standard();
    if (options.out) io.out = std::move(options.out);
    if (options.err) io.err = std::move(options.err);
    if (options.loader) io.loader = std::move(options.loader);
    if (options.clock) io.clock = std::move(options.clock);
    if (options.env) io.env = std::move(*options.env);
    auto registry = options.registry ? std::move(options.registry) : ModuleRegistry::with_defaults();
    interp_ = std::make_unique<Interpreter>(std::move(io), std::move(registry));
}

void Engine::bind(const std::string& name, const HostValue& value) {
    if (!is_identifier(name)) raise("NameError", "'" + name + "' is not a valid identifier");
    interp_->globals()->define(name, to_value(value));
}

std::optional<HostValue> Engine::get(const std::string& name) {
    Value* v = interp_->globals()->find(name);
    if (!v) return std::nullopt;
    return to_host(*v);
}

Value Engine::evaluate_value(std::string_view source) {
    Value result;
    run_with_stack(stack_bytes_, [&] {
        result = interp_->run_source(source, interp_->globals(), std::filesystem::current_path());
    });
    return result;
}

EvalResult Engine::evaluate(std::string_view source) {
    EvalResult out;
    try {
        out.value = to_host(evaluate_value(source));
    } catch (const ScriptError& e) {
        out.error = to_eval_error(*e.info());
    } catch (const std::bad_alloc&) {
        out.error = EvalError{"MemoryError", "out of memory", std::nullopt};
    } catch (const std::exception& e) {
        out.error = EvalError{"InternalError", e.what(), std::nullopt};
    } catch (...) {
        out.error = EvalError{"InternalError", "unknown failure", std::nullopt};
    }
    return out;
}

}  // namespace njexl
