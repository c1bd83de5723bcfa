#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "njexl/error.hpp"
#include "njexl/interpreter.hpp"
#include "njexl/io.hpp"
#include "njexl/stdlib.hpp"

namespace njexl {

/// INT / DEC values cross the boundary as decimal text.
struct HostBigNumber {
    std::string text;
    bool decimal = false;

    friend bool operator==(const HostBigNumber&, const HostBigNumber&) = default;
};

/// Stand-in for host data with no script counterpart; binding one is a
/// ConversionError.
struct HostOpaque {
    std::string description;

    friend bool operator==(const HostOpaque&, const HostOpaque&) = default;
};

struct HostValue;
using HostList = std::vector<HostValue>;
using HostMap = std::vector<std::pair<HostValue, HostValue>>;

struct HostValue {
    using Data = std::variant<std::monostate, bool, std::int64_t, double, std::string, HostBigNumber, HostList,
                              HostMap, HostOpaque>;
    Data data;

    HostValue() = default;
    HostValue(std::nullptr_t) {}
    HostValue(bool b) : data(b) {}
    HostValue(int i) : data(std::int64_t{i}) {}
    HostValue(std::int64_t i) : data(i) {}
    HostValue(double d) : data(d) {}
    HostValue(const char* s) : data(std::string(s)) {}
    HostValue(std::string s) : data(std::move(s)) {}
    HostValue(HostBigNumber n) : data(std::move(n)) {}
    HostValue(HostList l) : data(std::move(l)) {}
    HostValue(HostMap m) : data(std::move(m)) {}
    HostValue(HostOpaque o) : data(std::move(o)) {}

    bool is_null() const { return std::holds_alternative<std::monostate>(data); }

    friend bool operator==(const HostValue&, const HostValue&) = default;
};

/// Deep copies in both directions. Throw ScriptError("ConversionError").
Value to_value(const HostValue& host);
HostValue to_host(const Value& v);

struct EvalError {
    std::string kind;
    std::string message;
    std::optional<Position> position;
};

struct EvalResult {
    HostValue value;
    std::optional<EvalError> error;

    bool ok() const { return !error.has_value(); }
};

/// Runs `fn` on a fresh thread with a `stack_bytes` stack and rethrows
/// whatever it throws. Falls back to the calling thread if the thread
/// cannot be created.
void run_with_stack(std::size_t stack_bytes, const std::function<void()>& fn);

inline constexpr std::size_t kDefaultStackBytes = std::size_t{512} << 20;

struct EngineOptions {
    /// Unset members fall back to IoPorts::standard().
    std::function<void(std::string_view)> out;
    std::function<void(std::string_view)> err;
    std::shared_ptr<ResourceLoader> loader;
    std::function<std::int64_t()> clock;
    std::optional<std::unordered_map<std::string, std::string>> env;
    std::shared_ptr<ModuleRegistry> registry;
    std::size_t stack_bytes = kDefaultStackBytes;
};

/// One evaluation context: globals, module cache and I/O ports. Globals
/// persist across evaluate() calls.
///
/// Not thread-safe: use one Engine from one thread at a time. Separate
/// engines share nothing mutable and may run in parallel.
class Engine {
  public:
    explicit Engine(EngineOptions options = {});

    /// Throws ScriptError: NameError for a non-identifier name,
    /// ConversionError for unbridgeable data.
    void bind(const std::string& name, const HostValue& value);
    /// nullopt when unbound. Throws ScriptError("ConversionError").
    std::optional<HostValue> get(const std::string& name);

    /// Never throws; every failure comes back as EvalResult::error.
    EvalResult evaluate(std::string_view source);

    /// Same, but keeps the script value (for callers that print it).
    Value evaluate_value(std::string_view source);

    Interpreter& interpreter() { return *interp_; }

  private:
    std::size_t stack_bytes_;
    std::unique_ptr<Interpreter> interp_;
};

}  // namespace njexl
