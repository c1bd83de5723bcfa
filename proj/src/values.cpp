#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "njexl/value.hpp"

namespace njexl {

namespace {

// Self-containing collections (l += l) would otherwise recurse forever.
constexpr int kMaxDepth = 200;
thread_local int g_depth = 0;

struct DepthGuard {
    DepthGuard() { ++g_depth; }
    ~DepthGuard() { --g_depth; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;
    bool exceeded() const { return g_depth > kMaxDepth; }
};

std::size_t mix(std::size_t x) {
    std::uint64_t z = static_cast<std::uint64_t>(x) + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return static_cast<std::size_t>(z ^ (z >> 31));
}

std::size_t combine(std::size_t seed, std::size_t v) { return mix(seed ^ (v + 0x9E3779B9 + (seed << 6))); }

constexpr double kExactIntLimit = 9007199254740992.0;  // 2^53

bool fits_int64(const BigInt& v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

std::size_t hash_int(std::int64_t v) { return mix(static_cast<std::size_t>(v)); }

std::size_t hash_decimal(const BigDec& normalized) {
    if (normalized.scale() <= 0) {
        BigInt v = normalized.truncated();
        if (fits_int64(v)) return hash_int(static_cast<std::int64_t>(v));
    }
    return combine(std::hash<std::string>{}(normalized.unscaled().str()),
                   static_cast<std::size_t>(normalized.scale()));
}

std::size_t hash_numeric(const Value& v) {
    switch (v.tag()) {
        case Tag::Int: return hash_int(v.as_int());
        case Tag::BigInt:
            if (fits_int64(v.as_big())) return hash_int(static_cast<std::int64_t>(v.as_big()));
            return hash_decimal(BigDec(v.as_big(), 0).normalized());
        case Tag::Float: {
            double d = v.as_float();
            if (std::isnan(d)) return 0x7FF8;
            if (std::isinf(d)) return d > 0 ? 0x7FF0 : 0xFFF0;
            if (d == std::trunc(d) && std::fabs(d) <= kExactIntLimit) return hash_int(static_cast<std::int64_t>(d));
            return hash_decimal(BigDec::from_double(d).normalized());
        }
        case Tag::BigDec: return hash_decimal(v.as_decimal().normalized());
        default: return 0;
    }
}

std::string render(const Value& v);

std::string join_rendered(const std::vector<Value>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += render(items[i]);
    }
    return out;
}

std::string render(const Value& v) {
    DepthGuard guard;
    if (guard.exceeded()) return "...";
    switch (v.tag()) {
        case Tag::Null: return "null";
        case Tag::Bool: return v.as_bool() ? "true" : "false";
        case Tag::Int: return std::to_string(v.as_int());
        case Tag::BigInt: return v.as_big().str();
        case Tag::Float: return format_double(v.as_float());
        case Tag::BigDec: return v.as_decimal().to_string();
        case Tag::Str: return v.as_str();
        case Tag::Range: {
            const auto& r = v.as_range();
            std::string out = "[" + std::to_string(r.start) + ":" + std::to_string(r.end);
            if (r.step != 1) out += ":" + std::to_string(r.step);
            return out + "]";
        }
        case Tag::List: return "[" + join_rendered(v.as_list()->items) + "]";
        case Tag::Set: return "{" + join_rendered(v.as_set()->items()) + "}";
        case Tag::Map: {
            std::string out = "{";
            bool first = true;
            for (const auto& [k, val] : v.as_map()->entries()) {
                if (!first) out += ", ";
                first = false;
                out += render(k) + " : " + render(val);
            }
            return out + "}";
        }
        case Tag::Pair:
            return "(" + render(v.as_pair().first) + ", " + render(v.as_pair().second) + ")";
        case Tag::Iterator: return "<iterator>";
        case Tag::Function: {
            const auto& f = *v.as_function();
            return f.name.empty() ? "<function>" : "<function " + f.name + ">";
        }
        case Tag::NativeFunction: return "<builtin " + v.as_native()->name + ">";
        case Tag::Error: {
            const auto& e = *v.as_error();
            return e.kind + ": " + e.message;
        }
        case Tag::Date: return v.as_date().iso();
        case Tag::Module: return "<module " + v.as_module()->path + ">";
    }
    return "?";
}

[[noreturn]] void type_error(const std::string& what) { raise("TypeError", what); }

std::string describe_tags(const char* op, const Value& a, const Value& b) {
    return std::string("unsupported operand types for ") + op + ": " + std::string(tag_name(a.tag())) +
           " and " + std::string(tag_name(b.tag()));
}

int numeric_tier(Tag t) {
    switch (t) {
        case Tag::Int: return 0;
        case Tag::BigInt: return 1;
        case Tag::Float: return 2;
        case Tag::BigDec: return 3;
        default: return -1;
    }
}

BigInt to_bigint(const Value& v) { return v.is(Tag::Int) ? BigInt(v.as_int()) : v.as_big(); }

double to_float(const Value& v) {
    switch (v.tag()) {
        case Tag::Int: return static_cast<double>(v.as_int());
        case Tag::BigInt: return to_double(v.as_big());
        case Tag::Float: return v.as_float();
        case Tag::BigDec: return v.as_decimal().to_double();
        default: type_error("not a number");
    }
}

[[noreturn]] void divide_by_zero() { raise("DivideByZero", "division by zero"); }

Value big_arith(ArithOp op, const BigInt& x, const BigInt& y) {
    switch (op) {
        case ArithOp::Add: return Value::big(x + y);
        case ArithOp::Sub: return Value::big(x - y);
        case ArithOp::Mul: return Value::big(x * y);
        case ArithOp::Div:
            if (y == 0) divide_by_zero();
            if (x % y == 0) return Value::big(x / y);
            return Value::decimal(BigDec::divide(BigDec(x, 0), BigDec(y, 0)));
        case ArithOp::Mod:
            if (y == 0) divide_by_zero();
            return Value::big(x % y);
    }
    return {};
}

Value int_arith(ArithOp op, std::int64_t x, std::int64_t y) {
    std::int64_t r;
    switch (op) {
        case ArithOp::Add:
            if (__builtin_add_overflow(x, y, &r)) return Value::big(BigInt(x) + y);
            return Value::integer(r);
        case ArithOp::Sub:
            if (__builtin_sub_overflow(x, y, &r)) return Value::big(BigInt(x) - y);
            return Value::integer(r);
        case ArithOp::Mul:
            if (__builtin_mul_overflow(x, y, &r)) return Value::big(BigInt(x) * y);
            return Value::integer(r);
        case ArithOp::Div:
            if (y == 0) divide_by_zero();
            if (x == std::numeric_limits<std::int64_t>::min() && y == -1) return Value::big(-BigInt(x));
            return Value::integer(x / y);
        case ArithOp::Mod:
            if (y == 0) divide_by_zero();
            if (y == -1) return Value::integer(0);
            return Value::integer(x % y);
    }
    return {};
}

Value numeric_arith(ArithOp op, const Value& a, const Value& b) {
    int tier = std::max(numeric_tier(a.tag()), numeric_tier(b.tag()));
    switch (tier) {
        case 0: return int_arith(op, a.as_int(), b.as_int());
        case 1: return big_arith(op, to_bigint(a), to_bigint(b));
        case 2: {
            double x = to_float(a), y = to_float(b);
            switch (op) {
                case ArithOp::Add: return Value::real(x + y);
                case ArithOp::Sub: return Value::real(x - y);
                case ArithOp::Mul: return Value::real(x * y);
                case ArithOp::Div: return Value::real(x / y);
                case ArithOp::Mod: return Value::real(std::fmod(x, y));
            }
            break;
        }
        default: {
            BigDec x = to_bigdec(a), y = to_bigdec(b);
            try {
                switch (op) {
                    case ArithOp::Add: return Value::decimal(x + y);
                    case ArithOp::Sub: return Value::decimal(x - y);
                    case ArithOp::Mul: return Value::decimal(x * y);
                    case ArithOp::Div: return Value::decimal(BigDec::divide(x, y));
                    case ArithOp::Mod: return Value::decimal(BigDec::remainder(x, y));
                }
            } catch (const std::domain_error&) {
                divide_by_zero();
            }
        }
    }
    return {};
}

const char* op_symbol(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Div: return "/";
        case ArithOp::Mod: return "%";
    }
    return "?";
}

std::int64_t checked_index(const Value& index) {
    if (index.is(Tag::Int)) return index.as_int();
    if (index.is(Tag::BigInt)) return -1;  // always out of bounds
    type_error("index must be an integer, got " + std::string(tag_name(index.tag())));
}

bool identity_equal(const Value& a, const Value& b) {
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, IteratorPtr> || std::is_same_v<T, FunctionPtr> ||
                          std::is_same_v<T, NativeFunctionPtr> || std::is_same_v<T, ModulePtr> ||
                          std::is_same_v<T, ListPtr> || std::is_same_v<T, SetPtr> ||
                          std::is_same_v<T, MapPtr>) {
                return x == std::get<T>(b.data());
            } else {
                return false;
            }
        },
        a.data());
}

}  // namespace

std::string_view tag_name(Tag tag) {
    switch (tag) {
        case Tag::Null: return "null";
        case Tag::Bool: return "bool";
        case Tag::Int: return "int";
        case Tag::BigInt: return "INT";
        case Tag::Float: return "float";
        case Tag::BigDec: return "DEC";
        case Tag::Str: return "str";
        case Tag::Range: return "range";
        case Tag::List: return "list";
        case Tag::Set: return "set";
        case Tag::Map: return "dict";
        case Tag::Pair: return "pair";
        case Tag::Iterator: return "iterator";
        case Tag::Function: return "function";
        case Tag::NativeFunction: return "builtin";
        case Tag::Error: return "error";
        case Tag::Date: return "date";
        case Tag::Module: return "module";
    }
    return "?";
}

std::int64_t Range::size() const {
    if (step > 0) {
        if (end <= start) return 0;
        return static_cast<std::int64_t>((static_cast<unsigned __int128>(end - start) + step - 1) / step);
    }
    if (end >= start) return 0;
    auto span = static_cast<unsigned __int128>(start - end);
    auto s = static_cast<unsigned __int128>(-static_cast<__int128>(step));
    return static_cast<std::int64_t>((span + s - 1) / s);
}

bool Range::contains(std::int64_t v) const {
    if (step > 0 ? (v < start || v >= end) : (v > start || v <= end)) return false;
    return (static_cast<__int128>(v) - start) % step == 0;
}

std::string Date::iso() const {
    char buf[32];
    if (has_time) {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", year, month, day, hour, minute, second);
    } else {
        std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    }
    return buf;
}

Value Value::list(std::vector<Value> items) {
    auto l = std::make_shared<List>();
    l->items = std::move(items);
    return list(std::move(l));
}

Value Value::set() { return set(std::make_shared<ValueSet>()); }
Value Value::map() { return map(std::make_shared<ValueMap>()); }

Value Value::pair(Value first, Value second) {
    return Value(Storage(std::in_place_index<11>,
                         std::make_shared<const PairData>(PairData{std::move(first), std::move(second)})));
}

Value Value::integral(const BigInt& i) {
    if (fits_int64(i)) return integer(static_cast<std::int64_t>(i));
    return big(i);
}

// ---- containers ---------------------------------------------------------

bool ValueSet::insert(Value v) {
    std::size_t h = hash_value(v);
    auto [lo, hi] = index_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
        if (equals(items_[it->second], v)) return false;
    }
    index_.emplace(h, items_.size());
    items_.push_back(std::move(v));
    return true;
}

bool ValueSet::contains(const Value& v) const {
    auto [lo, hi] = index_.equal_range(hash_value(v));
    for (auto it = lo; it != hi; ++it) {
        if (equals(items_[it->second], v)) return true;
    }
    return false;
}

bool is_valid_key(const Value& key) {
    switch (key.tag()) {
        case Tag::Null:
        case Tag::Bool:
        case Tag::Int:
        case Tag::BigInt:
        case Tag::Float:
        case Tag::BigDec:
        case Tag::Str:
        case Tag::Date: return true;
        case Tag::Pair: return is_valid_key(key.as_pair().first) && is_valid_key(key.as_pair().second);
        default: return false;
    }
}

const Value* ValueMap::find(const Value& key) const {
    auto [lo, hi] = index_.equal_range(hash_value(key));
    for (auto it = lo; it != hi; ++it) {
        if (equals(entries_[it->second].first, key)) return &entries_[it->second].second;
    }
    return nullptr;
}

void ValueMap::set(Value key, Value value) {
    if (!is_valid_key(key)) type_error("a " + std::string(tag_name(key.tag())) + " cannot be a dict key");
    std::size_t h = hash_value(key);
    auto [lo, hi] = index_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
        if (equals(entries_[it->second].first, key)) {
            entries_[it->second].second = std::move(value);
            return;
        }
    }
    index_.emplace(h, entries_.size());
    entries_.emplace_back(std::move(key), std::move(value));
}

// ---- algebra ------------------------------------------------------------

std::string to_display(const Value& v) { return render(v); }

bool truthy(const Value& v) {
    switch (v.tag()) {
        case Tag::Null: return false;
        case Tag::Bool: return v.as_bool();
        case Tag::Int: return v.as_int() != 0;
        case Tag::BigInt: return v.as_big() != 0;
        case Tag::Float: return v.as_float() != 0.0;
        case Tag::BigDec: return v.as_decimal().sign() != 0;
        default: return true;
    }
}

BigDec to_bigdec(const Value& v) {
    switch (v.tag()) {
        case Tag::Int: return BigDec(BigInt(v.as_int()), 0);
        case Tag::BigInt: return BigDec(v.as_big(), 0);
        case Tag::Float:
            if (!std::isfinite(v.as_float())) raise("ArithmeticError", format_double(v.as_float()) + " has no decimal form");
            return BigDec::from_double(v.as_float());
        case Tag::BigDec: return v.as_decimal();
        default: type_error("not a number: " + std::string(tag_name(v.tag())));
    }
}

std::optional<int> numeric_compare(const Value& a, const Value& b) {
    auto sgn = [](auto x, auto y) { return x < y ? -1 : (x > y ? 1 : 0); };
    Tag ta = a.tag(), tb = b.tag();
    if (ta == Tag::Int && tb == Tag::Int) return sgn(a.as_int(), b.as_int());
    bool fa = ta == Tag::Float, fb = tb == Tag::Float;
    if (fa || fb) {
        if (fa && fb) {
            double x = a.as_float(), y = b.as_float();
            if (std::isnan(x) || std::isnan(y)) return std::nullopt;
            return sgn(x, y);
        }
        double d = fa ? a.as_float() : b.as_float();
        const Value& other = fa ? b : a;
        int flip = fa ? 1 : -1;
        if (std::isnan(d)) return std::nullopt;
        if (std::isinf(d)) return flip * (d > 0 ? 1 : -1);
        int r;
        if (other.is(Tag::Int) && std::fabs(static_cast<double>(other.as_int())) <= kExactIntLimit) {
            r = sgn(d, static_cast<double>(other.as_int()));
        } else {
            r = compare(BigDec::from_double(d), to_bigdec(other));
        }
        return flip * r;
    }
    if (ta == Tag::BigDec || tb == Tag::BigDec) return compare(to_bigdec(a), to_bigdec(b));
    return sgn(to_bigint(a), to_bigint(b));
}

bool multiset_subset(const std::vector<Value>& a, const std::vector<Value>& b) {
    if (a.size() > b.size()) return false;
    std::unordered_multimap<std::size_t, std::size_t> buckets;
    buckets.reserve(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) buckets.emplace(hash_value(b[i]), i);
    std::vector<bool> used(b.size(), false);
    for (const auto& x : a) {
        auto [lo, hi] = buckets.equal_range(hash_value(x));
        bool found = false;
        for (auto it = lo; it != hi; ++it) {
            if (!used[it->second] && equals(b[it->second], x)) {
                used[it->second] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

bool multiset_equal(const std::vector<Value>& a, const std::vector<Value>& b) {
    return a.size() == b.size() && multiset_subset(a, b);
}

bool equals(const Value& a, const Value& b) {
    if (a.is_numeric() && b.is_numeric()) {
        if (a.is(Tag::Float) && b.is(Tag::Float) && std::isnan(a.as_float()) && std::isnan(b.as_float())) {
            return true;
        }
        auto c = numeric_compare(a, b);
        return c && *c == 0;
    }
    if (a.tag() != b.tag()) return false;
    DepthGuard guard;
    if (guard.exceeded()) return identity_equal(a, b);
    switch (a.tag()) {
        case Tag::Null: return true;
        case Tag::Bool: return a.as_bool() == b.as_bool();
        case Tag::Str: return a.as_str() == b.as_str();
        case Tag::Range: {
            const auto &x = a.as_range(), &y = b.as_range();
            auto n = x.size();
            if (n != y.size()) return false;
            if (n == 0) return true;
            return x.start == y.start && (n == 1 || x.step == y.step);
        }
        case Tag::List:
            return a.as_list() == b.as_list() || multiset_equal(a.as_list()->items, b.as_list()->items);
        case Tag::Set: {
            const auto &x = *a.as_set(), &y = *b.as_set();
            if (&x == &y) return true;
            if (x.size() != y.size()) return false;
            return std::all_of(x.items().begin(), x.items().end(), [&](const Value& v) { return y.contains(v); });
        }
        case Tag::Map: {
            const auto &x = *a.as_map(), &y = *b.as_map();
            if (&x == &y) return true;
            if (x.size() != y.size()) return false;
            for (const auto& [k, v] : x.entries()) {
                const Value* other = y.find(k);
                if (!other || !equals(v, *other)) return false;
            }
            return true;
        }
        case Tag::Pair:
            return equals(a.as_pair().first, b.as_pair().first) && equals(a.as_pair().second, b.as_pair().second);
        case Tag::Error:
            return a.as_error() == b.as_error() ||
                   (a.as_error()->kind == b.as_error()->kind && a.as_error()->message == b.as_error()->message);
        case Tag::Date: return a.as_date().key() == b.as_date().key();
        default: return identity_equal(a, b);
    }
}

std::size_t hash_value(const Value& v) {
    if (v.is_numeric()) return hash_numeric(v);
    DepthGuard guard;
    if (guard.exceeded()) return static_cast<std::size_t>(v.tag());
    auto unordered = [](const std::vector<Value>& items, std::size_t seed) {
        std::size_t sum = 0;
        for (const auto& x : items) sum += mix(hash_value(x));
        return combine(seed, sum + items.size());
    };
    switch (v.tag()) {
        case Tag::Null: return 0x6E756C6C;
        case Tag::Bool: return v.as_bool() ? 0x74 : 0x66;
        case Tag::Str: return std::hash<std::string>{}(v.as_str());
        case Tag::Range: {
            const auto& r = v.as_range();
            auto n = r.size();
            if (n == 0) return 0x52;
            return combine(combine(hash_int(r.start), hash_int(n)), n == 1 ? 0 : hash_int(r.step));
        }
        case Tag::List: return unordered(v.as_list()->items, 0x4C);
        case Tag::Set: return unordered(v.as_set()->items(), 0x53);
        case Tag::Map: {
            std::size_t sum = 0;
            for (const auto& [k, val] : v.as_map()->entries()) sum += mix(combine(hash_value(k), hash_value(val)));
            return combine(0x4D, sum);
        }
        case Tag::Pair: return combine(combine(0x50, hash_value(v.as_pair().first)), hash_value(v.as_pair().second));
        case Tag::Error: return combine(std::hash<std::string>{}(v.as_error()->kind), std::hash<std::string>{}(v.as_error()->message));
        case Tag::Date: {
            const auto& d = v.as_date();
            std::size_t h = 0x44;
            for (int f : {d.year, d.month, d.day, d.hour, d.minute, d.second}) h = combine(h, static_cast<std::size_t>(f));
            return h;
        }
        case Tag::Iterator: return mix(reinterpret_cast<std::uintptr_t>(v.as_iterator().get()));
        case Tag::Function: return mix(reinterpret_cast<std::uintptr_t>(v.as_function().get()));
        case Tag::NativeFunction: return mix(reinterpret_cast<std::uintptr_t>(v.as_native().get()));
        case Tag::Module: return mix(reinterpret_cast<std::uintptr_t>(v.as_module().get()));
        default: return 0;
    }
}

int order_compare(const Value& a, const Value& b) {
    if (a.is_numeric() && b.is_numeric()) {
        auto c = numeric_compare(a, b);
        if (!c) type_error("NaN is not ordered");
        return *c;
    }
    if (a.tag() == b.tag()) {
        switch (a.tag()) {
            case Tag::Str: {
                int c = a.as_str().compare(b.as_str());
                return c < 0 ? -1 : (c > 0 ? 1 : 0);
            }
            case Tag::Bool: return static_cast<int>(a.as_bool()) - static_cast<int>(b.as_bool());
            case Tag::Date: {
                auto x = a.as_date().key(), y = b.as_date().key();
                return x < y ? -1 : (x > y ? 1 : 0);
            }
            case Tag::Pair: {
                int c = order_compare(a.as_pair().first, b.as_pair().first);
                return c != 0 ? c : order_compare(a.as_pair().second, b.as_pair().second);
            }
            default: break;
        }
    }
    type_error("cannot compare " + std::string(tag_name(a.tag())) + " with " + std::string(tag_name(b.tag())));
}

bool sub_collection(const Value& a, const Value& b) {
    if (a.tag() != b.tag()) type_error(describe_tags("<=", a, b));
    switch (a.tag()) {
        case Tag::List: return multiset_subset(a.as_list()->items, b.as_list()->items);
        case Tag::Set: {
            const auto &x = *a.as_set(), &y = *b.as_set();
            if (x.size() > y.size()) return false;
            return std::all_of(x.items().begin(), x.items().end(), [&](const Value& v) { return y.contains(v); });
        }
        case Tag::Map: {
            const auto& y = *b.as_map();
            for (const auto& [k, v] : a.as_map()->entries()) {
                const Value* other = y.find(k);
                if (!other || !equals(v, *other)) return false;
            }
            return true;
        }
        default: type_error(describe_tags("<=", a, b));
    }
}

bool member_of(const Value& x, const Value& c) {
    switch (c.tag()) {
        case Tag::List:
            return std::any_of(c.as_list()->items.begin(), c.as_list()->items.end(),
                               [&](const Value& e) { return equals(e, x); });
        case Tag::Set: return c.as_set()->contains(x);
        case Tag::Map: return c.as_map()->contains(x);
        case Tag::Str: return c.as_str().find(to_display(x)) != std::string::npos;
        case Tag::Range: {
            if (!x.is_numeric()) return false;
            BigDec d = to_bigdec(x);
            if (!d.is_integer()) return false;
            BigInt i = d.truncated();
            if (!fits_int64(i)) return false;
            return c.as_range().contains(static_cast<std::int64_t>(i));
        }
        case Tag::Pair: return equals(c.as_pair().first, x) || equals(c.as_pair().second, x);
        case Tag::Iterator: {
            Cursor cur(c);
            while (auto e = cur.next()) {
                if (equals(*e, x)) return true;
            }
            return false;
        }
        default: type_error("'@' needs a container on the right, got " + std::string(tag_name(c.tag())));
    }
}

std::int64_t cardinality(const Value& v) {
    switch (v.tag()) {
        case Tag::Str: return static_cast<std::int64_t>(utf8_length(v.as_str()));
        case Tag::List: return static_cast<std::int64_t>(v.as_list()->items.size());
        case Tag::Set: return static_cast<std::int64_t>(v.as_set()->size());
        case Tag::Map: return static_cast<std::int64_t>(v.as_map()->size());
        case Tag::Range: return v.as_range().size();
        case Tag::Pair: return 2;
        default: type_error("a " + std::string(tag_name(v.tag())) + " has no size");
    }
}

Value index_value(const Value& target, const Value& index) {
    auto out_of_bounds = [&](std::int64_t n) -> Value {
        raise("IndexError", "index " + to_display(index) + " out of bounds for size " + std::to_string(n));
    };
    switch (target.tag()) {
        case Tag::Map: {
            const Value* v = target.as_map()->find(index);
            return v ? *v : Value();
        }
        case Tag::List: {
            const auto& items = target.as_list()->items;
            auto i = checked_index(index);
            if (i < 0 || static_cast<std::size_t>(i) >= items.size()) return out_of_bounds(static_cast<std::int64_t>(items.size()));
            return items[static_cast<std::size_t>(i)];
        }
        case Tag::Str: {
            auto i = checked_index(index);
            auto ch = i < 0 ? std::nullopt : utf8_at(target.as_str(), static_cast<std::size_t>(i));
            if (!ch) return out_of_bounds(static_cast<std::int64_t>(utf8_length(target.as_str())));
            return Value::str(*ch);
        }
        case Tag::Pair: {
            auto i = checked_index(index);
            if (i == 0) return target.as_pair().first;
            if (i == 1) return target.as_pair().second;
            return out_of_bounds(2);
        }
        case Tag::Range: {
            const auto& r = target.as_range();
            auto i = checked_index(index);
            if (i < 0 || i >= r.size()) return out_of_bounds(r.size());
            return Value::integer(r.at(i));
        }
        default: type_error("a " + std::string(tag_name(target.tag())) + " cannot be indexed");
    }
}

Value arith(ArithOp op, const Value& a, const Value& b) {
    if (op == ArithOp::Add) {
        if (a.is(Tag::Str) || b.is(Tag::Str)) return Value::str(to_display(a) + to_display(b));
        if (a.is(Tag::List)) {
            auto items = a.as_list()->items;
            items.push_back(b);
            return Value::list(std::move(items));
        }
        if (a.is(Tag::Set)) {
            auto s = std::make_shared<ValueSet>(*a.as_set());
            s->insert(b);
            return Value::set(std::move(s));
        }
    }
    if (a.is_numeric() && b.is_numeric()) return numeric_arith(op, a, b);
    type_error(describe_tags(op_symbol(op), a, b));
}

Value negate(const Value& v) {
    switch (v.tag()) {
        case Tag::Int:
            if (v.as_int() == std::numeric_limits<std::int64_t>::min()) return Value::big(-BigInt(v.as_int()));
            return Value::integer(-v.as_int());
        case Tag::BigInt: return Value::big(-v.as_big());
        case Tag::Float: return Value::real(-v.as_float());
        case Tag::BigDec: return Value::decimal(-v.as_decimal());
        default: type_error("cannot negate a " + std::string(tag_name(v.tag())));
    }
}

// ---- iteration ----------------------------------------------------------

bool is_iterable(const Value& v) {
    switch (v.tag()) {
        case Tag::List:
        case Tag::Set:
        case Tag::Map:
        case Tag::Range:
        case Tag::Str:
        case Tag::Pair:
        case Tag::Iterator: return true;
        default: return false;
    }
}

Cursor::Cursor(Value source) : source_(std::move(source)) {
    if (!is_iterable(source_)) type_error("a " + std::string(tag_name(source_.tag())) + " is not iterable");
}

std::optional<Value> Cursor::next() {
    switch (source_.tag()) {
        case Tag::List: {
            const auto& items = source_.as_list()->items;
            if (index_ >= items.size()) return std::nullopt;
            return items[index_++];
        }
        case Tag::Set: {
            const auto& items = source_.as_set()->items();
            if (index_ >= items.size()) return std::nullopt;
            return items[index_++];
        }
        case Tag::Map: {
            const auto& entries = source_.as_map()->entries();
            if (index_ >= entries.size()) return std::nullopt;
            const auto& [k, v] = entries[index_++];
            return Value::pair(k, v);
        }
        case Tag::Range: {
            const auto& r = source_.as_range();
            if (static_cast<std::int64_t>(index_) >= r.size()) return std::nullopt;
            return Value::integer(r.at(static_cast<std::int64_t>(index_++)));
        }
        case Tag::Str: {
            // index_ is a byte offset here.
            const auto& s = source_.as_str();
            if (index_ >= s.size()) return std::nullopt;
            std::size_t start = index_++;
            while (index_ < s.size() && (static_cast<unsigned char>(s[index_]) & 0xC0) == 0x80) ++index_;
            return Value::str(s.substr(start, index_ - start));
        }
        case Tag::Pair: {
            if (index_ >= 2) return std::nullopt;
            return index_++ == 0 ? source_.as_pair().first : source_.as_pair().second;
        }
        case Tag::Iterator: return source_.as_iterator()->next();
        default: return std::nullopt;
    }
}

std::vector<Value> materialize(const Value& v) {
    if (v.is(Tag::List)) return v.as_list()->items;
    if (v.is(Tag::Set)) return v.as_set()->items();
    std::vector<Value> out;
    Cursor c(v);
    while (auto e = c.next()) out.push_back(std::move(*e));
    return out;
}

std::size_t utf8_length(std::string_view s) {
    std::size_t n = 0;
    for (char c : s) {
        if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::optional<std::string> utf8_at(std::string_view s, std::size_t index) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size();) {
        std::size_t j = i + 1;
        while (j < s.size() && (static_cast<unsigned char>(s[j]) & 0xC0) == 0x80) ++j;
        if (count == index) return std::string(s.substr(i, j - i));
        ++count;
        i = j;
    }
    return std::nullopt;
}

}  // namespace njexl
