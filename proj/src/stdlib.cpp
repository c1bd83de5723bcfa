#include "njexl/stdlib.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "njexl/interpreter.hpp"

namespace njexl {

namespace {

void arity(const NativeCall& call, const char* name, std::size_t min, std::size_t max) {
    auto n = call.argc();
    if (n >= min && n <= max) return;
    std::string expected = min == max ? std::to_string(min) : std::to_string(min) + ".." + std::to_string(max);
    raise("ArityError", std::string(name) + "() takes " + expected + " argument(s), got " + std::to_string(n));
}

const std::string& want_str(const NativeCall& call, std::size_t i, const char* name) {
    const Value& v = call.arg(i);
    if (!v.is(Tag::Str)) {
        raise("TypeError", std::string(name) + "() expects a string, got " + std::string(tag_name(v.tag())));
    }
    return v.as_str();
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n\f\v");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n\f\v");
    return std::string(s.substr(b, e - b + 1));
}

/// The values a collection builtin walks: a lone collection argument is
/// walked itself, anything else is taken as the explicit list of values.
struct Source {
    Value whole;  // $$
    bool single = false;
};

bool walks_itself(const Value& v) {
    switch (v.tag()) {
        case Tag::List:
        case Tag::Set:
        case Tag::Map:
        case Tag::Range:
        case Tag::Iterator: return true;
        default: return false;
    }
}

Source source_of(const NativeCall& call) {
    if (call.argc() == 1 && walks_itself(call.arg(0))) return {call.arg(0), true};
    return {Value::list(call.args), false};
}

/// Runs the block (if any) over every element. `visit` receives the element
/// and the block's value and returns false to stop early.
template <typename Visit>
void drive(NativeCall& call, const Value& source, Visit visit) {
    Cursor cursor(source);
    std::int64_t index = 0;
    while (auto item = cursor.next()) {
        if (!call.block) {
            if (!visit(*item, *item)) return;
            ++index;
            continue;
        }
        BlockContext ctx{*item, index++, source, std::nullopt};
        BlockResult r = call.interp.invoke_block(*call.block, ctx);
        if (r.signal == BlockSignal::Break) return;
        if (r.signal == BlockSignal::Continue) continue;
        if (!visit(*item, r.value)) return;
    }
}

using Less = std::function<bool(const Value&, const Value&)>;

Less comparator(NativeCall& call) {
    if (!call.block) return [](const Value& a, const Value& b) { return order_compare(a, b) < 0; };
    auto counter = std::make_shared<std::int64_t>(0);
    return [&call, counter](const Value& a, const Value& b) {
        Value pair = Value::pair(a, b);
        BlockContext ctx{pair, (*counter)++, pair, std::nullopt};
        return truthy(call.interp.invoke_block(*call.block, ctx).value);
    };
}

// Bottom-up merge sort: stable, and safe under comparators that are not
// strict weak orders (a user block may be anything).
void merge_sort(std::vector<Value>& v, const Less& less) {
    std::vector<Value> buf(v.size());
    for (std::size_t width = 1; width < v.size(); width *= 2) {
        for (std::size_t lo = 0; lo < v.size(); lo += 2 * width) {
            std::size_t mid = std::min(lo + width, v.size());
            std::size_t hi = std::min(lo + 2 * width, v.size());
            std::size_t i = lo, j = mid, k = lo;
            while (i < mid && j < hi) buf[k++] = less(v[j], v[i]) ? v[j++] : v[i++];
            while (i < mid) buf[k++] = v[i++];
            while (j < hi) buf[k++] = v[j++];
        }
        v.swap(buf);
    }
}

[[noreturn]] void number_format(const Value& v) {
    raise("NumberFormatError", "For input string: \"" + to_display(v) + "\"");
}

std::optional<Value> to_integral(const Value& v) {
    switch (v.tag()) {
        case Tag::Int:
        case Tag::BigInt: return v;
        case Tag::Float:
            if (!std::isfinite(v.as_float())) return std::nullopt;
            return Value::integral(BigDec::from_double(std::trunc(v.as_float())).truncated());
        case Tag::BigDec: return Value::integral(v.as_decimal().truncated());
        case Tag::Bool: return Value::integer(v.as_bool() ? 1 : 0);
        case Tag::Str: {
            auto parsed = parse_integer(trim(v.as_str()));
            if (!parsed) return std::nullopt;
            return Value::integral(*parsed);
        }
        default: return std::nullopt;
    }
}

std::optional<BigDec> to_decimal(const Value& v) {
    if (v.is(Tag::Float) && !std::isfinite(v.as_float())) return std::nullopt;
    if (v.is_numeric()) return to_bigdec(v);
    if (v.is(Tag::Str)) return BigDec::parse(trim(v.as_str()));
    return std::nullopt;
}

std::optional<double> to_real(const Value& v) {
    switch (v.tag()) {
        case Tag::Float: return v.as_float();
        case Tag::Int: return static_cast<double>(v.as_int());
        case Tag::BigInt: return njexl::to_double(v.as_big());
        case Tag::BigDec: return v.as_decimal().to_double();
        case Tag::Str: {
            std::string t = trim(v.as_str());
            if (t == "NaN") return std::nan("");
            if (t == "Infinity" || t == "+Infinity") return HUGE_VAL;
            if (t == "-Infinity") return -HUGE_VAL;
            auto d = BigDec::parse(t);
            if (!d) return std::nullopt;
            return d->to_double();
        }
        default: return std::nullopt;
    }
}

/// Shared shape of int/float/INT/DEC: convert, else default, else raise.
template <typename Convert>
Value converting(NativeCall& call, const char* name, Convert convert) {
    arity(call, name, 1, 2);
    if (auto v = convert(call.arg(0))) return *v;
    if (call.argc() == 2) return call.arg(1);
    number_format(call.arg(0));
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in(int year, int month) {
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return month == 2 && leap(year) ? 29 : days[month - 1];
}

Date parse_date(const std::string& text, const std::string& pattern) {
    struct Field {
        char letter;
        std::size_t width;
        int* slot;
    };
    Date d;
    const Field fields[] = {{'y', 4, &d.year},   {'M', 2, &d.month},  {'d', 2, &d.day},
                            {'H', 2, &d.hour},   {'m', 2, &d.minute}, {'s', 2, &d.second}};
    auto fail = [&]() -> Date {
        raise("DateParseError", "'" + text + "' does not match '" + pattern + "'");
    };
    std::size_t t = 0;
    for (std::size_t p = 0; p < pattern.size();) {
        char c = pattern[p];
        if (!std::isalpha(static_cast<unsigned char>(c))) {
            if (t >= text.size() || text[t] != c) return fail();
            ++t;
            ++p;
            continue;
        }
        std::size_t run = p;
        while (run < pattern.size() && pattern[run] == c) ++run;
        std::size_t width = run - p;
        const Field* f = std::find_if(std::begin(fields), std::end(fields),
                                      [&](const Field& x) { return x.letter == c && x.width == width; });
        if (f == std::end(fields)) {
            raise("PatternError", "unsupported field '" + pattern.substr(p, width) + "' in '" + pattern + "'");
        }
        int value = 0;
        for (std::size_t k = 0; k < width; ++k, ++t) {
            if (t >= text.size() || !std::isdigit(static_cast<unsigned char>(text[t]))) return fail();
            value = value * 10 + (text[t] - '0');
        }
        *f->slot = value;
        if (c == 'H' || c == 'm' || c == 's') d.has_time = true;
        p = run;
    }
    if (t != text.size()) return fail();
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in(d.year, d.month) || d.hour > 23 ||
        d.minute > 59 || d.second > 59) {
        raise("DateParseError", "'" + text + "' is not a valid calendar date");
    }
    return d;
}

// ---- builtins -----------------------------------------------------------

Value b_print(NativeCall& call) {
    std::string line;
    for (std::size_t i = 0; i < call.argc(); ++i) {
        if (i) line += ' ';
        line += to_display(call.arg(i));
    }
    line += '\n';
    call.interp.io().out(line);
    return {};
}

Value b_read(NativeCall& call) {
    arity(call, "read", 1, 1);
    return Value::str(call.interp.io().loader->read(want_str(call, 0, "read")));
}

Value b_lines(NativeCall& call) {
    arity(call, "lines", 1, 1);
    return Value::iterator(call.interp.io().loader->lines(want_str(call, 0, "lines")));
}

Value b_write(NativeCall& call) {
    arity(call, "write", 2, 2);
    call.interp.io().loader->write(want_str(call, 0, "write"), to_display(call.arg(1)));
    return {};
}

Value b_size(NativeCall& call) {
    arity(call, "size", 1, 1);
    return Value::integer(cardinality(call.arg(0)));
}

Value b_str(NativeCall& call) {
    arity(call, "str", 1, 1);
    return Value::str(to_display(call.arg(0)));
}

Value b_type(NativeCall& call) {
    arity(call, "type", 1, 1);
    return Value::str(std::string(tag_name(call.arg(0).tag())));
}

Value b_int(NativeCall& call) { return converting(call, "int", to_integral); }

Value b_INT(NativeCall& call) {
    return converting(call, "INT", [](const Value& v) -> std::optional<Value> {
        auto i = to_integral(v);
        if (!i) return std::nullopt;
        return i->is(Tag::Int) ? Value::big(BigInt(i->as_int())) : *i;
    });
}

Value b_float(NativeCall& call) {
    return converting(call, "float", [](const Value& v) -> std::optional<Value> {
        auto d = to_real(v);
        if (!d) return std::nullopt;
        return Value::real(*d);
    });
}

Value b_DEC(NativeCall& call) {
    return converting(call, "DEC", [](const Value& v) -> std::optional<Value> {
        auto d = to_decimal(v);
        if (!d) return std::nullopt;
        return Value::decimal(std::move(*d));
    });
}

Value b_date(NativeCall& call) {
    arity(call, "date", 1, 2);
    const std::string& text = want_str(call, 0, "date");
    std::string pattern = call.argc() == 2 ? want_str(call, 1, "date") : "yyyy-MM-dd";
    return Value::date(parse_date(text, pattern));
}

Value b_list(NativeCall& call) {
    Source src = source_of(call);
    std::vector<Value> out;
    drive(call, src.whole, [&](const Value&, const Value& v) {
        out.push_back(v);
        return true;
    });
    return Value::list(std::move(out));
}

Value b_set(NativeCall& call) {
    Source src = source_of(call);
    auto out = std::make_shared<ValueSet>();
    drive(call, src.whole, [&](const Value&, const Value& v) {
        out->insert(v);
        return true;
    });
    return Value::set(std::move(out));
}

Value b_dict(NativeCall& call) {
    Source src = source_of(call);
    auto out = std::make_shared<ValueMap>();
    drive(call, src.whole, [&](const Value& item, const Value& v) {
        if (v.is(Tag::Pair)) {
            out->set(v.as_pair().first, v.as_pair().second);
        } else if (call.block) {
            out->set(item, v);
        } else {
            raise("TypeError", "dict() needs (key, value) pairs, got a " + std::string(tag_name(v.tag())));
        }
        return true;
    });
    return Value::map(std::move(out));
}

Value b_index(NativeCall& call) {
    if (!call.block) {
        arity(call, "index", 2, 2);
        Cursor cursor(call.arg(0));
        for (std::int64_t i = 0; auto item = cursor.next(); ++i) {
            if (equals(*item, call.arg(1))) return Value::integer(i);
        }
        return Value::integer(-1);
    }
    arity(call, "index", 1, 1);
    const Value& source = call.arg(0);
    Cursor cursor(source);
    for (std::int64_t i = 0; auto item = cursor.next(); ++i) {
        BlockResult r = call.interp.invoke_block(*call.block, BlockContext{*item, i, source, std::nullopt});
        if (r.signal == BlockSignal::Break) break;
        if (r.signal == BlockSignal::Normal && truthy(r.value)) return Value::integer(i);
    }
    return Value::integer(-1);
}

Value b_minmax(NativeCall& call) {
    Source src = source_of(call);
    Less less = comparator(call);
    std::optional<Value> lo, hi;
    Cursor cursor(src.whole);
    while (auto item = cursor.next()) {
        if (!lo) {
            lo = *item;
            hi = *item;
            continue;
        }
        if (less(*item, *lo)) lo = *item;
        if (less(*hi, *item)) hi = *item;
    }
    if (!lo) raise("EmptyCollection", "minmax() of an empty collection");
    return Value::pair(std::move(*lo), std::move(*hi));
}

Value fold(NativeCall& call, const char* name, bool reverse) {
    arity(call, name, 1, 2);
    if (!call.block) raise("TypeError", std::string(name) + "() needs an anonymous block");
    std::vector<Value> items = materialize(call.arg(0));
    if (reverse) std::reverse(items.begin(), items.end());
    std::size_t start = 0;
    Value partial;
    if (call.argc() == 2) {
        partial = call.arg(1);
    } else if (!items.empty()) {
        partial = items[0];
        start = 1;
    }
    for (std::size_t i = start; i < items.size(); ++i) {
        BlockContext ctx{items[i], static_cast<std::int64_t>(i), call.arg(0), partial};
        BlockResult r = call.interp.invoke_block(*call.block, ctx);
        if (r.signal == BlockSignal::Break) break;
        if (r.signal == BlockSignal::Continue) continue;
        partial = std::move(r.value);
    }
    return partial;
}

Value b_lfold(NativeCall& call) { return fold(call, "lfold", false); }
Value b_rfold(NativeCall& call) { return fold(call, "rfold", true); }

Value b_join(NativeCall& call) {
    if (call.argc() == 0) raise("ArityError", "join() needs at least one collection");
    std::vector<std::vector<Value>> axes;
    axes.reserve(call.argc());
    for (const auto& a : call.args) axes.push_back(materialize(a));
    Value inputs = Value::list(call.args);
    std::vector<Value> out;
    if (std::any_of(axes.begin(), axes.end(), [](const auto& a) { return a.empty(); })) return Value::list();

    std::vector<std::size_t> at(axes.size(), 0);
    std::int64_t index = 0;
    while (true) {
        std::vector<Value> tuple;
        tuple.reserve(axes.size());
        for (std::size_t k = 0; k < axes.size(); ++k) tuple.push_back(axes[k][at[k]]);
        Value item = Value::list(std::move(tuple));
        if (!call.block) {
            out.push_back(std::move(item));
        } else {
            BlockContext ctx{item, index, inputs, std::nullopt};
            BlockResult r = call.interp.invoke_block(*call.block, ctx);
            if (r.signal == BlockSignal::Break) break;
            if (r.signal == BlockSignal::Normal && truthy(r.value)) out.push_back(std::move(item));
        }
        ++index;
        // odometer: rightmost position turns fastest
        std::size_t k = axes.size();
        while (k > 0) {
            --k;
            if (++at[k] < axes[k].size()) break;
            at[k] = 0;
            if (k == 0) return Value::list(std::move(out));
        }
    }
    return Value::list(std::move(out));
}

Value sorted(NativeCall& call, bool descending) {
    Source src = source_of(call);
    std::vector<Value> items = materialize(src.whole);
    Less less = comparator(call);
    if (descending) {
        merge_sort(items, [&](const Value& a, const Value& b) { return less(b, a); });
    } else {
        merge_sort(items, less);
    }
    return Value::list(std::move(items));
}

Value b_sorta(NativeCall& call) { return sorted(call, false); }
Value b_sortd(NativeCall& call) { return sorted(call, true); }

Value b_eval(NativeCall& call) {
    arity(call, "eval", 1, 1);
    auto child = std::make_shared<Scope>(call.scope);
    return call.interp.run_source(want_str(call, 0, "eval"), child);
}

Value b_env(NativeCall& call) {
    arity(call, "env", 1, 2);
    const auto& env = call.interp.io().env;
    auto it = env.find(want_str(call, 0, "env"));
    if (it != env.end()) return Value::str(it->second);
    return call.argc() == 2 ? call.arg(1) : Value();
}

Value b_raise(NativeCall& call) {
    arity(call, "raise", 1, 2);
    std::string kind = to_display(call.arg(0));
    raise(kind, call.argc() == 2 ? to_display(call.arg(1)) : kind);
}

Value native(std::string name, NativeFn fn, bool block = false) {
    auto f = std::make_shared<NativeFunction>();
    f->name = std::move(name);
    f->fn = std::move(fn);
    f->accepts_block = block;
    return Value::native(std::move(f));
}

}  // namespace

const std::unordered_map<std::string, Value>& builtins() {
    static const std::unordered_map<std::string, Value> table = [] {
        std::unordered_map<std::string, Value> t;
        auto add = [&](const char* name, NativeFn fn, bool block = false) {
            t.emplace(name, native(name, std::move(fn), block));
        };
        add("print", b_print);
        add("read", b_read);
        add("lines", b_lines);
        add("write", b_write);
        add("size", b_size);
        add("str", b_str);
        add("type", b_type);
        add("int", b_int);
        add("INT", b_INT);
        add("float", b_float);
        add("DEC", b_DEC);
        add("date", b_date);
        add("list", b_list, true);
        add("set", b_set, true);
        add("dict", b_dict, true);
        add("index", b_index, true);
        add("minmax", b_minmax, true);
        add("lfold", b_lfold, true);
        add("rfold", b_rfold, true);
        add("join", b_join, true);
        add("sorta", b_sorta, true);
        add("sortd", b_sortd, true);
        add("eval", b_eval);
        add("env", b_env);
        add("raise", b_raise);
        return t;
    }();
    return table;
}

std::int64_t parse_int32(const std::string& text, int radix) {
    auto fail = [&]() -> std::int64_t {
        raise("NumberFormatError", "For input string: \"" + text + "\"" +
                                       (radix == 10 ? std::string() : " under radix " + std::to_string(radix)));
    };
    if (radix < 2 || radix > 36) raise("NumberFormatError", "radix " + std::to_string(radix) + " out of range");
    std::size_t i = 0;
    bool negative = false;
    if (!text.empty() && (text[0] == '-' || text[0] == '+')) {
        negative = text[0] == '-';
        i = 1;
    }
    if (i == text.size()) return fail();
    const std::int64_t limit = negative ? 2147483648LL : 2147483647LL;
    std::int64_t value = 0;
    for (; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        int digit = std::isdigit(c) ? c - '0' : std::isalpha(c) ? std::tolower(c) - 'a' + 10 : 99;
        if (digit >= radix) return fail();
        value = value * radix + digit;
        if (value > limit) return fail();
    }
    return negative ? -value : value;
}

void ModuleRegistry::add(ModulePtr module) {
    std::lock_guard lock(mutex_);
    modules_[module->path] = std::move(module);
}

ModulePtr ModuleRegistry::find(const std::string& path) const {
    std::lock_guard lock(mutex_);
    auto it = modules_.find(path);
    return it == modules_.end() ? nullptr : it->second;
}

std::shared_ptr<ModuleRegistry> ModuleRegistry::with_defaults() {
    auto registry = std::make_shared<ModuleRegistry>();
    auto integer = std::make_shared<Module>();
    integer->path = "java.lang.Integer";
    auto parse = [](NativeCall& call) -> Value {
        arity(call, "parseInt", 1, 2);
        int radix = 10;
        if (call.argc() == 2) {
            if (!call.arg(1).is(Tag::Int)) raise("TypeError", "parseInt() radix must be an int");
            radix = static_cast<int>(std::clamp<std::int64_t>(call.arg(1).as_int(), -1, 99));
        }
        return Value::integer(parse_int32(want_str(call, 0, "parseInt"), radix));
    };
    integer->members.emplace("parseInt", native("parseInt", parse));
    integer->members.emplace("valueOf", native("valueOf", parse));
    integer->members.emplace("MAX_VALUE", Value::integer(2147483647));
    integer->members.emplace("MIN_VALUE", Value::integer(-2147483648LL));
    registry->add(std::move(integer));
    return registry;
}

}  // namespace njexl
