#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "njexl/error.hpp"
#include "njexl/numeric.hpp"

namespace njexl {

class Scope;
struct Node;
struct NativeCall;

enum class Tag : std::uint8_t {
    Null,
    Bool,
    Int,
    BigInt,
    Float,
    BigDec,
    Str,
    Range,
    List,
    Set,
    Map,
    Pair,
    Iterator,
    Function,
    NativeFunction,
    Error,
    Date,
    Module,
};

/// Surface type name, as reported by `type(x)` and in error messages.
std::string_view tag_name(Tag tag);

/// Half-open integer progression start, start+step, ... (never reaching end).
struct Range {
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::int64_t step = 1;

    std::int64_t size() const;
    std::int64_t at(std::int64_t index) const { return start + index * step; }
    bool contains(std::int64_t v) const;
};

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;
    int hour = 0;
    int minute = 0;
    int second = 0;
    bool has_time = false;

    auto key() const { return std::tie(year, month, day, hour, minute, second); }
    std::string iso() const;
};

class Value;
struct List;
class ValueSet;
class ValueMap;
struct PairData;
class Iterator;
struct Function;
struct NativeFunction;
struct Module;

using ListPtr = std::shared_ptr<List>;
using SetPtr = std::shared_ptr<ValueSet>;
using MapPtr = std::shared_ptr<ValueMap>;
using PairPtr = std::shared_ptr<const PairData>;
using IteratorPtr = std::shared_ptr<Iterator>;
using FunctionPtr = std::shared_ptr<const Function>;
using NativeFunctionPtr = std::shared_ptr<const NativeFunction>;
using ErrorPtr = std::shared_ptr<const ErrorInfo>;
using ModulePtr = std::shared_ptr<const Module>;

class Value {
  public:
    // Alternative order mirrors Tag.
    using Storage = std::variant<std::monostate, bool, std::int64_t, BigInt, double, BigDec,
                                 std::string, Range, ListPtr, SetPtr, MapPtr, PairPtr,
                                 IteratorPtr, FunctionPtr, NativeFunctionPtr, ErrorPtr, Date,
                                 ModulePtr>;

    Value() = default;

    static Value boolean(bool b) { return Value(Storage(std::in_place_index<1>, b)); }
    static Value integer(std::int64_t i) { return Value(Storage(std::in_place_index<2>, i)); }
    static Value big(BigInt i) { return Value(Storage(std::in_place_index<3>, std::move(i))); }
    static Value real(double d) { return Value(Storage(std::in_place_index<4>, d)); }
    static Value decimal(BigDec d) { return Value(Storage(std::in_place_index<5>, std::move(d))); }
    static Value str(std::string s) { return Value(Storage(std::in_place_index<6>, std::move(s))); }
    static Value range(Range r) { return Value(Storage(std::in_place_index<7>, r)); }
    static Value list(std::vector<Value> items = {});
    static Value list(ListPtr l) { return Value(Storage(std::in_place_index<8>, std::move(l))); }
    static Value set(SetPtr s) { return Value(Storage(std::in_place_index<9>, std::move(s))); }
    static Value set();
    static Value map(MapPtr m) { return Value(Storage(std::in_place_index<10>, std::move(m))); }
    static Value map();
    static Value pair(Value first, Value second);
    static Value iterator(IteratorPtr it) { return Value(Storage(std::in_place_index<12>, std::move(it))); }
    static Value function(FunctionPtr f) { return Value(Storage(std::in_place_index<13>, std::move(f))); }
    static Value native(NativeFunctionPtr f) { return Value(Storage(std::in_place_index<14>, std::move(f))); }
    static Value error(ErrorPtr e) { return Value(Storage(std::in_place_index<15>, std::move(e))); }
    static Value date(Date d) { return Value(Storage(std::in_place_index<16>, d)); }
    static Value module(ModulePtr m) { return Value(Storage(std::in_place_index<17>, std::move(m))); }

    /// Int when it fits, BigInt otherwise.
    static Value integral(const BigInt& i);

    Tag tag() const { return static_cast<Tag>(data_.index()); }
    bool is(Tag t) const { return tag() == t; }
    bool is_null() const { return tag() == Tag::Null; }
    bool is_numeric() const {
        auto t = tag();
        return t == Tag::Int || t == Tag::BigInt || t == Tag::Float || t == Tag::BigDec;
    }
    bool is_integral_tag() const { return tag() == Tag::Int || tag() == Tag::BigInt; }

    bool as_bool() const { return std::get<1>(data_); }
    std::int64_t as_int() const { return std::get<2>(data_); }
    const BigInt& as_big() const { return std::get<3>(data_); }
    double as_float() const { return std::get<4>(data_); }
    const BigDec& as_decimal() const { return std::get<5>(data_); }
    const std::string& as_str() const { return std::get<6>(data_); }
    const Range& as_range() const { return std::get<7>(data_); }
    const ListPtr& as_list() const { return std::get<8>(data_); }
    const SetPtr& as_set() const { return std::get<9>(data_); }
    const MapPtr& as_map() const { return std::get<10>(data_); }
    const PairData& as_pair() const { return *std::get<11>(data_); }
    const IteratorPtr& as_iterator() const { return std::get<12>(data_); }
    const FunctionPtr& as_function() const { return std::get<13>(data_); }
    const NativeFunctionPtr& as_native() const { return std::get<14>(data_); }
    const ErrorPtr& as_error() const { return std::get<15>(data_); }
    const Date& as_date() const { return std::get<16>(data_); }
    const ModulePtr& as_module() const { return std::get<17>(data_); }

    const Storage& data() const { return data_; }

  private:
    explicit Value(Storage s) : data_(std::move(s)) {}
    Storage data_;
};

struct List {
    std::vector<Value> items;
};

struct PairData {
    Value first;
    Value second;
};

/// Insertion-ordered set under value equality.
class ValueSet {
  public:
    /// Returns false when an equal element is already present.
    bool insert(Value v);
    bool contains(const Value& v) const;
    std::size_t size() const { return items_.size(); }
    const std::vector<Value>& items() const { return items_; }

  private:
    std::vector<Value> items_;
    std::unordered_multimap<std::size_t, std::size_t> index_;
};

/// Insertion-ordered map. Keys must be immutable values (see is_valid_key).
class ValueMap {
  public:
    const Value* find(const Value& key) const;
    /// Throws TypeError for keys that are not immutable.
    void set(Value key, Value value);
    bool contains(const Value& key) const { return find(key) != nullptr; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<std::pair<Value, Value>>& entries() const { return entries_; }

  private:
    std::vector<std::pair<Value, Value>> entries_;
    std::unordered_multimap<std::size_t, std::size_t> index_;
};

bool is_valid_key(const Value& key);

/// Single-pass lazy source (e.g. `lines(file)`).
class Iterator {
  public:
    virtual ~Iterator() = default;
    virtual std::optional<Value> next() = 0;
};

struct Function {
    std::string name;  // empty for `def(...) {...}` expressions
    std::vector<std::string> params;
    std::shared_ptr<const Node> body;  // Block node; shares ownership of its program
    std::shared_ptr<Scope> closure;
};

using NativeFn = std::function<Value(NativeCall&)>;

struct NativeFunction {
    std::string name;
    NativeFn fn;
    bool accepts_block = false;
};

/// Result of `import ... as Alias`; `Alias:name(...)` looks members up here.
struct Module {
    std::string path;
    std::unordered_map<std::string, Value> members;
};

// ---- collection algebra -------------------------------------------------

/// Canonical stringification used by print and golden tests.
std::string to_display(const Value& v);

bool truthy(const Value& v);

/// Value equality: numeric across tags, multiset for lists.
bool equals(const Value& a, const Value& b);
std::size_t hash_value(const Value& v);

/// Total order within comparable tags; TypeError otherwise.
int order_compare(const Value& a, const Value& b);

/// Numeric comparison across the tower; nullopt when NaN is involved.
std::optional<int> numeric_compare(const Value& a, const Value& b);

/// Multiset containment for lists, subset for sets, entry containment for
/// maps. TypeError for any other combination.
bool sub_collection(const Value& a, const Value& b);
bool multiset_equal(const std::vector<Value>& a, const std::vector<Value>& b);
bool multiset_subset(const std::vector<Value>& a, const std::vector<Value>& b);

/// `x @ c`
bool member_of(const Value& x, const Value& container);

/// `#|v|` and size(v)
std::int64_t cardinality(const Value& v);

/// `v[i]` and `v.0`
Value index_value(const Value& target, const Value& index);

enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div, Mod };
Value arith(ArithOp op, const Value& a, const Value& b);
Value negate(const Value& v);

/// Converts any numeric tag to BigDec (Float through its shortest text).
BigDec to_bigdec(const Value& v);

// ---- iteration ----------------------------------------------------------

/// Pull-based walk over any iterable value. Maps yield (key, value) pairs,
/// strings yield one-character strings.
class Cursor {
  public:
    /// Throws TypeError when `source` is not iterable.
    explicit Cursor(Value source);
    std::optional<Value> next();

  private:
    Value source_;
    std::size_t index_ = 0;
};

bool is_iterable(const Value& v);
std::vector<Value> materialize(const Value& v);

// ---- UTF-8 text ---------------------------------------------------------

std::size_t utf8_length(std::string_view s);
/// Code point `index` as a string; nullopt when out of range.
std::optional<std::string> utf8_at(std::string_view s, std::size_t index);

}  // namespace njexl
