#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "njexl/engine.hpp"
#include "njexl/value.hpp"

namespace njexl::test {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::int64_t range(std::int64_t lo, std::int64_t hi) {  // inclusive
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen_);
    }
    bool chance(double p) { return std::bernoulli_distribution(p)(gen_); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(range(0, static_cast<std::int64_t>(n) - 1)); }
    std::uint64_t bits() { return gen_(); }
    std::string digits(std::size_t n);
    template <typename T>
    const T& pick(const std::vector<T>& v) { return v[index(v.size())]; }
    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
};

// ---- numeric tower -------------------------------------------------------

/// Random operand of the given tier (0 Int, 1 BigInt, 2 Float, 3 BigDec).
Value random_number(Rng& rng, int tier);

/// "Int:5", "BigInt:-7", "Float:0x1.8p+1", "BigDec:15@1", or "Error:Kind".
std::string tagged(const Value& v);

/// Independent GMP/MPFR computation of `a op b`, in the `tagged` format.
std::string oracle_arith(ArithOp op, const Value& a, const Value& b);

/// Calls njexl::arith and renders the outcome (value or error kind).
std::string actual_arith(ArithOp op, const Value& a, const Value& b);

const char* op_text(ArithOp op);

// ---- values -------------------------------------------------------------

/// Random value up to `depth` levels of collections, drawn from a small
/// domain so that equal values actually occur.
Value random_value(Rng& rng, int depth);
std::vector<std::int64_t> random_ints(Rng& rng, std::size_t max_len, std::int64_t lo, std::int64_t hi);
Value int_list(const std::vector<std::int64_t>& xs);

/// Count-map multiset oracles.
bool counts_equal(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);
bool counts_subset(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);

// ---- validation predicates ----------------------------------------------

bool brute_sorted_permutation(const std::vector<std::int64_t>& in, const std::vector<std::int64_t>& out);

struct Table {
    std::vector<std::vector<std::string>> rows;
};
/// Rows compared as multisets after re-ordering columns by the index sets.
bool brute_tables_equal(const Table& l, const Table& r, const std::vector<std::size_t>& il,
                        const std::vector<std::size_t>& ir);

// ---- fuzzing -------------------------------------------------------------

/// Syntactically valid expression over names `x`, `f` and module `Int`;
/// many of them raise at run time.
std::string random_script_expr(Rng& rng, int depth);
/// Host datum with collections nested up to `depth` levels.
HostValue random_host(Rng& rng, int depth);
int host_depth(const HostValue& v);
/// One to four random insertions/truncations/deletions of `source`.
std::string mutate_source(Rng& rng, std::string source);

// ---- scripts ------------------------------------------------------------

std::string corpus_dir();
std::string read_text(const std::string& path);

struct Captured {
    std::string out;
    std::string err;
    int code = 0;
};

/// Runs the CLI in-process.
Captured run_cli(const std::vector<std::string>& args, const std::string& stdin_text = {});

/// Engine whose print output lands in `sink`.
std::unique_ptr<Engine> capturing_engine(std::string& sink);

/// Evaluates and renders with to_display, or "Kind: message" on error.
std::string show(Engine& engine, const std::string& src);

}  // namespace njexl::test
