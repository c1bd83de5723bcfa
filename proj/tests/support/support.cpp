#include "support.hpp"

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "cli.hpp"

namespace njexl::test {

std::string Rng::digits(std::size_t n) {
    std::string s;
    s.push_back(static_cast<char>('1' + range(0, 8)));
    while (s.size() < n) s.push_back(static_cast<char>('0' + range(0, 9)));
    return s;
}

// ---- numeric oracle ------------------------------------------------------

namespace {

struct Dec {
    mpz_class u;
    long scale = 0;
};

mpz_class to_mpz(const Value& v) {
    std::string text = v.is(Tag::Int) ? std::to_string(v.as_int()) : v.as_big().str();
    return mpz_class(text, 10);
}

mpz_class ten_to(unsigned long e) {
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
    return r;
}

/// Shortest "%.Ne" text that reads back as `d`, as digits and scale.
Dec shortest_decimal(double d) {
    char buf[64];
    for (int p = 1; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*e", p - 1, d);
        if (std::strtod(buf, nullptr) == d) break;
    }
    std::string text(buf);
    auto e = text.find('e');
    std::string mant = text.substr(0, e);
    long exponent = std::stol(text.substr(e + 1));
    bool negative = mant[0] == '-';
    std::string digits;
    long frac = 0;
    bool after_point = false;
    for (char c : mant) {
        if (c == '.') {
            after_point = true;
        } else if (c >= '0' && c <= '9') {
            digits.push_back(c);
            if (after_point) ++frac;
        }
    }
    Dec out{mpz_class(digits, 10), frac - exponent};
    if (negative) out.u = -out.u;
    if (out.scale < 0) {
        out.u *= ten_to(static_cast<unsigned long>(-out.scale));
        out.scale = 0;
    }
    return out;
}

Dec to_dec(const Value& v) {
    switch (v.tag()) {
        case Tag::Int:
        case Tag::BigInt: return {to_mpz(v), 0};
        case Tag::Float: return shortest_decimal(v.as_float());
        default: return {mpz_class(v.as_decimal().unscaled().str(), 10), v.as_decimal().scale()};
    }
}

void align(const Dec& a, const Dec& b, mpz_class& x, mpz_class& y, long& scale) {
    scale = std::max(a.scale, b.scale);
    x = a.u * ten_to(static_cast<unsigned long>(scale - a.scale));
    y = b.u * ten_to(static_cast<unsigned long>(scale - b.scale));
}

std::string show_dec(const Dec& d) { return "BigDec:" + d.u.get_str() + "@" + std::to_string(d.scale); }

/// Round-half-even of a non-negative rational to an integer.
mpz_class round_half_even(const mpq_class& x) {
    mpz_class q = x.get_num() / x.get_den();  // floor for x >= 0
    mpq_class frac = x - mpq_class(q);
    mpq_class half(1, 2);
    if (frac > half || (frac == half && q % 2 != 0)) q += 1;
    return q;
}

Dec decimal_divide(const Dec& a, const Dec& b) {
    const long preferred = a.scale - b.scale;
    if (a.u == 0) return {0, std::max(preferred, 0L)};
    // |a / b| = |a.u| / |b.u| * 10^-preferred
    mpq_class value(abs(a.u), abs(b.u));
    value.canonicalize();
    if (preferred > 0) {
        value /= mpq_class(ten_to(static_cast<unsigned long>(preferred)));
    } else {
        value *= mpq_class(ten_to(static_cast<unsigned long>(-preferred)));
    }
    value.canonicalize();
    // e = floor(log10(value))
    long e = static_cast<long>(mpz_sizeinbase(value.get_num().get_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(value.get_den().get_mpz_t(), 10));
    auto pow10q = [](long k) {
        return k >= 0 ? mpq_class(ten_to(static_cast<unsigned long>(k)))
                      : mpq_class(mpz_class(1), ten_to(static_cast<unsigned long>(-k)));
    };
    while (pow10q(e) > value) --e;
    while (pow10q(e + 1) <= value) ++e;
    long scale = 33 - e;
    mpq_class scaled = value * pow10q(scale);
    scaled.canonicalize();
    mpz_class n = round_half_even(scaled);
    if (n == ten_to(34)) {
        n /= 10;
        --scale;
    }
    while (scale > preferred && n % 10 == 0) {
        n /= 10;
        --scale;
    }
    bool negative = (a.u < 0) != (b.u < 0);
    return {negative ? mpz_class(-n) : n, scale};
}

std::string show_double(double d) {
    if (std::isnan(d)) return "Float:nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", d);
    return std::string("Float:") + buf;
}

struct MpfrDoubleRange {
    MpfrDoubleRange() {
        mpfr_set_emin(-1073);
        mpfr_set_emax(1024);
    }
};

double mpfr_binary(ArithOp op, const Value& a, const Value& b) {
    static MpfrDoubleRange range;
    mpfr_t x, y, r;
    mpfr_inits2(53, x, y, r, static_cast<mpfr_ptr>(nullptr));
    auto load = [](mpfr_t dst, const Value& v) {
        if (v.is(Tag::Float)) {
            mpfr_set_d(dst, v.as_float(), MPFR_RNDN);
        } else {
            mpz_class z = to_mpz(v);
            int t = mpfr_set_z(dst, z.get_mpz_t(), MPFR_RNDN);
            t = mpfr_check_range(dst, t, MPFR_RNDN);
            mpfr_subnormalize(dst, t, MPFR_RNDN);
        }
    };
    load(x, a);
    load(y, b);
    int t = 0;
    switch (op) {
        case ArithOp::Add: t = mpfr_add(r, x, y, MPFR_RNDN); break;
        case ArithOp::Sub: t = mpfr_sub(r, x, y, MPFR_RNDN); break;
        case ArithOp::Mul: t = mpfr_mul(r, x, y, MPFR_RNDN); break;
        case ArithOp::Div: t = mpfr_div(r, x, y, MPFR_RNDN); break;
        case ArithOp::Mod: t = mpfr_fmod(r, x, y, MPFR_RNDN); break;
    }
    t = mpfr_check_range(r, t, MPFR_RNDN);
    mpfr_subnormalize(r, t, MPFR_RNDN);
    double out = mpfr_get_d(r, MPFR_RNDN);
    mpfr_clears(x, y, r, static_cast<mpfr_ptr>(nullptr));
    return out;
}

int tier_of(const Value& v) {
    switch (v.tag()) {
        case Tag::Int: return 0;
        case Tag::BigInt: return 1;
        case Tag::Float: return 2;
        default: return 3;
    }
}

bool fits_int64(const mpz_class& z) {
    static const mpz_class lo(std::to_string(std::numeric_limits<std::int64_t>::min()), 10);
    static const mpz_class hi(std::to_string(std::numeric_limits<std::int64_t>::max()), 10);
    return z >= lo && z <= hi;
}

}  // namespace

const char* op_text(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "+";
        case ArithOp::Sub: return "-";
        case ArithOp::Mul: return "*";
        case ArithOp::Div: return "/";
        case ArithOp::Mod: return "%";
    }
    return "?";
}

std::string tagged(const Value& v) {
    switch (v.tag()) {
        case Tag::Int: return "Int:" + std::to_string(v.as_int());
        case Tag::BigInt: return "BigInt:" + v.as_big().str();
        case Tag::Float: return show_double(v.as_float());
        case Tag::BigDec:
            return "BigDec:" + v.as_decimal().unscaled().str() + "@" + std::to_string(v.as_decimal().scale());
        default: return std::string(tag_name(v.tag())) + ":" + to_display(v);
    }
}

std::string actual_arith(ArithOp op, const Value& a, const Value& b) {
    try {
        return tagged(arith(op, a, b));
    } catch (const ScriptError& e) {
        return "Error:" + e.kind();
    }
}

std::string oracle_arith(ArithOp op, const Value& a, const Value& b) {
    const int tier = std::max(tier_of(a), tier_of(b));
    if (tier <= 1) {
        mpz_class x = to_mpz(a), y = to_mpz(b), r;
        const char* kind = tier == 0 ? "Int:" : "BigInt:";
        switch (op) {
            case ArithOp::Add: r = x + y; break;
            case ArithOp::Sub: r = x - y; break;
            case ArithOp::Mul: r = x * y; break;
            case ArithOp::Div:
                if (y == 0) return "Error:DivideByZero";
                if (tier == 1 && !mpz_divisible_p(x.get_mpz_t(), y.get_mpz_t())) {
                    return show_dec(decimal_divide({x, 0}, {y, 0}));
                }
                mpz_tdiv_q(r.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
                break;
            case ArithOp::Mod:
                if (y == 0) return "Error:DivideByZero";
                mpz_tdiv_r(r.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
                break;
        }
        if (tier == 0 && !fits_int64(r)) kind = "BigInt:";
        return kind + r.get_str();
    }
    if (tier == 2) return show_double(mpfr_binary(op, a, b));

    Dec x = to_dec(a), y = to_dec(b);
    mpz_class ax, ay;
    long scale;
    switch (op) {
        case ArithOp::Add: align(x, y, ax, ay, scale); return show_dec({ax + ay, scale});
        case ArithOp::Sub: align(x, y, ax, ay, scale); return show_dec({ax - ay, scale});
        case ArithOp::Mul: return show_dec({x.u * y.u, x.scale + y.scale});
        case ArithOp::Div:
            if (y.u == 0) return "Error:DivideByZero";
            return show_dec(decimal_divide(x, y));
        case ArithOp::Mod: {
            if (y.u == 0) return "Error:DivideByZero";
            align(x, y, ax, ay, scale);
            mpz_class r;
            mpz_tdiv_r(r.get_mpz_t(), ax.get_mpz_t(), ay.get_mpz_t());
            return show_dec({r, scale});
        }
    }
    return "?";
}

Value random_number(Rng& rng, int tier) {
    switch (tier) {
        case 0:
            switch (rng.range(0, 4)) {
                case 0: return Value::integer(rng.range(-100, 100));
                case 1: return Value::integer(rng.range(-1'000'000'000, 1'000'000'000));
                case 2: return Value::integer(std::numeric_limits<std::int64_t>::max() - rng.range(0, 10));
                case 3: return Value::integer(std::numeric_limits<std::int64_t>::min() + rng.range(0, 10));
                default: return Value::integer(static_cast<std::int64_t>(rng.bits()));
            }
        case 1: {
            if (rng.chance(0.2)) return Value::big(BigInt(rng.range(-50, 50)));
            BigInt v(rng.digits(static_cast<std::size_t>(rng.range(19, 45))));
            return Value::big(rng.chance(0.5) ? BigInt(-v) : v);
        }
        case 2:
            switch (rng.range(0, 4)) {
                case 0: return Value::real(static_cast<double>(rng.range(-1000, 1000)));
                case 1: return Value::real(static_cast<double>(rng.range(-4000, 4000)) / 8.0);
                case 2: return Value::real(0.0);
                case 3:
                    return Value::real(std::ldexp(static_cast<double>(rng.range(1, (1LL << 53) - 1)),
                                                  static_cast<int>(rng.range(-80, 30))) *
                                       (rng.chance(0.5) ? -1 : 1));
                default: return Value::real(std::uniform_real_distribution<double>(-1e6, 1e6)(rng.engine()));
            }
        default: {
            if (rng.chance(0.1)) return Value::decimal(BigDec(0, static_cast<std::int32_t>(rng.range(0, 4))));
            BigInt u(rng.digits(static_cast<std::size_t>(rng.range(1, 30))));
            if (rng.chance(0.5)) u = -u;
            return Value::decimal(BigDec(std::move(u), static_cast<std::int32_t>(rng.range(-3, 12))));
        }
    }
}

// ---- values -------------------------------------------------------------

Value random_value(Rng& rng, int depth) {
    int roll = static_cast<int>(rng.range(0, depth > 0 ? 13 : 8));
    switch (roll) {
        case 0: return Value();
        case 1: return Value::boolean(rng.chance(0.5));
        case 2:
        case 3: return Value::integer(rng.range(-3, 3));
        case 4: return Value::real(static_cast<double>(rng.range(-6, 6)) / 2.0);
        case 5: return Value::decimal(BigDec(BigInt(rng.range(-30, 30)), static_cast<std::int32_t>(rng.range(0, 1))));
        case 6: return Value::big(BigInt(rng.range(-3, 3)));
        case 7:
        case 8: return Value::str(std::string(1, static_cast<char>('a' + rng.range(0, 2))));
        case 9:
        case 10: {
            std::vector<Value> items;
            for (auto n = rng.range(0, 3); n > 0; --n) items.push_back(random_value(rng, depth - 1));
            return Value::list(std::move(items));
        }
        case 11: {
            auto s = std::make_shared<ValueSet>();
            for (auto n = rng.range(0, 3); n > 0; --n) s->insert(random_value(rng, depth - 1));
            return Value::set(std::move(s));
        }
        case 12: {
            auto m = std::make_shared<ValueMap>();
            for (auto n = rng.range(0, 3); n > 0; --n) {
                m->set(Value::integer(rng.range(0, 3)), random_value(rng, depth - 1));
            }
            return Value::map(std::move(m));
        }
        default: return Value::pair(random_value(rng, depth - 1), random_value(rng, depth - 1));
    }
}

std::vector<std::int64_t> random_ints(Rng& rng, std::size_t max_len, std::int64_t lo, std::int64_t hi) {
    std::vector<std::int64_t> out(static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(max_len))));
    for (auto& x : out) x = rng.range(lo, hi);
    return out;
}

Value int_list(const std::vector<std::int64_t>& xs) {
    std::vector<Value> items;
    for (auto x : xs) items.push_back(Value::integer(x));
    return Value::list(std::move(items));
}

bool counts_equal(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::map<std::int64_t, int> ca, cb;
    for (auto x : a) ++ca[x];
    for (auto x : b) ++cb[x];
    return ca == cb;
}

bool counts_subset(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::map<std::int64_t, int> ca, cb;
    for (auto x : a) ++ca[x];
    for (auto x : b) ++cb[x];
    for (auto [k, n] : ca) {
        if (cb[k] < n) return false;
    }
    return true;
}

bool brute_sorted_permutation(const std::vector<std::int64_t>& in, const std::vector<std::int64_t>& out) {
    auto sorted_in = in;
    std::sort(sorted_in.begin(), sorted_in.end());
    if (sorted_in != out) {
        // a sorted output that is a permutation must equal sorted(in)
        return false;
    }
    for (std::size_t i = 1; i < out.size(); ++i) {
        if (out[i - 1] > out[i]) return false;
    }
    return true;
}

bool brute_tables_equal(const Table& l, const Table& r, const std::vector<std::size_t>& il,
                        const std::vector<std::size_t>& ir) {
    auto canon = [](const Table& t, const std::vector<std::size_t>& idx) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& row : t.rows) {
            std::vector<std::string> c;
            for (auto i : idx) c.push_back(row[i]);
            rows.push_back(std::move(c));
        }
        std::sort(rows.begin(), rows.end());
        return rows;
    };
    return canon(l, il) == canon(r, ir);
}

// ---- scripts ------------------------------------------------------------

std::string corpus_dir() { return NJEXL_CORPUS_DIR; }

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Captured run_cli(const std::vector<std::string>& args, const std::string& stdin_text) {
    std::istringstream in(stdin_text);
    std::ostringstream out, err;
    cli::Options options;
    Captured c;
    c.code = cli::run(args, in, out, err, options);
    c.out = out.str();
    c.err = err.str();
    return c;
}

std::unique_ptr<Engine> capturing_engine(std::string& sink) {
    EngineOptions options;
    options.out = [&sink](std::string_view s) { sink.append(s); };
    options.err = [&sink](std::string_view s) { sink.append(s); };
    options.env = std::unordered_map<std::string, std::string>{};
    return std::make_unique<Engine>(std::move(options));
}

std::string show(Engine& engine, const std::string& src) {
    try {
        return to_display(engine.evaluate_value(src));
    } catch (const ScriptError& e) {
        return e.kind() + ": " + e.message();
    }
}

// ---- generators for scripts and host data ------------------------------

std::string random_script_expr(Rng& rng, int depth) {
    static const std::vector<std::string> atoms = {
        "1",        "0",          "2.5",       "'a'",          "[1, 2]",    "null",       "true",
        "missing",  "int('q')",   "1 / 0",     "[1][5]",       "{1 : 2}",   "size(null)", "(1, 2)",
        "'x'[9]",   "[0:3]",      "set(1, 2)", "raise('Boom')", "DEC('1.5')", "#|'abc'|",  "x",
        "f(1)",     "f()",        "f(1,2,3)",  "Int:parseInt('7')", "Int:parseInt('z')", "minmax([])"};
    static const std::vector<std::string> ops = {"+", "-", "*", "/", "%", "==", "<=", "<", "@", "and", "or"};
    if (depth == 0 || rng.chance(0.3)) return rng.pick(atoms);
    switch (rng.range(0, 4)) {
        case 0: return "-" + random_script_expr(rng, depth - 1);
        case 1: return "#|" + random_script_expr(rng, depth - 1) + "|";
        case 2: return "[" + random_script_expr(rng, depth - 1) + ", " + random_script_expr(rng, depth - 1) + "]";
        case 3: return "(" + random_script_expr(rng, depth - 1) + ")[" + random_script_expr(rng, depth - 1) + "]";
        default: return "(" + random_script_expr(rng, depth - 1) + " " + rng.pick(ops) + " " + random_script_expr(rng, depth - 1) + ")";
    }
}

HostValue random_host(Rng& rng, int depth) {
    auto pick = depth > 0 && rng.chance(0.6) ? rng.range(7, 8) : rng.range(0, 6);
    switch (pick) {
        case 0: return nullptr;
        case 1: return rng.chance(0.5);
        case 2: return static_cast<std::int64_t>(rng.bits());
        case 3: return static_cast<double>(rng.range(-100000, 100000)) / 64.0;
        case 4: {
            static const std::vector<std::string> words = {"", "a", "héllo", "tab\there", "line\nbreak", "'q'", "日本"};
            return rng.pick(words) + std::to_string(rng.range(0, 9));
        }
        case 5: {
            std::string digits = std::to_string(rng.range(1, 9)) + rng.digits(static_cast<std::size_t>(rng.range(19, 40)));
            return HostBigNumber{(rng.chance(0.5) ? "-" : "") + digits, false};
        }
        case 6: {
            std::string text = std::to_string(rng.range(0, 999)) + "." + rng.digits(static_cast<std::size_t>(rng.range(1, 30)));
            return HostBigNumber{text, true};
        }
        case 7: {
            HostList l;
            auto n = rng.range(0, 4);
            for (int i = 0; i < n; ++i) l.push_back(random_host(rng, depth - 1));
            return l;
        }
        default: {
            HostMap m;
            auto n = rng.range(0, 4);
            for (int i = 0; i < n; ++i) m.emplace_back("k" + std::to_string(i), random_host(rng, depth - 1));
            return m;
        }
    }
}

int host_depth(const HostValue& v) {
    int d = 0;
    if (auto* l = std::get_if<HostList>(&v.data)) {
        for (const auto& x : *l) d = std::max(d, host_depth(x));
        return d + 1;
    }
    if (auto* m = std::get_if<HostMap>(&v.data)) {
        for (const auto& [k, x] : *m) d = std::max(d, host_depth(x));
        return d + 1;
    }
    return 0;
}

std::string mutate_source(Rng& rng, std::string s) {
    static const std::vector<std::string> junk = {"(", ")", "[", "]", "{", "}", "'", "\"", "#(", "#|", "|", ":",
                                                  "@", "$", "`", "\\", "/*", "=", ",", ";", "\x01", "\xff", "def", "?"};
    auto edits = rng.range(1, 4);
    for (int i = 0; i < edits; ++i) {
        auto at = s.empty() ? 0 : rng.index(s.size() + 1);
        switch (rng.range(0, 2)) {
            case 0: s.insert(at, rng.pick(junk)); break;
            case 1: s = s.substr(0, at); break;
            default:
                if (!s.empty()) s.erase(std::min<std::size_t>(at, s.size() - 1), 1);
        }
    }
    return s;
}

}  // namespace njexl::test
