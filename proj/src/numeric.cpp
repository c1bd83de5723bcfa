#include "njexl/numeric.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <vector>

namespace njexl {

namespace {
// Keeps exponent-heavy text like 1e999999999 from allocating huge integers.
constexpr std::int64_t kMaxScale = 100'000;
}  // namespace

BigInt pow10(unsigned exponent) {
    static const std::vector<BigInt> table = [] {
        std::vector<BigInt> t(64);
        t[0] = 1;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * 10;
        return t;
    }();
    if (exponent < table.size()) return table[exponent];
    return boost::multiprecision::pow(BigInt(10), exponent);
}

unsigned decimal_digits(const BigInt& magnitude) {
    if (magnitude == 0) return 1;
    BigInt m = abs(magnitude);
    // msb gives a floor(log2); refine from an estimate.
    auto bits = boost::multiprecision::msb(m) + 1;
    auto estimate = static_cast<unsigned>(static_cast<double>(bits) * 0.30102999566398120);
    if (estimate == 0) estimate = 1;
    while (estimate > 1 && m < pow10(estimate - 1)) --estimate;
    while (m >= pow10(estimate)) ++estimate;
    return estimate;
}

namespace {
// cpp_int's string constructor reads a leading 0 as an octal prefix.
BigInt from_digits(std::string_view digits) {
    auto first = digits.find_first_not_of('0');
    if (first == std::string_view::npos) return 0;
    return BigInt(std::string(digits.substr(first)));
}
}  // namespace

std::optional<BigInt> parse_integer(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    if (i == text.size()) return std::nullopt;
    for (std::size_t j = i; j < text.size(); ++j) {
        if (text[j] < '0' || text[j] > '9') return std::nullopt;
    }
    BigInt v = from_digits(text.substr(i));
    return negative ? BigInt(-v) : v;
}

std::optional<BigDec> BigDec::parse(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    std::string digits;
    std::int64_t scale = 0;
    bool any = false;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
        digits.push_back(text[i++]);
        any = true;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            digits.push_back(text[i++]);
            ++scale;
            any = true;
        }
    }
    if (!any) return std::nullopt;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            exp_negative = text[i] == '-';
            ++i;
        }
        std::int64_t exponent = 0;
        bool exp_any = false;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') {
            exponent = exponent * 10 + (text[i++] - '0');
            if (exponent > 1'000'000'000) return std::nullopt;
            exp_any = true;
        }
        if (!exp_any) return std::nullopt;
        scale -= exp_negative ? -exponent : exponent;
    }
    if (i != text.size()) return std::nullopt;
    if (scale > kMaxScale || scale < -kMaxScale) {
        return std::nullopt;
    }
    BigInt u = from_digits(digits);
    if (negative) u = -u;
    return BigDec(std::move(u), static_cast<std::int32_t>(scale));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

BigDec BigDec::from_double(double v) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite value has no decimal form");
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
    auto parsed = parse(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
    // Scientific form gives the shortest digits; fixed form prints large values exactly.
    if (parsed->scale() < 0) {
        return BigDec(parsed->unscaled() * pow10(static_cast<unsigned>(-parsed->scale())), 0);
    }
    return *parsed;
}

double to_double(const BigInt& v) {
    std::string s = v.str();
    return std::strtod(s.c_str(), nullptr);
}

bool BigDec::is_integer() const {
    if (scale_ <= 0) return true;
    return unscaled_ % pow10(static_cast<unsigned>(scale_)) == 0;
}

std::string BigDec::to_string() const {
    bool negative = unscaled_.sign() < 0;
    std::string digits = BigInt(abs(unscaled_)).str();
    std::string out;
    if (scale_ <= 0) {
        out = digits;
        if (unscaled_ != 0) out.append(static_cast<std::size_t>(-static_cast<std::int64_t>(scale_)), '0');
    } else {
        auto s = static_cast<std::size_t>(scale_);
        if (digits.size() <= s) {
            out = "0." + std::string(s - digits.size(), '0') + digits;
        } else {
            out = digits.substr(0, digits.size() - s) + "." + digits.substr(digits.size() - s);
        }
    }
    return negative ? "-" + out : out;
}

BigDec BigDec::normalized() const {
    if (unscaled_ == 0) return BigDec(0, 0);
    BigInt u = unscaled_;
    std::int64_t s = scale_;
    while (u % 10 == 0) {
        u /= 10;
        --s;
    }
    return BigDec(std::move(u), static_cast<std::int32_t>(s));
}

BigInt BigDec::truncated() const {
    if (scale_ <= 0) return unscaled_ * pow10(static_cast<unsigned>(-static_cast<std::int64_t>(scale_)));
    return unscaled_ / pow10(static_cast<unsigned>(scale_));
}

double BigDec::to_double() const {
    std::string s = BigInt(abs(unscaled_)).str() + "e" + std::to_string(-static_cast<std::int64_t>(scale_));
    double d = std::strtod(s.c_str(), nullptr);
    return unscaled_.sign() < 0 ? -d : d;
}

namespace {

// Brings both operands to the larger scale.
std::pair<BigInt, BigInt> align(const BigDec& a, const BigDec& b, std::int32_t& scale) {
    scale = std::max(a.scale(), b.scale());
    BigInt x = a.unscaled() * pow10(static_cast<unsigned>(scale - a.scale()));
    BigInt y = b.unscaled() * pow10(static_cast<unsigned>(scale - b.scale()));
    return {std::move(x), std::move(y)};
}

}  // namespace

BigDec operator+(const BigDec& a, const BigDec& b) {
    std::int32_t scale;
    auto [x, y] = align(a, b, scale);
    return BigDec(x + y, scale);
}

BigDec operator-(const BigDec& a, const BigDec& b) {
    std::int32_t scale;
    auto [x, y] = align(a, b, scale);
    return BigDec(x - y, scale);
}

BigDec operator*(const BigDec& a, const BigDec& b) {
    return BigDec(a.unscaled() * b.unscaled(), a.scale() + b.scale());
}

int compare(const BigDec& a, const BigDec& b) {
    int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa < sb ? -1 : 1;
    if (a.scale() == b.scale()) {
        return a.unscaled() < b.unscaled() ? -1 : (a.unscaled() > b.unscaled() ? 1 : 0);
    }
    std::int32_t scale;
    auto [x, y] = align(a, b, scale);
    return x < y ? -1 : (x > y ? 1 : 0);
}

BigDec BigDec::divide(const BigDec& a, const BigDec& b, unsigned precision) {
    if (b.unscaled() == 0) throw std::domain_error("division by zero");
    const std::int64_t preferred = static_cast<std::int64_t>(a.scale()) - b.scale();
    if (a.unscaled() == 0) return BigDec(0, static_cast<std::int32_t>(std::max<std::int64_t>(preferred, 0)));

    BigInt num = abs(a.unscaled());
    BigInt den = abs(b.unscaled());
    const bool negative = (a.sign() < 0) != (b.sign() < 0);

    std::int64_t extra = static_cast<std::int64_t>(precision) + 2 +
                         decimal_digits(den) - decimal_digits(num);
    if (extra < 0) extra = 0;
    num *= pow10(static_cast<unsigned>(extra));
    BigInt q = num / den;
    const bool sticky = (num % den) != 0;
    std::int64_t scale = preferred + extra;

    unsigned qd = decimal_digits(q);
    if (qd > precision) {
        unsigned drop = qd - precision;
        BigInt unit = pow10(drop);
        BigInt kept = q / unit;
        BigInt rest = q % unit;
        BigInt twice = rest * 2;
        // Digits beyond `rest` (sticky) push an exact half upwards.
        bool up = twice > unit || (twice == unit && (sticky || kept % 2 != 0));
        if (up) ++kept;
        q = std::move(kept);
        scale -= drop;
        if (q == pow10(precision)) {
            q /= 10;
            --scale;
        }
    } else if (sticky) {
        // Cannot happen: the scaled quotient always has precision+1 digits.
        throw std::logic_error("insufficient division digits");
    }

    while (scale > preferred && q % 10 == 0 && q != 0) {
        q /= 10;
        --scale;
    }
    if (negative) q = -q;
    return BigDec(std::move(q), static_cast<std::int32_t>(scale));
}

BigDec BigDec::remainder(const BigDec& a, const BigDec& b) {
    if (b.unscaled() == 0) throw std::domain_error("division by zero");
    std::int32_t scale;
    auto [x, y] = align(a, b, scale);
    return BigDec(x % y, scale);
}

}  // namespace njexl
