#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace njexl {

using BigInt = boost::multiprecision::cpp_int;

/// Significant digits kept by a non-terminating decimal division
/// (the same as IEEE decimal128).
inline constexpr unsigned kDivisionPrecision = 34;

BigInt pow10(unsigned exponent);
unsigned decimal_digits(const BigInt& magnitude);

/// Arbitrary-precision decimal: unscaled * 10^-scale. Arithmetic other than
/// division is exact; the scale is kept (so 1.50 prints as 1.50).
class BigDec {
  public:
    BigDec() = default;
    BigDec(BigInt unscaled, std::int32_t scale)
        : unscaled_(std::move(unscaled)), scale_(scale) {}

    static BigDec from_integer(const BigInt& v) { return BigDec(v, 0); }
    /// [+-]digits[.digits][(e|E)[+-]digits]
    static std::optional<BigDec> parse(std::string_view text);
    /// Uses the shortest decimal digits that round-trip to `v`, at scale 0
    /// when `v` is integral.
    /// Throws std::domain_error for NaN and infinities.
    static BigDec from_double(double v);

    const BigInt& unscaled() const { return unscaled_; }
    std::int32_t scale() const { return scale_; }
    int sign() const { return unscaled_.sign(); }
    bool is_integer() const;

    /// Plain notation, never exponent form.
    std::string to_string() const;
    /// Same value with trailing zeros stripped; zero normalizes to scale 0.
    BigDec normalized() const;
    BigInt truncated() const;
    double to_double() const;

    friend BigDec operator+(const BigDec& a, const BigDec& b);
    friend BigDec operator-(const BigDec& a, const BigDec& b);
    friend BigDec operator*(const BigDec& a, const BigDec& b);
    BigDec operator-() const { return BigDec(-unscaled_, scale_); }

    /// Rounds half-even to `precision` significant digits when the quotient
    /// does not terminate. Throws std::domain_error on a zero divisor.
    static BigDec divide(const BigDec& a, const BigDec& b,
                         unsigned precision = kDivisionPrecision);
    /// a - trunc(a/b)*b, exact. Throws std::domain_error on a zero divisor.
    static BigDec remainder(const BigDec& a, const BigDec& b);

    friend int compare(const BigDec& a, const BigDec& b);
    friend bool operator==(const BigDec& a, const BigDec& b) {
        return compare(a, b) == 0;
    }

  private:
    BigInt unscaled_ = 0;
    std::int32_t scale_ = 0;
};

/// Shortest round-trip text of a double (std::to_chars), with ".0" appended
/// to integral values so they do not read back as integers.
std::string format_double(double v);

/// Correctly rounded conversion.
double to_double(const BigInt& v);

/// Signed decimal integer text; nullopt for anything else.
std::optional<BigInt> parse_integer(std::string_view text);

}  // namespace njexl
