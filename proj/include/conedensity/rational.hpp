#pragma once

#include <gmpxx.h>

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace conedensity {

using Rational = mpq_class;

// Parses "3", "-1/2", "0.125". Throws std::invalid_argument on anything else.
Rational parse_rational(std::string_view text);

// p/q in lowest terms. Use this instead of the two-argument mpq_class
// constructor, which does not canonicalize.
inline Rational frac(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

// Canonical form: "p" when the denominator is 1, else "p/q".
std::string to_string(const Rational& q);

// An element of Q extended by -inf and +inf.
class ExtValue {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  ExtValue() : kind_(Kind::Finite), value_(0) {}
  ExtValue(Rational q) : kind_(Kind::Finite), value_(std::move(q)) {}  // NOLINT
  ExtValue(long v) : kind_(Kind::Finite), value_(v) {}                 // NOLINT
  ExtValue(int v) : kind_(Kind::Finite), value_(v) {}                  // NOLINT

  static ExtValue pos_inf() { return ExtValue(Kind::PosInf); }
  static ExtValue neg_inf() { return ExtValue(Kind::NegInf); }

  bool finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }
  Kind kind() const { return kind_; }

  const Rational& value() const {
    if (!finite()) throw std::logic_error("ExtValue::value on an infinite value");
    return value_;
  }

  friend bool operator==(const ExtValue& a, const ExtValue& b) {
    if (a.kind_ != b.kind_) return false;
    return !a.finite() || a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const ExtValue& a, const ExtValue& b) {
    if (a.kind_ != b.kind_) return static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_);
    if (!a.finite()) return std::strong_ordering::equal;
    int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  // Adding a finite shift keeps infinities.
  friend ExtValue operator+(const ExtValue& a, const Rational& c) {
    if (!a.finite()) return a;
    return ExtValue(Rational(a.value_ + c));
  }

 private:
  explicit ExtValue(Kind k) : kind_(k), value_(0) {}
  Kind kind_;
  Rational value_;
};

ExtValue parse_ext(std::string_view text);  // accepts "inf", "+inf", "-inf"
std::string to_string(const ExtValue& v);

inline const ExtValue& min(const ExtValue& a, const ExtValue& b) { return b < a ? b : a; }
inline const ExtValue& max(const ExtValue& a, const ExtValue& b) { return a < b ? b : a; }

}  // namespace conedensity
