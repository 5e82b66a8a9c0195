#pragma once

// Exact rational arithmetic on 64-bit numerators/denominators.
//
// Values are kept in lowest terms with a positive denominator. Intermediate
// products are formed in 128 bits and reduced before narrowing; a result that
// still does not fit raises std::overflow_error instead of wrapping.

#include <compare>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qrobust {

using Int = std::int64_t;
__extension__ typedef __int128 Wide;

class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(Int value) : num_(value) {}  // NOLINT(google-explicit-constructor)
  Rational(Int num, Int den) { assign(static_cast<Wide>(num), static_cast<Wide>(den)); }

  [[nodiscard]] constexpr Int num() const { return num_; }
  [[nodiscard]] constexpr Int den() const { return den_; }
  [[nodiscard]] constexpr bool is_integer() const { return den_ == 1; }
  [[nodiscard]] constexpr bool is_zero() const { return num_ == 0; }
  [[nodiscard]] constexpr int sign() const { return (num_ > 0) - (num_ < 0); }

  [[nodiscard]] Int floor() const {
    if (den_ == 1) return num_;
    Int q = num_ / den_;
    if ((num_ % den_ != 0) && (num_ < 0)) --q;
    return q;
  }
  [[nodiscard]] Int ceil() const {
    if (den_ == 1) return num_;
    Int q = num_ / den_;
    if ((num_ % den_ != 0) && (num_ > 0)) ++q;
    return q;
  }
  [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  Rational operator-() const {
    if (num_ == INT64_MIN) throw std::overflow_error("rational negation overflow");
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }

  Rational& operator+=(const Rational& o) {
    if (den_ == 1 && o.den_ == 1) {
      Int s;
      if (__builtin_add_overflow(num_, o.num_, &s)) throw std::overflow_error("rational addition overflow");
      num_ = s;
      return *this;
    }
    const Wide n = static_cast<Wide>(num_) * o.den_ + static_cast<Wide>(o.num_) * den_;
    const Wide d = static_cast<Wide>(den_) * o.den_;
    assign(n, d);
    return *this;
  }
  Rational& operator-=(const Rational& o) { return *this += -o; }
  Rational& operator*=(const Rational& o) {
    if (den_ == 1 && o.den_ == 1) {
      Int p;
      if (__builtin_mul_overflow(num_, o.num_, &p)) throw std::overflow_error("rational multiplication overflow");
      num_ = p;
      return *this;
    }
    assign(static_cast<Wide>(num_) * o.num_, static_cast<Wide>(den_) * o.den_);
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("rational division by zero");
    assign(static_cast<Wide>(num_) * o.den_, static_cast<Wide>(den_) * o.num_);
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return a.num_ <=> b.num_;
    const Wide l = static_cast<Wide>(a.num_) * b.den_;
    const Wide r = static_cast<Wide>(b.num_) * a.den_;
    return l <=> r;
  }

  // "p", "-p", "p/q" or a finite decimal such as "0.25".
  static Rational parse(std::string_view text);
  [[nodiscard]] std::string str() const {
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

 private:
  void assign(Wide n, Wide d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    Wide a = n < 0 ? -n : n;
    Wide b = d;
    while (b != 0) {
      const Wide t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX) throw std::overflow_error("rational value out of 64-bit range");
    num_ = static_cast<Int>(n);
    den_ = static_cast<Int>(d);
  }

  Int num_ = 0;
  Int den_ = 1;
};

inline Rational Rational::parse(std::string_view text) {
  auto fail = [&]() -> Rational { throw std::invalid_argument("malformed rational '" + std::string(text) + "'"); };
  if (text.empty()) return fail();
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '+' || text[0] == '-') {
    negative = text[0] == '-';
    pos = 1;
  }
  auto read_digits = [&](std::size_t& p, Wide& out, int& count) {
    out = 0;
    count = 0;
    while (p < text.size() && text[p] >= '0' && text[p] <= '9') {
      out = out * 10 + (text[p] - '0');
      if (out > INT64_MAX) throw std::overflow_error("rational literal out of range");
      ++p;
      ++count;
    }
  };
  Wide whole = 0;
  int digits = 0;
  read_digits(pos, whole, digits);
  Rational value;
  if (pos < text.size() && text[pos] == '/') {
    if (digits == 0) return fail();
    ++pos;
    Wide den = 0;
    int den_digits = 0;
    read_digits(pos, den, den_digits);
    if (den_digits == 0 || pos != text.size()) return fail();
    value = Rational(static_cast<Int>(whole), static_cast<Int>(den));
  } else if (pos < text.size() && text[pos] == '.') {
    ++pos;
    Wide frac = 0;
    int frac_digits = 0;
    read_digits(pos, frac, frac_digits);
    if ((digits == 0 && frac_digits == 0) || pos != text.size() || frac_digits > 18) return fail();
    Int scale = 1;
    for (int i = 0; i < frac_digits; ++i) scale *= 10;
    value = Rational(static_cast<Int>(whole)) + Rational(static_cast<Int>(frac), scale);
  } else {
    if (digits == 0 || pos != text.size()) return fail();
    value = Rational(static_cast<Int>(whole));
  }
  return negative ? -value : value;
}

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Game value: a rational payoff or the +infinity marker that signals the
/// existential player cannot satisfy the constraint system. The marker
/// compares above every rational.
class Value {
 public:
  constexpr Value() = default;
  Value(Rational r) : finite_(r) {}  // NOLINT(google-explicit-constructor)
  Value(Int v) : finite_(v) {}       // NOLINT(google-explicit-constructor)
  static Value infinity() {
    Value v;
    v.infinite_ = true;
    return v;
  }

  [[nodiscard]] bool is_infinite() const { return infinite_; }
  [[nodiscard]] bool is_finite() const { return !infinite_; }
  [[nodiscard]] const Rational& rational() const {
    if (infinite_) throw std::logic_error("rational() on infinite value");
    return finite_;
  }

  friend bool operator==(const Value& a, const Value& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.finite_ == b.finite_);
  }
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.infinite_ || b.infinite_) return a.infinite_ <=> b.infinite_;
    return a.finite_ <=> b.finite_;
  }

  Value operator+(const Rational& r) const { return infinite_ ? *this : Value(finite_ + r); }

  [[nodiscard]] std::string str() const { return infinite_ ? "inf" : finite_.str(); }
  friend std::ostream& operator<<(std::ostream& os, const Value& v) { return os << v.str(); }

 private:
  Rational finite_;
  bool infinite_ = false;
};

}  // namespace qrobust

template <>
struct std::hash<qrobust::Rational> {
  std::size_t operator()(const qrobust::Rational& r) const noexcept {
    return std::hash<qrobust::Int>{}(r.num()) * 1000003u ^ std::hash<qrobust::Int>{}(r.den());
  }
};
