#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

namespace fw {

using Rational = mpq_class;

/// Exact complex number a + b i with a, b rational. Both parts are kept in lowest
/// terms so that equality is structural.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long re) : re_(re) {}  // NOLINT: implicit by design of a scalar type
  GaussianRational(int re) : re_(re) {}   // NOLINT
  GaussianRational(Rational re) : re_(std::move(re)) { re_.canonicalize(); }  // NOLINT
  GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static GaussianRational i() { return {Rational(0), Rational(1)}; }
  static GaussianRational fraction(long num, long den) {
    if (den == 0) throw std::domain_error("zero denominator");
    return Rational(num, den);
  }

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational m = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(m);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) {
    Rational den = o.re_ * o.re_ + o.im_ * o.im_;
    if (sgn(den) == 0) throw std::domain_error("GaussianRational: division by zero");
    Rational r = (re_ * o.re_ + im_ * o.im_) / den;
    Rational m = (im_ * o.re_ - re_ * o.im_) / den;
    re_ = std::move(r);
    im_ = std::move(m);
    return *this;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {Rational(-a.re_), Rational(-a.im_)}; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  /// Lexicographic (re, im). Only used for deterministic ordering, not as a field order.
  friend bool lex_less(const GaussianRational& a, const GaussianRational& b) {
    if (a.re_ != b.re_) return a.re_ < b.re_;
    return a.im_ < b.im_;
  }

  friend GaussianRational conj(const GaussianRational& a) { return {a.re_, Rational(-a.im_)}; }

  /// "3/4", "-i", "(1/2+3i)" style; the exact form the operator grammar reads back.
  std::string to_string() const;
  static GaussianRational parse(std::string_view text);

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) { return os << z.to_string(); }

  std::size_t hash() const;

 private:
  Rational re_{0};
  Rational im_{0};
};

/// Reads "1/50", "-3", "0.02", "1e-3" into an exact rational.
Rational parse_rational(std::string_view text);

}  // namespace fw

template <>
struct std::hash<fw::GaussianRational> {
  std::size_t operator()(const fw::GaussianRational& z) const { return z.hash(); }
};

namespace Eigen {

template <>
struct NumTraits<fw::GaussianRational> : GenericNumTraits<fw::GaussianRational> {
  using Real = fw::GaussianRational;
  using NonInteger = fw::GaussianRational;
  using Nested = fw::GaussianRational;
  using Literal = fw::GaussianRational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 16,
    MulCost = 64
  };
  static inline int digits10() { return 0; }
  static inline Real epsilon() { return fw::GaussianRational(0); }
  static inline Real dummy_precision() { return fw::GaussianRational(0); }
};

}  // namespace Eigen
