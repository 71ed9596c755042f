#include "fw/gaussian_rational.hpp"

#include <cctype>

namespace fw {

namespace {

std::string rational_text(const Rational& q) { return q.get_str(); }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Imaginary-part text: "i", "-i", "3/4i".
Rational parse_imag(std::string_view s) {
  s = trim(s);
  if (s.empty() || s.back() != 'i') throw std::invalid_argument("expected imaginary part: " + std::string(s));
  s.remove_suffix(1);
  s = trim(s);
  if (s.empty() || s == "+") return Rational(1);
  if (s == "-") return Rational(-1);
  return parse_rational(s);
}

}  // namespace

std::string GaussianRational::to_string() const {
  const bool has_re = sgn(re_) != 0;
  const bool has_im = sgn(im_) != 0;
  if (!has_im) return rational_text(re_);
  std::string imag;
  if (im_ == 1) {
    imag = "i";
  } else if (im_ == -1) {
    imag = "-i";
  } else {
    imag = rational_text(im_) + "i";
  }
  if (!has_re) return imag;
  std::string out = "(" + rational_text(re_);
  if (imag.front() != '-') out += "+";
  out += imag + ")";
  return out;
}

GaussianRational GaussianRational::parse(std::string_view text) {
  std::string_view s = trim(text);
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = trim(s.substr(1, s.size() - 2));
  if (s.empty()) throw std::invalid_argument("empty scalar");
  if (s.back() != 'i') return parse_rational(s);
  // Split at the last sign that is not the leading one.
  for (std::size_t k = s.size() - 1; k > 0; --k) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      return {parse_rational(s.substr(0, k)), parse_imag(s.substr(k))};
    }
  }
  return {Rational(0), parse_imag(s)};
}

std::size_t GaussianRational::hash() const {
  std::hash<std::string> h;
  return h(re_.get_str()) * 31u + h(im_.get_str());
}

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view num = trim(s.substr(0, slash));
    if (!num.empty() && num.front() == '+') num.remove_prefix(1);
    const std::string den(trim(s.substr(slash + 1)));
    Rational q;
    try {
      q = Rational(std::string(num) + "/" + den);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("not a fraction: " + std::string(s));
    }
    if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: " + std::string(s));
    q.canonicalize();
    return q;
  }
  bool negative = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    negative = s[pos] == '-';
    ++pos;
  }
  mpz_class digits = 0;
  long scale = 0;
  bool any_digit = false;
  bool after_point = false;
  for (; pos < s.size(); ++pos) {
    const char ch = s[pos];
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      digits = digits * 10 + (ch - '0');
      if (after_point) --scale;
      any_digit = true;
    } else if (ch == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw std::invalid_argument("not a number: " + std::string(s));
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw std::invalid_argument("not a number: " + std::string(s));
    ++pos;
    const std::string exponent(s.substr(pos));
    std::size_t used = 0;
    long e = 0;
    try {
      e = std::stol(exponent, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad exponent: " + std::string(s));
    }
    if (used != exponent.size()) throw std::invalid_argument("bad exponent: " + std::string(s));
    scale += e;
  }
  mpz_class ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational q = scale >= 0 ? Rational(digits * ten_pow) : Rational(digits, ten_pow);
  q.canonicalize();
  return negative ? Rational(-q) : q;
}

}  // namespace fw
