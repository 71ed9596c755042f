#include <cctype>
#include <sstream>

#include "fw/operator_algebra.hpp"

namespace fw {

namespace {

constexpr std::array<std::string_view, kConstantCount> kConstantNames{"ħ", "e", "m", "c"};
constexpr std::array<std::string_view, kConstantCount> kConstantLatex{"\\hbar", "e", "m", "c"};

bool is_negative(const GaussianRational& z) {
  return sgn(z.real()) < 0 || (sgn(z.real()) == 0 && sgn(z.imag()) < 0);
}

std::string matrix_name(Gamma g, Spinor spinor, RenderFormat format) {
  if (format == RenderFormat::latex) {
    static constexpr std::array<std::string_view, kGammaCount> latex{
        "",         "\\beta",          "\\alpha_x",       "\\alpha_y",       "\\alpha_z",       "\\Sigma_x",
        "\\Sigma_y", "\\Sigma_z",      "\\beta\\alpha_x", "\\beta\\alpha_y", "\\beta\\alpha_z", "\\beta\\Sigma_x",
        "\\beta\\Sigma_y", "\\beta\\Sigma_z", "\\gamma_5", "\\beta\\gamma_5"};
    if (spinor == Spinor::two && g != Gamma::I) return std::string("\\sigma_") + axis_name(static_cast<Axis>(static_cast<int>(g) - 5));
    return std::string(latex[static_cast<int>(g)]);
  }
  if (spinor == Spinor::two && g != Gamma::I) return std::string("σ_") + axis_name(static_cast<Axis>(static_cast<int>(g) - 5));
  return std::string(gamma_name(g));
}

std::string latex_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  std::string sign = sgn(q) < 0 ? "-" : "";
  return sign + "\\frac{" + mpz_class(abs(q.get_num())).get_str() + "}{" + q.get_den().get_str() + "}";
}

std::string latex_scalar(const GaussianRational& z) {
  if (z.is_real()) return latex_rational(z.real());
  std::string im;
  if (z.imag() == 1) {
    im = "i";
  } else if (z.imag() == -1) {
    im = "-i";
  } else {
    im = latex_rational(z.imag()) + " i";
  }
  if (sgn(z.real()) == 0) return im;
  return "\\left(" + latex_rational(z.real()) + (im.front() == '-' ? " " : " + ") + im + "\\right)";
}

std::vector<std::string> term_tokens(const ConstantMonomial& k, Gamma matrix, const Word& factors, Spinor spinor,
                                     RenderFormat format) {
  std::vector<std::string> tokens;
  if (k.coefficient != GaussianRational(1)) {
    tokens.push_back(format == RenderFormat::latex ? latex_scalar(k.coefficient) : k.coefficient.to_string());
  }
  for (int c = 0; c < kConstantCount; ++c) {
    const int p = k.exponents[c];
    if (p == 0) continue;
    if (format == RenderFormat::latex) {
      std::string t(kConstantLatex[c]);
      if (p != 1) t += "^{" + std::to_string(p) + "}";
      tokens.push_back(t);
    } else {
      std::string t(kConstantNames[c]);
      if (p != 1) t += "^" + std::to_string(p);
      tokens.push_back(t);
    }
  }
  if (matrix != Gamma::I) tokens.push_back(matrix_name(matrix, spinor, format));
  for (const FactorSymbol& f : factors) tokens.push_back(render_factor(f, format));
  if (tokens.empty()) tokens.emplace_back("1");
  return tokens;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

void append_signed(std::string& out, bool negative, const std::string& body) {
  if (out.empty()) {
    out = negative ? "- " + body : body;
  } else {
    out += negative ? " - " : " + ";
    out += body;
  }
}

std::string superscript(int n) {
  static constexpr std::array<std::string_view, 10> digits{"⁰", "¹", "²", "³", "⁴", "⁵", "⁶", "⁷", "⁸", "⁹"};
  if (n == 1) return "";
  std::string s;
  for (char ch : std::to_string(n)) s += digits[ch - '0'];
  return s;
}

}  // namespace

std::string render_factor(const FactorSymbol& f, RenderFormat format) {
  const bool latex = format == RenderFormat::latex;
  if (f.is_momentum()) return std::string(latex ? "\\Pi_" : "Π_") + axis_name(f.axis);
  std::string out;
  for (int a = 0; a < 3; ++a) {
    for (int n = 0; n < f.derivative[a]; ++n) out += std::string(latex ? "\\partial_" : "∂_") + "xyz"[a];
  }
  if (latex && !out.empty()) out += " ";
  switch (f.base) {
    case FieldBase::V:
      return out + "V";
    case FieldBase::E:
      return out + "E_" + axis_name(f.axis);
    case FieldBase::B:
      return out + "B_" + axis_name(f.axis);
  }
  return out;
}

std::string render_term(const OperatorTerm& t, Spinor spinor, RenderFormat format) {
  return join(term_tokens(t.constant, t.matrix, t.factors, spinor, format), format == RenderFormat::latex ? "\\," : " ");
}

std::string render(const OperatorSum& x, RenderFormat format) {
  const bool latex = format == RenderFormat::latex;
  const std::string_view sep = latex ? "\\," : " ";
  std::string out;
  for (OperatorTerm t : x.term_list()) {
    const bool negative = is_negative(t.constant.coefficient);
    if (negative) t.constant.coefficient = -t.constant.coefficient;
    append_signed(out, negative, join(term_tokens(t.constant, t.matrix, t.factors, x.spinor(), format), sep));
  }
  for (const EvenSquare& sq : x.squares()) {
    ConstantMonomial k = sq.constant;
    const bool negative = is_negative(k.coefficient);
    if (negative) k.coefficient = -k.coefficient;
    std::vector<std::string> tokens;
    if (k.coefficient != GaussianRational(1) || k.exponents != std::array<int, kConstantCount>{} ||
        sq.matrix != Gamma::I) {
      tokens = term_tokens(k, sq.matrix, {}, x.spinor(), format);
    }
    tokens.push_back(latex ? "\\left[" : "[");
    tokens.push_back(render(sq.inner, format));
    tokens.push_back(latex ? "\\right]^{2}" : "]^2");
    append_signed(out, negative, join(tokens, sep));
  }
  return out.empty() ? "0" : out;
}

std::string render_constant_pretty(const ConstantMonomial& k) {
  GaussianRational z = k.coefficient;
  std::string sign;
  if (is_negative(z)) {
    sign = "-";
    z = -z;
  }
  if (!z.is_real()) return sign + z.to_string() + render_constant_pretty(ConstantMonomial{GaussianRational(1), k.exponents});
  static constexpr std::array<int, kConstantCount> order{1, 0, 2, 3};  // e ħ m c
  std::string num;
  std::string den;
  const Rational& q = z.real();
  if (q.get_num() != 1) num += q.get_num().get_str();
  if (q.get_den() != 1) den += q.get_den().get_str();
  for (int c : order) {
    const int p = k.exponents[c];
    if (p > 0) num += std::string(kConstantNames[c]) + superscript(p);
    if (p < 0) den += std::string(kConstantNames[c]) + superscript(-p);
  }
  if (num.empty()) num = "1";
  if (den.empty()) return sign + num;
  return sign + "(" + num + "/" + den + ")";
}

// ----- parser ---------------------------------------------------------------------

namespace {

class Parser {
 public:
  Parser(std::string_view text, OperatorFlags flags) : flags_(flags) {
    std::istringstream in{std::string(text)};
    std::string tok;
    while (in >> tok) tokens_.push_back(tok);
    for (const std::string& t : tokens_) {
      if (t.rfind("σ_", 0) == 0 || t.rfind("\\sigma", 0) == 0) spinor_ = Spinor::two;
    }
  }

  OperatorSum parse_all() {
    if (tokens_.size() == 1 && tokens_[0] == "0") return OperatorSum(flags_, spinor_);
    OperatorSum out = parse_sum();
    if (pos_ != tokens_.size()) throw ParseError("unexpected token '" + tokens_[pos_] + "'");
    return out;
  }

 private:
  OperatorSum parse_sum() {
    OperatorSum out(flags_, spinor_);
    bool first = true;
    while (pos_ < tokens_.size() && tokens_[pos_] != "]^2") {
      bool negative = false;
      if (tokens_[pos_] == "+" || tokens_[pos_] == "-") {
        negative = tokens_[pos_] == "-";
        ++pos_;
      } else if (!first) {
        throw ParseError("expected '+' or '-' before '" + tokens_[pos_] + "'");
      }
      OperatorSum item = parse_item();
      out += negative ? -item : item;
      first = false;
    }
    if (first) throw ParseError("empty operator expression");
    return out;
  }

  OperatorSum parse_item() {
    std::vector<std::string> head;
    while (pos_ < tokens_.size() && tokens_[pos_] != "+" && tokens_[pos_] != "-" && tokens_[pos_] != "[" &&
           tokens_[pos_] != "]^2") {
      head.push_back(tokens_[pos_++]);
    }
    if (pos_ < tokens_.size() && tokens_[pos_] == "[") {
      ++pos_;
      OperatorSum inner = parse_sum();
      if (pos_ >= tokens_.size() || tokens_[pos_] != "]^2") throw ParseError("missing ']^2'");
      ++pos_;
      ConstantMonomial k;
      Gamma g = Gamma::I;
      Word factors;
      parse_term_tokens(head, k, g, factors);
      if (!factors.empty()) throw ParseError("square prefactor may not contain operator factors");
      OperatorSum out(flags_, spinor_);
      out.add_square(k, g, inner);
      return out;
    }
    if (head.empty()) throw ParseError("empty term");
    ConstantMonomial k;
    Gamma g = Gamma::I;
    Word factors;
    parse_term_tokens(head, k, g, factors);
    return OperatorSum::term(k, g, factors, flags_, spinor_);
  }

  void parse_term_tokens(const std::vector<std::string>& tokens, ConstantMonomial& k, Gamma& g, Word& factors) {
    bool matrix_seen = false;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string& t = tokens[i];
      if (t == "1") continue;
      if (parse_constant(t, k)) continue;
      if (auto m = parse_matrix(t)) {
        if (matrix_seen) throw ParseError("two matrix labels in one term");
        matrix_seen = true;
        g = *m;
        continue;
      }
      if (auto f = parse_factor(t)) {
        factors.push_back(*f);
        continue;
      }
      if (i == 0) {
        try {
          k.coefficient *= GaussianRational::parse(t);
          continue;
        } catch (const std::invalid_argument&) {
        }
      }
      throw ParseError("unknown token '" + t + "'");
    }
  }

  static bool parse_constant(const std::string& t, ConstantMonomial& k) {
    std::string name = t;
    int power = 1;
    if (auto caret = t.find('^'); caret != std::string::npos) {
      name = t.substr(0, caret);
      try {
        std::size_t used = 0;
        power = std::stoi(t.substr(caret + 1), &used);
        if (used != t.size() - caret - 1) return false;
      } catch (const std::exception&) {
        return false;
      }
    }
    int which = -1;
    if (name == "ħ" || name == "hbar") which = 0;
    if (name == "e") which = 1;
    if (name == "m") which = 2;
    if (name == "c") which = 3;
    if (which < 0) return false;
    k.exponents[which] += power;
    return true;
  }

  std::optional<Gamma> parse_matrix(const std::string& t) const {
    for (int g = 1; g < kGammaCount; ++g) {
      if (t == gamma_name(static_cast<Gamma>(g))) {
        if (spinor_ == Spinor::two) throw ParseError("Dirac matrix '" + t + "' in a two-component expression");
        return static_cast<Gamma>(g);
      }
    }
    if (t.rfind("σ_", 0) == 0 && t.size() == std::string("σ_").size() + 1) {
      if (auto a = axis_of(t.back())) return sigma_label(*a);
    }
    return std::nullopt;
  }

  static std::optional<Axis> axis_of(char ch) {
    if (ch == 'x') return Axis::x;
    if (ch == 'y') return Axis::y;
    if (ch == 'z') return Axis::z;
    return std::nullopt;
  }

  static std::optional<FactorSymbol> parse_factor(const std::string& t) {
    if ((t.rfind("Π_", 0) == 0 && t.size() == std::string("Π_").size() + 1) ||
        (t.rfind("Pi_", 0) == 0 && t.size() == 4)) {
      if (auto a = axis_of(t.back())) return FactorSymbol::pi(*a);
      return std::nullopt;
    }
    std::string_view rest = t;
    MultiIndex d{0, 0, 0};
    const std::string_view partial = "∂_";
    while (rest.substr(0, partial.size()) == partial && rest.size() > partial.size()) {
      auto a = axis_of(rest[partial.size()]);
      if (!a) return std::nullopt;
      ++d[index(*a)];
      rest.remove_prefix(partial.size() + 1);
    }
    if (rest == "V") {
      if (d != MultiIndex{0, 0, 0}) throw ParseError("write derivatives of V through E");
      return FactorSymbol::potential();
    }
    if (rest.size() == 3 && rest[1] == '_' && (rest[0] == 'E' || rest[0] == 'B')) {
      auto a = axis_of(rest[2]);
      if (!a) return std::nullopt;
      return rest[0] == 'E' ? FactorSymbol::electric(*a, d) : FactorSymbol::magnetic(*a, d);
    }
    return std::nullopt;
  }

  std::vector<std::string> tokens_;
  std::size_t pos_ = 0;
  OperatorFlags flags_;
  Spinor spinor_ = Spinor::four;
};

}  // namespace

OperatorSum parse_operator_sum(std::string_view text, OperatorFlags flags) {
  try {
    return Parser(text, flags).parse_all();
  } catch (const DerivativeOverflow& e) {
    throw ParseError(e.what());
  }
}

}  // namespace fw
