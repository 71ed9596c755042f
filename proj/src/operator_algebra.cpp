#include "fw/operator_algebra.hpp"

#include <algorithm>

namespace fw {

namespace {

struct FieldTerm {
  GaussianRational coefficient;
  FactorSymbol field;
};

MultiIndex plus_axis(MultiIndex d, int axis) {
  ++d[axis];
  return d;
}

void check_order(const MultiIndex& d) {
  if (d[0] + d[1] + d[2] > kMaxDerivativeOrder) {
    throw DerivativeOverflow("field derivative of order " + std::to_string(d[0] + d[1] + d[2]) +
                             " exceeds the supported maximum of " + std::to_string(kMaxDerivativeOrder));
  }
}

// Rewrites a field symbol into the canonical basis:
//  - ∂^d V never survives (∂_i V = −E_i is applied when differentiating);
//  - with curl_free_E, ∂^d E_j is keyed by the total multi-index d + e_j, written
//    with the smallest axis as the E component;
//  - ∇·B = 0 eliminates every derivative of B_z that contains ∂_z;
//  - with uniform_B, derivatives of B vanish.
std::vector<FieldTerm> canonical_field(const FactorSymbol& f, OperatorFlags flags) {
  if (f.is_momentum()) return {{GaussianRational(1), f}};
  switch (f.base) {
    case FieldBase::V:
      if (f.derivative_order() != 0) throw std::logic_error("derivative of V must be expressed through E");
      return {{GaussianRational(1), f}};
    case FieldBase::E: {
      check_order(f.derivative);
      if (!flags.curl_free_E || f.derivative_order() == 0) return {{GaussianRational(1), f}};
      MultiIndex total = plus_axis(f.derivative, index(f.axis));
      int lead = 0;
      while (total[lead] == 0) ++lead;
      --total[lead];
      return {{GaussianRational(1), FactorSymbol::electric(static_cast<Axis>(lead), total)}};
    }
    case FieldBase::B: {
      check_order(f.derivative);
      if (f.derivative_order() == 0) return {{GaussianRational(1), f}};
      if (flags.uniform_B) return {};
      if (f.axis != Axis::z || f.derivative[2] == 0) return {{GaussianRational(1), f}};
      // ∂^d ∂_z B_z = −∂^d ∂_x B_x − ∂^d ∂_y B_y
      MultiIndex rest = f.derivative;
      --rest[2];
      return {{GaussianRational(-1), FactorSymbol::magnetic(Axis::x, plus_axis(rest, 0))},
              {GaussianRational(-1), FactorSymbol::magnetic(Axis::y, plus_axis(rest, 1))}};
    }
  }
  return {};
}

// ∂_axis f, canonicalized.
std::vector<FieldTerm> differentiate(const FactorSymbol& f, int axis, OperatorFlags flags) {
  if (f.base == FieldBase::V) {
    std::vector<FieldTerm> out;
    for (auto& t : canonical_field(FactorSymbol::electric(static_cast<Axis>(axis)), flags)) {
      out.push_back({-t.coefficient, t.field});
    }
    return out;
  }
  FactorSymbol g = f;
  g.derivative = plus_axis(f.derivative, axis);
  return canonical_field(g, flags);
}

bool out_of_order(const FactorSymbol& a, const FactorSymbol& b) { return b < a; }

struct RawTerm {
  GaussianRational coefficient;
  int hbar = 0;
  int e = 0;
  Word word;
};

}  // namespace

/// Normal orders words: fields left (sorted), momenta right (sorted by axis), using
///   Π_i f = f Π_i − iħ ∂_i f,   Π_i Π_j = Π_j Π_i − iħ e ε_ijk B_k.
/// Results are cached per instance; one instance lives for one product.
class Canonicalizer {
 public:
  explicit Canonicalizer(OperatorFlags flags) : flags_(flags) {}

  const std::vector<RawTerm>& normal_order(const Word& word) {
    if (auto it = cache_.find(word); it != cache_.end()) return it->second;
    std::vector<RawTerm> result = compute(word);
    return cache_.emplace(word, std::move(result)).first->second;
  }

  // Expands each field into canonical form; the product of sums is distributed.
  std::vector<RawTerm> canonical_fields(const Word& word) const {
    std::vector<RawTerm> partial{{GaussianRational(1), 0, 0, {}}};
    for (const FactorSymbol& f : word) {
      std::vector<RawTerm> next;
      for (const FieldTerm& ft : canonical_field(f, flags_)) {
        for (const RawTerm& p : partial) {
          RawTerm t = p;
          t.coefficient *= ft.coefficient;
          t.word.push_back(ft.field);
          next.push_back(std::move(t));
        }
      }
      partial = std::move(next);
    }
    return partial;
  }

  OperatorFlags flags() const { return flags_; }

 private:
  std::vector<RawTerm> compute(const Word& word) {
    std::map<std::tuple<int, int, Word>, GaussianRational> acc;
    std::vector<RawTerm> stack{{GaussianRational(1), 0, 0, word}};
    const GaussianRational minus_i = -GaussianRational::i();
    while (!stack.empty()) {
      RawTerm t = std::move(stack.back());
      stack.pop_back();
      if (t.coefficient.is_zero()) continue;
      std::size_t k = 0;
      while (k + 1 < t.word.size() && !out_of_order(t.word[k], t.word[k + 1])) ++k;
      if (k + 1 >= t.word.size()) {
        acc[{t.hbar, t.e, t.word}] += t.coefficient;
        continue;
      }
      const FactorSymbol a = t.word[k];
      const FactorSymbol b = t.word[k + 1];
      if (a.is_momentum() && !b.is_momentum()) {
        for (const FieldTerm& d : differentiate(b, index(a.axis), flags_)) {
          RawTerm extra{t.coefficient * minus_i * d.coefficient, t.hbar + 1, t.e, {}};
          extra.word.reserve(t.word.size() - 1);
          extra.word.insert(extra.word.end(), t.word.begin(), t.word.begin() + static_cast<long>(k));
          extra.word.push_back(d.field);
          extra.word.insert(extra.word.end(), t.word.begin() + static_cast<long>(k) + 2, t.word.end());
          stack.push_back(std::move(extra));
        }
      } else if (a.is_momentum() && b.is_momentum()) {
        const int i = index(a.axis);
        const int j = index(b.axis);
        const int l = 3 - i - j;
        RawTerm extra{t.coefficient * minus_i * GaussianRational(levi_civita(i, j, l)), t.hbar + 1, t.e + 1, {}};
        extra.word.insert(extra.word.end(), t.word.begin(), t.word.begin() + static_cast<long>(k));
        extra.word.push_back(FactorSymbol::magnetic(static_cast<Axis>(l)));
        extra.word.insert(extra.word.end(), t.word.begin() + static_cast<long>(k) + 2, t.word.end());
        stack.push_back(std::move(extra));
      }
      std::swap(t.word[k], t.word[k + 1]);
      stack.push_back(std::move(t));
    }
    std::vector<RawTerm> out;
    for (auto& [key, coefficient] : acc) {
      if (coefficient.is_zero()) continue;
      out.push_back({coefficient, std::get<0>(key), std::get<1>(key), std::get<2>(key)});
    }
    return out;
  }

  OperatorFlags flags_;
  std::map<Word, std::vector<RawTerm>> cache_;
};

namespace {

void check_spinor(Gamma g, Spinor s) {
  if (s == Spinor::two && g != Gamma::I && g != Gamma::SigmaX && g != Gamma::SigmaY && g != Gamma::SigmaZ) {
    throw std::invalid_argument("two-component operator with non-Pauli matrix label");
  }
}

void record_drop(std::vector<DroppedTerms>* dropped, int degree) {
  if (dropped == nullptr) return;
  for (auto& d : *dropped) {
    if (d.c_degree == degree) {
      ++d.count;
      return;
    }
  }
  dropped->push_back({degree, 1});
}

}  // namespace

// ----- OperatorSum ------------------------------------------------------------

void OperatorSum::add_raw(const TermKey& key, const GaussianRational& coefficient) {
  if (coefficient.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(key, coefficient);
  if (!inserted) {
    it->second += coefficient;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

OperatorSum OperatorSum::term(const ConstantMonomial& constant, Gamma matrix, const Word& factors,
                              OperatorFlags flags, Spinor spinor) {
  check_spinor(matrix, spinor);
  OperatorSum out(flags, spinor);
  Canonicalizer canon(flags);
  for (const RawTerm& raw : canon.canonical_fields(factors)) {
    for (const RawTerm& n : canon.normal_order(raw.word)) {
      TermKey key{constant.exponents, matrix, n.word};
      key.exponents[static_cast<int>(Constant::hbar)] += n.hbar;
      key.exponents[static_cast<int>(Constant::e)] += n.e;
      out.add_raw(key, constant.coefficient * raw.coefficient * n.coefficient);
    }
  }
  return out;
}

bool OperatorSum::is_zero() const {
  if (!terms_.empty()) return false;
  return std::all_of(squares_.begin(), squares_.end(), [](const EvenSquare& s) {
    return s.constant.coefficient.is_zero() || s.inner.is_zero();
  });
}

std::vector<OperatorTerm> OperatorSum::term_list() const {
  std::vector<OperatorTerm> out;
  out.reserve(terms_.size());
  for (const auto& [key, coefficient] : terms_) {
    out.push_back({ConstantMonomial{coefficient, key.exponents}, key.matrix, key.factors});
  }
  return out;
}

std::optional<int> OperatorSum::max_c_degree() const {
  const OperatorSum flat = squares_.empty() ? *this : expanded();
  std::optional<int> best;
  for (const auto& [key, _] : flat.terms_) {
    const int d = key.exponents[static_cast<int>(Constant::c)];
    if (!best || d > *best) best = d;
  }
  return best;
}

std::optional<int> OperatorSum::min_c_degree() const {
  const OperatorSum flat = squares_.empty() ? *this : expanded();
  std::optional<int> best;
  for (const auto& [key, _] : flat.terms_) {
    const int d = key.exponents[static_cast<int>(Constant::c)];
    if (!best || d < *best) best = d;
  }
  return best;
}

OperatorSum& OperatorSum::operator+=(const OperatorSum& other) {
  if (terms_.empty() && squares_.empty()) spinor_ = other.spinor_;
  if (other.spinor_ != spinor_ && !other.is_zero() && !is_zero()) {
    throw std::invalid_argument("cannot add four- and two-component operators");
  }
  flags_ = flags_ | other.flags_;
  for (const auto& [key, coefficient] : other.terms_) add_raw(key, coefficient);
  for (const auto& sq : other.squares_) add_square(sq.constant, sq.matrix, sq.inner);
  return *this;
}

OperatorSum& OperatorSum::operator-=(const OperatorSum& other) { return *this += -other; }

OperatorSum OperatorSum::scaled(const ConstantMonomial& k) const {
  OperatorSum out(flags_, spinor_);
  if (k.coefficient.is_zero()) return out;
  for (const auto& [key, coefficient] : terms_) {
    TermKey nk = key;
    for (int i = 0; i < kConstantCount; ++i) nk.exponents[i] += k.exponents[i];
    out.add_raw(nk, coefficient * k.coefficient);
  }
  for (const auto& sq : squares_) out.squares_.push_back({sq.constant * k, sq.matrix, sq.inner});
  return out;
}

OperatorSum OperatorSum::times_matrix(Gamma g) const {
  OperatorSum out(flags_, spinor_);
  for (const auto& [key, coefficient] : terms_) {
    const GammaProduct p = multiply(g, key.matrix);
    check_spinor(p.label, spinor_);
    TermKey nk = key;
    nk.matrix = p.label;
    out.add_raw(nk, coefficient * p.phase);
  }
  for (const auto& sq : squares_) {
    const GammaProduct p = multiply(g, sq.matrix);
    ConstantMonomial k = sq.constant;
    k.coefficient *= p.phase;
    out.add_square(k, p.label, sq.inner);
  }
  return out;
}

OperatorSum& OperatorSum::add_square(const ConstantMonomial& constant, Gamma matrix, const OperatorSum& inner) {
  if (constant.coefficient.is_zero() || inner.is_zero()) return *this;
  for (auto it = squares_.begin(); it != squares_.end(); ++it) {
    if (it->matrix == matrix && it->constant.exponents == constant.exponents && it->inner == inner) {
      it->constant.coefficient += constant.coefficient;
      if (it->constant.coefficient.is_zero()) squares_.erase(it);
      return *this;
    }
  }
  squares_.push_back({constant, matrix, inner});
  return *this;
}

OperatorSum OperatorSum::expanded() const {
  OperatorSum out(flags_, spinor_);
  out.terms_ = terms_;
  for (const auto& sq : squares_) {
    const OperatorSum inner = sq.inner.expanded();
    out += multiply(inner, inner).times_matrix(sq.matrix).scaled(sq.constant);
  }
  return out;
}

OperatorSum OperatorSum::truncated(int min_degree, std::vector<DroppedTerms>* dropped) const {
  OperatorSum flat = squares_.empty() ? *this : expanded();
  OperatorSum out(flags_, spinor_);
  for (const auto& [key, coefficient] : flat.terms_) {
    const int d = key.exponents[static_cast<int>(Constant::c)];
    if (d >= min_degree) {
      out.add_raw(key, coefficient);
    } else {
      record_drop(dropped, d);
    }
  }
  return out;
}

OperatorSum OperatorSum::without_fields(FieldBase base) const {
  OperatorSum flat = squares_.empty() ? *this : expanded();
  OperatorSum out(flags_, spinor_);
  for (const auto& [key, coefficient] : flat.terms_) {
    const bool has = std::any_of(key.factors.begin(), key.factors.end(),
                                 [&](const FactorSymbol& f) { return !f.is_momentum() && f.base == base; });
    if (!has) out.add_raw(key, coefficient);
  }
  return out;
}

OperatorSum OperatorSum::with_flags(OperatorFlags flags) const {
  OperatorSum out(flags, spinor_);
  for (const auto& [key, coefficient] : terms_) out += term(ConstantMonomial{coefficient, key.exponents}, key.matrix, key.factors, flags, spinor_);
  for (const auto& sq : squares_) out.add_square(sq.constant, sq.matrix, sq.inner.with_flags(flags));
  return out;
}

bool operator==(const OperatorSum& a, const OperatorSum& b) {
  if (a.spinor_ != b.spinor_ && !(a.is_zero() && b.is_zero())) return false;
  if (a.terms_ != b.terms_) return false;
  if (a.squares_.size() != b.squares_.size()) return false;
  for (const auto& sq : a.squares_) {
    if (std::find(b.squares_.begin(), b.squares_.end(), sq) == b.squares_.end()) return false;
  }
  return true;
}

// ----- products -----------------------------------------------------------------

OperatorSum multiply(const OperatorSum& x_in, const OperatorSum& y_in, std::optional<Truncation> truncation) {
  const OperatorSum x = x_in.squares().empty() ? x_in : x_in.expanded();
  const OperatorSum y = y_in.squares().empty() ? y_in : y_in.expanded();
  if (x.spinor() != y.spinor() && !x.is_zero() && !y.is_zero()) {
    throw std::invalid_argument("cannot multiply four- and two-component operators");
  }
  const OperatorFlags flags = x.flags() | y.flags();
  const Spinor spinor = x.is_zero() ? y.spinor() : x.spinor();
  OperatorSum out(flags, spinor);
  Canonicalizer canon(flags);
  Word joined;
  for (const auto& [kx, cx] : x.terms()) {
    for (const auto& [ky, cy] : y.terms()) {
      std::array<int, kConstantCount> exps{};
      for (int i = 0; i < kConstantCount; ++i) exps[i] = kx.exponents[i] + ky.exponents[i];
      const int degree = exps[static_cast<int>(Constant::c)];
      if (truncation && degree < truncation->min_c_degree) {
        record_drop(truncation->dropped, degree);
        continue;
      }
      const GammaProduct p = multiply(kx.matrix, ky.matrix);
      check_spinor(p.label, spinor);
      const GaussianRational base = cx * cy * p.phase;
      joined.assign(kx.factors.begin(), kx.factors.end());
      joined.insert(joined.end(), ky.factors.begin(), ky.factors.end());
      for (const RawTerm& n : canon.normal_order(joined)) {
        TermKey key{exps, p.label, n.word};
        key.exponents[static_cast<int>(Constant::hbar)] += n.hbar;
        key.exponents[static_cast<int>(Constant::e)] += n.e;
        out.add_raw(key, base * n.coefficient);
      }
    }
  }
  return out;
}

OperatorSum commutator(const OperatorSum& x, const OperatorSum& y, std::optional<Truncation> truncation) {
  return multiply(x, y, truncation) - multiply(y, x, truncation);
}

OperatorSum adjoint(const OperatorSum& x_in) {
  const OperatorSum x = x_in.squares().empty() ? x_in : x_in.expanded();
  OperatorSum out(x.flags(), x.spinor());
  for (const auto& [key, coefficient] : x.terms()) {
    Word reversed(key.factors.rbegin(), key.factors.rend());
    ConstantMonomial k{conj(coefficient) * GaussianRational(adjoint_sign(key.matrix)), key.exponents};
    out += OperatorSum::term(k, key.matrix, reversed, x.flags(), x.spinor());
  }
  return out;
}

EvenOddParts even_odd_split(const OperatorSum& x) {
  if (x.spinor() == Spinor::two) return {x, OperatorSum(x.flags(), Spinor::two)};
  return {x.filter_matrix([](Gamma g) { return is_even(g); }),
          x.filter_matrix([](Gamma g) { return !is_even(g); })};
}

// ----- building blocks ----------------------------------------------------------

ConstantMonomial bohr_magneton() { return ConstantMonomial::make(GaussianRational::fraction(1, 2), 1, 1, -1, 0); }

OperatorSum kinetic_odd(OperatorFlags flags) {
  return alpha_dot_Pi(flags).scaled(ConstantMonomial::make(1, 0, 0, 0, 1));
}

OperatorSum potential_energy(OperatorFlags flags) {
  return OperatorSum::term(ConstantMonomial::make(-1, 0, 1, 0, 0), Gamma::I, {FactorSymbol::potential()}, flags);
}

OperatorSum dirac_hamiltonian(OperatorFlags flags) {
  OperatorSum h = OperatorSum::term(ConstantMonomial::make(1, 0, 0, 1, 2), Gamma::Beta, {}, flags);
  h += potential_energy(flags);
  h += kinetic_odd(flags);
  return h;
}

OperatorSum square_even(const OperatorSum& odd, const ConstantMonomial& divisor) {
  return multiply(odd, odd).scaled(divisor.inverse());
}

OperatorSum pi_squared(OperatorFlags flags) {
  OperatorSum out(flags);
  for (Axis a : kAxes) out += OperatorSum::term({}, Gamma::I, {FactorSymbol::pi(a), FactorSymbol::pi(a)}, flags);
  return out;
}

OperatorSum spin_dot_B(OperatorFlags flags) {
  OperatorSum out(flags);
  for (Axis a : kAxes) out += OperatorSum::term({}, sigma_label(a), {FactorSymbol::magnetic(a)}, flags);
  return out;
}

OperatorSum alpha_dot_E(OperatorFlags flags) {
  OperatorSum out(flags);
  for (Axis a : kAxes) out += OperatorSum::term({}, alpha_label(a), {FactorSymbol::electric(a)}, flags);
  return out;
}

OperatorSum alpha_dot_Pi(OperatorFlags flags) {
  OperatorSum out(flags);
  for (Axis a : kAxes) out += OperatorSum::term({}, alpha_label(a), {FactorSymbol::pi(a)}, flags);
  return out;
}

OperatorSum divergence_E(OperatorFlags flags) {
  OperatorSum out(flags);
  for (Axis a : kAxes) {
    MultiIndex d{0, 0, 0};
    d[index(a)] = 1;
    out += OperatorSum::term({}, Gamma::I, {FactorSymbol::electric(a, d)}, flags);
  }
  return out;
}

OperatorSum spin_dot_curl_E(OperatorFlags flags) {
  OperatorSum out(flags);
  for (Axis l : kAxes) {
    for (Axis k : kAxes) {
      for (Axis j : kAxes) {
        const int eps = levi_civita(index(l), index(k), index(j));
        if (eps == 0) continue;
        MultiIndex d{0, 0, 0};
        d[index(k)] = 1;
        out += OperatorSum::term({GaussianRational(eps)}, sigma_label(l), {FactorSymbol::electric(j, d)}, flags);
      }
    }
  }
  return out;
}

OperatorSum spin_dot_E_cross_Pi(OperatorFlags flags) {
  OperatorSum out(flags);
  for (Axis l : kAxes) {
    for (Axis j : kAxes) {
      for (Axis k : kAxes) {
        const int eps = levi_civita(index(l), index(j), index(k));
        if (eps == 0) continue;
        out += OperatorSum::term({GaussianRational(eps)}, sigma_label(l),
                                 {FactorSymbol::electric(j), FactorSymbol::pi(k)}, flags);
      }
    }
  }
  return out;
}

OperatorSum spin_dot_Pi_cross_E(OperatorFlags flags) {
  OperatorSum out(flags);
  for (Axis l : kAxes) {
    for (Axis j : kAxes) {
      for (Axis k : kAxes) {
        const int eps = levi_civita(index(l), index(j), index(k));
        if (eps == 0) continue;
        out += OperatorSum::term({GaussianRational(eps)}, sigma_label(l),
                                 {FactorSymbol::pi(j), FactorSymbol::electric(k)}, flags);
      }
    }
  }
  return out;
}

OperatorSum double_commutator_OU(OperatorFlags flags) { return commutator(alpha_dot_Pi(flags), alpha_dot_E(flags)); }

OperatorSum alpha_commutator_curl_form(OperatorFlags flags) {
  const GaussianRational i = GaussianRational::i();
  OperatorSum out = divergence_E(flags).scaled(ConstantMonomial::make(-i, 1, 0, 0, 0));
  out += spin_dot_curl_E(flags).scaled(ConstantMonomial::make(1, 1, 0, 0, 0));
  out += spin_dot_E_cross_Pi(flags).scaled(ConstantMonomial{GaussianRational(-2) * i});
  return out;
}

OperatorSum alpha_commutator_symmetric_form(OperatorFlags flags) {
  const GaussianRational i = GaussianRational::i();
  OperatorSum out = divergence_E(flags).scaled(ConstantMonomial::make(-i, 1, 0, 0, 0));
  out += (spin_dot_Pi_cross_E(flags) - spin_dot_E_cross_Pi(flags)).scaled(ConstantMonomial{i});
  return out;
}

}  // namespace fw
