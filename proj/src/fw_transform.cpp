#include "fw/fw_transform.hpp"

#include <algorithm>

namespace fw {

namespace {

ConstantMonomial inverse_two_m_c2() { return ConstantMonomial::make(GaussianRational::fraction(1, 2), 0, 0, -1, -2); }

void merge_dropped(std::vector<DroppedEntry>* out, const std::vector<DroppedTerms>& local, int stage, int nesting) {
  if (out == nullptr) return;
  for (const DroppedTerms& d : local) out->push_back({stage, nesting, d.c_degree, d.count});
}

struct ReducedLabel {
  int sign;
  Gamma label;
};

ReducedLabel reduce_label(Gamma g, int beta_sign) {
  switch (g) {
    case Gamma::I:
      return {1, Gamma::I};
    case Gamma::Beta:
      return {beta_sign, Gamma::I};
    case Gamma::SigmaX:
    case Gamma::SigmaY:
    case Gamma::SigmaZ:
      return {1, g};
    case Gamma::BetaSigmaX:
      return {beta_sign, Gamma::SigmaX};
    case Gamma::BetaSigmaY:
      return {beta_sign, Gamma::SigmaY};
    case Gamma::BetaSigmaZ:
      return {beta_sign, Gamma::SigmaZ};
    default:
      throw OddResidue("odd matrix label " + std::string(gamma_name(g)) + " has no two-component block");
  }
}

OperatorSum reduce(const OperatorSum& x, int beta_sign) {
  if (x.spinor() == Spinor::two) return x;
  OperatorSum out(x.flags(), Spinor::two);
  for (const auto& [key, coefficient] : x.terms()) {
    const ReducedLabel r = reduce_label(key.matrix, beta_sign);
    TermKey k = key;
    k.matrix = r.label;
    out.add_raw(k, coefficient * GaussianRational(r.sign));
  }
  for (const EvenSquare& sq : x.squares()) {
    const ReducedLabel r = reduce_label(sq.matrix, beta_sign);
    ConstantMonomial k = sq.constant;
    k.coefficient *= GaussianRational(r.sign);
    out.add_square(k, r.label, reduce(sq.inner, beta_sign));
  }
  return out;
}

// Finds k with x == k · block, where block has unit constants.
std::optional<ConstantMonomial> proportionality(const OperatorSum& x, const OperatorSum& block) {
  if (x.terms().empty() || block.terms().empty() || !x.squares().empty()) return std::nullopt;
  const auto& [xkey, xcoef] = *x.terms().begin();
  for (const auto& [bkey, bcoef] : block.terms()) {
    if (bkey.matrix != xkey.matrix || bkey.factors != xkey.factors) continue;
    ConstantMonomial k{xcoef / bcoef, xkey.exponents};
    for (int i = 0; i < kConstantCount; ++i) k.exponents[i] -= bkey.exponents[i];
    if (block.scaled(k) == x) return k;
    return std::nullopt;
  }
  return std::nullopt;
}

enum class Piece { rest, potential, kinetic, zeeman, mass_velocity, spin_orbit, darwin, other };

Piece classify(const TermKey& key) {
  const Word& f = key.factors;
  const bool sigma = key.matrix != Gamma::I;
  const int c = key.exponents[static_cast<int>(Constant::c)];
  if (f.empty()) return (c == 2 && !sigma) ? Piece::rest : Piece::other;
  if (f.size() == 1 && !f[0].is_momentum()) {
    const FactorSymbol& s = f[0];
    if (s.base == FieldBase::V && !sigma) return Piece::potential;
    if (s.base == FieldBase::B && s.derivative_order() == 0 && sigma && c == 0) return Piece::zeeman;
    if (s.base == FieldBase::E && s.derivative_order() == 1 && !sigma) return Piece::darwin;
    return Piece::other;
  }
  if (f.size() == 2 && f[0].is_momentum() && f[1].is_momentum() && !sigma && c == 0) return Piece::kinetic;
  if (f.size() == 2 && !f[0].is_momentum() && f[0].base == FieldBase::E && f[0].derivative_order() == 0 &&
      f[1].is_momentum() && sigma) {
    return Piece::spin_orbit;
  }
  return Piece::other;
}

std::string pretty_inner(const OperatorSum& inner) {
  std::string out;
  for (const NamedTerm& t : identify_terms(inner)) {
    if (t.pretty.empty()) return {};
    std::string p = t.pretty;
    if (out.empty()) {
      out = p;
    } else if (p.front() == '-') {
      out += " - " + p.substr(1);
    } else {
      out += " + " + p;
    }
  }
  return out;
}

}  // namespace

FWGenerator generator_from_odd(const OperatorSum& odd, int stage) {
  const EvenOddParts parts = even_odd_split(odd);
  if (!parts.even.is_zero()) throw NotPurelyOdd("generator input has an even part: " + render(parts.even));
  ConstantMonomial k = inverse_two_m_c2();
  k.coefficient *= -GaussianRational::i();
  return {odd.times_matrix(Gamma::Beta).scaled(k), stage};
}

OperatorSum bch_conjugate(const OperatorSum& h, const FWGenerator& s, int k_max, int min_c_degree,
                          std::vector<DroppedEntry>* dropped) {
  if (k_max < 1) throw std::invalid_argument("bch_conjugate: k_max must be at least 1");
  std::vector<DroppedTerms> local;
  OperatorSum result = h.truncated(min_c_degree, &local);
  merge_dropped(dropped, local, s.stage, 0);
  if (s.is_zero()) return result;
  const OperatorSum i_s = s.generator.scaled(ConstantMonomial{GaussianRational::i()});
  OperatorSum nested = result;
  for (int k = 1; k <= k_max; ++k) {
    local.clear();
    nested = commutator(i_s, nested, Truncation{min_c_degree, &local})
                 .scaled(ConstantMonomial{GaussianRational::fraction(1, k)});
    merge_dropped(dropped, local, s.stage, k);
    if (nested.is_zero()) break;
    result += nested;
  }
  return result;
}

ExpansionReport fw_reduce(const OperatorSum& h, const FWOptions& options) {
  ExpansionReport report;
  const OperatorSum kinetic = even_odd_split(h).odd;
  OperatorSum current = h;
  for (int stage = 1; stage <= options.stages; ++stage) {
    FWGenerator s = generator_from_odd(even_odd_split(current).odd, stage);
    current = bch_conjugate(current, s, options.k_max, options.min_c_degree, &report.dropped);
    report.generators.push_back(std::move(s));
    report.stage_outputs.push_back(current);
  }
  const EvenOddParts parts = even_odd_split(current);
  if (!parts.odd.is_zero()) {
    throw OddResidue("odd terms survive " + std::to_string(options.stages) + " stages: " + render(parts.odd));
  }
  report.expanded = current;

  // −β O⁴/8m³c⁶ = −(1/2mc²) β [O²/2mc²]²
  const OperatorSum k_even = square_even(kinetic, ConstantMonomial::make(2, 0, 0, 1, 2));
  OperatorSum square(current.flags());
  square.add_square(ConstantMonomial::make(GaussianRational::fraction(-1, 2), 0, 0, -1, -2), Gamma::Beta, k_even);
  report.even_hamiltonian = current - square.expanded() + square;
  return report;
}

OperatorSum two_component(const OperatorSum& even_hamiltonian, Branch branch) {
  const EvenOddParts parts = even_odd_split(even_hamiltonian);
  if (!parts.odd.is_zero()) throw OddResidue("Hamiltonian still has odd terms: " + render(parts.odd));
  return reduce(even_hamiltonian, branch == Branch::upper ? 1 : -1);
}

OperatorSum two_component(const ExpansionReport& report, Branch branch) {
  return two_component(report.even_hamiltonian, branch);
}

std::vector<NamedTerm> identify_terms(const OperatorSum& x) {
  const OperatorFlags flags = x.flags();
  std::array<OperatorSum, 8> groups;
  for (auto& g : groups) g = OperatorSum(flags, x.spinor());
  for (const auto& [key, coefficient] : x.terms()) groups[static_cast<int>(classify(key))].add_raw(key, coefficient);
  for (const EvenSquare& sq : x.squares()) {
    groups[static_cast<int>(Piece::mass_velocity)].add_square(sq.constant, sq.matrix, sq.inner);
  }

  auto two = [&](const OperatorSum& s) { return x.spinor() == Spinor::two ? reduce(s, 1) : s; };
  const std::string sigma = x.spinor() == Spinor::two ? "σ" : "Σ";
  auto pretty_block = [&](const OperatorSum& group, const OperatorSum& block, const std::string& symbol) {
    if (auto k = proportionality(group, block)) return render_constant_pretty(*k) + " " + symbol;
    return std::string();
  };

  static constexpr std::array<std::string_view, 8> names{"rest energy", "potential",   "kinetic", "Zeeman",
                                                         "mass-velocity", "spin-orbit", "Darwin",  "other"};
  std::vector<NamedTerm> out;
  for (int p = 0; p < 8; ++p) {
    const OperatorSum& g = groups[p];
    if (g.is_zero()) continue;
    NamedTerm t{std::string(names[p]), g, {}};
    switch (static_cast<Piece>(p)) {
      case Piece::rest:
      case Piece::potential:
        if (g.size() == 1) {
          const OperatorTerm only = g.term_list().front();
          t.pretty = render_constant_pretty(only.constant);
          if (!only.factors.empty()) t.pretty += " V";
        }
        break;
      case Piece::kinetic:
        t.pretty = pretty_block(g, two(pi_squared(flags)), "Π²");
        break;
      case Piece::zeeman:
        t.pretty = pretty_block(g, two(spin_dot_B(flags)), sigma + "·B");
        break;
      case Piece::spin_orbit:
        t.pretty = pretty_block(g, two(spin_dot_E_cross_Pi(flags)), sigma + "·(E×Π)");
        break;
      case Piece::darwin:
        t.pretty = pretty_block(g, two(divergence_E(flags)), "(∇·E)");
        break;
      case Piece::mass_velocity:
        if (g.terms().empty() && g.squares().size() == 1) {
          const EvenSquare& sq = g.squares().front();
          const std::string inner = pretty_inner(sq.inner);
          if (!inner.empty()) {
            std::string prefactor = render_constant_pretty(sq.constant);
            if (sq.matrix != Gamma::I) prefactor += " " + std::string(gamma_name(sq.matrix));
            t.pretty = prefactor + "(" + inner + ")²";
          }
        }
        break;
      case Piece::other:
        break;
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::optional<SpinOrbitForms> spin_orbit_forms(const OperatorSum& piece) {
  const OperatorFlags flags = piece.flags();
  if (!flags.curl_free_E) return std::nullopt;
  auto two = [&](const OperatorSum& s) { return piece.spinor() == Spinor::two ? reduce(s, 1) : s; };
  const auto cross = proportionality(piece, two(spin_dot_E_cross_Pi(flags)));
  if (!cross) return std::nullopt;
  const OperatorSum symmetric = two(spin_dot_E_cross_Pi(flags) - spin_dot_Pi_cross_E(flags));
  ConstantMonomial half = *cross;
  half.coefficient /= GaussianRational(2);
  if (symmetric.scaled(half) != piece) return std::nullopt;
  return SpinOrbitForms{*cross, half};
}

}  // namespace fw
