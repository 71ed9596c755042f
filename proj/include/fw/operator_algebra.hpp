#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fw/dirac_algebra.hpp"
#include "fw/gaussian_rational.hpp"

namespace fw {

/// Formal constants tracked by exponent. Order matters: it is the storage order.
enum class Constant : std::uint8_t { hbar = 0, e = 1, m = 2, c = 3 };

inline constexpr int kConstantCount = 4;

/// coefficient · ħ^a e^b m^d c^f with integer exponents.
struct ConstantMonomial {
  GaussianRational coefficient{1};
  std::array<int, kConstantCount> exponents{};

  static ConstantMonomial make(GaussianRational coefficient, int hbar, int e, int m, int c) {
    return {std::move(coefficient), {hbar, e, m, c}};
  }

  int exponent(Constant k) const { return exponents[static_cast<int>(k)]; }
  int c_degree() const { return exponent(Constant::c); }

  friend ConstantMonomial operator*(const ConstantMonomial& a, const ConstantMonomial& b) {
    ConstantMonomial out{a.coefficient * b.coefficient, a.exponents};
    for (int k = 0; k < kConstantCount; ++k) out.exponents[k] += b.exponents[k];
    return out;
  }
  ConstantMonomial inverse() const {
    ConstantMonomial out{GaussianRational(1) / coefficient, exponents};
    for (int& x : out.exponents) x = -x;
    return out;
  }
  friend bool operator==(const ConstantMonomial&, const ConstantMonomial&) = default;
};

enum class FieldBase : std::uint8_t { V = 0, E = 1, B = 2 };

using MultiIndex = std::array<std::uint8_t, 3>;

/// Either a canonical momentum component Π_axis or a position-dependent field
/// (V, E_axis, B_axis and their spatial derivatives ∂^d).
struct FactorSymbol {
  enum class Kind : std::uint8_t { field = 0, momentum = 1 };

  Kind kind = Kind::field;
  FieldBase base = FieldBase::V;
  Axis axis = Axis::x;
  MultiIndex derivative{0, 0, 0};

  static FactorSymbol pi(Axis a) { return {Kind::momentum, FieldBase::V, a, {0, 0, 0}}; }
  static FactorSymbol potential() { return {}; }
  static FactorSymbol electric(Axis a, MultiIndex d = {0, 0, 0}) { return {Kind::field, FieldBase::E, a, d}; }
  static FactorSymbol magnetic(Axis a, MultiIndex d = {0, 0, 0}) { return {Kind::field, FieldBase::B, a, d}; }

  bool is_momentum() const { return kind == Kind::momentum; }
  int derivative_order() const { return derivative[0] + derivative[1] + derivative[2]; }

  // Fields sort before momenta; the rest is a fixed lexicographic tie-break.
  friend auto operator<=>(const FactorSymbol&, const FactorSymbol&) = default;
};

using Word = std::vector<FactorSymbol>;

inline constexpr int kMaxDerivativeOrder = 2;

/// Raised when a rewrite needs a field derivative beyond kMaxDerivativeOrder.
class DerivativeOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OperatorFlags {
  /// ∂_i E_j = ∂_j E_i (E = −∇V with continuous derivatives).
  bool curl_free_E = false;
  /// All derivatives of B vanish.
  bool uniform_B = false;

  friend OperatorFlags operator|(OperatorFlags a, OperatorFlags b) {
    return {a.curl_free_E || b.curl_free_E, a.uniform_B || b.uniform_B};
  }
  friend bool operator==(const OperatorFlags&, const OperatorFlags&) = default;
};

/// Four-component sums use the full Γ basis; two-component sums only use
/// I and Σ_k, which then stand for 1 and σ_k.
enum class Spinor : std::uint8_t { four, two };

/// A single canonical term: constant · matrix · factors.
struct OperatorTerm {
  ConstantMonomial constant;
  Gamma matrix = Gamma::I;
  Word factors;
};

/// Sort/merge key of a term. Higher powers of c come first.
struct TermKey {
  std::array<int, kConstantCount> exponents{};
  Gamma matrix = Gamma::I;
  Word factors;

  friend bool operator==(const TermKey&, const TermKey&) = default;
  friend bool operator<(const TermKey& a, const TermKey& b) {
    const int ca = a.exponents[static_cast<int>(Constant::c)];
    const int cb = b.exponents[static_cast<int>(Constant::c)];
    if (ca != cb) return ca > cb;
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size();
    if (a.factors != b.factors) return a.factors < b.factors;
    if (a.matrix != b.matrix) return a.matrix < b.matrix;
    return a.exponents < b.exponents;
  }
};

struct EvenSquare;

/// Aggregated record of products discarded by c-degree truncation.
struct DroppedTerms {
  int c_degree = 0;
  long count = 0;
};

/// Canonical (normal-ordered, merged) sum of operator terms plus, optionally,
/// unexpanded squares of even operators. Value type; every operation returns
/// a new sum.
class OperatorSum {
 public:
  using TermMap = std::map<TermKey, GaussianRational>;

  OperatorSum() = default;
  explicit OperatorSum(OperatorFlags flags, Spinor spinor = Spinor::four) : flags_(flags), spinor_(spinor) {}

  /// Canonicalizes `factors` (normal order, field identities) before storing.
  static OperatorSum term(const ConstantMonomial& constant, Gamma matrix, const Word& factors,
                          OperatorFlags flags = {}, Spinor spinor = Spinor::four);
  static OperatorSum scalar(const ConstantMonomial& constant, OperatorFlags flags = {},
                            Spinor spinor = Spinor::four) {
    return term(constant, Gamma::I, {}, flags, spinor);
  }

  const TermMap& terms() const { return terms_; }
  const std::vector<EvenSquare>& squares() const { return squares_; }
  OperatorFlags flags() const { return flags_; }
  Spinor spinor() const { return spinor_; }
  bool is_zero() const;
  std::size_t size() const { return terms_.size(); }

  std::vector<OperatorTerm> term_list() const;

  /// Highest/lowest c exponent over plain terms (squares are expanded for this).
  std::optional<int> max_c_degree() const;
  std::optional<int> min_c_degree() const;

  OperatorSum& operator+=(const OperatorSum& other);
  OperatorSum& operator-=(const OperatorSum& other);
  friend OperatorSum operator+(OperatorSum a, const OperatorSum& b) { return a += b; }
  friend OperatorSum operator-(OperatorSum a, const OperatorSum& b) { return a -= b; }
  friend OperatorSum operator-(const OperatorSum& a) { return a.scaled(ConstantMonomial{GaussianRational(-1)}); }

  OperatorSum scaled(const ConstantMonomial& k) const;
  friend OperatorSum operator*(const ConstantMonomial& k, const OperatorSum& x) { return x.scaled(k); }

  /// Left-multiplies every term (and square prefactor) by a Γ label.
  OperatorSum times_matrix(Gamma g) const;

  /// Adds `prefactor · [inner]²` as an unexpanded square.
  OperatorSum& add_square(const ConstantMonomial& constant, Gamma matrix, const OperatorSum& inner);

  /// Same operator with every unexpanded square multiplied out.
  OperatorSum expanded() const;

  /// Terms with c_degree >= min_degree; the rest are reported in `dropped`.
  OperatorSum truncated(int min_degree, std::vector<DroppedTerms>* dropped = nullptr) const;

  /// Drops every term containing one of the given field kinds.
  OperatorSum without_fields(FieldBase base) const;

  /// Keeps only terms whose matrix label satisfies the predicate. Squares are kept
  /// if their prefactor satisfies it.
  template <class Pred>
  OperatorSum filter_matrix(Pred pred) const;

  OperatorSum with_flags(OperatorFlags flags) const;

  friend bool operator==(const OperatorSum& a, const OperatorSum& b);
  friend bool operator!=(const OperatorSum& a, const OperatorSum& b) { return !(a == b); }

  /// Accumulates a term whose factor word is already in normal form.
  void add_raw(const TermKey& key, const GaussianRational& coefficient);

 private:

  TermMap terms_;
  std::vector<EvenSquare> squares_;
  OperatorFlags flags_{};
  Spinor spinor_ = Spinor::four;
};

/// constant · Γ · [inner]², with Γ commuting with inner.
struct EvenSquare {
  ConstantMonomial constant;
  Gamma matrix = Gamma::I;
  OperatorSum inner;

  friend bool operator==(const EvenSquare& a, const EvenSquare& b) {
    return a.constant == b.constant && a.matrix == b.matrix && a.inner == b.inner;
  }
};

template <class Pred>
OperatorSum OperatorSum::filter_matrix(Pred pred) const {
  OperatorSum out(flags_, spinor_);
  for (const auto& [key, coefficient] : terms_)
    if (pred(key.matrix)) out.add_raw(key, coefficient);
  for (const auto& sq : squares_)
    if (pred(sq.matrix)) out.squares_.push_back(sq);
  return out;
}

// ----- products -------------------------------------------------------------

/// Optional c-degree cutoff applied to each raw product before normal ordering.
struct Truncation {
  int min_c_degree;
  std::vector<DroppedTerms>* dropped = nullptr;
};

/// X·Y distributed, Γ labels multiplied, factor lists concatenated and normal ordered.
/// Squares are expanded first. Throws DerivativeOverflow.
OperatorSum multiply(const OperatorSum& x, const OperatorSum& y, std::optional<Truncation> truncation = std::nullopt);

/// XY − YX.
OperatorSum commutator(const OperatorSum& x, const OperatorSum& y,
                       std::optional<Truncation> truncation = std::nullopt);

/// Formal adjoint: Π, V, E, B Hermitian, Γ† per the Dirac basis, coefficients conjugated.
OperatorSum adjoint(const OperatorSum& x);

struct EvenOddParts {
  OperatorSum even;
  OperatorSum odd;
};

/// Even part commutes with β, odd part anticommutes.
EvenOddParts even_odd_split(const OperatorSum& x);

// ----- Hamiltonian building blocks ------------------------------------------

/// H = β m c² − e V + c α·Π.
OperatorSum dirac_hamiltonian(OperatorFlags flags = {});

/// The odd kinetic term O = c α·Π.
OperatorSum kinetic_odd(OperatorFlags flags = {});

/// The even potential term U = −e V.
OperatorSum potential_energy(OperatorFlags flags = {});

/// O²·divisor⁻¹; with divisor = 2mc² this is Π²/2m + μ Σ·B.
OperatorSum square_even(const OperatorSum& odd, const ConstantMonomial& divisor);

/// The Bohr magneton eħ/2m as a constant.
ConstantMonomial bohr_magneton();

/// Π_k Π_k.
OperatorSum pi_squared(OperatorFlags flags = {});
/// Σ_k B_k.
OperatorSum spin_dot_B(OperatorFlags flags = {});
/// α_k E_k.
OperatorSum alpha_dot_E(OperatorFlags flags = {});
/// α_k Π_k.
OperatorSum alpha_dot_Pi(OperatorFlags flags = {});
/// ∂_k E_k.
OperatorSum divergence_E(OperatorFlags flags = {});
/// Σ·(∇×E) = ε_lkj Σ_l ∂_k E_j.
OperatorSum spin_dot_curl_E(OperatorFlags flags = {});
/// Σ·(E×Π) = ε_ljk Σ_l E_j Π_k.
OperatorSum spin_dot_E_cross_Pi(OperatorFlags flags = {});
/// Σ·(Π×E) = ε_ljk Σ_l Π_j E_k (normal ordered, so it carries derivative terms).
OperatorSum spin_dot_Pi_cross_E(OperatorFlags flags = {});

/// [α·Π, α·E] evaluated by the rewriting engine.
OperatorSum double_commutator_OU(OperatorFlags flags = {});

/// −iħ(∇·E) + ħΣ·(∇×E) − 2iΣ·(E×Π), assembled from building blocks.
OperatorSum alpha_commutator_curl_form(OperatorFlags flags = {});

/// −iħ(∇·E) + iΣ·(Π×E − E×Π), assembled from building blocks.
OperatorSum alpha_commutator_symmetric_form(OperatorFlags flags = {});

// ----- text ------------------------------------------------------------------

enum class RenderFormat { plain, latex };

/// Deterministic rendering. Plain text reparses with parse_operator_sum().
std::string render(const OperatorSum& x, RenderFormat format = RenderFormat::plain);
std::string render_term(const OperatorTerm& t, Spinor spinor, RenderFormat format = RenderFormat::plain);
std::string render_factor(const FactorSymbol& f, RenderFormat format = RenderFormat::plain);

/// Compact constant rendering such as "(eħ/4m²c²)" or "mc²".
std::string render_constant_pretty(const ConstantMonomial& k);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads the plain-text grammar (see README) back into canonical form.
OperatorSum parse_operator_sum(std::string_view text, OperatorFlags flags = {});

}  // namespace fw
