#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fw/gaussian_rational.hpp"

namespace fw {

enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};

inline constexpr int index(Axis a) { return static_cast<int>(a); }
inline constexpr char axis_name(Axis a) { return "xyz"[index(a)]; }

/// ε_ijk with indices in {0,1,2}.
inline constexpr int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

using DiracMatrix = Eigen::Matrix<GaussianRational, 4, 4>;
using PauliMatrix = Eigen::Matrix<GaussianRational, 2, 2>;
using RationalVector3 = std::array<Rational, 3>;

/// Labels of the 16-element basis, in the fixed decomposition order:
/// I, β, α_k, Σ_k, βα_k, βΣ_k, γ5, βγ5 with γ5 = α_x Σ_x (= α_k Σ_k for every k).
enum class Gamma : std::uint8_t {
  I,
  Beta,
  AlphaX,
  AlphaY,
  AlphaZ,
  SigmaX,
  SigmaY,
  SigmaZ,
  BetaAlphaX,
  BetaAlphaY,
  BetaAlphaZ,
  BetaSigmaX,
  BetaSigmaY,
  BetaSigmaZ,
  Gamma5,
  BetaGamma5,
};

inline constexpr int kGammaCount = 16;

inline constexpr Gamma alpha_label(Axis a) { return static_cast<Gamma>(2 + index(a)); }
inline constexpr Gamma sigma_label(Axis a) { return static_cast<Gamma>(5 + index(a)); }
inline constexpr Gamma beta_alpha_label(Axis a) { return static_cast<Gamma>(8 + index(a)); }
inline constexpr Gamma beta_sigma_label(Axis a) { return static_cast<Gamma>(11 + index(a)); }

std::string_view gamma_name(Gamma g);

struct GammaBasis {
  std::array<DiracMatrix, kGammaCount> elements;
  std::array<std::string_view, kGammaCount> labels;

  const DiracMatrix& operator[](Gamma g) const { return elements[static_cast<int>(g)]; }
};

/// Standard Dirac representation: β = diag(I₂, −I₂), α_k = [[0, σ_k], [σ_k, 0]],
/// Σ_k = diag(σ_k, σ_k), completed to a trace-orthogonal basis of all 4×4 matrices.
GammaBasis build_basis();

/// Shared immutable instance of build_basis().
const GammaBasis& gamma_basis();

PauliMatrix pauli(Axis a);
DiracMatrix identity_matrix();
DiracMatrix beta();
DiracMatrix alpha(Axis a);
DiracMatrix spin(Axis a);

DiracMatrix product(const DiracMatrix& a, const DiracMatrix& b);
DiracMatrix commutator(const DiracMatrix& a, const DiracMatrix& b);
DiracMatrix anticommutator(const DiracMatrix& a, const DiracMatrix& b);
DiracMatrix conjugate_transpose(const DiracMatrix& m);

/// Returns (α·C)(α·D); throws std::logic_error if it differs from (C·D) I + i Σ·(C×D).
DiracMatrix vector_identity(const RationalVector3& c, const RationalVector3& d);

using GammaCoefficients = std::array<GaussianRational, kGammaCount>;

/// Unique expansion M = Σ_g c_g Γ_g. Uses tr(Γ_g† Γ_h) = 4 δ_gh.
GammaCoefficients decompose(const DiracMatrix& m);
DiracMatrix recompose(const GammaCoefficients& coefficients);

/// Γ_a Γ_b = phase · Γ_c, phase ∈ {±1, ±i}.
struct GammaProduct {
  GaussianRational phase;
  Gamma label;
};

GammaProduct multiply(Gamma a, Gamma b);

/// Γ† = sign · Γ with sign = ±1.
int adjoint_sign(Gamma g);

/// Even labels commute with β (block diagonal); odd ones anticommute.
bool is_even(Gamma g);

/// Result of checking the Clifford identities used by the expansion.
struct IdentityReport {
  struct Check {
    std::string name;
    bool passed;
  };
  std::vector<Check> checks;

  int passed() const;
  int failed() const;
};

/// α_k α_j = δ_kj + i ε_kjl Σ_l, [α_k, α_j] = −2i ε_jkl Σ_l for all pairs,
/// the vector identity on `random_pairs` seeded random rational vectors,
/// Hermiticity of β, α_k, Σ_k and decomposition round trips.
IdentityReport run_identity_suite(std::uint64_t seed, int random_pairs);

}  // namespace fw
