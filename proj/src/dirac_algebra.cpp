#include "fw/dirac_algebra.hpp"

#include <random>
#include <stdexcept>

namespace fw {

namespace {

constexpr std::array<std::string_view, kGammaCount> kGammaNames{
    "I",   "β",   "α_x", "α_y", "α_z", "Σ_x", "Σ_y", "Σ_z",
    "βα_x", "βα_y", "βα_z", "βΣ_x", "βΣ_y", "βΣ_z", "γ5", "βγ5"};

DiracMatrix block(const PauliMatrix& upper_left, const PauliMatrix& upper_right, const PauliMatrix& lower_left,
                  const PauliMatrix& lower_right) {
  DiracMatrix m;
  m.topLeftCorner<2, 2>() = upper_left;
  m.topRightCorner<2, 2>() = upper_right;
  m.bottomLeftCorner<2, 2>() = lower_left;
  m.bottomRightCorner<2, 2>() = lower_right;
  return m;
}

GaussianRational trace(const DiracMatrix& m) {
  GaussianRational t;
  for (int k = 0; k < 4; ++k) t += m(k, k);
  return t;
}

struct ProductTable {
  std::array<std::array<GammaProduct, kGammaCount>, kGammaCount> entries;
  std::array<int, kGammaCount> adjoint;
  std::array<bool, kGammaCount> even;
};

ProductTable build_table() {
  const GammaBasis& basis = gamma_basis();
  ProductTable table{};
  for (int a = 0; a < kGammaCount; ++a) {
    for (int b = 0; b < kGammaCount; ++b) {
      const GammaCoefficients c = decompose(product(basis.elements[a], basis.elements[b]));
      int found = -1;
      for (int g = 0; g < kGammaCount; ++g) {
        if (c[g].is_zero()) continue;
        if (found >= 0) throw std::logic_error("Γ basis is not closed under multiplication");
        found = g;
      }
      table.entries[a][b] = {c[found], static_cast<Gamma>(found)};
    }
    const DiracMatrix& m = basis.elements[a];
    const DiracMatrix adj = conjugate_transpose(m);
    if (adj == m) {
      table.adjoint[a] = 1;
    } else if (adj == DiracMatrix(-m)) {
      table.adjoint[a] = -1;
    } else {
      throw std::logic_error("Γ basis element neither Hermitian nor anti-Hermitian");
    }
    const DiracMatrix b = beta();
    if (product(b, m) == product(m, b)) {
      table.even[a] = true;
    } else if (anticommutator(b, m) == DiracMatrix::Zero()) {
      table.even[a] = false;
    } else {
      throw std::logic_error("Γ basis element neither commutes nor anticommutes with β");
    }
  }
  return table;
}

const ProductTable& product_table() {
  static const ProductTable table = build_table();
  return table;
}

RationalVector3 random_vector(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_int_distribution<long> den(1, 7);
  RationalVector3 v;
  for (auto& x : v) {
    x = Rational(num(rng), den(rng));
    x.canonicalize();
  }
  return v;
}

}  // namespace

std::string_view gamma_name(Gamma g) { return kGammaNames[static_cast<int>(g)]; }

PauliMatrix pauli(Axis a) {
  const GaussianRational one(1);
  const GaussianRational zero(0);
  const GaussianRational i = GaussianRational::i();
  PauliMatrix s;
  switch (a) {
    case Axis::x:
      s << zero, one, one, zero;
      break;
    case Axis::y:
      s << zero, -i, i, zero;
      break;
    case Axis::z:
      s << one, zero, zero, GaussianRational(-1);
      break;
  }
  return s;
}

DiracMatrix identity_matrix() { return DiracMatrix::Identity(); }

DiracMatrix beta() {
  const PauliMatrix one = PauliMatrix::Identity();
  const PauliMatrix zero = PauliMatrix::Zero();
  return block(one, zero, zero, PauliMatrix(-one));
}

DiracMatrix alpha(Axis a) {
  const PauliMatrix zero = PauliMatrix::Zero();
  return block(zero, pauli(a), pauli(a), zero);
}

DiracMatrix spin(Axis a) {
  const PauliMatrix zero = PauliMatrix::Zero();
  return block(pauli(a), zero, zero, pauli(a));
}

GammaBasis build_basis() {
  GammaBasis basis;
  basis.labels = kGammaNames;
  const DiracMatrix b = beta();
  basis.elements[0] = identity_matrix();
  basis.elements[1] = b;
  for (Axis a : kAxes) {
    basis.elements[2 + index(a)] = alpha(a);
    basis.elements[5 + index(a)] = spin(a);
    basis.elements[8 + index(a)] = product(b, alpha(a));
    basis.elements[11 + index(a)] = product(b, spin(a));
  }
  const DiracMatrix g5 = product(alpha(Axis::x), spin(Axis::x));
  basis.elements[14] = g5;
  basis.elements[15] = product(b, g5);
  return basis;
}

const GammaBasis& gamma_basis() {
  static const GammaBasis basis = build_basis();
  return basis;
}

DiracMatrix product(const DiracMatrix& a, const DiracMatrix& b) {
  DiracMatrix out;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      GaussianRational s;
      for (int k = 0; k < 4; ++k) {
        if (a(r, k).is_zero() || b(k, c).is_zero()) continue;
        s += a(r, k) * b(k, c);
      }
      out(r, c) = s;
    }
  }
  return out;
}

DiracMatrix commutator(const DiracMatrix& a, const DiracMatrix& b) { return product(a, b) - product(b, a); }

DiracMatrix anticommutator(const DiracMatrix& a, const DiracMatrix& b) { return product(a, b) + product(b, a); }

DiracMatrix conjugate_transpose(const DiracMatrix& m) {
  DiracMatrix out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = conj(m(c, r));
  return out;
}

DiracMatrix vector_identity(const RationalVector3& c, const RationalVector3& d) {
  DiracMatrix alpha_c = DiracMatrix::Zero();
  DiracMatrix alpha_d = DiracMatrix::Zero();
  for (Axis a : kAxes) {
    alpha_c += alpha(a) * GaussianRational(c[index(a)]);
    alpha_d += alpha(a) * GaussianRational(d[index(a)]);
  }
  const DiracMatrix lhs = product(alpha_c, alpha_d);

  const Rational dot = c[0] * d[0] + c[1] * d[1] + c[2] * d[2];
  const RationalVector3 cross{c[1] * d[2] - c[2] * d[1], c[2] * d[0] - c[0] * d[2], c[0] * d[1] - c[1] * d[0]};
  DiracMatrix rhs = identity_matrix() * GaussianRational(dot);
  for (Axis a : kAxes) rhs += spin(a) * (GaussianRational::i() * GaussianRational(cross[index(a)]));
  if (lhs != rhs) throw std::logic_error("(α·C)(α·D) != C·D + iΣ·(C×D)");
  return lhs;
}

GammaCoefficients decompose(const DiracMatrix& m) {
  const GammaBasis& basis = gamma_basis();
  GammaCoefficients out;
  for (int g = 0; g < kGammaCount; ++g) {
    out[g] = trace(product(conjugate_transpose(basis.elements[g]), m)) / GaussianRational(4);
  }
  return out;
}

DiracMatrix recompose(const GammaCoefficients& coefficients) {
  const GammaBasis& basis = gamma_basis();
  DiracMatrix m = DiracMatrix::Zero();
  for (int g = 0; g < kGammaCount; ++g) {
    if (coefficients[g].is_zero()) continue;
    m += basis.elements[g] * coefficients[g];
  }
  return m;
}

GammaProduct multiply(Gamma a, Gamma b) {
  return product_table().entries[static_cast<int>(a)][static_cast<int>(b)];
}

int adjoint_sign(Gamma g) { return product_table().adjoint[static_cast<int>(g)]; }

bool is_even(Gamma g) { return product_table().even[static_cast<int>(g)]; }

int IdentityReport::passed() const {
  int n = 0;
  for (const auto& c : checks) n += c.passed ? 1 : 0;
  return n;
}

int IdentityReport::failed() const { return static_cast<int>(checks.size()) - passed(); }

IdentityReport run_identity_suite(std::uint64_t seed, int random_pairs) {
  IdentityReport report;
  const GaussianRational i = GaussianRational::i();
  for (Axis k : kAxes) {
    for (Axis j : kAxes) {
      DiracMatrix expected_product = DiracMatrix::Zero();
      DiracMatrix expected_commutator = DiracMatrix::Zero();
      if (k == j) expected_product = identity_matrix();
      for (Axis l : kAxes) {
        const int e_kjl = levi_civita(index(k), index(j), index(l));
        const int e_jkl = levi_civita(index(j), index(k), index(l));
        if (e_kjl != 0) expected_product += spin(l) * (i * GaussianRational(e_kjl));
        if (e_jkl != 0) expected_commutator += spin(l) * (i * GaussianRational(-2 * e_jkl));
      }
      const std::string pair = std::string(1, axis_name(k)) + axis_name(j);
      report.checks.push_back({"α_k α_j product, kj=" + pair, product(alpha(k), alpha(j)) == expected_product});
      report.checks.push_back(
          {"[α_k, α_j] commutator, kj=" + pair, commutator(alpha(k), alpha(j)) == expected_commutator});
    }
  }

  std::mt19937_64 rng(seed);
  int vector_ok = 0;
  for (int n = 0; n < random_pairs; ++n) {
    try {
      vector_identity(random_vector(rng), random_vector(rng));
      ++vector_ok;
    } catch (const std::logic_error&) {
    }
  }
  report.checks.push_back(
      {"(α·C)(α·D) = C·D + iΣ·(C×D) on " + std::to_string(random_pairs) + " random pairs", vector_ok == random_pairs});

  bool hermitian = conjugate_transpose(beta()) == beta();
  for (Axis a : kAxes) {
    hermitian = hermitian && conjugate_transpose(alpha(a)) == alpha(a);
    hermitian = hermitian && conjugate_transpose(spin(a)) == spin(a);
  }
  report.checks.push_back({"β, α_k, Σ_k Hermitian", hermitian});

  bool round_trip = true;
  for (const DiracMatrix& m : gamma_basis().elements) round_trip = round_trip && recompose(decompose(m)) == m;
  report.checks.push_back({"decompose ∘ recompose on the Γ basis", round_trip});
  return report;
}

}  // namespace fw
