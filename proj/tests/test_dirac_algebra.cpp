#include <random>

#include "doctest.h"
#include "fw/dirac_algebra.hpp"

using namespace fw;

namespace {

using Dense = std::array<std::array<GaussianRational, 4>, 4>;

const GaussianRational I1{1};
const GaussianRational Im = GaussianRational::i();

// Independent plain-array multiplication, no Eigen.
Dense naive_product(const Dense& a, const Dense& b) {
  Dense out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      for (int k = 0; k < 4; ++k) out[r][c] += a[r][k] * b[k][c];
  return out;
}

Dense to_dense(const DiracMatrix& m) {
  Dense d{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) d[r][c] = m(r, c);
  return d;
}

// Σ_k assembled from literal Pauli blocks.
Dense literal_spin(int axis) {
  Dense d{};
  const GaussianRational s[3][2][2] = {{{0, 1}, {1, 0}}, {{0, -Im}, {Im, 0}}, {{1, 0}, {0, -1}}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      d[r][c] = s[axis][r][c];
      d[r + 2][c + 2] = s[axis][r][c];
    }
  return d;
}

// Solves Σ_g c_g Γ_g = M as a 16×16 exact linear system by Gaussian elimination.
GammaCoefficients solve_by_elimination(const DiracMatrix& m) {
  const GammaBasis& basis = gamma_basis();
  std::vector<std::vector<GaussianRational>> a(16, std::vector<GaussianRational>(17));
  for (int row = 0; row < 16; ++row) {
    for (int g = 0; g < 16; ++g) a[row][g] = basis.elements[g](row / 4, row % 4);
    a[row][16] = m(row / 4, row % 4);
  }
  for (int col = 0; col < 16; ++col) {
    int pivot = col;
    while (a[pivot][col].is_zero()) ++pivot;
    std::swap(a[pivot], a[col]);
    for (int row = 0; row < 16; ++row) {
      if (row == col || a[row][col].is_zero()) continue;
      const GaussianRational f = a[row][col] / a[col][col];
      for (int k = col; k < 17; ++k) a[row][k] -= f * a[col][k];
    }
  }
  GammaCoefficients c;
  for (int g = 0; g < 16; ++g) c[g] = a[g][16] / a[g][g];
  return c;
}

DiracMatrix random_matrix(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-12, 12);
  std::uniform_int_distribution<long> den(1, 9);
  DiracMatrix m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      Rational re(num(rng), den(rng));
      Rational im(num(rng), den(rng));
      re.canonicalize();
      im.canonicalize();
      m(r, c) = GaussianRational(re, im);
    }
  return m;
}

}  // namespace

TEST_CASE("GaussianRational arithmetic and text") {
  const GaussianRational a(Rational(1, 2), Rational(3, 4));
  const GaussianRational b(Rational(-2), Rational(1, 3));
  CHECK((a * b) / b == a);
  CHECK(a - a == GaussianRational(0));
  CHECK(Im * Im == GaussianRational(-1));
  CHECK_THROWS_AS(a / GaussianRational(0), std::domain_error);
  for (const GaussianRational& z : {a, b, Im, -Im, GaussianRational(Rational(-7, 3)), GaussianRational(0)}) {
    CHECK(GaussianRational::parse(z.to_string()) == z);
  }
  CHECK(parse_rational("0.02") == Rational(1, 50));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("-2.5E1") == Rational(-25));
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK_THROWS(parse_rational("abc"));
}

TEST_CASE("build_basis: Dirac representation") {
  const GammaBasis& basis = gamma_basis();
  CHECK(basis.labels[7] == "Σ_z");

  DiracMatrix sz = DiracMatrix::Zero();
  sz(0, 0) = 1;
  sz(1, 1) = -1;
  sz(2, 2) = 1;
  sz(3, 3) = -1;
  CHECK(spin(Axis::z) == sz);

  CHECK(product(beta(), beta()) == identity_matrix());
  for (Axis a : kAxes) {
    CHECK(product(alpha(a), alpha(a)) == identity_matrix());
    CHECK(product(spin(a), spin(a)) == identity_matrix());
    CHECK(anticommutator(beta(), alpha(a)) == DiracMatrix::Zero());
    CHECK(spin(a).topRightCorner<2, 2>() == PauliMatrix::Zero());
    CHECK(spin(a).topLeftCorner<2, 2>() == spin(a).bottomRightCorner<2, 2>());
  }
}

TEST_CASE("product: α_k α_j = δ_kj + i ε_kjl Σ_l") {
  CHECK(product(alpha(Axis::x), alpha(Axis::y)) == DiracMatrix(spin(Axis::z) * Im));
  CHECK(product(alpha(Axis::z), alpha(Axis::z)) == identity_matrix());
  CHECK(to_dense(product(spin(Axis::x), spin(Axis::y))) ==
        to_dense(DiracMatrix(spin(Axis::z) * Im)));
  // Oracle: literal Pauli blocks multiplied with plain loops.
  Dense expected = literal_spin(2);
  for (auto& row : expected)
    for (auto& x : row) x *= Im;
  CHECK(naive_product(literal_spin(0), literal_spin(1)) == expected);
  CHECK(to_dense(spin(Axis::x)) == literal_spin(0));
}

TEST_CASE("commutator examples") {
  CHECK(commutator(alpha(Axis::x), alpha(Axis::y)) == DiracMatrix(spin(Axis::z) * (GaussianRational(2) * Im)));
  CHECK(commutator(beta(), spin(Axis::z)) == DiracMatrix::Zero());
  CHECK(commutator(beta(), alpha(Axis::x)) == DiracMatrix(product(beta(), alpha(Axis::x)) * GaussianRational(2)));
}

TEST_CASE("vector_identity examples") {
  CHECK(vector_identity({1, 0, 0}, {0, 1, 0}) == DiracMatrix(spin(Axis::z) * Im));
  CHECK(vector_identity({0, 0, 1}, {0, 0, 1}) == identity_matrix());
  // C=(1,2,0), D=(3,0,1): C·D = 3, C×D = (2,−1,−6). Oracle: plain loops on α matrices.
  Dense ac{}, ad{};
  const Dense ax = to_dense(alpha(Axis::x)), ay = to_dense(alpha(Axis::y)), az = to_dense(alpha(Axis::z));
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      ac[r][c] = ax[r][c] + GaussianRational(2) * ay[r][c];
      ad[r][c] = GaussianRational(3) * ax[r][c] + az[r][c];
    }
  const DiracMatrix expected = identity_matrix() * GaussianRational(3) +
                               spin(Axis::x) * (Im * GaussianRational(2)) + spin(Axis::y) * (-Im) +
                               spin(Axis::z) * (Im * GaussianRational(-6));
  CHECK(naive_product(ac, ad) == to_dense(expected));
  CHECK(vector_identity({1, 2, 0}, {3, 0, 1}) == expected);
}

TEST_CASE("decompose examples") {
  GammaCoefficients c = decompose(identity_matrix());
  CHECK(c[0] == I1);
  for (int g = 1; g < kGammaCount; ++g) CHECK(c[g].is_zero());

  c = decompose(DiracMatrix(spin(Axis::z) * Im));
  CHECK(c[static_cast<int>(Gamma::SigmaZ)] == Im);

  const DiracMatrix m = product(alpha(Axis::x), alpha(Axis::y)) + product(beta(), alpha(Axis::z));
  c = decompose(m);
  const GammaCoefficients oracle = solve_by_elimination(m);
  CHECK(c == oracle);
  CHECK(c[static_cast<int>(Gamma::SigmaZ)] == Im);
  CHECK(c[static_cast<int>(Gamma::BetaAlphaZ)] == I1);
  int nonzero = 0;
  for (const auto& x : c) nonzero += x.is_zero() ? 0 : 1;
  CHECK(nonzero == 2);
}

TEST_CASE("identities hold for every index pair") {
  for (Axis k : kAxes) {
    for (Axis j : kAxes) {
      DiracMatrix p = (k == j) ? identity_matrix() : DiracMatrix(DiracMatrix::Zero());
      DiracMatrix q = DiracMatrix::Zero();
      for (Axis l : kAxes) {
        p += spin(l) * (Im * GaussianRational(levi_civita(index(k), index(j), index(l))));
        q += spin(l) * (Im * GaussianRational(-2 * levi_civita(index(j), index(k), index(l))));
      }
      CHECK(product(alpha(k), alpha(j)) == p);
      CHECK(commutator(alpha(k), alpha(j)) == q);
    }
  }
}

TEST_CASE("vector identity on 100 random rational pairs") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<long> num(-20, 20), den(1, 11);
  for (int n = 0; n < 100; ++n) {
    RationalVector3 c, d;
    for (int k = 0; k < 3; ++k) {
      c[k] = Rational(num(rng), den(rng));
      d[k] = Rational(num(rng), den(rng));
      c[k].canonicalize();
      d[k].canonicalize();
    }
    CHECK_NOTHROW(vector_identity(c, d));
  }
}

TEST_CASE("decompose/recompose round trip on 100 random matrices") {
  std::mt19937_64 rng(7);
  for (int n = 0; n < 100; ++n) {
    const DiracMatrix m = random_matrix(rng);
    const GammaCoefficients c = decompose(m);
    CHECK(recompose(c) == m);
    if (n < 10) CHECK(c == solve_by_elimination(m));
  }
}

TEST_CASE("Hermiticity and label tables") {
  CHECK(conjugate_transpose(beta()) == beta());
  for (Axis a : kAxes) {
    CHECK(conjugate_transpose(alpha(a)) == alpha(a));
    CHECK(conjugate_transpose(spin(a)) == spin(a));
  }
  const GammaProduct p = multiply(Gamma::AlphaX, Gamma::AlphaY);
  CHECK(p.label == Gamma::SigmaZ);
  CHECK(p.phase == Im);
  CHECK(is_even(Gamma::Beta));
  CHECK(is_even(Gamma::BetaSigmaY));
  CHECK_FALSE(is_even(Gamma::AlphaZ));
  CHECK_FALSE(is_even(Gamma::Gamma5));
  CHECK(adjoint_sign(Gamma::BetaAlphaX) == -1);
  CHECK(adjoint_sign(Gamma::SigmaX) == 1);
  // Table agrees with the matrices for every pair.
  const GammaBasis& basis = gamma_basis();
  for (int a = 0; a < kGammaCount; ++a)
    for (int b = 0; b < kGammaCount; ++b) {
      const GammaProduct ab = multiply(static_cast<Gamma>(a), static_cast<Gamma>(b));
      CHECK(product(basis.elements[a], basis.elements[b]) == DiracMatrix(basis[ab.label] * ab.phase));
    }
}

TEST_CASE("identity suite report") {
  const IdentityReport r = run_identity_suite(1, 100);
  CHECK(r.failed() == 0);
  CHECK(r.passed() == static_cast<int>(r.checks.size()));
}
