#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fw/pauli_grid.hpp"

using namespace fw;
using namespace fw::grid;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXcd dense(const SparseMatrixC& m) { return Eigen::MatrixXcd(m); }

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Kinetic and Zeeman matrix written directly from the covariant hop
// −t·exp(i(e/ħ)∫A·dl) with Π = p + eA, natural units, gauges centered on the box.
Eigen::MatrixXcd oracle_kinetic_zeeman(const Grid2D& g, Gauge gauge, double B) {
  const int N = g.N;
  const int n = N * N;
  const double h = g.L / (N + 1);
  const double t = 1 / (2 * h * h);
  const double c = g.L / 2;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int spin = 0; spin < 2; ++spin) {
    const int o = spin * n;
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const double x = (ix + 1) * h - c;
        const double y = (iy + 1) * h - c;
        const int i = iy * N + ix;
        out(o + i, o + i) = 4 * t + (spin == 0 ? 0.5 : -0.5) * B;
        for (int step : {1, -1}) {
          if (ix + step >= 0 && ix + step < N) {
            const double ax = gauge == Gauge::landau ? -B * y : -B * y / 2;
            out(o + i, o + i + step) = -t * std::polar(1.0, ax * step * h);
          }
          if (iy + step >= 0 && iy + step < N) {
            const double ay = gauge == Gauge::landau ? 0 : B * x / 2;
            out(o + i, o + i + step * N) = -t * std::polar(1.0, ay * step * h);
          }
        }
      }
  }
  return out;
}

TermToggles only(bool kinetic, bool zeeman) {
  TermToggles t;
  t.kinetic = kinetic;
  t.zeeman = zeeman;
  return t;
}

const FieldConfig kHarmonic{0.02, PotentialProfile::harmonic, 1e-4};

}  // namespace

TEST_CASE("kinetic and Zeeman terms match the covariant-hop oracle in both gauges") {
  const Grid2D g{16, 40};
  for (Gauge gauge : {Gauge::landau, Gauge::symmetric})
    for (double B : {0.0, 0.02, 0.04}) {
      const GridHamiltonian h = build_hamiltonian(g, gauge, {B, PotentialProfile::none, 0}, {});
      CHECK(max_abs(dense(h.matrix) - oracle_kinetic_zeeman(g, gauge, B)) < 1e-13);
    }
}

TEST_CASE("Hermitian for every toggle combination") {
  const Grid2D g{16, 40};
  for (Gauge gauge : {Gauge::landau, Gauge::symmetric})
    for (int bits = 0; bits < 16; ++bits)
      for (SpinOrbitForm so : {SpinOrbitForm::off, SpinOrbitForm::pi_form, SpinOrbitForm::p_form}) {
        TermToggles t;
        t.kinetic = bits & 1;
        t.zeeman = bits & 2;
        t.mass_correction = bits & 4;
        t.darwin = bits & 8;
        t.spin_orbit = so;
        const GridHamiltonian h = build_hamiltonian(g, gauge, kHarmonic, t);
        CHECK(hermiticity_error(h.matrix) <= 1e-12);
      }
}

TEST_CASE("diagonal pieces: potential, Darwin, mass correction") {
  const Grid2D g{16, 40};
  const FieldConfig f{0.02, PotentialProfile::harmonic, 3e-4};
  const Eigen::MatrixXcd bare = dense(build_hamiltonian(g, Gauge::landau, f, only(false, false)).matrix);
  // −eV = k r²/2 about the center, for both spins.
  double worst = 0;
  for (int iy = 0; iy < g.N; ++iy)
    for (int ix = 0; ix < g.N; ++ix) {
      const double x = g.coordinate(ix) - g.L / 2;
      const double y = g.coordinate(iy) - g.L / 2;
      const int i = g.site(ix, iy);
      for (int o : {0, g.sites()}) worst = std::max(worst, std::abs(bare(o + i, o + i) - f.k * (x * x + y * y) / 2));
    }
  CHECK(worst < 1e-15);
  CHECK(std::abs(max_abs(bare - Eigen::MatrixXcd(bare.diagonal().asDiagonal()))) == 0);

  TermToggles darwin = only(false, false);
  darwin.darwin = true;
  const Eigen::MatrixXcd with_darwin = dense(build_hamiltonian(g, Gauge::landau, f, darwin).matrix);
  // (eħ²/8m²c²)·∇·E with ∇·E = 2k/e.
  const Eigen::MatrixXcd expected_shift = Eigen::MatrixXcd::Identity(2 * g.sites(), 2 * g.sites()) * (f.k / 4);
  CHECK(max_abs(with_darwin - bare - expected_shift) < 1e-15);

  TermToggles mass = only(false, false);
  mass.mass_correction = true;
  const Eigen::MatrixXcd with_mass = dense(build_hamiltonian(g, Gauge::symmetric, f, mass).matrix);
  const Eigen::MatrixXcd k = oracle_kinetic_zeeman(g, Gauge::symmetric, f.B);
  CHECK(max_abs(with_mass - bare + 0.5 * k * k) < 1e-12);
}

TEST_CASE("spin-orbit approaches the continuum action of s(eħ/4m²c²)(E×Π)_z") {
  // ψ is a smooth off-center Gaussian; compare (Hψ) on the interior with the
  // analytic action and require second-order convergence.
  const double L = 20;
  const FieldConfig f{0.05, PotentialProfile::harmonic, 2e-3};
  auto error_for = [&](int N, Gauge gauge, SpinOrbitForm form) {
    const Grid2D g{N, L};
    TermToggles off = only(false, false);
    TermToggles on = off;
    on.spin_orbit = form;
    const SparseMatrixC so = build_hamiltonian(g, gauge, f, on).matrix - build_hamiltonian(g, gauge, f, off).matrix;
    const double x0 = 8.5;
    const double y0 = 11.0;
    const double w = 2.5;
    Eigen::VectorXcd psi(2 * g.sites());
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const double dx = g.coordinate(ix) - x0;
        const double dy = g.coordinate(iy) - y0;
        const double v = std::exp(-(dx * dx + dy * dy) / (2 * w * w));
        psi(g.site(ix, iy)) = v;
        psi(g.sites() + g.site(ix, iy)) = v;
      }
    const Eigen::VectorXcd got = so * psi;
    double worst = 0;
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const double x = g.coordinate(ix);
        const double y = g.coordinate(iy);
        if (std::min({x, y, L - x, L - y}) < 5) continue;  // ψ is negligible there
        const double dx = x - x0;
        const double dy = y - y0;
        const double v = std::exp(-(dx * dx + dy * dy) / (2 * w * w));
        const Complex px = Complex(0, 1) * dx / (w * w) * v;  // −i∂_x ψ
        const Complex py = Complex(0, 1) * dy / (w * w) * v;
        const auto a = form == SpinOrbitForm::pi_form ? vector_potential(gauge, f.B, x, y, g) : std::array<double, 2>{0, 0};
        const Complex pix = px + a[0] * v;
        const Complex piy = py + a[1] * v;
        const double ex = f.k * (x - L / 2);
        const double ey = f.k * (y - L / 2);
        const Complex expected = 0.25 * (ex * piy - ey * pix);
        for (int s : {1, -1}) {
          const int row = (s == 1 ? 0 : g.sites()) + g.site(ix, iy);
          worst = std::max(worst, std::abs(got(row) - double(s) * expected));
        }
      }
    return worst;
  };
  for (Gauge gauge : {Gauge::landau, Gauge::symmetric})
    for (SpinOrbitForm form : {SpinOrbitForm::pi_form, SpinOrbitForm::p_form}) {
      const double coarse = error_for(39, gauge, form);
      const double fine = error_for(79, gauge, form);
      CHECK(coarse < 1e-4);
      CHECK(fine < coarse / 3.5);
    }
}

TEST_CASE("gauge covariance is exact when every momentum carries link phases") {
  const Grid2D g{20, 40};
  TermToggles t;
  t.mass_correction = true;
  t.darwin = true;
  t.spin_orbit = SpinOrbitForm::pi_form;
  const GridHamiltonian l = build_hamiltonian(g, Gauge::landau, kHarmonic, t);
  const GridHamiltonian s = build_hamiltonian(g, Gauge::symmetric, kHarmonic, t);
  const Eigen::VectorXcd u = gauge_phases(g, kHarmonic.B);
  CHECK(gauge_covariance_error(l, s, u) <= 1e-12);
  CHECK(max_abs(dense(l.matrix) - dense(s.matrix)) > 1e-3);  // the gauges really differ

  t.spin_orbit = SpinOrbitForm::p_form;
  const GridHamiltonian lp = build_hamiltonian(g, Gauge::landau, kHarmonic, t);
  const GridHamiltonian sp = build_hamiltonian(g, Gauge::symmetric, kHarmonic, t);
  CHECK(gauge_covariance_error(lp, sp, u) > 1e-8);
}

TEST_CASE("B = 0 gives the same matrix in both gauges") {
  const Grid2D g{16, 30};
  TermToggles t;
  t.spin_orbit = SpinOrbitForm::p_form;
  t.darwin = true;
  const FieldConfig f{0, PotentialProfile::harmonic, 1e-3};
  const GridHamiltonian l = build_hamiltonian(g, Gauge::landau, f, t);
  const GridHamiltonian s = build_hamiltonian(g, Gauge::symmetric, f, t);
  CHECK(max_abs(dense(l.matrix) - dense(s.matrix)) == 0);
}

TEST_CASE("spectral gauge invariance: Π-form holds, p-form breaks") {
  const Grid2D g{32, 40};
  TermToggles t;
  t.darwin = true;
  t.spin_orbit = SpinOrbitForm::pi_form;
  const GaugeReport pi = gauge_invariance_report(g, kHarmonic, t, 10);
  REQUIRE(pi.landau.size() == 10);
  CHECK(pi.max_relative_discrepancy <= 1e-9);
  CHECK(pi.matrix_covariance_error <= 1e-12);
  t.spin_orbit = SpinOrbitForm::p_form;
  const GaugeReport p = gauge_invariance_report(g, kHarmonic, t, 10);
  CHECK(p.max_relative_discrepancy > 1e-5);  // measured 3.1e-5 on this grid
  CHECK(p.max_relative_discrepancy > 1e4 * pi.max_relative_discrepancy);
  CHECK(gauge_invariance_report(g, {0, PotentialProfile::harmonic, 1e-4}, t, 10).max_relative_discrepancy == 0);
}

TEST_CASE("lattice box levels") {
  // Exact discrete Dirichlet Laplacian: (ħ²/mh²)(2 − cos(pπ/(N+1)) − cos(qπ/(N+1))).
  const Grid2D g{24, 3};
  const GridHamiltonian h = build_hamiltonian(g, Gauge::landau, {}, only(true, false));
  const std::vector<double> got = lowest_eigenvalues(h.spin_block(1), 8);
  std::vector<double> expected;
  const double hh = g.spacing();
  for (int p = 1; p <= 6; ++p)
    for (int q = 1; q <= 6; ++q)
      expected.push_back((2 - std::cos(p * kPi / (g.N + 1)) - std::cos(q * kPi / (g.N + 1))) / (hh * hh));
  std::sort(expected.begin(), expected.end());
  for (int i = 0; i < 8; ++i) CHECK(std::abs(got[i] - expected[i]) < 1e-10 * expected[i]);

  // Continuum ground state 2·π²ħ²/(2mL²) within 1%.
  const Grid2D fine{48, 1};
  const double e0 = lowest_eigenvalues(build_hamiltonian(fine, Gauge::landau, {}, {}).matrix, 2)[0];
  const double continuum = kPi * kPi;
  CHECK(std::abs(e0 - continuum) < 0.01 * continuum);
}

TEST_CASE("Zeeman term splits the spin blocks by exactly 2μB") {
  const Grid2D g{16, 40};
  const GridHamiltonian h = build_hamiltonian(g, Gauge::symmetric, {0.03, PotentialProfile::none, 0}, {});
  const Eigen::MatrixXcd diff = dense(h.spin_block(1)) - dense(h.spin_block(-1));
  CHECK(max_abs(diff - Eigen::MatrixXcd::Identity(g.sites(), g.sites()) * 0.03) < 1e-15);
  const auto up = lowest_eigenvalues(h.spin_block(1), 3);
  const auto down = lowest_eigenvalues(h.spin_block(-1), 3);
  for (int i = 0; i < 3; ++i) CHECK(up[i] - down[i] == doctest::Approx(0.03).epsilon(1e-10));

  TermToggles coupled;
  coupled.spin_orbit = SpinOrbitForm::pi_form;
  CHECK_NOTHROW(build_hamiltonian(g, Gauge::landau, kHarmonic, coupled).spin_block(-1));
  CHECK_THROWS_AS(h.spin_block(0), std::invalid_argument);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(TermToggles::spin_orbit_from_flags(true, true), ToggleConflict);
  CHECK(TermToggles::spin_orbit_from_flags(true, false) == SpinOrbitForm::pi_form);
  CHECK(TermToggles::spin_orbit_from_flags(false, true) == SpinOrbitForm::p_form);
  CHECK(TermToggles::spin_orbit_from_flags(false, false) == SpinOrbitForm::off);
  // ℓ_B = 1 against h = 60/17.
  CHECK_THROWS_AS(build_hamiltonian({16, 60}, Gauge::landau, {1, PotentialProfile::none, 0}, {}), GridError);
  CHECK_THROWS_AS(build_hamiltonian({15, 60}, Gauge::landau, {}, {}), GridError);
  CHECK_THROWS_AS(build_hamiltonian({16, 0}, Gauge::landau, {}, {}), GridError);
  CHECK_THROWS_AS(build_hamiltonian({16, 60}, Gauge::landau, {-0.1, PotentialProfile::none, 0}, {}), GridError);
  // Inside the hard limit but outside the comfortable window: a warning, not an error.
  const GridHamiltonian warned = build_hamiltonian({16, 20}, Gauge::landau, {0.02, PotentialProfile::none, 0}, {});
  CHECK(warned.warnings.size() == 1);
  const GridHamiltonian quiet = build_hamiltonian({64, 60}, Gauge::landau, {0.02, PotentialProfile::none, 0}, {});
  CHECK(quiet.warnings.empty());
}

TEST_CASE("eigensolver against dense diagonalization") {
  SparseMatrixC two(2, 2);
  two.insert(0, 0) = 3;
  two.insert(1, 1) = 1;
  CHECK(lowest_eigenvalues(two, 2) == std::vector<double>{1, 3});

  // Banded random Hermitian matrix, large enough for the iterative path, with every
  // eigenvalue doubled by a direct sum.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uni(-1, 1);
  const int half = 350;
  std::vector<Eigen::Triplet<Complex>> entries;
  for (int i = 0; i < half; ++i) {
    const double d = uni(rng) * 4;
    for (int o : {0, half}) entries.emplace_back(o + i, o + i, d);
    for (int off = 1; off <= 3 && i + off < half; ++off) {
      const Complex z(uni(rng), uni(rng));
      for (int o : {0, half}) {
        entries.emplace_back(o + i, o + i + off, z);
        entries.emplace_back(o + i + off, o + i, std::conj(z));
      }
    }
  }
  SparseMatrixC m(2 * half, 2 * half);
  m.setFromTriplets(entries.begin(), entries.end());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> reference{dense(m)};
  const EigenResult r = lowest_eigenpairs(m, 12);
  REQUIRE(r.values.size() == 12);
  for (int i = 0; i < 12; ++i) {
    CHECK(std::abs(r.values[i] - reference.eigenvalues()(i)) < 1e-9);
    CHECK(r.residuals[i] <= 1e-10);
  }
  CHECK(std::abs(r.values[0] - r.values[1]) < 1e-9);
  CHECK(r.shift < r.values[0]);

  // Sylvester inertia against the dense count.
  for (double sigma : {-10.0, -3.0, 0.0, 2.5}) {
    const auto& ev = reference.eigenvalues();
    const int expected = static_cast<int>(std::count_if(ev.data(), ev.data() + ev.size(), [&](double v) { return v < sigma; }));
    CHECK(count_below(m, sigma) == expected);
  }

  CHECK_THROWS_AS(lowest_eigenpairs(m, 0), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenpairs(m, 33), std::invalid_argument);
  CHECK_THROWS_AS(lowest_eigenvalues(m, 4, 0), std::invalid_argument);
  EigenOptions hopeless;
  hopeless.tol = 1e-300;
  hopeless.max_iterations = 3;
  CHECK_THROWS_AS(lowest_eigenpairs(m, 4, hopeless), NonConvergence);
  // Same seed, same answer.
  CHECK(lowest_eigenpairs(m, 6).values == lowest_eigenpairs(m, 6).values);
}

TEST_CASE("degenerate clusters") {
  const auto c = degenerate_clusters({0, 1e-6, 2e-6, 0.5, 1, 1 + 1e-7}, 1e-3);
  REQUIRE(c.size() == 3);
  CHECK(c[0].size == 3);
  CHECK(c[0].mean == doctest::Approx(1e-6));
  CHECK(c[1].size == 1);
  CHECK(c[2].low == 1);
  CHECK(degenerate_clusters({}, 1).empty());
}

TEST_CASE("Landau levels on a scaled-down grid") {
  // ħω_c = 0.1, box of ten magnetic lengths.
  const LandauRecovery r = landau_recovery({48, std::sqrt(1000.0)}, 0.1);
  CHECK(r.hbar_omega == doctest::Approx(0.1));
  CHECK(std::abs(r.orbital_gap - r.hbar_omega) < 0.02 * r.hbar_omega);
  CHECK(std::abs(r.level0) < 0.02 * r.hbar_omega);
  CHECK(r.spectrum.size() == 32);
  CHECK_THROWS_AS(landau_recovery({48, 31}, 0), GridError);
}

TEST_CASE("convergence under refinement") {
  const auto landau = landau_convergence(0.1, 30, {20, 28, 40});
  REQUIRE(landau.size() == 3);
  for (std::size_t i = 0; i < landau.size(); ++i) {
    CHECK(landau[i].expected == doctest::Approx(0.1));
    CHECK(std::abs(landau[i].spin_down) < 0.02 * 0.1);
    if (i > 0) CHECK(std::abs(landau[i].error) < std::abs(landau[i - 1].error));
  }
  const auto box = landau_convergence(0, 30, {20, 28, 40});
  CHECK(box[0].expected == doctest::Approx(kPi * kPi / 900));
  CHECK(std::abs(box[2].error) < std::abs(box[1].error));
  CHECK(std::abs(box[1].error) < std::abs(box[0].error));
  CHECK_THROWS_AS(landau_convergence(0.1, 30, {28, 20}), GridError);
}

TEST_CASE("settings") {
  const GridConfig c = GridConfig::from_settings({{"N", "40"},
                                                  {"L", "50.5"},
                                                  {"B", "0.03"},
                                                  {"potential", "none"},
                                                  {"gauge", "symmetric"},
                                                  {"spin_orbit", "p_form"},
                                                  {"darwin", "true"},
                                                  {"mass_correction", "on"},
                                                  {"eigenvalues", "6"},
                                                  {"tol", "1e-8"},
                                                  {"max_iterations", "50"}});
  CHECK(c.grid.N == 40);
  CHECK(c.grid.L == 50.5);
  CHECK(c.fields.B == 0.03);
  CHECK(c.fields.potential == PotentialProfile::none);
  CHECK(c.gauge == Gauge::symmetric);
  CHECK(c.toggles.spin_orbit == SpinOrbitForm::p_form);
  CHECK(c.toggles.darwin);
  CHECK(c.toggles.mass_correction);
  CHECK(c.toggles.kinetic);
  CHECK(c.eigenvalues == 6);
  CHECK(c.eigen.tol == 1e-8);
  CHECK(c.eigen.max_iterations == 50);
  const GridConfig defaults;
  CHECK(defaults.grid.N == 64);
  CHECK(defaults.fields.B == 0.02);
  CHECK(defaults.fields.potential == PotentialProfile::harmonic);
  GridConfig bad;
  CHECK_THROWS_AS(bad.set("N", "forty"), GridError);
  CHECK_THROWS_AS(bad.set("N", "40x"), GridError);
  CHECK_THROWS_AS(bad.set("darwin", "maybe"), GridError);
  CHECK_THROWS_AS(bad.set("spin_orbit", "both"), GridError);
  CHECK_THROWS_AS(bad.set("colour", "red"), GridError);
}

TEST_CASE("spectrum CSV") {
  std::ostringstream out;
  write_spectrum_csv(out, {0.5, 1.25, 3}, 6);
  CHECK(out.str() == "index,energy\n0,0.5\n1,1.25\n2,3\n");
}
