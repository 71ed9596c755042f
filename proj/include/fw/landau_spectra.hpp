#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fw/gaussian_rational.hpp"

namespace fw::landau {

/// 100 decimal digits; every square root is taken at this precision.
using HighPrecision = boost::multiprecision::cpp_bin_float_100;

enum class UnitsMode { natural, si };

/// Values of ħ, m, c, e. Derived quantities are always recomputed from these.
template <class T>
struct Units {
  UnitsMode mode = UnitsMode::natural;
  T hbar{1};
  T m{1};
  T c{1};
  T e{1};

  static Units natural() { return {}; }
  /// CODATA 2018 values (ħ, m_e, c and e exactly as published).
  static Units si() {
    return {UnitsMode::si, from_decimal("1.054571817e-34"), from_decimal("9.1093837015e-31"), from_decimal("299792458"),
            from_decimal("1.602176634e-19")};
  }

  T rest_energy() const { return m * c * c; }
  T cyclotron_frequency(const T& B) const { return e * B / m; }
  T bohr_magneton() const { return e * hbar / (T(2) * m); }

 private:
  static T from_decimal(const char* text) {
    if constexpr (std::is_same_v<T, Rational>) {
      return parse_rational(text);
    } else {
      return T(text);
    }
  }
};

template <class T>
struct LandauQuantum {
  int n = 0;
  T p_z{0};
  int s = 1;
};

template <class T>
void check_quantum(const LandauQuantum<T>& q) {
  if (q.n < 0) throw std::domain_error("Landau quantum number must be nonnegative, got " + std::to_string(q.n));
  if (q.s != 1 && q.s != -1) throw std::domain_error("spin sign must be +1 or -1, got " + std::to_string(q.s));
}

template <class T>
void check_field(const T& B) {
  if (B < T(0)) throw std::domain_error("magnetic field strength must be nonnegative");
}

/// D = ħω_c(n + ½) + p_z²/2m ± μB. Exact whenever T is exact.
template <class T>
T d_value(const LandauQuantum<T>& q, const T& B, const Units<T>& u) {
  check_quantum(q);
  check_field(B);
  const T orbital = u.hbar * u.cyclotron_frequency(B) * (T(2 * q.n + 1) / T(2));
  const T spin = T(q.s) * u.bohr_magneton() * B;
  return orbital + q.p_z * q.p_z / (T(2) * u.m) + spin;
}

/// ε = [(mc²)² + 2mc²·D]^{1/2}.
template <class Real>
Real exact_energy(const LandauQuantum<Real>& q, const Real& B, const Units<Real>& u) {
  using std::sqrt;
  const Real mc2 = u.rest_energy();
  const Real d = d_value(q, B, u);
  return sqrt(mc2 * mc2 + Real(2) * mc2 * d);
}

/// Whether the (1/c)² series is inside its useful range, 2D < mc².
template <class T>
bool expansion_valid(const T& d, const Units<T>& u) {
  return T(2) * d < u.rest_energy();
}

/// mc² + D − D²/2mc².
template <class T>
T expanded_energy_from_d(const T& d, const Units<T>& u) {
  const T mc2 = u.rest_energy();
  return mc2 + d - d * d / (T(2) * mc2);
}

template <class T>
T expanded_energy(const LandauQuantum<T>& q, const T& B, const Units<T>& u) {
  return expanded_energy_from_d(d_value(q, B, u), u);
}

/// mc²[1 + (2/mc²)(ħω_c(n+½) + p_z²/2m ± μB)]^{1/2}, the square-root Hamiltonian's
/// eigenvalue. Written from its own formula rather than through exact_energy.
template <class Real>
Real sqrt_hamiltonian_energy(const LandauQuantum<Real>& q, const Real& B, const Units<Real>& u) {
  using std::sqrt;
  check_quantum(q);
  check_field(B);
  const Real mc2 = u.m * u.c * u.c;
  const Real omega = u.e * B / u.m;
  const Real mu = u.e * u.hbar / (Real(2) * u.m);
  const Real bracket = u.hbar * omega * (Real(q.n) + Real(1) / Real(2)) + q.p_z * q.p_z / (Real(2) * u.m) +
                       Real(q.s) * mu * B;
  return mc2 * sqrt(Real(1) + (Real(2) / mc2) * bracket);
}

/// mc²·Σ_{k<terms} binom(½, k)·x^k with x = 2D/mc²; three terms give mc² + D − D²/2mc².
template <class T>
T sqrt_hamiltonian_series(const LandauQuantum<T>& q, const T& B, const Units<T>& u, int terms = 3) {
  if (terms < 1) throw std::invalid_argument("series needs at least one term");
  const T mc2 = u.rest_energy();
  const T x = T(2) * d_value(q, B, u) / mc2;
  T coefficient{1};
  T power{1};
  T sum{0};
  for (int k = 0; k < terms; ++k) {
    sum += coefficient * power;
    coefficient = coefficient * (T(1) / T(2) - T(k)) / T(k + 1);
    power *= x;
  }
  return mc2 * sum;
}

/// μ(ε) = eħc²/2ε, the Bohr magneton with m replaced by ε/c².
template <class T>
T magnetic_moment(const T& energy, const Units<T>& u) {
  if (energy < u.rest_energy()) throw std::domain_error("magnetic moment needs ε ≥ mc²");
  return u.e * u.hbar * u.c * u.c / (T(2) * energy);
}

/// ε(n, p_z, +) − ε(n, p_z, −).
template <class Real>
Real spin_splitting(int n, const Real& p_z, const Real& B, const Units<Real>& u) {
  if (!(B > Real(0))) throw std::domain_error("spin splitting needs B > 0");
  return exact_energy<Real>({n, p_z, 1}, B, u) - exact_energy<Real>({n, p_z, -1}, B, u);
}

template <class Real>
struct SpectrumRow {
  LandauQuantum<Real> quantum;
  Real B;
  Real D;
  Real epsilon_exact;
  Real epsilon_expanded;
  Real residual;
  /// ε(n,+) − ε(n,−) at this row's n, p_z, B; zero when B = 0.
  Real splitting;
};

/// Rows for n = 0..n_max, s = +1 then −1, for every B in order.
template <class Real>
std::vector<SpectrumRow<Real>> spectrum(int n_max, const Real& p_z, const std::vector<Real>& fields,
                                        const Units<Real>& u) {
  if (n_max < 0) throw std::domain_error("n_max must be nonnegative");
  std::vector<SpectrumRow<Real>> rows;
  for (const Real& B : fields) {
    check_field(B);
    for (int n = 0; n <= n_max; ++n) {
      const Real split = B > Real(0) ? spin_splitting(n, p_z, B, u) : Real(0);
      for (int s : {1, -1}) {
        const LandauQuantum<Real> q{n, p_z, s};
        SpectrumRow<Real> row{q, B, d_value(q, B, u), exact_energy(q, B, u), expanded_energy(q, B, u), Real(0), split};
        row.residual = row.epsilon_exact - row.epsilon_expanded;
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace fw::landau
