#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fw/eigensolver.hpp"

namespace fw::grid {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ToggleConflict : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// N×N interior points of the box [0, L]², spacing L/(N+1); the wavefunction vanishes
/// on the walls and outside.
struct Grid2D {
  int N = 64;
  double L = 60;

  double spacing() const { return L / (N + 1); }
  double coordinate(int i) const { return (i + 1) * spacing(); }
  int sites() const { return N * N; }
  int site(int ix, int iy) const { return iy * N + ix; }
  void validate() const;
};

/// Physical constants for the grid; natural units by default.
struct GridUnits {
  double hbar = 1;
  double m = 1;
  double c = 1;
  double e = 1;

  double bohr_magneton() const { return e * hbar / (2 * m); }
  double cyclotron_energy(double B) const { return hbar * e * B / m; }
  double magnetic_length(double B) const;
};

enum class Gauge { landau, symmetric };
enum class PotentialProfile { none, harmonic };

/// Uniform B along z and a scalar potential. For `harmonic`, V is chosen so that the
/// electron's potential energy −eV equals (k/2)|r − r_c|² about the box center r_c;
/// E = −∇V and ∇·E are evaluated analytically.
struct FieldConfig {
  double B = 0;
  PotentialProfile potential = PotentialProfile::none;
  double k = 0;

  double V(double x, double y, const Grid2D& g, const GridUnits& u) const;
  /// {E_x, E_y}
  std::array<double, 2> E(double x, double y, const Grid2D& g, const GridUnits& u) const;
  double divergence_E(const GridUnits& u) const;
};

enum class SpinOrbitForm { off, pi_form, p_form };

struct TermToggles {
  bool kinetic = true;
  bool zeeman = true;
  bool mass_correction = false;
  SpinOrbitForm spin_orbit = SpinOrbitForm::off;
  bool darwin = false;

  /// Builds the spin-orbit choice from two independent switches; both set is a conflict.
  static SpinOrbitForm spin_orbit_from_flags(bool pi_form, bool p_form);
};

/// 2N² × 2N² sparse Hermitian matrix, spin-major: index = spin·N² + site with spin 0
/// for σ_z = +1 and 1 for σ_z = −1.
struct GridHamiltonian {
  SparseMatrixC matrix;
  Grid2D grid;
  Gauge gauge = Gauge::landau;
  std::vector<std::string> warnings;

  /// Diagonal block of one spin projection (s = ±1). Throws if the spins are coupled.
  SparseMatrixC spin_block(int s) const;
};

/// Vector potential in the chosen gauge, centered on the box.
std::array<double, 2> vector_potential(Gauge gauge, double B, double x, double y, const Grid2D& g);

/// Pauli Hamiltonian with the toggled correction terms. Kinetic and Π-form spin-orbit
/// hops carry Peierls phases exp(i(e/ħ)∫A·dl); the p-form uses bare central differences.
/// Throws GridError if the magnetic length is below two grid spacings or inputs are out
/// of range; records a warning if it leaves the window 4h < ℓ_B < L/6.
GridHamiltonian build_hamiltonian(const Grid2D& grid, Gauge gauge, const FieldConfig& fields,
                                  const TermToggles& toggles, const GridUnits& units = {});

/// Diagonal site phases U with U H_symmetric Uᴴ = H_landau when every momentum-bearing
/// term carries link phases. Entries repeat for both spin blocks.
Eigen::VectorXcd gauge_phases(const Grid2D& grid, double B, const GridUnits& units = {});

/// max |U H_s Uᴴ − H_l| / max |H_l|.
double gauge_covariance_error(const GridHamiltonian& landau, const GridHamiltonian& symmetric,
                              const Eigen::VectorXcd& phases);

struct GaugeReport {
  std::vector<double> landau;
  std::vector<double> symmetric;
  double max_relative_discrepancy = 0;
  double matrix_covariance_error = 0;
  std::vector<std::string> warnings;
};

GaugeReport gauge_invariance_report(const Grid2D& grid, const FieldConfig& fields, const TermToggles& toggles,
                                    int k, const GridUnits& units = {}, const EigenOptions& options = {});

/// Runs of sorted values whose consecutive differences stay below `tolerance`.
struct Cluster {
  double mean = 0;
  double low = 0;
  double high = 0;
  int size = 0;
};
std::vector<Cluster> degenerate_clusters(const std::vector<double>& sorted_values, double tolerance);

struct LandauRecovery {
  double hbar_omega = 0;
  /// Bulk n = 0 and n = 1 levels of the σ_z = −1 block (kinetic + Zeeman only).
  double level0 = 0;
  double level1 = 0;
  double orbital_gap = 0;
  std::vector<double> spectrum;
  std::vector<Cluster> clusters;
};

/// Lowest `k` levels of the σ_z = −1 block with B > 0 and no potential; bulk levels are
/// the runs of at least `min_cluster` states spaced by less than ħω_c/100.
LandauRecovery landau_recovery(const Grid2D& grid, double B, const GridUnits& units = {}, int k = 32,
                               int min_cluster = 3, double tol = 1e-10);

struct ConvergenceRow {
  int N = 0;
  double h = 0;
  /// Lowest σ_z = +1 level (B > 0) or lowest box level (B = 0).
  double computed = 0;
  double expected = 0;
  double error = 0;
  /// Lowest σ_z = −1 level; expected to stay at zero for B > 0.
  double spin_down = 0;
};

/// Kinetic + Zeeman spectra on a fixed box for increasing N, against ħω_c/2 + μB
/// (B > 0) or the continuum box ground state 2·π²ħ²/(2mL²) (B = 0).
std::vector<ConvergenceRow> landau_convergence(double B, double L, const std::vector<int>& sizes,
                                               const GridUnits& units = {}, double tol = 1e-10);

/// Everything the gauge-check verb needs, readable from `key = value` settings.
struct GridConfig {
  Grid2D grid;
  FieldConfig fields{0.02, PotentialProfile::harmonic, 1e-4};
  TermToggles toggles;
  Gauge gauge = Gauge::landau;
  int eigenvalues = 10;
  EigenOptions eigen;

  /// Applies one setting; throws GridError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  static GridConfig from_settings(const std::map<std::string, std::string>& settings);
};

/// index,energy rows with `precision` significant digits.
void write_spectrum_csv(std::ostream& out, const std::vector<double>& energies, int precision = 12);

}  // namespace fw::grid
