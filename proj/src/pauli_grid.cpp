#include "fw/pauli_grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

namespace fw::grid {

namespace {

using Triplet = Eigen::Triplet<Complex>;

struct Neighbor {
  int dx;
  int dy;
};
constexpr std::array<Neighbor, 4> kNeighbors{{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw GridError("setting '" + key + "' expects a number, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw GridError("setting '" + key + "' expects an integer, got '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw GridError("setting '" + key + "' expects true/false, got '" + value + "'");
}

}  // namespace

void Grid2D::validate() const {
  if (N < 16) throw GridError("grid needs N >= 16, got " + std::to_string(N));
  if (!(L > 0)) throw GridError("box side L must be positive");
}

double GridUnits::magnetic_length(double B) const { return std::sqrt(hbar / (e * B)); }

double FieldConfig::V(double x, double y, const Grid2D& g, const GridUnits& u) const {
  if (potential == PotentialProfile::none) return 0;
  const double dx = x - g.L / 2;
  const double dy = y - g.L / 2;
  return -k * (dx * dx + dy * dy) / (2 * u.e);
}

std::array<double, 2> FieldConfig::E(double x, double y, const Grid2D& g, const GridUnits& u) const {
  if (potential == PotentialProfile::none) return {0, 0};
  return {k * (x - g.L / 2) / u.e, k * (y - g.L / 2) / u.e};
}

double FieldConfig::divergence_E(const GridUnits& u) const {
  return potential == PotentialProfile::none ? 0 : 2 * k / u.e;
}

SpinOrbitForm TermToggles::spin_orbit_from_flags(bool pi_form, bool p_form) {
  if (pi_form && p_form) throw ToggleConflict("pi_form and p_form spin-orbit terms are mutually exclusive");
  if (pi_form) return SpinOrbitForm::pi_form;
  if (p_form) return SpinOrbitForm::p_form;
  return SpinOrbitForm::off;
}

SparseMatrixC GridHamiltonian::spin_block(int s) const {
  if (s != 1 && s != -1) throw std::invalid_argument("spin must be +1 or -1");
  const int n = grid.sites();
  for (int c = 0; c < matrix.outerSize(); ++c)
    for (SparseMatrixC::InnerIterator it(matrix, c); it; ++it)
      if ((it.row() < n) != (it.col() < n) && it.value() != Complex(0, 0)) throw std::logic_error("spin blocks are coupled");
  const int offset = s == 1 ? 0 : n;
  return matrix.block(offset, offset, n, n);
}

std::array<double, 2> vector_potential(Gauge gauge, double B, double x, double y, const Grid2D& g) {
  const double dx = x - g.L / 2;
  const double dy = y - g.L / 2;
  if (gauge == Gauge::landau) return {-B * dy, 0};
  return {-B * dy / 2, B * dx / 2};
}

GridHamiltonian build_hamiltonian(const Grid2D& grid, Gauge gauge, const FieldConfig& fields,
                                  const TermToggles& toggles, const GridUnits& units) {
  grid.validate();
  if (fields.B < 0) throw GridError("B must be nonnegative");
  if (fields.k < 0) throw GridError("harmonic strength k must be nonnegative");
  GridHamiltonian out;
  out.grid = grid;
  out.gauge = gauge;
  const double h = grid.spacing();
  if (fields.B > 0) {
    const double ell = units.magnetic_length(fields.B);
    if (ell < 2 * h) {
      throw GridError("grid too coarse: magnetic length " + std::to_string(ell) + " is below two spacings (" +
                      std::to_string(2 * h) + ")");
    }
    if (!(4 * h < ell && ell < grid.L / 6)) {
      out.warnings.push_back("magnetic length " + std::to_string(ell) + " outside the window (4h, L/6) = (" +
                             std::to_string(4 * h) + ", " + std::to_string(grid.L / 6) + ")");
    }
  }

  const int n = grid.sites();
  const int N = grid.N;
  const double t = units.hbar * units.hbar / (2 * units.m * h * h);
  const double mu = units.bohr_magneton();
  const double so = units.e * units.hbar / (4 * units.m * units.m * units.c * units.c);
  const double darwin =
      units.e * units.hbar * units.hbar / (8 * units.m * units.m * units.c * units.c) * fields.divergence_E(units);

  // Link phase exp(i(e/ħ)∫A·dl) by the midpoint rule, exact for linear A.
  auto link_phase = [&](int ix, int iy, const Neighbor& d) {
    const double xm = grid.coordinate(ix) + 0.5 * d.dx * h;
    const double ym = grid.coordinate(iy) + 0.5 * d.dy * h;
    const auto a = vector_potential(gauge, fields.B, xm, ym, grid);
    const double theta = units.e / units.hbar * (a[0] * d.dx * h + a[1] * d.dy * h);
    return std::polar(1.0, theta);
  };

  // Kinetic and Zeeman parts are kept apart: the mass correction squares their sum.
  std::vector<Triplet> kinetic;
  std::vector<Triplet> zeeman;
  std::vector<Triplet> rest;
  for (int spin = 0; spin < 2; ++spin) {
    const int s = spin == 0 ? 1 : -1;
    const int offset = spin * n;
    for (int iy = 0; iy < N; ++iy)
      for (int ix = 0; ix < N; ++ix) {
        const int i = grid.site(ix, iy);
        const double x = grid.coordinate(ix);
        const double y = grid.coordinate(iy);
        kinetic.emplace_back(offset + i, offset + i, 4 * t);
        zeeman.emplace_back(offset + i, offset + i, s * mu * fields.B);
        for (const Neighbor& d : kNeighbors) {
          const int jx = ix + d.dx;
          const int jy = iy + d.dy;
          if (jx < 0 || jy < 0 || jx >= N || jy >= N) continue;
          const int j = grid.site(jx, jy);
          const Complex u = link_phase(ix, iy, d);
          kinetic.emplace_back(offset + i, offset + j, -t * u);
          if (toggles.spin_orbit != SpinOrbitForm::off) {
            // s (eħ/4m²c²)(E_x Π_y − E_y Π_x), with E averaged over the link so the
            // discrete operator is the Hermitian part of E×Π.
            const auto ei = fields.E(x, y, grid, units);
            const auto ej = fields.E(grid.coordinate(jx), grid.coordinate(jy), grid, units);
            const double ex = 0.5 * (ei[0] + ej[0]);
            const double ey = 0.5 * (ei[1] + ej[1]);
            const double factor = d.dx != 0 ? -ey : ex;
            const double direction = d.dx + d.dy;  // +1 forward, −1 backward
            const Complex hop = toggles.spin_orbit == SpinOrbitForm::pi_form ? u : Complex(1, 0);
            const Complex pi_entry = Complex(0, -units.hbar / (2 * h)) * direction * hop;
            rest.emplace_back(offset + i, offset + j, s * so * factor * pi_entry);
          }
        }
        double diagonal = -units.e * fields.V(x, y, grid, units);
        if (toggles.darwin) diagonal += darwin;
        rest.emplace_back(offset + i, offset + i, diagonal);
      }
  }

  SparseMatrixC kinetic_matrix(2 * n, 2 * n);
  kinetic_matrix.setFromTriplets(kinetic.begin(), kinetic.end());
  SparseMatrixC zeeman_matrix(2 * n, 2 * n);
  zeeman_matrix.setFromTriplets(zeeman.begin(), zeeman.end());
  SparseMatrixC matrix(2 * n, 2 * n);
  matrix.setFromTriplets(rest.begin(), rest.end());
  if (toggles.kinetic) matrix += kinetic_matrix;
  if (toggles.zeeman) matrix += zeeman_matrix;
  if (toggles.mass_correction) {
    const SparseMatrixC k_matrix = kinetic_matrix + zeeman_matrix;
    const SparseMatrixC square = k_matrix * k_matrix;
    matrix += Complex(-1 / (2 * units.m * units.c * units.c), 0) * square;
  }
  matrix.prune(Complex(0, 0));
  out.matrix = std::move(matrix);
  return out;
}

Eigen::VectorXcd gauge_phases(const Grid2D& grid, double B, const GridUnits& units) {
  const int n = grid.sites();
  Eigen::VectorXcd out(2 * n);
  for (int iy = 0; iy < grid.N; ++iy)
    for (int ix = 0; ix < grid.N; ++ix) {
      // A_landau = A_symmetric + ∇χ with χ = −B(x − x0)(y − y0)/2.
      const double chi = -B * (grid.coordinate(ix) - grid.L / 2) * (grid.coordinate(iy) - grid.L / 2) / 2;
      const Complex phase = std::polar(1.0, -units.e / units.hbar * chi);
      out(grid.site(ix, iy)) = phase;
      out(n + grid.site(ix, iy)) = phase;
    }
  return out;
}

double gauge_covariance_error(const GridHamiltonian& landau, const GridHamiltonian& symmetric,
                              const Eigen::VectorXcd& phases) {
  const SparseMatrixC conjugated = phases.asDiagonal() * symmetric.matrix * phases.conjugate().asDiagonal();
  const SparseMatrixC diff = conjugated - landau.matrix;
  double largest = 0;
  double worst = 0;
  for (int c = 0; c < landau.matrix.outerSize(); ++c)
    for (SparseMatrixC::InnerIterator it(landau.matrix, c); it; ++it) largest = std::max(largest, std::abs(it.value()));
  for (int c = 0; c < diff.outerSize(); ++c)
    for (SparseMatrixC::InnerIterator it(diff, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return largest == 0 ? 0 : worst / largest;
}

GaugeReport gauge_invariance_report(const Grid2D& grid, const FieldConfig& fields, const TermToggles& toggles,
                                    int k, const GridUnits& units, const EigenOptions& options) {
  const GridHamiltonian hl = build_hamiltonian(grid, Gauge::landau, fields, toggles, units);
  const GridHamiltonian hs = build_hamiltonian(grid, Gauge::symmetric, fields, toggles, units);
  GaugeReport report;
  report.warnings = hl.warnings;
  report.landau = lowest_eigenpairs(hl.matrix, k, options).values;
  report.symmetric = lowest_eigenpairs(hs.matrix, k, options).values;
  for (int i = 0; i < k; ++i) {
    const double scale = std::max(std::abs(report.landau[i]), std::abs(report.symmetric[i]));
    const double diff = std::abs(report.landau[i] - report.symmetric[i]);
    report.max_relative_discrepancy = std::max(report.max_relative_discrepancy, scale == 0 ? diff : diff / scale);
  }
  report.matrix_covariance_error = gauge_covariance_error(hl, hs, gauge_phases(grid, fields.B, units));
  return report;
}

std::vector<Cluster> degenerate_clusters(const std::vector<double>& values, double tolerance) {
  std::vector<Cluster> out;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i < values.size() && values[i] - values[i - 1] <= tolerance) continue;
    Cluster c;
    c.low = values[begin];
    c.high = values[i - 1];
    c.size = static_cast<int>(i - begin);
    double sum = 0;
    for (std::size_t j = begin; j < i; ++j) sum += values[j];
    c.mean = sum / c.size;
    out.push_back(c);
    begin = i;
  }
  return out;
}

LandauRecovery landau_recovery(const Grid2D& grid, double B, const GridUnits& units, int k, int min_cluster,
                               double tol) {
  if (!(B > 0)) throw GridError("Landau recovery needs B > 0");
  TermToggles toggles;
  const GridHamiltonian h = build_hamiltonian(grid, Gauge::landau, {B, PotentialProfile::none, 0}, toggles, units);
  LandauRecovery out;
  out.hbar_omega = units.cyclotron_energy(B);
  out.spectrum = lowest_eigenvalues(h.spin_block(-1), k, tol);
  out.clusters = degenerate_clusters(out.spectrum, 1e-2 * out.hbar_omega);
  std::vector<Cluster> bulk;
  for (const Cluster& c : out.clusters)
    if (c.size >= min_cluster) bulk.push_back(c);
  if (bulk.size() < 2) {
    throw NonConvergence("Landau recovery: fewer than two bulk clusters among the lowest " + std::to_string(k) +
                         " levels");
  }
  out.level0 = bulk[0].mean;
  out.level1 = bulk[1].mean;
  out.orbital_gap = out.level1 - out.level0;
  return out;
}

std::vector<ConvergenceRow> landau_convergence(double B, double L, const std::vector<int>& sizes,
                                               const GridUnits& units, double tol) {
  if (B < 0) throw GridError("B must be nonnegative");
  for (std::size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1]) throw GridError("grid sizes must increase");
  std::vector<ConvergenceRow> rows;
  for (int N : sizes) {
    const Grid2D grid{N, L};
    const GridHamiltonian h = build_hamiltonian(grid, Gauge::landau, {B, PotentialProfile::none, 0}, {}, units);
    ConvergenceRow row;
    row.N = N;
    row.h = grid.spacing();
    row.computed = lowest_eigenvalues(h.spin_block(1), 1, tol).front();
    row.spin_down = lowest_eigenvalues(h.spin_block(-1), 1, tol).front();
    if (B > 0) {
      row.expected = units.cyclotron_energy(B) / 2 + units.bohr_magneton() * B;
    } else {
      row.expected = std::numbers::pi * std::numbers::pi * units.hbar * units.hbar / (units.m * L * L);
    }
    row.error = std::abs(row.computed - row.expected);
    rows.push_back(row);
  }
  return rows;
}

void GridConfig::set(const std::string& key, const std::string& value) {
  if (key == "N") {
    grid.N = parse_int(key, value);
  } else if (key == "L") {
    grid.L = parse_double(key, value);
  } else if (key == "B") {
    fields.B = parse_double(key, value);
  } else if (key == "potential") {
    if (value == "none") {
      fields.potential = PotentialProfile::none;
    } else if (value == "harmonic") {
      fields.potential = PotentialProfile::harmonic;
    } else {
      throw GridError("potential must be none or harmonic, got '" + value + "'");
    }
  } else if (key == "k") {
    fields.k = parse_double(key, value);
  } else if (key == "gauge") {
    if (value == "landau") {
      gauge = Gauge::landau;
    } else if (value == "symmetric") {
      gauge = Gauge::symmetric;
    } else {
      throw GridError("gauge must be landau or symmetric, got '" + value + "'");
    }
  } else if (key == "kinetic") {
    toggles.kinetic = parse_bool(key, value);
  } else if (key == "zeeman") {
    toggles.zeeman = parse_bool(key, value);
  } else if (key == "mass_correction") {
    toggles.mass_correction = parse_bool(key, value);
  } else if (key == "darwin") {
    toggles.darwin = parse_bool(key, value);
  } else if (key == "spin_orbit") {
    if (value == "off") {
      toggles.spin_orbit = SpinOrbitForm::off;
    } else if (value == "pi_form") {
      toggles.spin_orbit = SpinOrbitForm::pi_form;
    } else if (value == "p_form") {
      toggles.spin_orbit = SpinOrbitForm::p_form;
    } else {
      throw GridError("spin_orbit must be off, pi_form or p_form, got '" + value + "'");
    }
  } else if (key == "eigenvalues") {
    eigenvalues = parse_int(key, value);
  } else if (key == "tol") {
    eigen.tol = parse_double(key, value);
  } else if (key == "max_iterations") {
    eigen.max_iterations = parse_int(key, value);
  } else {
    throw GridError("unknown grid setting '" + key + "'");
  }
}

GridConfig GridConfig::from_settings(const std::map<std::string, std::string>& settings) {
  GridConfig config;
  for (const auto& [key, value] : settings) config.set(key, value);
  return config;
}

void write_spectrum_csv(std::ostream& out, const std::vector<double>& energies, int precision) {
  out << "index,energy\n";
  out << std::setprecision(precision);
  for (std::size_t i = 0; i < energies.size(); ++i) out << i << ',' << energies[i] << '\n';
}

}  // namespace fw::grid
