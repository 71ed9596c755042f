#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace fw {

using Complex = std::complex<double>;
using SparseMatrixC = Eigen::SparseMatrix<Complex>;

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EigenOptions {
  /// Largest accepted ‖Hx − λx‖ for a unit Ritz vector x.
  double tol = 1e-10;
  /// Budget of shift-invert block applications.
  int max_iterations = 10000;
  std::uint64_t seed = 1;
};

struct EigenResult {
  std::vector<double> values;
  Eigen::MatrixXcd vectors;
  std::vector<double> residuals;
  int iterations = 0;
  double shift = 0;
};

/// Lowest k eigenpairs of a Hermitian matrix, ascending. Small matrices go through a
/// dense solver; larger ones through shift-invert block Krylov with Rayleigh-Ritz on H.
/// Requires 1 ≤ k ≤ 32 and k ≤ dimension.
EigenResult lowest_eigenpairs(const SparseMatrixC& h, int k, const EigenOptions& options = {});

std::vector<double> lowest_eigenvalues(const SparseMatrixC& h, int k, double tol = 1e-10);

/// Number of eigenvalues below sigma, from the inertia of an LDLᴴ factorization.
int count_below(const SparseMatrixC& h, double sigma);

/// max |H − Hᴴ| / max |H| over entries; 0 for the zero matrix.
double hermiticity_error(const SparseMatrixC& h);

}  // namespace fw
