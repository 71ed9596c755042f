#include "fw/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/SparseCholesky>

namespace fw {

namespace {

constexpr int kMaxRequested = 32;
constexpr int kDenseLimit = 400;
constexpr int kKrylovDepth = 5;
constexpr int kLanczosSteps = 80;

using Ldlt = Eigen::SimplicialLDLT<SparseMatrixC, Eigen::Lower, Eigen::AMDOrdering<int>>;

SparseMatrixC shifted(const SparseMatrixC& h, double sigma) {
  SparseMatrixC identity(h.rows(), h.cols());
  identity.setIdentity();
  return h - Complex(sigma, 0) * identity;
}

Eigen::MatrixXcd random_block(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = Complex(normal(rng), normal(rng));
  return out;
}

// Appends the part of `block` orthogonal to basis.leftCols(used); returns the new column count.
Eigen::Index append_orthonormal(Eigen::MatrixXcd& basis, Eigen::Index used, Eigen::MatrixXcd block) {
  const Eigen::RowVectorXd original = block.colwise().norm();
  for (int pass = 0; pass < 2 && used > 0; ++pass) {
    block -= basis.leftCols(used) * (basis.leftCols(used).adjoint() * block);
  }
  // Within the block only the columns appended so far need to be projected out.
  const Eigen::Index first = used;
  for (Eigen::Index j = 0; j < block.cols() && used < basis.cols(); ++j) {
    if (original(j) == 0) continue;
    Eigen::VectorXcd w = block.col(j);
    for (int pass = 0; pass < 2 && used > first; ++pass) {
      const auto fresh = basis.middleCols(first, used - first);
      w -= fresh * (fresh.adjoint() * w);
    }
    const double norm = w.norm();
    if (norm <= 1e-10 * original(j)) continue;
    basis.col(used++) = w / norm;
  }
  return used;
}

// Lowest Ritz values of a short Lanczos run with full reorthogonalization.
std::vector<double> lanczos_estimates(const SparseMatrixC& h, std::mt19937_64& rng) {
  const Eigen::Index n = h.rows();
  const int steps = static_cast<int>(std::min<Eigen::Index>(kLanczosSteps, n));
  Eigen::MatrixXcd v(n, steps);
  Eigen::VectorXd alpha(steps);
  Eigen::VectorXd beta(steps);
  Eigen::VectorXcd q = random_block(n, 1, rng).col(0);
  q.normalize();
  int m = 0;
  for (; m < steps; ++m) {
    v.col(m) = q;
    Eigen::VectorXcd w = h * q;
    alpha(m) = std::real(q.dot(w));
    for (int pass = 0; pass < 2; ++pass) w -= v.leftCols(m + 1) * (v.leftCols(m + 1).adjoint() * w);
    beta(m) = w.norm();
    if (beta(m) < 1e-12) {
      ++m;
      break;
    }
    q = w / beta(m);
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha(i);
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& values = eig.eigenvalues();
  return {values.data(), values.data() + values.size()};
}

// A shift below the whole spectrum at a distance comparable to the spread of the wanted
// values, checked by inertia.
double place_shift(const SparseMatrixC& h, double theta1, double thetak, double scale) {
  double delta = std::max(0.25 * (thetak - theta1), 1e-8 * scale);
  double sigma = theta1 - delta;
  for (int tries = 0; count_below(h, sigma) > 0; ++tries) {
    if (tries > 60) throw NonConvergence("lowest_eigenpairs: could not place the shift below the spectrum");
    delta *= 4;
    sigma = theta1 - delta;
  }
  return sigma;
}

EigenResult dense_lowest(const SparseMatrixC& h, int k) {
  const Eigen::MatrixXcd dense(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(dense);
  EigenResult out;
  out.vectors = eig.eigenvectors().leftCols(k);
  for (int i = 0; i < k; ++i) {
    out.values.push_back(eig.eigenvalues()(i));
    out.residuals.push_back((dense * out.vectors.col(i) - out.values.back() * out.vectors.col(i)).norm());
  }
  return out;
}

}  // namespace

int count_below(const SparseMatrixC& h, double sigma) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    Ldlt ldlt(shifted(h, sigma));
    if (ldlt.info() == Eigen::Success) {
      const auto d = ldlt.vectorD();
      int negative = 0;
      for (Eigen::Index i = 0; i < d.size(); ++i)
        if (std::real(d(i)) < 0) ++negative;
      return negative;
    }
    // sigma hit an eigenvalue exactly; nudge it down by a relative hair.
    sigma -= 1e-13 * std::max(1.0, std::abs(sigma));
  }
  throw NonConvergence("count_below: shifted matrix could not be factorized");
}

double hermiticity_error(const SparseMatrixC& h) {
  const SparseMatrixC diff = h - SparseMatrixC(h.adjoint());
  double largest = 0;
  double worst = 0;
  for (int c = 0; c < h.outerSize(); ++c)
    for (SparseMatrixC::InnerIterator it(h, c); it; ++it) largest = std::max(largest, std::abs(it.value()));
  for (int c = 0; c < diff.outerSize(); ++c)
    for (SparseMatrixC::InnerIterator it(diff, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return largest == 0 ? 0 : worst / largest;
}

EigenResult lowest_eigenpairs(const SparseMatrixC& h, int k, const EigenOptions& options) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n) throw std::invalid_argument("lowest_eigenpairs: matrix is not square");
  if (k < 1 || k > kMaxRequested || k > n) {
    throw std::invalid_argument("lowest_eigenpairs: k must be in [1, min(32, dimension)], got " + std::to_string(k));
  }
  if (!(options.tol > 0)) throw std::invalid_argument("lowest_eigenpairs: tol must be positive");
  if (n <= kDenseLimit) return dense_lowest(h, k);

  std::mt19937_64 rng(options.seed);
  const std::vector<double> estimates = lanczos_estimates(h, rng);
  const double scale = std::max({std::abs(estimates.front()), std::abs(estimates.back()), 1e-300});
  double sigma = place_shift(h, estimates.front(), estimates[std::min<std::size_t>(k, estimates.size()) - 1], scale);
  Ldlt ldlt(shifted(h, sigma));
  if (ldlt.info() != Eigen::Success) throw NonConvergence("lowest_eigenpairs: shifted factorization failed");

  EigenResult out;
  Eigen::Index block_size = std::min<Eigen::Index>(n, k + 8);
  Eigen::MatrixXcd x = random_block(n, block_size, rng);
  for (int widening = 0; widening < 4; ++widening) {
    while (true) {
      Eigen::MatrixXcd basis(n, std::min<Eigen::Index>(n, block_size * kKrylovDepth));
      Eigen::Index used = append_orthonormal(basis, 0, x);
      Eigen::Index start = 0;
      for (int depth = 1; depth < kKrylovDepth && used < basis.cols(); ++depth) {
        const Eigen::MatrixXcd next = ldlt.solve(basis.middleCols(start, used - start));
        ++out.iterations;
        start = used;
        used = append_orthonormal(basis, used, next);
        if (used == start) break;
      }
      const Eigen::MatrixXcd q = basis.leftCols(used);
      const Eigen::MatrixXcd hq = h * q;
      Eigen::MatrixXcd g = q.adjoint() * hq;
      g = (0.5 * (g + g.adjoint())).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g);
      const Eigen::Index keep = std::min(block_size, used);
      const Eigen::MatrixXcd y = eig.eigenvectors().leftCols(keep);
      const Eigen::MatrixXcd z = q * y;
      const Eigen::MatrixXcd hz = hq * y;
      bool converged = used >= k;
      std::vector<double> residuals;
      for (int i = 0; i < k && i < keep; ++i) {
        residuals.push_back((hz.col(i) - eig.eigenvalues()(i) * z.col(i)).norm());
        converged = converged && residuals.back() <= options.tol;
      }
      if (converged) {
        out.values.assign(eig.eigenvalues().data(), eig.eigenvalues().data() + k);
        out.vectors = z.leftCols(k);
        out.residuals = residuals;
        break;
      }
      if (out.iterations >= options.max_iterations) {
        throw NonConvergence("lowest_eigenpairs: no convergence within " + std::to_string(options.max_iterations) +
                             " iterations");
      }
      x = z;
      // Ritz values bound the spectrum from above; move the shift up behind them.
      const double proposal = place_shift(h, eig.eigenvalues()(0), eig.eigenvalues()(std::min<Eigen::Index>(k, keep) - 1), scale);
      if (proposal > sigma) {
        sigma = proposal;
        ldlt.compute(shifted(h, sigma));
        if (ldlt.info() != Eigen::Success) throw NonConvergence("lowest_eigenpairs: shifted factorization failed");
      }
    }
    out.shift = sigma;
    // Sylvester inertia: nothing may hide below the k-th value.
    const double probe = out.values.back() - 10 * options.tol;
    const int found = static_cast<int>(std::count_if(out.values.begin(), out.values.end(),
                                                     [&](double v) { return v < probe; }));
    if (count_below(h, probe) == found) return out;
    block_size = std::min<Eigen::Index>(n, block_size + k);
    x = random_block(n, block_size, rng);
    x.leftCols(out.vectors.cols()) = out.vectors;
  }
  throw NonConvergence("lowest_eigenpairs: eigenvalues below the reported ones keep being missed");
}

std::vector<double> lowest_eigenvalues(const SparseMatrixC& h, int k, double tol) {
  EigenOptions options;
  options.tol = tol;
  return lowest_eigenpairs(h, k, options).values;
}

}  // namespace fw
