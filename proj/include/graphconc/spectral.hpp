#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "graphconc/errors.hpp"
#include "graphconc/linear_op.hpp"

namespace graphconc {

struct SolverOptions {
  double tol = 1e-7;
  int max_iter = 5000;  // budget in operator applications
  std::uint64_t seed = 0;
};

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct EigenPair {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;  // ||op v - value v||
  int iterations = 0;
  bool converged = false;
};

enum class Which { LargestAlgebraic, SmallestAlgebraic, LargestMagnitude };

/// Largest singular value of `op`.
///
/// Symmetric operators run Lanczos on `op` and return the largest |Ritz
/// value|; general operators run Lanczos on op^T op and return its square root.
/// Converged when the target Ritz value changes by less than tol (relative)
/// on three consecutive checks and the Ritz residual is at most
/// sqrt(tol) * max(1, |theta|). Never throws on non-convergence; the flag is
/// set instead.
NormEstimate spectral_norm_estimate(const LinearOp& op, const SolverOptions& options = {});

/// Same as `spectral_norm_estimate` but throws NoConvergence.
double spectral_norm(const LinearOp& op, double tol = 1e-7, int max_iter = 5000, std::uint64_t seed = 0);

/// k eigenpairs of a symmetric operator, found one at a time by Lanczos with
/// full reorthogonalization against the Krylov basis, against `deflate`
/// (orthonormal columns) and against the pairs already found. Each pair meets
/// ||op v - lambda v|| <= tol * max(1, |lambda|). Throws NoConvergence.
std::vector<EigenPair> top_k_eigs(const LinearOp& op, Index k, Which which = Which::LargestAlgebraic,
                                  const SolverOptions& options = {}, const Matrix& deflate = Matrix());

constexpr Index kMaxFullSpectrum = 2048;

/// All eigenvalues of a dense symmetric matrix in ascending order
/// (Householder tridiagonalization and implicit symmetric QR).
Vector full_spectrum(const Matrix& a);

template <class Derived>
Vector full_spectrum(const Eigen::MatrixBase<Derived>& a) {
  return full_spectrum(Matrix(a));
}

constexpr Index kMaxExactInfTo2Width = 24;

/// ||B||_{inf->2} = max over x in {-1, 1}^m of ||B x||_2, by Gray-code
/// enumeration of the half cube x_0 = +1.
double inf_to_2_norm_exact(const Matrix& b);

template <class Derived>
double inf_to_2_norm_exact(const Eigen::MatrixBase<Derived>& b) {
  return inf_to_2_norm_exact(Matrix(b));
}

/// Lower bound on ||B||_{inf->2}: best ||B x|| over random sign vectors and
/// the sign pattern of the top right singular vector, each improved by
/// single-coordinate flips. When `trials` covers the half cube the starting
/// points enumerate it and the result is exact.
double inf_to_2_norm_lower(const Matrix& b, int trials, std::uint64_t seed = 0);

/// sqrt(max row l1 norm * max column l1 norm), an upper bound on ||B||.
template <class Derived>
double l1_operator_bound(const Eigen::MatrixBase<Derived>& b) {
  if (b.size() == 0) return 0.0;
  const double rows = b.cwiseAbs().rowwise().sum().maxCoeff();
  const double cols = b.cwiseAbs().colwise().sum().maxCoeff();
  return std::sqrt(rows * cols);
}

double l1_operator_bound(const SparseMatrix& b);

/// sqrt(a * b) for a = max row support size and b = max column sum of
/// squares; an upper bound on ||B|| for entries in [0, 1]. Throws
/// EntryOutOfRange otherwise.
template <class Derived>
double l2_sparsity_bound(const Eigen::MatrixBase<Derived>& b) {
  if (b.size() == 0) return 0.0;
  if ((b.array() < 0.0).any() || (b.array() > 1.0).any()) {
    throw EntryOutOfRange("l2_sparsity_bound: entries must lie in [0, 1]");
  }
  const double support = (b.array() != 0.0).template cast<double>().rowwise().sum().maxCoeff();
  const double col_sq = b.array().square().colwise().sum().maxCoeff();
  return std::sqrt(support * col_sq);
}

double l2_sparsity_bound(const SparseMatrix& b);

}  // namespace graphconc
