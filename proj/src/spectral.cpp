#include "graphconc/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "graphconc/random.hpp"

namespace graphconc {

namespace {

// Largest Krylov basis kept before an explicit restart.
constexpr Index kMaxBasis = 200;

struct LanczosResult {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Two passes of classical Gram-Schmidt against the first `count` columns.
void orthogonalize(Vector& w, const Matrix& basis, Index count) {
  if (count == 0) return;
  for (int pass = 0; pass < 2; ++pass) {
    w.noalias() -= basis.leftCols(count) * (basis.leftCols(count).transpose() * w);
  }
}

Vector random_start(Index n, const CounterRng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal_draw(rng, static_cast<std::uint64_t>(i));
  return v;
}

Index pick(const Vector& ritz, Which which) {
  Index best = 0;
  for (Index i = 1; i < ritz.size(); ++i) {
    switch (which) {
      case Which::LargestAlgebraic:
        if (ritz[i] > ritz[best]) best = i;
        break;
      case Which::SmallestAlgebraic:
        if (ritz[i] < ritz[best]) best = i;
        break;
      case Which::LargestMagnitude:
        if (std::abs(ritz[i]) > std::abs(ritz[best])) best = i;
        break;
    }
  }
  return best;
}

// Single extreme eigenpair of a symmetric operator restricted to the
// orthogonal complement of `deflate`. `norm_mode` switches the stopping rule
// to the Ritz-value plateau test used for norm estimation.
LanczosResult lanczos(const LinearOp& op, Which which, const Matrix& deflate, const SolverOptions& opt,
                      bool norm_mode) {
  const Index n = op.rows();
  const Index q = deflate.cols();
  const Index free_dim = n - q;
  LanczosResult result;
  if (n == 0) {
    result.converged = true;
    return result;
  }
  if (free_dim <= 0) throw InvalidArgument("lanczos: deflation space spans the whole domain");
  const Index max_basis = std::min(free_dim, kMaxBasis);

  const CounterRng rng = CounterRng({opt.seed, 0}).substream(0x1a2c05);
  Vector v;
  for (std::uint64_t attempt = 0;; ++attempt) {
    v = random_start(n, rng.substream(attempt));
    orthogonalize(v, deflate, q);
    if (v.norm() > 1e-8 * std::sqrt(static_cast<double>(n))) break;
    if (attempt > 8) throw InvalidArgument("lanczos: cannot draw a start vector outside the deflation space");
  }
  v.normalize();

  int matvecs = 0;
  double prev_theta = std::numeric_limits<double>::quiet_NaN();
  int stable = 0;
  Matrix basis(n, max_basis);
  Vector alpha(max_basis), beta(max_basis);

  while (true) {
    basis.col(0) = v;
    double theta = 0.0;
    Vector s;
    Index m = 0;
    bool accepted = false;
    bool exhausted = false;
    for (Index k = 0; k < max_basis; ++k) {
      Vector w = op.apply(basis.col(k));
      ++matvecs;
      alpha[k] = basis.col(k).dot(w);
      w -= alpha[k] * basis.col(k);
      if (k > 0) w -= beta[k - 1] * basis.col(k - 1);
      orthogonalize(w, basis, k + 1);
      orthogonalize(w, deflate, q);
      beta[k] = w.norm();
      m = k + 1;

      const double scale = std::max(alpha.head(m).cwiseAbs().maxCoeff(), 1e-300);
      const bool breakdown = beta[k] <= 1e-13 * scale;
      const bool complete = m == free_dim;
      exhausted = matvecs >= opt.max_iter;
      const Index interval = std::max<Index>(5, m / 8);
      if (breakdown || complete || exhausted || m == max_basis || m % interval == 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> tri;
        tri.computeFromTridiagonal(alpha.head(m), beta.head(m - 1), Eigen::ComputeEigenvectors);
        const Index idx = pick(tri.eigenvalues(), which);
        theta = tri.eigenvalues()[idx];
        s = tri.eigenvectors().col(idx);
        const double res_est = std::abs(beta[k] * s[m - 1]);
        const double tscale = std::max(1.0, std::abs(theta));
        if (norm_mode) {
          const double change = std::abs(theta - prev_theta) / std::max(std::abs(theta), 1e-300);
          stable = change < opt.tol ? stable + 1 : 0;
          prev_theta = theta;
          accepted = stable >= 3 && res_est <= std::sqrt(opt.tol) * tscale;
        } else {
          accepted = res_est <= 0.5 * opt.tol * tscale;
        }
        if (breakdown || complete) accepted = true;
        if (accepted || exhausted) break;
      }
      if (k + 1 < max_basis) basis.col(k + 1) = w / beta[k];
    }

    Vector y = basis.leftCols(m) * s;
    orthogonalize(y, deflate, q);
    y.normalize();
    const Vector r = op.apply(y) - theta * y;
    ++matvecs;
    result.value = theta;
    result.vector = y;
    result.residual = r.norm();
    result.iterations = matvecs;
    const double tscale = std::max(1.0, std::abs(theta));
    result.converged = accepted && (norm_mode || result.residual <= opt.tol * tscale);
    if (result.converged || matvecs >= opt.max_iter) return result;
    v = y;
  }
}

}  // namespace

double normal_draw(const CounterRng& rng, std::uint64_t counter) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  const double u1 = 1.0 - rng.uniform(2 * counter);  // (0, 1]
  const double u2 = rng.uniform(2 * counter + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

NormEstimate spectral_norm_estimate(const LinearOp& op, const SolverOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("spectral_norm: tol must be positive");
  NormEstimate out;
  if (op.rows() == 0 || op.cols() == 0) {
    out.converged = true;
    return out;
  }
  if (op.is_symmetric()) {
    const LanczosResult r = lanczos(op, Which::LargestMagnitude, Matrix(op.rows(), 0), options, true);
    out.value = std::abs(r.value);
    out.iterations = r.iterations;
    out.converged = r.converged;
    return out;
  }
  const LinearOp normal = LinearOp::symmetric(
      op.cols(), [op](const Vector& x) -> Vector { return op.apply_transpose(op.apply(x)); });
  const LanczosResult r = lanczos(normal, Which::LargestAlgebraic, Matrix(op.cols(), 0), options, true);
  out.value = std::sqrt(std::max(r.value, 0.0));
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

double spectral_norm(const LinearOp& op, double tol, int max_iter, std::uint64_t seed) {
  const NormEstimate e = spectral_norm_estimate(op, {tol, max_iter, seed});
  if (!e.converged) throw NoConvergence("spectral_norm", e.iterations);
  return e.value;
}

std::vector<EigenPair> top_k_eigs(const LinearOp& op, Index k, Which which, const SolverOptions& options,
                                  const Matrix& deflate) {
  if (!op.is_symmetric()) throw InvalidArgument("top_k_eigs: operator must be symmetric");
  const Index q = deflate.cols();
  if (q > 0 && deflate.rows() != op.rows()) throw DimensionMismatch("top_k_eigs: deflation basis height");
  if (k < 1 || k + q > op.rows()) throw InvalidArgument("top_k_eigs: need 1 <= k <= dimension");

  const bool negate = which == Which::SmallestAlgebraic;
  const LinearOp target = negate ? -1.0 * op : op;
  const Which inner = negate ? Which::LargestAlgebraic : which;

  Matrix basis(op.rows(), q + k);
  if (q > 0) basis.leftCols(q) = deflate;
  std::vector<EigenPair> out;
  for (Index t = 0; t < k; ++t) {
    SolverOptions sub = options;
    sub.seed = mix64(options.seed + static_cast<std::uint64_t>(t));
    const LanczosResult r = lanczos(target, inner, basis.leftCols(q + t), sub, false);
    if (!r.converged) throw NoConvergence("top_k_eigs", r.iterations);
    EigenPair pair;
    pair.value = negate ? -r.value : r.value;
    pair.vector = r.vector;
    pair.residual = r.residual;
    pair.iterations = r.iterations;
    pair.converged = true;
    basis.col(q + t) = r.vector;
    out.push_back(std::move(pair));
  }
  return out;
}

Vector full_spectrum(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("full_spectrum: matrix must be square");
  if (a.rows() > kMaxFullSpectrum) {
    throw SizeExceeded("full_spectrum: n = " + std::to_string(a.rows()) + " exceeds " +
                       std::to_string(kMaxFullSpectrum));
  }
  if (a.rows() == 0) return Vector();
  if ((a - a.transpose()).norm() > 1e-12 * std::max(a.norm(), 1e-300)) {
    throw InvalidArgument("full_spectrum: matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double inf_to_2_norm_exact(const Matrix& b) {
  const Index m = b.cols();
  if (m > kMaxExactInfTo2Width) {
    throw WidthExceeded("inf_to_2_norm_exact: width " + std::to_string(m) + " exceeds " +
                        std::to_string(kMaxExactInfTo2Width));
  }
  if (m == 0 || b.rows() == 0) return 0.0;
  // x_0 = +1 is fixed since ||Bx|| = ||B(-x)||; Gray code walks the rest.
  Vector x = Vector::Ones(m);
  Vector y = b.rowwise().sum();
  Vector best_x = x;
  double best = y.squaredNorm();
  const std::uint64_t steps = std::uint64_t{1} << (m - 1);
  for (std::uint64_t g = 1; g < steps; ++g) {
    const auto j = static_cast<Index>(std::countr_zero(g)) + 1;
    y -= (2.0 * x[j]) * b.col(j);
    x[j] = -x[j];
    if ((g & 0xfff) == 0) y.noalias() = b * x;  // bound accumulated rounding
    const double val = y.squaredNorm();
    if (val > best) {
      best = val;
      best_x = x;
    }
  }
  return (b * best_x).norm();
}

double inf_to_2_norm_lower(const Matrix& b, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("inf_to_2_norm_lower: trials must be >= 1");
  const Index m = b.cols();
  if (m == 0 || b.rows() == 0) return 0.0;
  const Vector col_sq = b.colwise().squaredNorm();

  auto improve = [&](Vector x) {
    Vector y = b * x;
    for (Index flips = 0; flips < 10 * m; ++flips) {
      const Vector corr = b.transpose() * y;
      Index best_j = -1;
      double best_gain = 1e-13 * std::max(y.squaredNorm(), 1e-300);
      for (Index j = 0; j < m; ++j) {
        const double gain = 4.0 * (col_sq[j] - x[j] * corr[j]);
        if (gain > best_gain) {
          best_gain = gain;
          best_j = j;
        }
      }
      if (best_j < 0) break;
      y -= (2.0 * x[best_j]) * b.col(best_j);
      x[best_j] = -x[best_j];
    }
    return (b * x).norm();
  };

  // Sign pattern of the top right singular vector.
  Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinV);
  Vector x0 = svd.matrixV().col(0).unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
  double best = improve(x0);

  const bool cover = m <= 30 && static_cast<std::uint64_t>(trials) >= (std::uint64_t{1} << (m - 1));
  const CounterRng rng({seed, 0});
  Vector x(m);
  for (int t = 0; t < trials; ++t) {
    if (cover && static_cast<std::uint64_t>(t) >= (std::uint64_t{1} << (m - 1))) break;
    for (Index j = 0; j < m; ++j) {
      bool bit = false;
      if (cover) {
        bit = j > 0 && ((static_cast<std::uint64_t>(t) >> (j - 1)) & 1U) != 0;
      } else {
        bit = (rng.word(static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(m) +
                        static_cast<std::uint64_t>(j)) >> 63) != 0;
      }
      x[j] = bit ? -1.0 : 1.0;
    }
    best = std::max(best, improve(x));
  }
  return best;
}

double l1_operator_bound(const SparseMatrix& b) {
  if (b.nonZeros() == 0) return 0.0;
  Vector rows = Vector::Zero(b.rows());
  Vector cols = Vector::Zero(b.cols());
  for (Index i = 0; i < b.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(b, i); it; ++it) {
      rows[it.row()] += std::abs(it.value());
      cols[it.col()] += std::abs(it.value());
    }
  }
  return std::sqrt(rows.maxCoeff() * cols.maxCoeff());
}

double l2_sparsity_bound(const SparseMatrix& b) {
  if (b.nonZeros() == 0) return 0.0;
  Vector support = Vector::Zero(b.rows());
  Vector col_sq = Vector::Zero(b.cols());
  for (Index i = 0; i < b.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(b, i); it; ++it) {
      if (it.value() < 0.0 || it.value() > 1.0) {
        throw EntryOutOfRange("l2_sparsity_bound: entries must lie in [0, 1]");
      }
      if (it.value() != 0.0) support[it.row()] += 1.0;
      col_sq[it.col()] += it.value() * it.value();
    }
  }
  return std::sqrt(support.maxCoeff() * col_sq.maxCoeff());
}

}  // namespace graphconc
