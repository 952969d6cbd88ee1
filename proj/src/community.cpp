#include "graphconc/community.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include "graphconc/errors.hpp"
#include "graphconc/regularize.hpp"

namespace graphconc {

SbmInstance sbm_instance(Index n, double a, double b, SeedSpec seed) {
  if (n <= 0 || n % 2 != 0) throw InvalidRates("sbm_instance: n must be positive and even");
  const auto nd = static_cast<double>(n);
  if (!(b >= 0.0 && b <= a && a <= nd)) throw InvalidRates("sbm_instance: need 0 <= b <= a <= n");
  const ProbabilityModel model = ProbabilityModel::block_two(n, a, b);
  CommunityLabels truth;
  truth.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) truth.labels[static_cast<std::size_t>(i)] = ProbabilityModel::block_of(n, i);
  return {sample(model, seed), std::move(truth)};
}

Detection detect(const SparseGraph& g, double tau, const SolverOptions& options) {
  if (!(tau >= 0.0)) throw InvalidArgument("detect: tau must be nonnegative");
  const ShiftedGraph shifted = tau_shift(g, tau);
  const LinearOp lap = laplacian(shifted);
  const Index n = g.n();
  if (n < 2) throw InvalidArgument("detect: need at least two vertices");

  Matrix kernel = shifted_degrees(shifted).cwiseSqrt();
  kernel.col(0).normalize();
  const LinearOp flipped = LinearOp::symmetric(n, [lap](const Vector& x) -> Vector { return 2.0 * x - lap.apply(x); });
  const std::vector<EigenPair> pairs = top_k_eigs(flipped, 1, Which::LargestAlgebraic, options, kernel);

  Detection out;
  out.eigenvector = pairs[0].vector;
  out.eigenvalue = 2.0 - pairs[0].value;
  out.iterations = pairs[0].iterations;
  out.labels.labels.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out.labels.labels[static_cast<std::size_t>(i)] = out.eigenvector[i] >= 0.0 ? +1 : -1;
  return out;
}

double misclassification(const CommunityLabels& estimate, const CommunityLabels& truth) {
  if (estimate.size() != truth.size()) throw LengthMismatch("misclassification: label vectors differ in length");
  if (truth.size() == 0) return 0.0;
  Index disagree = 0;
  for (std::size_t i = 0; i < truth.labels.size(); ++i) {
    if (estimate.labels[i] != truth.labels[i]) ++disagree;
  }
  const Index best = std::min(disagree, truth.size() - disagree);
  return static_cast<double>(best) / static_cast<double>(truth.size());
}

double davis_kahan_bound(double norm_diff, double gap) {
  if (!(gap > 0.0)) throw ZeroGap("davis_kahan_bound: spectral gap must be positive");
  return 2.0 * norm_diff / gap;
}

LinearOp expected_laplacian(const ProbabilityModel& model, double tau) {
  const Index n = model.n();
  const LinearOp ea = expected_adjacency(model);
  const double shift = tau / static_cast<double>(n);
  const LinearOp shifted = LinearOp::symmetric(n, [ea, shift](const Vector& x) -> Vector {
    Vector y = ea.apply(x);
    y.array() += shift * x.sum();
    return y;
  });
  return normalized_laplacian(shifted, expected_degrees(model).array() + tau);
}

ExpectedEigen expected_laplacian_eigvec(const ProbabilityModel& model, double tau) {
  const auto* block = std::get_if<ProbabilityModel::BlockTwo>(&model.kind());
  if (block == nullptr) throw InvalidArgument("expected_laplacian_eigvec: model must be BlockTwo");
  const Index n = model.n();
  const auto nd = static_cast<double>(n);
  const double a = block->a;
  const double b = block->b;
  // E A_tau = P + (tau/n) 1 1^T - (a/n) I with P block-constant; every degree is
  // (a + b)/2 - a/n + tau. Eigenvalues of E A_tau: that degree on 1,
  // (a - b)/2 - a/n on the block sign vector, -a/n on the rest.
  const double degree = (a + b) / 2.0 - a / nd + tau;
  if (!(degree > 0.0)) throw ZeroDegree(0);
  ExpectedEigen out;
  out.lambda2 = 1.0 - ((a - b) / 2.0 - a / nd) / degree;
  out.lambda_rest = 1.0 + (a / nd) / degree;
  out.degenerate = !(a > b);
  out.gap = out.degenerate ? 0.0 : std::min(out.lambda2, out.lambda_rest - out.lambda2);
  out.v2.resize(n);
  const double entry = 1.0 / std::sqrt(nd);
  for (Index i = 0; i < n; ++i) out.v2[i] = ProbabilityModel::block_of(n, i) * entry;
  return out;
}

DavisKahanCheck davis_kahan_check(const SparseGraph& g, const ProbabilityModel& model, double tau,
                                  const SolverOptions& options) {
  if (g.n() != model.n()) throw DimensionMismatch("davis_kahan_check: graph and model sizes differ");
  const Index n = g.n();
  const ShiftedGraph shifted = tau_shift(g, tau);
  const LinearOp lap = laplacian(shifted);
  const LinearOp expected = expected_laplacian(model, tau);
  const ExpectedEigen ey = expected_laplacian_eigvec(model, tau);

  Matrix kernel = shifted_degrees(shifted).cwiseSqrt();
  kernel.col(0).normalize();
  const LinearOp flipped = LinearOp::symmetric(n, [lap](const Vector& x) -> Vector { return 2.0 * x - lap.apply(x); });
  const std::vector<EigenPair> pairs = top_k_eigs(flipped, 2, Which::LargestAlgebraic, options, kernel);

  DavisKahanCheck out;
  out.lambda2_sample = 2.0 - pairs[0].value;
  out.lambda3_sample = 2.0 - pairs[1].value;
  const Vector& x = pairs[0].vector;
  out.distance = std::min((x + ey.v2).norm(), (x - ey.v2).norm());
  out.norm_diff = spectral_norm_estimate(lap - expected, options).value;

  const double l2x = out.lambda2_sample;
  const double l3x = out.lambda3_sample;
  const double l2y = ey.lambda2;
  const double lry = ey.lambda_rest;
  // Sample: {0, l2x, l3x, ...}; expectation: {0, l2y, lry}.
  out.delta = std::min({l2x, l3x - l2x, l2y, lry - l2y, l3x - l2y, lry - l2x});
  out.premise = !ey.degenerate && out.delta > 0.0;
  if (out.premise) {
    out.bound = davis_kahan_bound(out.norm_diff, out.delta);
    out.holds = out.distance <= out.bound;
  }
  return out;
}

}  // namespace graphconc
