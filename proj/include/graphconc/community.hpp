#pragma once

#include <vector>

#include "graphconc/graph_model.hpp"
#include "graphconc/spectral.hpp"

namespace graphconc {

/// +1 / -1 community label per vertex.
struct CommunityLabels {
  std::vector<int> labels;

  Index size() const { return static_cast<Index>(labels.size()); }
};

struct SbmInstance {
  SparseGraph graph;
  CommunityLabels truth;  // first half +1, second half -1
};

/// Balanced two-block model G(n, a/n, b/n). Requires n even and
/// 0 <= b <= a <= n; throws InvalidRates otherwise.
SbmInstance sbm_instance(Index n, double a, double b, SeedSpec seed);

struct Detection {
  CommunityLabels labels;
  Vector eigenvector;      // unit v2 of L(A_tau)
  double eigenvalue = 0.0; // second smallest eigenvalue of L(A_tau)
  int iterations = 0;
};

/// Signs of the second eigenvector of L(A_tau), found as the top eigenvector
/// of 2I - L(A_tau) with the kernel direction D^{1/2} 1 deflated. Zero
/// entries map to +1. tau = 0 is allowed when every degree is positive.
Detection detect(const SparseGraph& g, double tau, const SolverOptions& options = {});

/// Fraction of disagreeing labels after the best global flip.
double misclassification(const CommunityLabels& estimate, const CommunityLabels& truth);

/// 2 * norm_diff / gap; throws ZeroGap for gap <= 0.
double davis_kahan_bound(double norm_diff, double gap);

/// L(E A_tau) for any model, matrix-free.
LinearOp expected_laplacian(const ProbabilityModel& model, double tau);

struct ExpectedEigen {
  Vector v2;           // +1/sqrt(n) on the first block, -1/sqrt(n) on the second
  double lambda2 = 0.0;
  double lambda_rest = 0.0;  // eigenvalue of multiplicity n - 2
  double gap = 0.0;          // distance of lambda2 from {0, lambda_rest}
  bool degenerate = false;   // a <= b: lambda2 is not simple and separated
};

/// Closed-form second eigenpair and gap of L(E A_tau) for a BlockTwo model.
ExpectedEigen expected_laplacian_eigvec(const ProbabilityModel& model, double tau);

struct DavisKahanCheck {
  double distance = 0.0;   // min over beta of ||x + beta y||
  double norm_diff = 0.0;  // ||L(A_tau) - L(E A_tau)||
  double delta = 0.0;      // separation used in the bound
  double bound = 0.0;      // 2 norm_diff / delta
  double lambda2_sample = 0.0;
  double lambda3_sample = 0.0;
  bool premise = false;    // both second eigenvalues simple and delta-separated
  bool holds = false;      // premise and distance <= bound
};

/// Computes both sides of the Davis-Kahan inequality for a BlockTwo sample.
/// delta is the smallest distance from lambda_2 of either Laplacian to the
/// other eigenvalues of both (lambda_1 = 0, lambda_3 of the sample,
/// lambda_rest of the expectation).
DavisKahanCheck davis_kahan_check(const SparseGraph& g, const ProbabilityModel& model, double tau,
                                  const SolverOptions& options = {});

}  // namespace graphconc
