#pragma once

#include <cstdint>
#include <vector>

#include "graphconc/graph_model.hpp"
#include "graphconc/linear_op.hpp"
#include "graphconc/spectral.hpp"

namespace graphconc {

// ---------------------------------------------------------------------------
// Grothendieck-Pietsch factorization
// ---------------------------------------------------------------------------

struct GpOptions {
  int max_iter = 500;
  /// Stop early once the relative duality gap of f(mu)^2 drops below this.
  double gap_tol = 1e-8;
  /// Warm-started power steps per iteration for the top singular pair.
  int power_steps = 6;
  std::uint64_t seed = 0;
};

/// Simplex weights mu with achieved_norm = ||B D_mu^{-1/2}||.
struct PietschWeights {
  Vector mu;
  double achieved_norm = 0.0;
  /// Certified lower bound on min over the simplex of ||B D_mu^{-1/2}||.
  double lower_bound = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Best objective value after each iteration; non-increasing.
  std::vector<double> best_history;
};

/// Minimizes f(mu) = ||B D_mu^{-1/2}|| over the open simplex by entropic
/// mirror descent on the convex function f^2 = lambda_max(D^{-1/2} B^T B D^{-1/2}).
///
/// With v the top right singular vector of B D^{-1/2} and sigma its singular
/// value, d f^2 / d mu_j = -sigma^2 v_j^2 / mu_j. The update is
/// mu_j <- mu_j exp(eta_t v_j^2 / mu_j / max_k(v_k^2 / mu_k)), eta_t = 1/sqrt(t),
/// followed by renormalization; the best iterate is returned. Every step
/// also yields a dual certificate: for W = sum_t D_t^{-1/2} v_t v_t^T D_t^{-1/2},
/// tr(B W B^T) / max_j W_jj is a lower bound on min f^2. `converged` reports
/// whether the relative gap reached `gap_tol`.
///
/// Throws InvalidArgument for an all-zero B.
PietschWeights gp_weights(const Matrix& b, const GpOptions& options = {});

struct SubmatrixCertificate {
  IndexSet columns;  // J
  double delta = 0.0;
  double achieved_norm = 0.0;    // ||B D_mu^{-1/2}||
  double submatrix_norm = 0.0;   // ||B_{[k] x J}||
  double scaled_norm = 0.0;      // submatrix_norm * sqrt(delta m)
  bool cardinality_ok = false;   // |J| >= (1 - delta) m
  bool norm_ok = false;          // scaled_norm <= achieved_norm
  bool converged = false;
  Vector mu;
};

/// J = { j : mu_j <= 1 / (delta m) } for the weights from gp_weights.
SubmatrixCertificate gp_submatrix(const Matrix& b, double delta, const GpOptions& options = {});

// ---------------------------------------------------------------------------
// N / R / C edge decomposition
// ---------------------------------------------------------------------------

enum class EdgeClass : std::uint8_t { N = 0, R = 1, C = 2, Unassigned = 255 };

char class_letter(EdgeClass c);

/// Product set rows x cols assigned to one class.
struct Block {
  IndexSet rows;
  IndexSet cols;
  EdgeClass cls = EdgeClass::N;
};

/// What one round of the block decomposition did.
struct RoundTrace {
  int round = 0;
  IndexSet rows;   // I
  IndexSet cols;   // J
  double alpha = 1.0;
  double light_threshold = 0.0;  // 8 r alpha d
  IndexSet light_rows;           // I'
  IndexSet light_cols;           // J'
  IndexSet gp_excluded_cols;
  IndexSet gp_excluded_rows;
  IndexSet heavy_excluded_cols;  // columns with > 32r ones in the heavy rows
  IndexSet heavy_excluded_rows;
  IndexSet overflow_cols;        // violating columns that did not fit in J1
  IndexSet overflow_rows;
  IndexSet exceptional_rows;     // I1
  IndexSet exceptional_cols;     // J1
  bool row_filter_empty = false;
  bool col_filter_empty = false;
  bool degenerate = false;
  bool gp_converged = true;
};

struct BlockDecomposition {
  std::vector<Block> blocks;
  IndexSet exceptional_rows;
  IndexSet exceptional_cols;
  RoundTrace trace;
};

struct DecomposeOptions {
  /// Blocks with max(|I|, |J|) <= this are assigned to N whole.
  Index degenerate_size = 8;
  double delta = 0.25;
  GpOptions gp;
};

/// One round of the block decomposition on I x J.
///
/// (1) I' = rows of A_{I x J} with at most 8 r alpha d ones; (2) GP submatrix
/// selection on (A - EA)_{I' x J} with delta = 1/4; (3) columns with more
/// than 32r ones in the rows I \ I' join the exceptional set J1; (4) the same
/// for the transpose gives J' and I1; (5) N = I' x (J \ J1) u (I \ I1) x J',
/// R = (I \ I1) x (J \ J'), C = (I \ I') x (J \ J1), ties broken N > R > C,
/// and I1 x J1 is left for the next round.
///
/// J1 (and I1) never exceeds half of J (I). Violating columns beyond that
/// capacity are recorded as overflow and their heavy-row entries go to N,
/// which keeps the R row bound and the C column bound exact.
BlockDecomposition decompose_block(const SparseGraph& a, const LinearOp& expected, const IndexSet& rows,
                                   const IndexSet& cols, double alpha, double r, double d,
                                   const DecomposeOptions& options = {});

class EdgeDecomposition {
 public:
  EdgeDecomposition(Index n, double r, double d);

  Index n() const { return n_; }
  double r() const { return r_; }
  double d() const { return d_; }

  EdgeClass class_of(Index i, Index j) const { return static_cast<EdgeClass>(classes_(i, j)); }
  const Eigen::MatrixX<std::uint8_t>& class_map() const { return classes_; }
  const std::vector<RoundTrace>& trace() const { return trace_; }

  /// Assigns every pair in the block. Throws Error if a pair is already
  /// assigned.
  void assign(const Block& block);
  void set_class(Index i, Index j, EdgeClass c) { classes_(i, j) = static_cast<std::uint8_t>(c); }
  void add_round(RoundTrace round) { trace_.push_back(std::move(round)); }

  /// 0/1 mask of the pairs in class c.
  Eigen::MatrixX<std::uint8_t> mask(EdgeClass c) const;

 private:
  Index n_;
  double r_;
  double d_;
  Eigen::MatrixX<std::uint8_t> classes_;
  std::vector<RoundTrace> trace_;
};

constexpr Index kMaxDecomposeSize = 4096;

/// Iterates decompose_block from I = J = [n], alpha = 1, halving the block and
/// setting alpha = sqrt(m / n) for the running size m, until the exceptional
/// block is empty. A must be directed.
EdgeDecomposition decompose(const SparseGraph& a, const LinearOp& expected, double r, double d,
                            const DecomposeOptions& options = {});

/// Splits an undirected graph into its strictly upper and strictly lower
/// triangular directed halves.
std::pair<SparseGraph, SparseGraph> split_triangles(const SparseGraph& g);

/// EA restricted to the strictly upper (or lower) triangle.
LinearOp triangle_part(const LinearOp& expected, bool upper);

struct VerificationReport {
  bool partition_ok = false;
  Index unassigned = 0;
  Index max_r_row_ones = 0;
  bool r_rows_ok = false;
  Index max_c_col_ones = 0;
  bool c_cols_ok = false;
  Index r_columns = 0;
  Index c_rows = 0;
  double footprint_limit = 0.0;  // kappa * n / d
  bool footprint_ok = false;
  double core_norm = 0.0;        // ||(A - EA)_N||
  double core_ratio = 0.0;       // core_norm / (r^{3/2} sqrt(d))
  bool norm_converged = false;

  bool structural_ok() const { return partition_ok && r_rows_ok && c_cols_ok; }
};

/// Checks the decomposition: exact partition; at most 32r ones in every row of
/// A_R and every column of A_C; R touching at most kappa n / d columns and C at
/// most kappa n / d rows; and measures ||(A - EA)_N||.
VerificationReport verify_decomposition(const SparseGraph& a, const LinearOp& expected,
                                        const EdgeDecomposition& dec, double d, double r, double kappa = 4.0,
                                        const SolverOptions& solver = {});

}  // namespace graphconc
