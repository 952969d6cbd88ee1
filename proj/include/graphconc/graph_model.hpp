#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "graphconc/linear_op.hpp"
#include "graphconc/random.hpp"

namespace graphconc {

/// Edge probabilities of an inhomogeneous Erdos-Renyi model G(n, (p_ij)).
///
/// Four structured kinds are supported. Self-loops are excluded everywhere:
/// p_ii is treated as 0 regardless of what the kind's formula gives.
class ProbabilityModel {
 public:
  /// p_ij = p.
  struct Uniform {
    double p = 0.0;
  };
  /// p_ij = min(theta_i * theta_j, 1).
  struct RankOne {
    Vector theta;
  };
  /// Balanced halves [0, n/2) and [n/2, n); p = a/n within a half, b/n across.
  struct BlockTwo {
    double a = 0.0;
    double b = 0.0;
  };
  /// Dense symmetric probability matrix (n <= kMaxExplicit).
  struct Explicit {
    Matrix p;
  };
  using Kind = std::variant<Uniform, RankOne, BlockTwo, Explicit>;

  static constexpr Index kMaxExplicit = 4096;

  static ProbabilityModel uniform(Index n, double p);
  static ProbabilityModel rank_one(Vector theta);
  static ProbabilityModel block_two(Index n, double a, double b);
  static ProbabilityModel explicit_matrix(Matrix p);

  /// RankOne model whose expected degrees are `expected_degrees` (up to the
  /// self-loop exclusion): theta_i = e_i / sqrt(sum_j e_j).
  static ProbabilityModel degree_profile(const Vector& expected_degrees);

  Index n() const { return n_; }
  const Kind& kind() const { return kind_; }

  /// p_ij; 0 on the diagonal.
  double probability(Index i, Index j) const;

  /// Community label of vertex i under BlockTwo: +1 for the first half, -1 otherwise.
  static int block_of(Index n, Index i) { return i < n / 2 ? +1 : -1; }

 private:
  ProbabilityModel(Index n, Kind kind);

  Index n_;
  Kind kind_;
};

/// Weighted adjacency structure with weights in (0, 1].
///
/// Undirected graphs store both (i, j) and (j, i) and never the diagonal.
/// Directed graphs store ordered pairs and never self-loops.
class SparseGraph {
 public:
  struct Edge {
    Index i;
    Index j;
    double w;
    bool operator==(const Edge&) const = default;
  };

  SparseGraph(Index n, bool directed);

  /// Builds a graph from an edge list. For undirected graphs each unordered
  /// pair is listed once in either orientation and is mirrored. Throws
  /// InvalidGraph on self-loops, duplicates, or weights outside (0, 1].
  static SparseGraph from_edges(Index n, const std::vector<Edge>& edges, bool directed);

  /// Adopts an adjacency matrix after validating every invariant.
  static SparseGraph from_matrix(SparseMatrix adjacency, bool directed);

  Index n() const { return adjacency_.rows(); }
  bool directed() const { return directed_; }
  /// True if some stored weight differs from 1.
  bool weighted() const;
  /// Undirected: number of unordered pairs. Directed: number of ordered pairs.
  Index edge_count() const;
  const SparseMatrix& adjacency() const { return adjacency_; }
  double weight(Index i, Index j) const;

  /// Edge list; undirected graphs list each pair once with i < j. Sorted by (i, j).
  std::vector<Edge> edges() const;

  bool operator==(const SparseGraph& other) const;

 private:
  SparseGraph(SparseMatrix adjacency, bool directed);

  SparseMatrix adjacency_;
  bool directed_;
};

/// d = max over off-diagonal pairs of n * p_ij.
double max_rate(const ProbabilityModel& model);

/// Expected degree of every vertex, sum_{j != i} p_ij.
Vector expected_degrees(const ProbabilityModel& model);

/// d_ave = max_i sum_{j != i} p_ij.
double max_expected_degree(const ProbabilityModel& model);

/// Undirected sample: each pair i < j is drawn once with counter i * n + j and
/// mirrored.
SparseGraph sample(const ProbabilityModel& model, SeedSpec seed);

/// Directed sample: each ordered pair (i, j), i != j, is drawn with counter
/// i * n + j. Upper-triangle draws coincide with those of `sample`.
SparseGraph sample_directed(const ProbabilityModel& model, SeedSpec seed);

/// E A as a symmetric operator with zero diagonal. Structured kinds are never
/// densified: Uniform and RankOne use rank-one algebra, BlockTwo uses block
/// sums.
LinearOp expected_adjacency(const ProbabilityModel& model);

/// Dense E A with zero diagonal. Test and small-n helper.
Matrix expected_adjacency_dense(const ProbabilityModel& model);

}  // namespace graphconc
