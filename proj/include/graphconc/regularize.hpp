#pragma once

#include <string>

#include "graphconc/graph_model.hpp"
#include "graphconc/linear_op.hpp"

namespace graphconc {

/// Degree-regularization scheme. `cap` is the degree threshold for the three
/// degree-capping schemes (typically 2d); `tau` is the TauShift amount.
struct RegularizationScheme {
  enum class Kind { Identity, RemoveVertices, TrimEdges, ProportionalReweight, TauShift };

  Kind kind = Kind::Identity;
  double cap = 0.0;
  double tau = 0.0;

  static RegularizationScheme identity() { return {}; }
  static RegularizationScheme remove_vertices(double cap);
  static RegularizationScheme trim_edges(double cap);
  static RegularizationScheme proportional_reweight(double cap);
  static RegularizationScheme tau_shift(double tau);

  /// "identity", "remove", "trim", "reweight" or "tau".
  std::string name() const;
};

/// A + (tau / n) 1 1^T, held lazily. The diagonal entries tau / n are part of
/// the shifted matrix, so every shifted degree is d_i + tau.
struct ShiftedGraph {
  SparseGraph base;
  double tau = 0.0;
};

/// Row sums of the weighted adjacency (out-degrees for directed graphs).
Vector degrees(const SparseGraph& g);

double average_degree(const SparseGraph& g);

/// Vertices with degree strictly greater than `cap`.
IndexSet high_degree_set(const SparseGraph& g, double cap);

/// Drops every entry with an endpoint in `removed`; vertex count unchanged.
SparseGraph remove_vertices(const SparseGraph& g, const IndexSet& removed);

/// Deletes just enough edges from vertices of degree > cap to bring every
/// degree to at most cap.
///
/// Policy: overweight vertices are visited by decreasing initial degree (ties
/// by lower index); each deletes edges to its neighbours of highest current
/// degree first (ties by higher index) until its degree is at most cap.
/// Requires an undirected, unweighted graph.
SparseGraph trim_edges(const SparseGraph& g, double cap);

/// Reweights edge (i, j) by sqrt(lambda_i lambda_j), lambda_i = min(cap / d_i, 1)
/// (lambda_i = 1 for isolated vertices). Every row then has squared l2 norm at
/// most cap.
SparseGraph proportional_reweight(const SparseGraph& g, double cap);

ShiftedGraph tau_shift(const SparseGraph& g, double tau);

Vector shifted_degrees(const ShiftedGraph& s);

/// Operator x -> A x + (tau / n) (1^T x) 1.
LinearOp adjacency_operator(const ShiftedGraph& s);

/// I - D^{-1/2} A D^{-1/2} for a symmetric adjacency operator with the given
/// degrees. Throws ZeroDegree on the first vertex with degree 0.
LinearOp normalized_laplacian(const LinearOp& adjacency, const Vector& degrees);

LinearOp laplacian(const SparseGraph& g);
LinearOp laplacian(const ShiftedGraph& s);

/// Applies a degree-capping scheme (Identity, RemoveVertices, TrimEdges,
/// ProportionalReweight). TauShift does not produce a SparseGraph; use
/// tau_shift.
SparseGraph apply_scheme(const SparseGraph& g, const RegularizationScheme& scheme);

}  // namespace graphconc
