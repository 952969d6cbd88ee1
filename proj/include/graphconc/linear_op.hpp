#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace graphconc {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Sorted, duplicate-free list of vertex indices.
using IndexSet = std::vector<Index>;

/// Matrix-free linear operator R^cols -> R^rows.
///
/// Holds the forward and transposed products as value-semantic callables;
/// copies share the captured data. A symmetric operator must satisfy
/// <Ax, y> = <x, Ay>; `apply_transpose` then defaults to `apply`.
class LinearOp {
 public:
  using Map = std::function<Vector(const Vector&)>;

  LinearOp(Index rows, Index cols, Map apply, Map apply_transpose, bool symmetric);

  /// Symmetric operator; the transpose product reuses `apply`.
  static LinearOp symmetric(Index n, Map apply);

  static LinearOp from_dense(Matrix m);
  static LinearOp from_sparse(SparseMatrix m, bool symmetric);
  static LinearOp identity(Index n);
  static LinearOp zero(Index rows, Index cols);
  static LinearOp diagonal(Vector diag);
  /// scale * u v^T.
  static LinearOp rank_one(double scale, Vector u, Vector v);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  bool is_symmetric() const { return symmetric_; }

  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& y) const;
  Vector operator*(const Vector& x) const { return apply(x); }

  LinearOp transpose() const;

  /// Dense materialization through unit-vector products. Refuses
  /// operators with more than `max_entries` entries.
  Matrix to_dense(Index max_entries = Index{1} << 26) const;

 private:
  Index rows_;
  Index cols_;
  Map apply_;
  Map apply_transpose_;
  bool symmetric_;
};

LinearOp operator+(const LinearOp& a, const LinearOp& b);
LinearOp operator-(const LinearOp& a, const LinearOp& b);
LinearOp operator*(double alpha, const LinearOp& op);

/// a - b; throws DimensionMismatch when shapes differ.
LinearOp compose_difference(const LinearOp& a, const LinearOp& b);

/// Product a * b.
LinearOp compose(const LinearOp& a, const LinearOp& b);

/// D_left * op * D_right for diagonal scalings given as vectors.
LinearOp diagonal_scale(const Vector& left, const LinearOp& op, const Vector& right);

/// Operator equal to `op` on rows I and columns J, zero elsewhere.
/// Dimensions are unchanged.
LinearOp restrict(const LinearOp& op, const IndexSet& rows, const IndexSet& cols);

/// Entry-level mask for non-product edge sets: keeps the entries (i, j) with
/// mask(i, j) != 0. Materializes `op` densely, so it is meant for desk-scale
/// operators.
LinearOp restrict_to_edges(const LinearOp& op, const Eigen::Ref<const Eigen::MatrixX<std::uint8_t>>& mask);

/// Same as above for an explicit sparse matrix; stays sparse.
SparseMatrix restrict_to_edges(const SparseMatrix& m,
                               const std::function<bool(Index, Index)>& keep);

/// Dense block op[I, J] (|I| x |J|), extracted column by column.
Matrix dense_block(const LinearOp& op, const IndexSet& rows, const IndexSet& cols);

/// Indicator vector of `set` in R^n.
Vector indicator(Index n, const IndexSet& set);

/// {0, ..., n-1}.
IndexSet full_range(Index n);

}  // namespace graphconc
