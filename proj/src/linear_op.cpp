#include "graphconc/linear_op.hpp"

#include <numeric>
#include <utility>

#include "graphconc/errors.hpp"

namespace graphconc {

namespace {

void check_size(Index expected, Index got, const char* what) {
  if (expected != got) {
    throw DimensionMismatch(std::string(what) + ": expected length " + std::to_string(expected) +
                            ", got " + std::to_string(got));
  }
}

}  // namespace

LinearOp::LinearOp(Index rows, Index cols, Map apply, Map apply_transpose, bool symmetric)
    : rows_(rows),
      cols_(cols),
      apply_(std::move(apply)),
      apply_transpose_(std::move(apply_transpose)),
      symmetric_(symmetric) {
  if (rows < 0 || cols < 0) throw InvalidArgument("LinearOp: negative dimension");
  if (symmetric && rows != cols) throw DimensionMismatch("LinearOp: symmetric operator must be square");
  if (!apply_transpose_) apply_transpose_ = apply_;
}

LinearOp LinearOp::symmetric(Index n, Map apply) {
  Map t = apply;
  return LinearOp(n, n, std::move(apply), std::move(t), true);
}

LinearOp LinearOp::from_dense(Matrix m) {
  auto data = std::make_shared<const Matrix>(std::move(m));
  const bool sym = data->rows() == data->cols() && data->isApprox(data->transpose(), 0.0);
  return LinearOp(
      data->rows(), data->cols(), [data](const Vector& x) -> Vector { return *data * x; },
      [data](const Vector& y) -> Vector { return data->transpose() * y; }, sym);
}

LinearOp LinearOp::from_sparse(SparseMatrix m, bool symmetric) {
  auto data = std::make_shared<const SparseMatrix>(std::move(m));
  return LinearOp(
      data->rows(), data->cols(), [data](const Vector& x) -> Vector { return *data * x; },
      [data](const Vector& y) -> Vector { return data->transpose() * y; }, symmetric);
}

LinearOp LinearOp::identity(Index n) {
  return symmetric(n, [](const Vector& x) -> Vector { return x; });
}

LinearOp LinearOp::zero(Index rows, Index cols) {
  return LinearOp(
      rows, cols, [rows](const Vector&) -> Vector { return Vector::Zero(rows); },
      [cols](const Vector&) -> Vector { return Vector::Zero(cols); }, rows == cols);
}

LinearOp LinearOp::diagonal(Vector diag) {
  auto d = std::make_shared<const Vector>(std::move(diag));
  return symmetric(d->size(), [d](const Vector& x) -> Vector { return d->cwiseProduct(x); });
}

LinearOp LinearOp::rank_one(double scale, Vector u, Vector v) {
  auto uu = std::make_shared<const Vector>(std::move(u));
  auto vv = std::make_shared<const Vector>(std::move(v));
  const bool sym = uu->size() == vv->size() && *uu == *vv;
  return LinearOp(
      uu->size(), vv->size(),
      [=](const Vector& x) -> Vector { return (scale * vv->dot(x)) * *uu; },
      [=](const Vector& y) -> Vector { return (scale * uu->dot(y)) * *vv; }, sym);
}

Vector LinearOp::apply(const Vector& x) const {
  check_size(cols_, x.size(), "LinearOp::apply");
  return apply_(x);
}

Vector LinearOp::apply_transpose(const Vector& y) const {
  check_size(rows_, y.size(), "LinearOp::apply_transpose");
  return apply_transpose_(y);
}

LinearOp LinearOp::transpose() const {
  return LinearOp(cols_, rows_, apply_transpose_, apply_, symmetric_);
}

Matrix LinearOp::to_dense(Index max_entries) const {
  if (rows_ * cols_ > max_entries) {
    throw SizeExceeded("LinearOp::to_dense: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                       " exceeds the dense materialization limit");
  }
  Matrix out(rows_, cols_);
  Vector e = Vector::Zero(cols_);
  for (Index j = 0; j < cols_; ++j) {
    e[j] = 1.0;
    out.col(j) = apply_(e);
    e[j] = 0.0;
  }
  return out;
}

LinearOp operator+(const LinearOp& a, const LinearOp& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("operator+: shapes differ");
  return LinearOp(
      a.rows(), a.cols(), [a, b](const Vector& x) -> Vector { return a.apply(x) + b.apply(x); },
      [a, b](const Vector& y) -> Vector { return a.apply_transpose(y) + b.apply_transpose(y); },
      a.is_symmetric() && b.is_symmetric());
}

LinearOp compose_difference(const LinearOp& a, const LinearOp& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("compose_difference: " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()));
  }
  return LinearOp(
      a.rows(), a.cols(), [a, b](const Vector& x) -> Vector { return a.apply(x) - b.apply(x); },
      [a, b](const Vector& y) -> Vector { return a.apply_transpose(y) - b.apply_transpose(y); },
      a.is_symmetric() && b.is_symmetric());
}

LinearOp operator-(const LinearOp& a, const LinearOp& b) { return compose_difference(a, b); }

LinearOp operator*(double alpha, const LinearOp& op) {
  return LinearOp(
      op.rows(), op.cols(), [alpha, op](const Vector& x) -> Vector { return alpha * op.apply(x); },
      [alpha, op](const Vector& y) -> Vector { return alpha * op.apply_transpose(y); },
      op.is_symmetric());
}

LinearOp compose(const LinearOp& a, const LinearOp& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("compose: inner dimensions differ");
  return LinearOp(
      a.rows(), b.cols(), [a, b](const Vector& x) -> Vector { return a.apply(b.apply(x)); },
      [a, b](const Vector& y) -> Vector { return b.apply_transpose(a.apply_transpose(y)); },
      false);
}

LinearOp diagonal_scale(const Vector& left, const LinearOp& op, const Vector& right) {
  check_size(op.rows(), left.size(), "diagonal_scale(left)");
  check_size(op.cols(), right.size(), "diagonal_scale(right)");
  auto l = std::make_shared<const Vector>(left);
  auto r = std::make_shared<const Vector>(right);
  const bool sym = op.is_symmetric() && left == right;
  return LinearOp(
      op.rows(), op.cols(),
      [l, r, op](const Vector& x) -> Vector { return l->cwiseProduct(op.apply(r->cwiseProduct(x))); },
      [l, r, op](const Vector& y) -> Vector {
        return r->cwiseProduct(op.apply_transpose(l->cwiseProduct(y)));
      },
      sym);
}

Vector indicator(Index n, const IndexSet& set) {
  Vector v = Vector::Zero(n);
  for (Index i : set) {
    if (i < 0 || i >= n) throw InvalidArgument("indicator: index out of range");
    v[i] = 1.0;
  }
  return v;
}

IndexSet full_range(Index n) {
  IndexSet out(static_cast<std::size_t>(n));
  std::iota(out.begin(), out.end(), Index{0});
  return out;
}

LinearOp restrict(const LinearOp& op, const IndexSet& rows, const IndexSet& cols) {
  return diagonal_scale(indicator(op.rows(), rows), op, indicator(op.cols(), cols));
}

LinearOp restrict_to_edges(const LinearOp& op,
                           const Eigen::Ref<const Eigen::MatrixX<std::uint8_t>>& mask) {
  if (mask.rows() != op.rows() || mask.cols() != op.cols()) {
    throw DimensionMismatch("restrict_to_edges: mask shape differs from operator");
  }
  Matrix dense = op.to_dense();
  for (Index j = 0; j < dense.cols(); ++j) {
    for (Index i = 0; i < dense.rows(); ++i) {
      if (mask(i, j) == 0) dense(i, j) = 0.0;
    }
  }
  return LinearOp::from_dense(std::move(dense));
}

SparseMatrix restrict_to_edges(const SparseMatrix& m, const std::function<bool(Index, Index)>& keep) {
  SparseMatrix out = m;
  out.prune([&keep](Index i, Index j, double) { return keep(i, j); });
  out.makeCompressed();
  return out;
}

Matrix dense_block(const LinearOp& op, const IndexSet& rows, const IndexSet& cols) {
  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  Vector e = Vector::Zero(op.cols());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    e[cols[c]] = 1.0;
    const Vector column = op.apply(e);
    e[cols[c]] = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) out(static_cast<Index>(r), static_cast<Index>(c)) = column[rows[r]];
  }
  return out;
}

}  // namespace graphconc
