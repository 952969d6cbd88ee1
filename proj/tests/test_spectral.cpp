#include <doctest.h>

#include <cmath>

#include <Eigen/SVD>

#include "graphconc/errors.hpp"
#include "graphconc/graph_model.hpp"
#include "graphconc/spectral.hpp"

using namespace graphconc;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  const CounterRng rng({seed, 1});
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * rng.uniform(static_cast<std::uint64_t>(i * cols + j));
  }
  return m;
}

Matrix random_symmetric(Index n, std::uint64_t seed) {
  const Matrix m = random_matrix(n, n, seed);
  return (m + m.transpose()) / 2.0;
}

double dense_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

SparseMatrix to_sparse(const Matrix& m) { return m.sparseView(); }

}  // namespace

TEST_CASE("LinearOp linearity and symmetry contracts") {
  const Matrix s = random_symmetric(40, 1);
  const SparseMatrix sp = to_sparse(random_matrix(40, 40, 2, 0.0, 1.0));
  const LinearOp ops[] = {LinearOp::from_dense(s), LinearOp::from_sparse(sp, false),
                          expected_adjacency(ProbabilityModel::block_two(40, 10, 3)),
                          LinearOp::rank_one(0.5, Vector::Ones(40), Vector::LinSpaced(40, 0, 1)),
                          LinearOp::from_dense(s) - expected_adjacency(ProbabilityModel::uniform(40, 0.2))};
  const Vector x = random_matrix(40, 1, 3);
  const Vector y = random_matrix(40, 1, 4);
  for (const LinearOp& op : ops) {
    const Vector lhs = op.apply(2.5 * x - 0.75 * y);
    const Vector rhs = 2.5 * op.apply(x) - 0.75 * op.apply(y);
    CHECK((lhs - rhs).norm() <= 1e-12 * (1 + rhs.norm()));
    CHECK(std::abs(op.apply(x).dot(y) - x.dot(op.apply_transpose(y))) <= 1e-12 * (1 + op.apply(x).norm() * y.norm()));
    if (op.is_symmetric()) {
      CHECK(std::abs(op.apply(x).dot(y) - x.dot(op.apply(y))) <= 1e-12 * (1 + op.apply(x).norm() * y.norm()));
    }
  }
}

TEST_CASE("compose_difference examples") {
  const LinearOp a = LinearOp::from_dense(random_symmetric(12, 5));
  CHECK(spectral_norm(compose_difference(a, a)) == 0.0);
  const LinearOp two = 2.0 * LinearOp::identity(5);
  const Matrix diff = compose_difference(two, LinearOp::identity(5)).to_dense();
  CHECK((diff - Matrix::Identity(5, 5)).norm() == 0.0);
  CHECK_THROWS_AS(compose_difference(LinearOp::identity(3), LinearOp::identity(4)), DimensionMismatch);

  const auto model = ProbabilityModel::rank_one(Vector::LinSpaced(100, 0.05, 0.6));
  const SparseGraph g = sample(model, {3, 0});
  const Matrix ref = Matrix(g.adjacency()) - expected_adjacency_dense(model);
  const Matrix got = (LinearOp::from_sparse(g.adjacency(), true) - expected_adjacency(model)).to_dense();
  CHECK((got - ref).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("restrict examples and norm monotonicity") {
  const Matrix m = random_matrix(30, 30, 8);
  const LinearOp op = LinearOp::from_dense(m);
  CHECK((restrict(op, full_range(30), full_range(30)).to_dense() - m).norm() == 0.0);
  CHECK(restrict(op, {}, full_range(30)).to_dense().norm() == 0.0);

  for (std::uint64_t s = 0; s < 100; ++s) {
    const Matrix b = Matrix(to_sparse(random_matrix(25, 25, 100 + s, -0.6, 1.0).cwiseMax(0.0)));
    const LinearOp bop = LinearOp::from_sparse(to_sparse(b), false);
    const CounterRng rng({s, 9});
    IndexSet rows;
    IndexSet cols;
    for (Index i = 0; i < 25; ++i) {
      if (rng.uniform(static_cast<std::uint64_t>(i)) < 0.5) rows.push_back(i);
      if (rng.uniform(static_cast<std::uint64_t>(100 + i)) < 0.5) cols.push_back(i);
    }
    const double full = dense_norm(b);
    CHECK(spectral_norm_estimate(restrict(bop, rows, cols)).value <= full * (1 + 1e-6));
    // Nonnegative entries: any edge subset.
    Eigen::MatrixX<std::uint8_t> mask(25, 25);
    for (Index i = 0; i < 25; ++i) {
      for (Index j = 0; j < 25; ++j) mask(i, j) = rng.uniform(static_cast<std::uint64_t>(1000 + i * 25 + j)) < 0.5;
    }
    CHECK(dense_norm(restrict_to_edges(bop, mask).to_dense()) <= full * (1 + 1e-12));
  }
}

TEST_CASE("spectral_norm examples") {
  Vector diag(2);
  diag << 3, -5;
  CHECK(spectral_norm(LinearOp::diagonal(diag)) == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(spectral_norm(LinearOp::from_dense(Matrix::Ones(2, 3))) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-9));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Matrix m = random_matrix(50, 50, 20 + s);
    const double ref = dense_norm(m);
    const double est = spectral_norm(LinearOp::from_dense(m), 1e-10, 5000, s);
    CHECK(std::abs(est - ref) <= 1e-7 * ref);
    const double est_t = spectral_norm(LinearOp::from_dense(m).transpose(), 1e-10, 5000, s + 1);
    CHECK(std::abs(est_t - est) <= 1e-7 * ref);
    const Matrix sym = random_symmetric(50, 40 + s);
    CHECK(std::abs(spectral_norm(LinearOp::from_dense(sym), 1e-10) - dense_norm(sym)) <= 1e-7 * dense_norm(sym));
  }
  CHECK(spectral_norm(LinearOp::zero(4, 4)) == 0.0);
}

TEST_CASE("spectral_norm is deterministic per seed") {
  const LinearOp op = LinearOp::from_dense(random_matrix(60, 40, 5));
  const double a = spectral_norm_estimate(op, {1e-7, 5000, 17}).value;
  const double b = spectral_norm_estimate(op, {1e-7, 5000, 17}).value;
  CHECK(a == b);
}

TEST_CASE("spectral_norm reports non-convergence") {
  const LinearOp op = LinearOp::from_dense(random_symmetric(200, 3));
  const NormEstimate est = spectral_norm_estimate(op, {1e-14, 3, 0});
  CHECK_FALSE(est.converged);
  CHECK_THROWS_AS(spectral_norm(op, 1e-14, 3), NoConvergence);
}

TEST_CASE("top_k_eigs examples") {
  const auto id = top_k_eigs(LinearOp::identity(6), 2);
  CHECK(id[0].value == doctest::Approx(1.0));
  CHECK(id[1].value == doctest::Approx(1.0));
  CHECK(std::abs(id[0].vector.dot(id[1].vector)) < 1e-8);

  Matrix p3 = Matrix::Zero(3, 3);
  p3(0, 1) = p3(1, 0) = p3(1, 2) = p3(2, 1) = 1.0;
  const auto path = top_k_eigs(LinearOp::from_dense(p3), 3);
  CHECK(path[0].value == doctest::Approx(std::sqrt(2.0)));
  CHECK(path[1].value == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(std::abs(path[1].value) < 1e-8);
  CHECK(path[2].value == doctest::Approx(-std::sqrt(2.0)));

  Matrix lk3 = Matrix::Identity(3, 3) - (Matrix::Ones(3, 3) - Matrix::Identity(3, 3)) / 2.0;
  const auto low = top_k_eigs(LinearOp::from_dense(lk3), 2, Which::SmallestAlgebraic);
  CHECK(std::abs(low[0].value) < 1e-8);
  CHECK(low[1].value == doctest::Approx(1.5));

  CHECK_THROWS(top_k_eigs(LinearOp::identity(3), 0));
  CHECK_THROWS(top_k_eigs(LinearOp::identity(3), 4));
}

TEST_CASE("top_k_eigs matches the dense spectrum") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Matrix a = random_symmetric(300, 60 + s);
    const Vector spec = full_spectrum(a);
    const double scale = spec.cwiseAbs().maxCoeff();
    const auto top = top_k_eigs(LinearOp::from_dense(a), 5, Which::LargestAlgebraic, {1e-10, 20000, s});
    const auto bottom = top_k_eigs(LinearOp::from_dense(a), 3, Which::SmallestAlgebraic, {1e-10, 20000, s});
    for (Index k = 0; k < 5; ++k) {
      CHECK(std::abs(top[static_cast<std::size_t>(k)].value - spec[299 - k]) <= 1e-8 * scale);
      const Vector& v = top[static_cast<std::size_t>(k)].vector;
      CHECK((a * v - top[static_cast<std::size_t>(k)].value * v).norm() <= 1e-8 * scale);
      for (Index l = 0; l < k; ++l) CHECK(std::abs(v.dot(top[static_cast<std::size_t>(l)].vector)) <= 1e-8);
    }
    for (Index k = 0; k < 3; ++k) CHECK(std::abs(bottom[static_cast<std::size_t>(k)].value - spec[k]) <= 1e-8 * scale);
    const auto mag = top_k_eigs(LinearOp::from_dense(a), 1, Which::LargestMagnitude, {1e-10, 20000, s});
    CHECK(std::abs(std::abs(mag[0].value) - scale) <= 1e-8 * scale);
  }
}

TEST_CASE("top_k_eigs honours a deflation basis") {
  const Index n = 20;
  Matrix a = Matrix::Ones(n, n);  // top eigenvector 1/sqrt(n)
  a += Matrix(Vector::LinSpaced(n, 0.0, 1.0).asDiagonal());
  const Vector spec = full_spectrum(a);
  Matrix basis = top_k_eigs(LinearOp::from_dense(a), 1)[0].vector;
  const auto rest = top_k_eigs(LinearOp::from_dense(a), 1, Which::LargestAlgebraic, {}, basis);
  CHECK(rest[0].value == doctest::Approx(spec[n - 2]).epsilon(1e-7));
}

TEST_CASE("full_spectrum examples") {
  CHECK(full_spectrum(Matrix::Zero(5, 5)).isZero(0.0));
  const Matrix k5 = Matrix::Ones(5, 5) - Matrix::Identity(5, 5);
  const Vector e = full_spectrum(k5);
  for (Index i = 0; i < 4; ++i) CHECK(e[i] == doctest::Approx(-1.0));
  CHECK(e[4] == doctest::Approx(4.0));
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Matrix a = random_symmetric(120, 200 + s);
    const Vector ev = full_spectrum(a);
    const double scale = ev.cwiseAbs().maxCoeff();
    CHECK(std::abs(ev.sum() - a.trace()) <= 1e-8 * 120 * scale);
    for (Index i = 1; i < 120; ++i) CHECK(ev[i - 1] <= ev[i]);
  }
  CHECK_THROWS_AS(full_spectrum(Matrix::Zero(kMaxFullSpectrum + 1, kMaxFullSpectrum + 1)), SizeExceeded);
}

TEST_CASE("inf_to_2_norm_exact examples") {
  CHECK(inf_to_2_norm_exact(Matrix::Identity(2, 2)) == doctest::Approx(std::sqrt(2.0)));
  CHECK(inf_to_2_norm_exact(Matrix::Ones(2, 3)) == doctest::Approx(3 * std::sqrt(2.0)));
  Matrix row(1, 4);
  row << 10, 1, 1, 1;
  CHECK(inf_to_2_norm_exact(row) == doctest::Approx(13.0));
  CHECK_THROWS_AS(inf_to_2_norm_exact(Matrix::Ones(2, 25)), WidthExceeded);
}

TEST_CASE("inf_to_2 bounds") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const Index m = 2 + static_cast<Index>(s % 9);
    const Matrix b = random_matrix(6, m, 300 + s);
    const double exact = inf_to_2_norm_exact(b);
    const double lower = inf_to_2_norm_lower(b, 3, s);
    CHECK(lower <= exact * (1 + 1e-12));
    CHECK(inf_to_2_norm_lower(b, 1 << m, s) == doctest::Approx(exact).epsilon(1e-12));
    const double two = dense_norm(b);
    CHECK(exact / std::sqrt(static_cast<double>(m)) <= two * (1 + 1e-12));
    CHECK(two <= exact * (1 + 1e-12));
  }
  // Sign matrix with a flat singular vector: the lower bound reaches ||B||.
  Matrix h(4, 4);
  h << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  CHECK(inf_to_2_norm_lower(h, 1, 0) >= dense_norm(h) * 2 * (1 - 1e-12));
}

TEST_CASE("l1_operator_bound examples and property") {
  CHECK(l1_operator_bound(Matrix::Ones(2, 3)) == doctest::Approx(std::sqrt(6.0)));
  CHECK(l1_operator_bound(Matrix::Identity(4, 4)) == doctest::Approx(1.0));
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const Matrix b = random_matrix(30, 40, 1000 + s, 0.0, 1.0);
    CHECK(dense_norm(b) <= l1_operator_bound(b) * (1 + 1e-12));
  }
  CHECK(l1_operator_bound(to_sparse(Matrix::Ones(2, 3))) == doctest::Approx(std::sqrt(6.0)));
}

TEST_CASE("l2_sparsity_bound examples and property") {
  CHECK(l2_sparsity_bound(Matrix::Identity(3, 3)) == doctest::Approx(1.0));
  CHECK(l2_sparsity_bound(Matrix::Ones(2, 3)) == doctest::Approx(std::sqrt(6.0)));
  CHECK_THROWS_AS(l2_sparsity_bound(Matrix::Constant(2, 2, 1.5)), EntryOutOfRange);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const Matrix b = (random_matrix(20, 20, 5000 + s, 0.0, 1.0).array() < 0.3).cast<double>();
    CHECK(dense_norm(b) <= l2_sparsity_bound(b) * (1 + 1e-12));
  }
}
