#include <doctest.h>

#include <cmath>
#include <set>

#include "graphconc/errors.hpp"
#include "graphconc/experiments.hpp"
#include "graphconc/gp_decompose.hpp"

using namespace graphconc;

namespace {

double dense_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : Eigen::BDCSVD<Matrix>(m).singularValues()(0); }

}  // namespace

TEST_CASE("gp_weights: single column") {
  Matrix b = Matrix::Zero(3, 4);
  b.col(2) << 1, 2, 2;
  const PietschWeights w = gp_weights(b);
  CHECK(w.mu[2] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(w.achieved_norm == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(w.achieved_norm >= inf_to_2_norm_exact(b) * (1 - 1e-12));
}

TEST_CASE("gp_weights: single row closed form") {
  Matrix b(1, 4);
  b << 10, 1, 1, 1;
  const PietschWeights w = gp_weights(b, {2000, 1e-10, 6, 0});
  CHECK(w.achieved_norm == doctest::Approx(13.0).epsilon(1e-4));
  CHECK(w.mu[0] == doctest::Approx(10.0 / 13.0).epsilon(1e-3));
  CHECK(w.mu[1] == doctest::Approx(1.0 / 13.0).epsilon(1e-2));
}

TEST_CASE("gp_weights invariants on random matrices") {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const Matrix b = random_uniform_matrix(8, 12, {5, s});
    GpOptions opts;
    opts.seed = s;
    const PietschWeights w = gp_weights(b, opts);
    CHECK((w.mu.array() > 0.0).all());
    CHECK(std::abs(w.mu.sum() - 1.0) <= 1e-12);
    const double exact = inf_to_2_norm_exact(b);
    CHECK(exact <= w.achieved_norm * (1 + 1e-12));
    CHECK(w.lower_bound <= w.achieved_norm * (1 + 1e-9));
    const Matrix scaled = b * w.mu.cwiseSqrt().cwiseInverse().asDiagonal();
    CHECK(w.achieved_norm == doctest::Approx(dense_norm(scaled)).epsilon(1e-10));
    for (std::size_t k = 1; k < w.best_history.size(); ++k) CHECK(w.best_history[k] <= w.best_history[k - 1]);
    CHECK(w.achieved_norm / exact <= std::sqrt(std::acos(-1.0) / 2) * 1.10);
  }
  CHECK_THROWS_AS(gp_weights(Matrix::Zero(3, 3)), InvalidArgument);
}

TEST_CASE("gp_weights is deterministic") {
  const Matrix b = random_uniform_matrix(6, 9, {1, 1});
  const PietschWeights a = gp_weights(b, {500, 1e-8, 6, 3});
  const PietschWeights c = gp_weights(b, {500, 1e-8, 6, 3});
  CHECK((a.mu - c.mu).norm() == 0.0);
  CHECK(a.achieved_norm == c.achieved_norm);
}

TEST_CASE("gp_submatrix examples") {
  const Matrix same = Vector::LinSpaced(5, 1, 2).replicate(1, 6);
  const SubmatrixCertificate all = gp_submatrix(same, 0.5);
  CHECK(all.columns.size() == 6);

  Matrix b(1, 4);
  b << 10, 1, 1, 1;
  const SubmatrixCertificate c = gp_submatrix(b, 0.5, {2000, 1e-10, 6, 0});
  CHECK(c.columns == IndexSet{1, 2, 3});
  CHECK(c.submatrix_norm == doctest::Approx(std::sqrt(3.0)));
  CHECK(c.cardinality_ok);
  CHECK(c.norm_ok);
  CHECK_THROWS(gp_submatrix(b, 0.0));
  CHECK_THROWS(gp_submatrix(b, 1.0));
}

TEST_CASE("gp_submatrix certificates always hold") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    for (const double delta : {0.25, 0.5, 0.1}) {
      const Matrix b = random_uniform_matrix(5 + static_cast<Index>(s % 7), 10 + static_cast<Index>(s % 5), {8, s});
      const SubmatrixCertificate c = gp_submatrix(b, delta);
      const auto m = static_cast<double>(b.cols());
      CHECK(static_cast<double>(c.columns.size()) >= (1 - delta) * m);
      CHECK(c.cardinality_ok);
      CHECK(c.norm_ok);
      CHECK(c.scaled_norm <= c.achieved_norm * (1 + 1e-12));
      CHECK(c.submatrix_norm == doctest::Approx(dense_norm(b(Eigen::all, c.columns))).epsilon(1e-10));
    }
  }
}

TEST_CASE("decompose_block on an empty block") {
  const Index n = 40;
  const SparseGraph a(n, true);
  const LinearOp ea = LinearOp::zero(n, n);
  const BlockDecomposition out = decompose_block(a, ea, full_range(n), full_range(n), 1.0, 1.0, 2.0);
  CHECK(out.exceptional_rows.empty());
  CHECK(out.exceptional_cols.empty());
  Index n_pairs = 0;
  for (const Block& blk : out.blocks) {
    if (blk.cls == EdgeClass::N) n_pairs += static_cast<Index>(blk.rows.size() * blk.cols.size());
    else CHECK(blk.rows.size() * blk.cols.size() == 0);
  }
  CHECK(n_pairs == n * n);
}

TEST_CASE("decompose_block covers the block exactly once") {
  const Index n = 96;
  const double d = 6;
  const auto model = ProbabilityModel::uniform(n, d / n);
  for (std::uint64_t s = 0; s < 4; ++s) {
    // Plant a full row and a full column to exercise the heavy filters.
    std::vector<SparseGraph::Edge> edges;
    for (const auto& e : sample_directed(model, {2, s}).edges()) {
      if (e.i != 5 && e.j != 7) edges.push_back(e);
    }
    for (Index j = 0; j < n; ++j) {
      if (j != 5) edges.push_back({5, j, 1.0});
      if (j != 7) edges.push_back({j, 7, 1.0});
    }
    std::sort(edges.begin(), edges.end(), [](const auto& x, const auto& y) { return std::tie(x.i, x.j) < std::tie(y.i, y.j); });
    edges.erase(std::unique(edges.begin(), edges.end(), [](const auto& x, const auto& y) { return x.i == y.i && x.j == y.j; }), edges.end());
    const SparseGraph a = SparseGraph::from_edges(n, edges, true);
    const LinearOp ea = expected_adjacency(model);
    const BlockDecomposition out = decompose_block(a, ea, full_range(n), full_range(n), 1.0, 1.0, d);
    Eigen::MatrixXi count = Eigen::MatrixXi::Zero(n, n);
    for (const Block& blk : out.blocks) {
      for (const Index i : blk.rows) {
        for (const Index j : blk.cols) ++count(i, j);
      }
    }
    for (const Index i : out.exceptional_rows) {
      for (const Index j : out.exceptional_cols) ++count(i, j);
    }
    CHECK((count.array() == 1).all());
    CHECK(static_cast<Index>(out.exceptional_rows.size()) <= n / 2);
    CHECK(static_cast<Index>(out.exceptional_cols.size()) <= n / 2);
    // The planted row is not light.
    CHECK(std::find(out.trace.light_rows.begin(), out.trace.light_rows.end(), 5) == out.trace.light_rows.end());
  }
}

TEST_CASE("decompose: empty graph is all N") {
  const Index n = 50;
  const EdgeDecomposition dec = decompose(SparseGraph(n, true), LinearOp::zero(n, n), 1.0, 3.0);
  CHECK((dec.class_map().array() == static_cast<std::uint8_t>(EdgeClass::N)).all());
  const auto model = ProbabilityModel::uniform(n, 3.0 / n);
  const VerificationReport rep =
      verify_decomposition(SparseGraph(n, true), expected_adjacency(model), dec, 3.0, 1.0, 4.0, {1e-10, 5000, 0});
  CHECK(rep.structural_ok());
  CHECK(rep.footprint_ok);
  CHECK(rep.core_norm == doctest::Approx(spectral_norm(expected_adjacency(model), 1e-10)).epsilon(1e-7));
}

TEST_CASE("decompose on small samples passes every structural check") {
  for (const auto& [n, d, r] : {std::tuple<Index, double, double>{64, 4, 1}, {128, 6, 2}, {200, 8, 1}}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto model = ProbabilityModel::uniform(n, d / static_cast<double>(n));
      const SparseGraph a = sample_directed(model, {4, s});
      const LinearOp ea = expected_adjacency(model);
      const EdgeDecomposition dec = decompose(a, ea, r, d);
      const VerificationReport rep = verify_decomposition(a, ea, dec, d, r);
      CHECK(rep.partition_ok);
      CHECK(rep.r_rows_ok);
      CHECK(rep.c_cols_ok);
      CHECK(rep.unassigned == 0);
      CHECK(static_cast<double>(dec.trace().size()) <= std::ceil(std::log2(static_cast<double>(n))) + 1);
      for (std::size_t k = 1; k < dec.trace().size(); ++k) {
        CHECK(dec.trace()[k].rows.size() * 2 <= dec.trace()[k - 1].rows.size());
      }
      // Rows that received R in one round are not in the next round's block.
      for (std::size_t k = 0; k + 1 < dec.trace().size(); ++k) {
        const std::set<Index> next(dec.trace()[k + 1].rows.begin(), dec.trace()[k + 1].rows.end());
        for (const Index i : dec.trace()[k].rows) {
          bool has_r = false;
          for (const Index j : dec.trace()[k].cols) has_r = has_r || dec.class_of(i, j) == EdgeClass::R;
          if (has_r) CHECK(next.count(i) == 0);
        }
      }
      CHECK(dec.class_map() == decompose(a, ea, r, d).class_map());
      CHECK_THROWS(decompose(sample(model, {4, s}), ea, r, d));
    }
  }
}

TEST_CASE("verifier negative control") {
  const Index n = 40;
  std::vector<SparseGraph::Edge> edges;
  for (Index j = 1; j <= 33; ++j) edges.push_back({0, j, 1.0});
  const SparseGraph a = SparseGraph::from_edges(n, edges, true);
  EdgeDecomposition dec(n, 1.0, 2.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) dec.set_class(i, j, i == 0 ? EdgeClass::R : EdgeClass::N);
  }
  const VerificationReport rep = verify_decomposition(a, LinearOp::zero(n, n), dec, 2.0, 1.0);
  CHECK(rep.partition_ok);
  CHECK(rep.max_r_row_ones == 33);
  CHECK_FALSE(rep.r_rows_ok);
  CHECK_FALSE(rep.structural_ok());

  EdgeDecomposition holes(n, 1.0, 2.0);
  const VerificationReport missing = verify_decomposition(a, LinearOp::zero(n, n), holes, 2.0, 1.0);
  CHECK_FALSE(missing.partition_ok);
  CHECK(missing.unassigned == n * n);
}

TEST_CASE("double assignment is rejected") {
  EdgeDecomposition dec(4, 1.0, 1.0);
  dec.assign({{0, 1}, {2}, EdgeClass::N});
  CHECK_THROWS_AS(dec.assign({{1}, {2, 3}, EdgeClass::C}), Error);
}

TEST_CASE("triangle split") {
  const auto model = ProbabilityModel::uniform(30, 0.3);
  const SparseGraph g = sample(model, {6, 0});
  const auto [upper, lower] = split_triangles(g);
  CHECK(upper.directed());
  CHECK(upper.edge_count() + lower.edge_count() == 2 * g.edge_count());
  for (const auto& e : upper.edges()) CHECK(e.i < e.j);
  for (const auto& e : lower.edges()) CHECK(e.i > e.j);
  const Matrix up = triangle_part(expected_adjacency(model), true).to_dense();
  const Matrix lo = triangle_part(expected_adjacency(model), false).to_dense();
  CHECK((up + lo - expected_adjacency_dense(model)).norm() <= 1e-13);
  CHECK(up.triangularView<Eigen::Lower>().toDenseMatrix().isZero(0.0));
}
