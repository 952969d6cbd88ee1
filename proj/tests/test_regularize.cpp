#include <doctest.h>

#include <cmath>

#include "graphconc/errors.hpp"
#include "graphconc/regularize.hpp"
#include "graphconc/spectral.hpp"

using namespace graphconc;

namespace {

SparseGraph star(Index leaves) {
  std::vector<SparseGraph::Edge> edges;
  for (Index j = 1; j <= leaves; ++j) edges.push_back({0, j, 1.0});
  return SparseGraph::from_edges(leaves + 1, edges, false);
}

SparseGraph complete(Index n) {
  std::vector<SparseGraph::Edge> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
  }
  return SparseGraph::from_edges(n, edges, false);
}

// A graph with a few planted hubs so every scheme has something to do.
SparseGraph hubby(Index n, double d, std::uint64_t stream) {
  Vector e = Vector::Constant(n, d);
  for (Index i = 0; i < n; i += 17) e[i] = 6 * d;
  return sample(ProbabilityModel::degree_profile(e), {77, stream});
}

}  // namespace

TEST_CASE("average_degree examples") {
  CHECK(average_degree(SparseGraph(7, false)) == 0.0);
  CHECK(average_degree(complete(5)) == doctest::Approx(4.0));
  CHECK(average_degree(star(3)) == doctest::Approx(1.5));
}

TEST_CASE("remove_vertices examples") {
  const SparseGraph g = complete(6);
  CHECK(remove_vertices(g, {}) == g);
  CHECK(remove_vertices(g, full_range(6)).edge_count() == 0);
  CHECK(remove_vertices(star(5), {0}).edge_count() == 0);
  CHECK(remove_vertices(g, {2}).edge_count() == 10);
}

TEST_CASE("high_degree_set is strict") {
  const IndexSet s = high_degree_set(star(4), 4);
  CHECK(s.empty());
  CHECK(high_degree_set(star(4), 3) == IndexSet{0});
}

TEST_CASE("trim_edges examples") {
  const SparseGraph g = complete(5);
  CHECK(trim_edges(g, 4) == g);
  const SparseGraph t = trim_edges(star(10), 5);
  CHECK(t.edge_count() == 5);
  for (Index j = 1; j <= 5; ++j) CHECK(t.weight(0, j) == 1.0);
  for (Index j = 6; j <= 10; ++j) CHECK(t.weight(0, j) == 0.0);
  CHECK_THROWS(trim_edges(proportional_reweight(star(10), 2), 5));
}

TEST_CASE("trim_edges post-check on G(n, d/n)") {
  const Index n = 1000;
  const double d = 5;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SparseGraph g = sample(ProbabilityModel::uniform(n, d / n), {1, s});
    const double cap = 2 * d;
    const SparseGraph t = trim_edges(g, cap);
    const Vector before = degrees(g);
    CHECK(degrees(t).maxCoeff() <= cap);
    for (const auto& e : g.edges()) {
      if (t.weight(e.i, e.j) == 0.0) CHECK(std::max(before[e.i], before[e.j]) > cap);
    }
  }
}

TEST_CASE("proportional_reweight examples") {
  const SparseGraph g = complete(4);
  CHECK(proportional_reweight(g, 3) == g);
  // Star center has degree 4 * cap with cap = 2: lambda_0 = 1/4, leaves keep 1.
  const SparseGraph r = proportional_reweight(star(8), 2);
  CHECK(r.weight(0, 3) == doctest::Approx(0.5));
  const SparseGraph iso = proportional_reweight(SparseGraph(3, false), 1);
  CHECK(iso.edge_count() == 0);
}

TEST_CASE("tau_shift examples") {
  const SparseGraph g = star(4);
  CHECK((shifted_degrees(tau_shift(g, 0)) - degrees(g)).norm() == 0.0);
  const Index n = 6;
  const Vector sd = shifted_degrees(tau_shift(SparseGraph(n, false), static_cast<double>(n)));
  CHECK((sd.array() == static_cast<double>(n)).all());
  const ShiftedGraph s = tau_shift(g, 2.5);
  const Vector row_sums = adjacency_operator(s).apply(Vector::Ones(g.n()));
  CHECK((row_sums - (degrees(g).array() + 2.5).matrix()).norm() < 1e-13);
  CHECK_THROWS(tau_shift(sample_directed(ProbabilityModel::uniform(5, 0.5), {1, 0}), 1.0));
}

TEST_CASE("laplacian examples") {
  const Vector k3 = full_spectrum(laplacian(complete(3)).to_dense());
  CHECK(k3[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(k3[1] == doctest::Approx(1.5));
  CHECK(k3[2] == doctest::Approx(1.5));

  const Index n = 7;
  const Vector e = full_spectrum(laplacian(tau_shift(SparseGraph(n, false), 3.0)).to_dense());
  CHECK(std::abs(e[0]) < 1e-12);
  for (Index i = 1; i < n; ++i) CHECK(e[i] == doctest::Approx(1.0));

  CHECK_THROWS_AS(laplacian(SparseGraph(3, false)), ZeroDegree);
  try {
    laplacian(SparseGraph::from_edges(3, {{0, 1, 1.0}}, false));
    FAIL("expected ZeroDegree");
  } catch (const ZeroDegree& z) {
    CHECK(z.vertex() == 2);
  }
}

TEST_CASE("regularizer properties on random graphs") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Index n = 150;
    const double d = 4;
    const double cap = 2 * d;
    const SparseGraph g = hubby(n, d, s);
    const Vector deg = degrees(g);
    const IndexSet high = high_degree_set(g, cap);
    std::vector<bool> is_high(static_cast<std::size_t>(n), false);
    for (const Index v : high) is_high[static_cast<std::size_t>(v)] = true;

    for (const auto& scheme : {RegularizationScheme::identity(), RegularizationScheme::remove_vertices(cap),
                               RegularizationScheme::trim_edges(cap),
                               RegularizationScheme::proportional_reweight(cap)}) {
      const SparseGraph out = apply_scheme(g, scheme);
      const Matrix a(g.adjacency());
      const Matrix b(out.adjacency());
      CHECK((b - b.transpose()).norm() == 0.0);
      CHECK((b.array() <= a.array()).all());
      CHECK((b.array() >= 0.0).all());
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
          if (b(i, j) != a(i, j)) {
            CHECK((is_high[static_cast<std::size_t>(i)] || is_high[static_cast<std::size_t>(j)]));
          }
        }
      }
      if (scheme.kind == RegularizationScheme::Kind::TrimEdges ||
          scheme.kind == RegularizationScheme::Kind::RemoveVertices) {
        CHECK(degrees(out).maxCoeff() <= cap);
      }
      if (scheme.kind == RegularizationScheme::Kind::ProportionalReweight) {
        const Vector row_sq = b.array().square().rowwise().sum();
        CHECK(row_sq.maxCoeff() <= cap * (1 + 1e-12));
      }
    }

    const LinearOp lap = laplacian(tau_shift(g, 1.5));
    const Vector spec = full_spectrum(lap.to_dense());
    CHECK(spec[0] >= -1e-9);
    CHECK(spec[n - 1] <= 2 + 1e-9);
    const Vector kernel = shifted_degrees(tau_shift(g, 1.5)).cwiseSqrt();
    CHECK(lap.apply(kernel).norm() <= 1e-10 * kernel.norm());
  }
}

TEST_CASE("scheme names and apply_scheme") {
  CHECK(RegularizationScheme::trim_edges(3).name() == "trim");
  CHECK(RegularizationScheme::identity().name() == "identity");
  CHECK(RegularizationScheme::remove_vertices(1).name() == "remove");
  CHECK(RegularizationScheme::proportional_reweight(1).name() == "reweight");
  CHECK(RegularizationScheme::tau_shift(1).name() == "tau");
  CHECK_THROWS(apply_scheme(star(3), RegularizationScheme::tau_shift(1)));
  CHECK_THROWS(RegularizationScheme::trim_edges(0));
}
