#include "graphconc/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "graphconc/errors.hpp"

namespace graphconc {

namespace {

void check_cap(double cap) {
  if (!(cap > 0.0)) throw InvalidArgument("regularization cap must be positive");
}

}  // namespace

RegularizationScheme RegularizationScheme::remove_vertices(double cap) {
  check_cap(cap);
  return {Kind::RemoveVertices, cap, 0.0};
}

RegularizationScheme RegularizationScheme::trim_edges(double cap) {
  check_cap(cap);
  return {Kind::TrimEdges, cap, 0.0};
}

RegularizationScheme RegularizationScheme::proportional_reweight(double cap) {
  check_cap(cap);
  return {Kind::ProportionalReweight, cap, 0.0};
}

RegularizationScheme RegularizationScheme::tau_shift(double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("tau must be nonnegative");
  return {Kind::TauShift, 0.0, tau};
}

std::string RegularizationScheme::name() const {
  switch (kind) {
    case Kind::Identity:
      return "identity";
    case Kind::RemoveVertices:
      return "remove";
    case Kind::TrimEdges:
      return "trim";
    case Kind::ProportionalReweight:
      return "reweight";
    case Kind::TauShift:
      return "tau";
  }
  return "unknown";
}

Vector degrees(const SparseGraph& g) {
  Vector d = Vector::Zero(g.n());
  const SparseMatrix& a = g.adjacency();
  for (Index i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) d[i] += it.value();
  }
  return d;
}

double average_degree(const SparseGraph& g) {
  return g.n() == 0 ? 0.0 : degrees(g).sum() / static_cast<double>(g.n());
}

IndexSet high_degree_set(const SparseGraph& g, double cap) {
  check_cap(cap);
  const Vector d = degrees(g);
  IndexSet out;
  for (Index i = 0; i < d.size(); ++i) {
    if (d[i] > cap) out.push_back(i);
  }
  return out;
}

SparseGraph remove_vertices(const SparseGraph& g, const IndexSet& removed) {
  std::vector<bool> drop(static_cast<std::size_t>(g.n()), false);
  for (Index v : removed) {
    if (v < 0 || v >= g.n()) throw InvalidArgument("remove_vertices: index out of range");
    drop[static_cast<std::size_t>(v)] = true;
  }
  SparseMatrix a = restrict_to_edges(g.adjacency(), [&drop](Index i, Index j) {
    return !drop[static_cast<std::size_t>(i)] && !drop[static_cast<std::size_t>(j)];
  });
  return SparseGraph::from_matrix(std::move(a), g.directed());
}

SparseGraph trim_edges(const SparseGraph& g, double cap) {
  check_cap(cap);
  if (g.directed()) throw InvalidArgument("trim_edges: graph must be undirected");
  if (g.weighted()) throw InvalidArgument("trim_edges: graph must be unweighted");
  const Index n = g.n();
  const SparseMatrix& a = g.adjacency();

  std::vector<Index> deg(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) deg[static_cast<std::size_t>(i)] = a.outerIndexPtr()[i + 1] - a.outerIndexPtr()[i];

  std::vector<Index> order;
  for (Index i = 0; i < n; ++i) {
    if (static_cast<double>(deg[static_cast<std::size_t>(i)]) > cap) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&deg](Index x, Index y) {
    return deg[static_cast<std::size_t>(x)] > deg[static_cast<std::size_t>(y)];
  });

  const auto key = [n](Index i, Index j) {
    return static_cast<std::uint64_t>(std::min(i, j)) * static_cast<std::uint64_t>(n) +
           static_cast<std::uint64_t>(std::max(i, j));
  };
  std::unordered_set<std::uint64_t> removed;
  std::vector<Index> nbrs;
  for (Index v : order) {
    auto& dv = deg[static_cast<std::size_t>(v)];
    if (static_cast<double>(dv) <= cap) continue;
    nbrs.clear();
    for (SparseMatrix::InnerIterator it(a, v); it; ++it) {
      if (!removed.contains(key(v, it.col()))) nbrs.push_back(it.col());
    }
    // Deleting (v, u) lowers only u among v's neighbours, and u is then no
    // longer a neighbour, so one sort gives the "highest current degree" order.
    std::sort(nbrs.begin(), nbrs.end(), [&deg](Index x, Index y) {
      const Index dx = deg[static_cast<std::size_t>(x)];
      const Index dy = deg[static_cast<std::size_t>(y)];
      return dx != dy ? dx > dy : x > y;
    });
    for (Index u : nbrs) {
      if (static_cast<double>(dv) <= cap) break;
      removed.insert(key(v, u));
      --dv;
      --deg[static_cast<std::size_t>(u)];
    }
  }
  SparseMatrix out = restrict_to_edges(a, [&](Index i, Index j) { return !removed.contains(key(i, j)); });
  return SparseGraph::from_matrix(std::move(out), false);
}

SparseGraph proportional_reweight(const SparseGraph& g, double cap) {
  check_cap(cap);
  const Vector d = degrees(g);
  const Vector lambda = d.unaryExpr([cap](double di) { return di > 0.0 ? std::min(cap / di, 1.0) : 1.0; });
  SparseMatrix a = g.adjacency();
  for (Index i = 0; i < a.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(a, i); it; ++it) {
      it.valueRef() *= std::sqrt(lambda[i] * lambda[it.col()]);
    }
  }
  // Weights can underflow only for absurd caps; keep the (0, 1] invariant.
  a.prune([](Index, Index, double w) { return w > 0.0; });
  return SparseGraph::from_matrix(std::move(a), g.directed());
}

ShiftedGraph tau_shift(const SparseGraph& g, double tau) {
  if (!(tau >= 0.0)) throw InvalidArgument("tau_shift: tau must be nonnegative");
  if (g.directed()) throw InvalidArgument("tau_shift: graph must be undirected");
  return ShiftedGraph{g, tau};
}

Vector shifted_degrees(const ShiftedGraph& s) { return degrees(s.base).array() + s.tau; }

LinearOp adjacency_operator(const ShiftedGraph& s) {
  const LinearOp base = LinearOp::from_sparse(s.base.adjacency(), !s.base.directed());
  if (s.tau == 0.0) return base;
  const double shift = s.tau / static_cast<double>(s.base.n());
  return LinearOp::symmetric(s.base.n(), [base, shift](const Vector& x) -> Vector {
    Vector y = base.apply(x);
    y.array() += shift * x.sum();
    return y;
  });
}

LinearOp normalized_laplacian(const LinearOp& adjacency, const Vector& degrees) {
  if (!adjacency.is_symmetric()) throw InvalidArgument("laplacian: adjacency must be symmetric");
  if (degrees.size() != adjacency.rows()) throw DimensionMismatch("laplacian: degree vector length");
  for (Index i = 0; i < degrees.size(); ++i) {
    if (!(degrees[i] > 0.0)) throw ZeroDegree(i);
  }
  const Vector scale = degrees.cwiseSqrt().cwiseInverse();
  const LinearOp normalized = diagonal_scale(scale, adjacency, scale);
  return LinearOp::symmetric(adjacency.rows(),
                             [normalized](const Vector& x) -> Vector { return x - normalized.apply(x); });
}

LinearOp laplacian(const SparseGraph& g) {
  if (g.directed()) throw InvalidArgument("laplacian: graph must be undirected");
  return normalized_laplacian(LinearOp::from_sparse(g.adjacency(), true), degrees(g));
}

LinearOp laplacian(const ShiftedGraph& s) {
  return normalized_laplacian(adjacency_operator(s), shifted_degrees(s));
}

SparseGraph apply_scheme(const SparseGraph& g, const RegularizationScheme& scheme) {
  switch (scheme.kind) {
    case RegularizationScheme::Kind::Identity:
      return g;
    case RegularizationScheme::Kind::RemoveVertices:
      return remove_vertices(g, high_degree_set(g, scheme.cap));
    case RegularizationScheme::Kind::TrimEdges:
      return trim_edges(g, scheme.cap);
    case RegularizationScheme::Kind::ProportionalReweight:
      return proportional_reweight(g, scheme.cap);
    case RegularizationScheme::Kind::TauShift:
      break;
  }
  throw InvalidArgument("apply_scheme: TauShift yields a ShiftedGraph; call tau_shift");
}

}  // namespace graphconc
