#include "graphconc/graph_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "graphconc/errors.hpp"

namespace graphconc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidModel(std::string(what) + ": probability " + std::to_string(p) + " outside [0, 1]");
  }
}

// Calls visit(i, j, p_ij) for every pair the sampler draws. Dispatches on the
// model kind once, outside the O(n^2) loop.
template <class Visit>
void for_each_pair(const ProbabilityModel& model, bool directed, Visit&& visit) {
  const Index n = model.n();
  auto loop = [&](auto&& prob) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = directed ? 0 : i + 1; j < n; ++j) {
        if (j == i) continue;
        visit(i, j, prob(i, j));
      }
    }
  };
  std::visit(Overloaded{
                 [&](const ProbabilityModel::Uniform& u) {
                   if (u.p <= 0.0) return;
                   loop([p = u.p](Index, Index) { return p; });
                 },
                 [&](const ProbabilityModel::RankOne& r) {
                   const double* theta = r.theta.data();
                   loop([theta](Index i, Index j) { return std::min(theta[i] * theta[j], 1.0); });
                 },
                 [&](const ProbabilityModel::BlockTwo& b) {
                   const Index half = n / 2;
                   const double within = b.a / static_cast<double>(n);
                   const double across = b.b / static_cast<double>(n);
                   loop([=](Index i, Index j) { return (i < half) == (j < half) ? within : across; });
                 },
                 [&](const ProbabilityModel::Explicit& e) {
                   loop([&p = e.p](Index i, Index j) { return p(i, j); });
                 },
             },
             model.kind());
}

SparseGraph sample_impl(const ProbabilityModel& model, SeedSpec seed, bool directed) {
  const CounterRng rng(seed);
  const auto n = static_cast<std::uint64_t>(model.n());
  std::vector<Eigen::Triplet<double>> triplets;
  for_each_pair(model, directed, [&](Index i, Index j, double p) {
    if (rng.bernoulli(static_cast<std::uint64_t>(i) * n + static_cast<std::uint64_t>(j), p)) {
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
      if (!directed) triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), 1.0);
    }
  });
  SparseMatrix adjacency(model.n(), model.n());
  adjacency.setFromTriplets(triplets.begin(), triplets.end());
  adjacency.makeCompressed();
  return SparseGraph::from_matrix(std::move(adjacency), directed);
}

}  // namespace

ProbabilityModel::ProbabilityModel(Index n, Kind kind) : n_(n), kind_(std::move(kind)) {}

ProbabilityModel ProbabilityModel::uniform(Index n, double p) {
  if (n <= 0) throw InvalidModel("uniform: n must be positive");
  check_probability(p, "uniform");
  return ProbabilityModel(n, Uniform{p});
}

ProbabilityModel ProbabilityModel::rank_one(Vector theta) {
  if (theta.size() == 0) throw InvalidModel("rank_one: theta must be non-empty");
  if (!theta.allFinite() || (theta.array() < 0.0).any()) {
    throw InvalidModel("rank_one: theta must be finite and nonnegative");
  }
  const Index n = theta.size();
  return ProbabilityModel(n, RankOne{std::move(theta)});
}

ProbabilityModel ProbabilityModel::block_two(Index n, double a, double b) {
  if (n <= 0 || n % 2 != 0) throw InvalidModel("block_two: n must be positive and even");
  check_probability(a / static_cast<double>(n), "block_two(a/n)");
  check_probability(b / static_cast<double>(n), "block_two(b/n)");
  return ProbabilityModel(n, BlockTwo{a, b});
}

ProbabilityModel ProbabilityModel::explicit_matrix(Matrix p) {
  if (p.rows() == 0 || p.rows() != p.cols()) throw InvalidModel("explicit: matrix must be square and non-empty");
  if (p.rows() > kMaxExplicit) {
    throw InvalidModel("explicit: n = " + std::to_string(p.rows()) + " exceeds limit " +
                       std::to_string(kMaxExplicit));
  }
  for (Index i = 0; i < p.rows(); ++i) {
    for (Index j = 0; j < p.cols(); ++j) {
      check_probability(p(i, j), "explicit");
      if (p(i, j) != p(j, i)) throw InvalidModel("explicit: matrix must be symmetric");
    }
  }
  p.diagonal().setZero();
  const Index n = p.rows();
  return ProbabilityModel(n, Explicit{std::move(p)});
}

ProbabilityModel ProbabilityModel::degree_profile(const Vector& expected_degrees) {
  const double total = expected_degrees.sum();
  if (!(total > 0.0)) throw InvalidModel("degree_profile: degrees must have a positive sum");
  return rank_one(expected_degrees / std::sqrt(total));
}

double ProbabilityModel::probability(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw InvalidArgument("probability: index out of range");
  if (i == j) return 0.0;
  return std::visit(Overloaded{
                        [](const Uniform& u) { return u.p; },
                        [&](const RankOne& r) { return std::min(r.theta[i] * r.theta[j], 1.0); },
                        [&](const BlockTwo& b) {
                          const bool same = block_of(n_, i) == block_of(n_, j);
                          return (same ? b.a : b.b) / static_cast<double>(n_);
                        },
                        [&](const Explicit& e) { return e.p(i, j); },
                    },
                    kind_);
}

// ---------------------------------------------------------------------------

SparseGraph::SparseGraph(Index n, bool directed) : adjacency_(n, n), directed_(directed) {
  if (n < 0) throw InvalidGraph("SparseGraph: negative vertex count");
}

SparseGraph::SparseGraph(SparseMatrix adjacency, bool directed)
    : adjacency_(std::move(adjacency)), directed_(directed) {}

SparseGraph SparseGraph::from_edges(Index n, const std::vector<Edge>& edges, bool directed) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(edges.size() * (directed ? 1 : 2));
  for (const Edge& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) throw InvalidGraph("from_edges: index out of range");
    triplets.emplace_back(static_cast<int>(e.i), static_cast<int>(e.j), e.w);
    if (!directed) triplets.emplace_back(static_cast<int>(e.j), static_cast<int>(e.i), e.w);
  }
  SparseMatrix adjacency(n, n);
  // Duplicates are summed here and then caught by the count check below.
  adjacency.setFromTriplets(triplets.begin(), triplets.end());
  adjacency.makeCompressed();
  if (adjacency.nonZeros() != static_cast<Index>(triplets.size())) {
    throw InvalidGraph("from_edges: duplicate edge");
  }
  return from_matrix(std::move(adjacency), directed);
}

SparseGraph SparseGraph::from_matrix(SparseMatrix adjacency, bool directed) {
  if (adjacency.rows() != adjacency.cols()) throw InvalidGraph("from_matrix: adjacency must be square");
  adjacency.makeCompressed();
  for (Index i = 0; i < adjacency.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(adjacency, i); it; ++it) {
      if (it.col() == it.row()) throw InvalidGraph("self-loop at vertex " + std::to_string(it.row()));
      if (!(it.value() > 0.0 && it.value() <= 1.0)) {
        throw InvalidGraph("weight " + std::to_string(it.value()) + " outside (0, 1]");
      }
    }
  }
  if (!directed) {
    const SparseMatrix t = adjacency.transpose();
    if ((adjacency - t).norm() != 0.0 || t.nonZeros() != adjacency.nonZeros()) {
      throw InvalidGraph("undirected adjacency must be symmetric");
    }
  }
  return SparseGraph(std::move(adjacency), directed);
}

bool SparseGraph::weighted() const {
  const double* v = adjacency_.valuePtr();
  return std::any_of(v, v + adjacency_.nonZeros(), [](double w) { return w != 1.0; });
}

Index SparseGraph::edge_count() const {
  return directed_ ? adjacency_.nonZeros() : adjacency_.nonZeros() / 2;
}

double SparseGraph::weight(Index i, Index j) const { return adjacency_.coeff(i, j); }

std::vector<SparseGraph::Edge> SparseGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edge_count()));
  for (Index i = 0; i < adjacency_.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(adjacency_, i); it; ++it) {
      if (directed_ || it.col() > i) out.push_back({i, it.col(), it.value()});
    }
  }
  return out;
}

bool SparseGraph::operator==(const SparseGraph& other) const {
  return directed_ == other.directed_ && n() == other.n() && edges() == other.edges();
}

// ---------------------------------------------------------------------------

double max_rate(const ProbabilityModel& model) {
  const Index n = model.n();
  const auto nd = static_cast<double>(n);
  if (n < 2) return 0.0;
  return std::visit(Overloaded{
                        [&](const ProbabilityModel::Uniform& u) { return nd * u.p; },
                        [&](const ProbabilityModel::RankOne& r) {
                          // Largest off-diagonal product uses the two largest factors.
                          Vector sorted = r.theta;
                          std::partial_sort(sorted.begin(), sorted.begin() + 2, sorted.end(),
                                            std::greater<>());
                          return nd * std::min(sorted[0] * sorted[1], 1.0);
                        },
                        [&](const ProbabilityModel::BlockTwo& b) {
                          // Halves of size 1 have no within-block pairs.
                          return n / 2 >= 2 ? std::max(b.a, b.b) : b.b;
                        },
                        [&](const ProbabilityModel::Explicit& e) { return nd * e.p.maxCoeff(); },
                    },
                    model.kind());
}

Vector expected_degrees(const ProbabilityModel& model) {
  return expected_adjacency(model).apply(Vector::Ones(model.n()));
}

double max_expected_degree(const ProbabilityModel& model) { return expected_degrees(model).maxCoeff(); }

SparseGraph sample(const ProbabilityModel& model, SeedSpec seed) { return sample_impl(model, seed, false); }

SparseGraph sample_directed(const ProbabilityModel& model, SeedSpec seed) {
  return sample_impl(model, seed, true);
}

LinearOp expected_adjacency(const ProbabilityModel& model) {
  const Index n = model.n();
  return std::visit(
      Overloaded{
          [&](const ProbabilityModel::Uniform& u) {
            const double p = u.p;
            return LinearOp::symmetric(n, [p](const Vector& x) -> Vector {
              return (p * x.sum()) * Vector::Ones(x.size()) - p * x;
            });
          },
          [&](const ProbabilityModel::RankOne& r) {
            // sum_j min(t_i t_j, 1) x_j = t_i (t . x) - sum_{j : t_i t_j > 1} (t_i t_j - 1) x_j.
            // With t sorted in decreasing order, the clipped j form a prefix, so the
            // correction is t_i * S1[k_i] - S0[k_i] for prefix sums S1 (of t x) and S0 (of x).
            auto theta = std::make_shared<const Vector>(r.theta);
            auto order = std::make_shared<std::vector<Index>>(static_cast<std::size_t>(n));
            std::iota(order->begin(), order->end(), Index{0});
            std::stable_sort(order->begin(), order->end(),
                             [&](Index a, Index b) { return r.theta[a] > r.theta[b]; });
            auto sorted = std::make_shared<std::vector<double>>();
            sorted->reserve(order->size());
            for (Index k : *order) sorted->push_back(r.theta[k]);
            auto clip = std::make_shared<std::vector<Index>>(static_cast<std::size_t>(n));
            bool any_clip = false;
            for (Index i = 0; i < n; ++i) {
              const double t = r.theta[i];
              Index k = 0;
              if (t > 0.0) {
                // count of j with t * t_j > 1
                k = std::partition_point(sorted->begin(), sorted->end(),
                                         [t](double tj) { return t * tj > 1.0; }) -
                    sorted->begin();
              }
              (*clip)[static_cast<std::size_t>(i)] = k;
              any_clip = any_clip || k > 0;
            }
            return LinearOp::symmetric(n, [=](const Vector& x) -> Vector {
              const Vector& t = *theta;
              Vector y = t.dot(x) * t;
              if (any_clip) {
                std::vector<double> s1(static_cast<std::size_t>(n) + 1, 0.0);
                std::vector<double> s0(static_cast<std::size_t>(n) + 1, 0.0);
                for (std::size_t k = 0; k < order->size(); ++k) {
                  const Index j = (*order)[k];
                  s1[k + 1] = s1[k] + t[j] * x[j];
                  s0[k + 1] = s0[k] + x[j];
                }
                for (Index i = 0; i < n; ++i) {
                  const auto k = static_cast<std::size_t>((*clip)[static_cast<std::size_t>(i)]);
                  y[i] -= t[i] * s1[k] - s0[k];
                }
              }
              y -= (t.array().square().min(1.0) * x.array()).matrix();
              return y;
            });
          },
          [&](const ProbabilityModel::BlockTwo& b) {
            const Index half = n / 2;
            const double within = b.a / static_cast<double>(n);
            const double across = b.b / static_cast<double>(n);
            return LinearOp::symmetric(n, [=](const Vector& x) -> Vector {
              const double s1 = x.head(half).sum();
              const double s2 = x.tail(n - half).sum();
              Vector y(n);
              y.head(half).setConstant(within * s1 + across * s2);
              y.tail(n - half).setConstant(across * s1 + within * s2);
              return y - within * x;
            });
          },
          [&](const ProbabilityModel::Explicit& e) {
            auto p = std::make_shared<const Matrix>(e.p);
            return LinearOp::symmetric(n, [p](const Vector& x) -> Vector { return *p * x; });
          },
      },
      model.kind());
}

Matrix expected_adjacency_dense(const ProbabilityModel& model) {
  const Index n = model.n();
  Matrix out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) out(i, j) = model.probability(i, j);
  }
  return out;
}

}  // namespace graphconc
