#include "graphconc/gp_decompose.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "graphconc/errors.hpp"
#include "graphconc/random.hpp"

namespace graphconc {

namespace {

double dense_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()[0];
}

IndexSet set_difference(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IndexSet set_union(const IndexSet& a, const IndexSet& b) {
  IndexSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Picks the violating indices that fit into the exceptional set: highest count
// first, ties by lower index. Returns (chosen, overflow), both sorted.
std::pair<IndexSet, IndexSet> fit_capacity(const IndexSet& violating, const std::vector<Index>& count,
                                           Index capacity) {
  IndexSet order = violating;
  std::stable_sort(order.begin(), order.end(), [&count](Index x, Index y) {
    return count[static_cast<std::size_t>(x)] > count[static_cast<std::size_t>(y)];
  });
  const auto take = static_cast<std::size_t>(std::clamp<Index>(capacity, 0, static_cast<Index>(order.size())));
  IndexSet chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  IndexSet overflow(order.begin() + static_cast<std::ptrdiff_t>(take), order.end());
  std::sort(chosen.begin(), chosen.end());
  std::sort(overflow.begin(), overflow.end());
  return {chosen, overflow};
}

// Columns of `sub` (local indices into `cols`) kept by GP selection, mapped
// back to global indices; the complement is returned as excluded.
struct GpSelection {
  IndexSet excluded;
  bool converged = true;
};

GpSelection gp_select(const Matrix& sub, const IndexSet& cols, double delta, const GpOptions& gp) {
  GpSelection out;
  if (sub.rows() == 0 || sub.cols() == 0 || sub.isZero(0.0)) return out;
  const SubmatrixCertificate cert = gp_submatrix(sub, delta, gp);
  out.converged = cert.converged;
  std::vector<bool> keep(cols.size(), false);
  for (Index j : cert.columns) keep[static_cast<std::size_t>(j)] = true;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (!keep[c]) out.excluded.push_back(cols[c]);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

PietschWeights gp_weights(const Matrix& b, const GpOptions& options) {
  const Index m = b.cols();
  if (m == 0 || b.rows() == 0 || b.isZero(0.0)) throw InvalidArgument("gp_weights: matrix must be nonzero");
  PietschWeights out;
  if (m == 1) {
    out.mu = Vector::Ones(1);
    out.achieved_norm = b.norm();
    out.lower_bound = out.achieved_norm;
    out.converged = true;
    out.best_history = {out.achieved_norm};
    return out;
  }

  const double log_floor = std::log(1e-13 / static_cast<double>(m));
  Vector mu = Vector::Constant(m, 1.0 / static_cast<double>(m));
  Vector best_mu = mu;
  double best_f2 = std::numeric_limits<double>::infinity();

  const CounterRng rng = CounterRng({options.seed, 0}).substream(0x69);
  Vector v(m);
  for (Index j = 0; j < m; ++j) v[j] = normal_draw(rng, static_cast<std::uint64_t>(j));
  v.normalize();

  // Dual certificate accumulators with weights w_t = t.
  double acc_trace = 0.0;
  Vector acc_diag = Vector::Zero(m);
  double lower = 0.0;

  int t = 1;
  for (; t <= options.max_iter; ++t) {
    const Vector s = mu.cwiseSqrt().cwiseInverse();
    const int steps = t == 1 ? 60 : options.power_steps;
    for (int p = 0; p < steps; ++p) {
      const Vector u = b * s.cwiseProduct(v);
      v = s.cwiseProduct(b.transpose() * u);
      const double nv = v.norm();
      if (nv == 0.0) break;
      v /= nv;
    }
    const Vector y = s.cwiseProduct(v);
    const double f2 = (b * y).squaredNorm();

    const auto w = static_cast<double>(t);
    acc_trace += w * f2;
    acc_diag += w * y.cwiseAbs2();
    lower = std::max(lower, acc_trace / acc_diag.maxCoeff());

    if (f2 < best_f2) {
      best_f2 = f2;
      best_mu = mu;
    }
    out.best_history.push_back(std::sqrt(best_f2));
    if (best_f2 - lower <= options.gap_tol * best_f2) break;

    // Entropic step on -grad f^2 / sigma^2 = v_j^2 / mu_j, normalized to unit max.
    const Vector score = v.cwiseAbs2().cwiseQuotient(mu);
    const double top = score.maxCoeff();
    if (!(top > 0.0)) break;
    const double eta = 1.0 / std::sqrt(static_cast<double>(t));
    Vector log_mu = mu.array().log().matrix() + (eta / top) * score;
    log_mu.array() -= log_mu.maxCoeff();
    mu = log_mu.array().exp().matrix();
    mu /= mu.sum();
    mu = mu.cwiseMax(std::exp(log_floor));
    mu /= mu.sum();
  }

  out.mu = best_mu;
  out.iterations = std::min(t, options.max_iter);
  out.achieved_norm = dense_norm(b * best_mu.cwiseSqrt().cwiseInverse().asDiagonal());
  out.lower_bound = std::sqrt(lower);
  const double a2 = out.achieved_norm * out.achieved_norm;
  out.converged = a2 - lower <= options.gap_tol * a2;
  return out;
}

SubmatrixCertificate gp_submatrix(const Matrix& b, double delta, const GpOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("gp_submatrix: delta must lie in (0, 1)");
  const Index m = b.cols();
  const PietschWeights weights = gp_weights(b, options);
  SubmatrixCertificate cert;
  cert.delta = delta;
  cert.mu = weights.mu;
  cert.achieved_norm = weights.achieved_norm;
  cert.converged = weights.converged;
  const double dm = delta * static_cast<double>(m);
  const double threshold = 1.0 / dm;
  for (Index j = 0; j < m; ++j) {
    if (weights.mu[j] <= threshold) cert.columns.push_back(j);
  }
  Matrix sub(b.rows(), static_cast<Index>(cert.columns.size()));
  for (std::size_t c = 0; c < cert.columns.size(); ++c) sub.col(static_cast<Index>(c)) = b.col(cert.columns[c]);
  cert.submatrix_norm = dense_norm(sub);
  cert.scaled_norm = cert.submatrix_norm * std::sqrt(dm);
  cert.cardinality_ok = static_cast<double>(cert.columns.size()) >= (1.0 - delta) * static_cast<double>(m) - 1e-9;
  cert.norm_ok = cert.scaled_norm <= cert.achieved_norm * (1.0 + 1e-12);
  return cert;
}

// ---------------------------------------------------------------------------

char class_letter(EdgeClass c) {
  switch (c) {
    case EdgeClass::N:
      return 'N';
    case EdgeClass::R:
      return 'R';
    case EdgeClass::C:
      return 'C';
    case EdgeClass::Unassigned:
      break;
  }
  return '?';
}

EdgeDecomposition::EdgeDecomposition(Index n, double r, double d)
    : n_(n), r_(r), d_(d), classes_(Eigen::MatrixX<std::uint8_t>::Constant(n, n, 255)) {}

void EdgeDecomposition::assign(const Block& block) {
  for (Index j : block.cols) {
    for (Index i : block.rows) {
      if (classes_(i, j) != static_cast<std::uint8_t>(EdgeClass::Unassigned)) {
        throw Error("EdgeDecomposition: pair (" + std::to_string(i) + ", " + std::to_string(j) +
                    ") assigned twice");
      }
      classes_(i, j) = static_cast<std::uint8_t>(block.cls);
    }
  }
}

Eigen::MatrixX<std::uint8_t> EdgeDecomposition::mask(EdgeClass c) const {
  return (classes_.array() == static_cast<std::uint8_t>(c)).cast<std::uint8_t>();
}

BlockDecomposition decompose_block(const SparseGraph& a, const LinearOp& expected, const IndexSet& rows,
                                   const IndexSet& cols, double alpha, double r, double d,
                                   const DecomposeOptions& options) {
  if (!(r >= 1.0)) throw InvalidArgument("decompose_block: r must be >= 1");
  if (!(d > 0.0)) throw InvalidArgument("decompose_block: d must be positive");
  const Index n = a.n();
  BlockDecomposition out;
  RoundTrace& tr = out.trace;
  tr.rows = rows;
  tr.cols = cols;
  tr.alpha = alpha;
  tr.light_threshold = 8.0 * r * alpha * d;

  const Index m = std::max(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  if (rows.empty() || cols.empty()) return out;
  if (m <= options.degenerate_size) {
    tr.degenerate = true;
    out.blocks.push_back({rows, cols, EdgeClass::N});
    return out;
  }

  const auto un = static_cast<std::size_t>(n);
  std::vector<bool> in_rows(un, false), in_cols(un, false);
  for (Index i : rows) in_rows[static_cast<std::size_t>(i)] = true;
  for (Index j : cols) in_cols[static_cast<std::size_t>(j)] = true;

  // Ones per row and column of A_{I x J}.
  const SparseMatrix& adj = a.adjacency();
  std::vector<Index> row_count(un, 0), col_count(un, 0);
  for (Index i : rows) {
    for (SparseMatrix::InnerIterator it(adj, i); it; ++it) {
      if (in_cols[static_cast<std::size_t>(it.col())]) {
        ++row_count[static_cast<std::size_t>(i)];
        ++col_count[static_cast<std::size_t>(it.col())];
      }
    }
  }
  for (Index i : rows) {
    if (static_cast<double>(row_count[static_cast<std::size_t>(i)]) <= tr.light_threshold) tr.light_rows.push_back(i);
  }
  for (Index j : cols) {
    if (static_cast<double>(col_count[static_cast<std::size_t>(j)]) <= tr.light_threshold) tr.light_cols.push_back(j);
  }
  const IndexSet heavy_rows = set_difference(rows, tr.light_rows);
  const IndexSet heavy_cols = set_difference(cols, tr.light_cols);
  tr.row_filter_empty = tr.light_rows.empty();
  tr.col_filter_empty = tr.light_cols.empty();

  const double small_limit = 32.0 * r;

  // Pass on A: GP column selection on (A - EA)_{I' x J}, then the heavy-row column filter.
  {
    if (!tr.light_rows.empty()) {
      const Matrix sub = dense_block(LinearOp::from_sparse(adj, !a.directed()), tr.light_rows, cols) -
                         dense_block(expected, tr.light_rows, cols);
      const GpSelection sel = gp_select(sub, cols, options.delta, options.gp);
      tr.gp_excluded_cols = sel.excluded;
      tr.gp_converged = tr.gp_converged && sel.converged;
    }
    std::vector<Index> heavy_ones(un, 0);
    for (Index i : heavy_rows) {
      for (SparseMatrix::InnerIterator it(adj, i); it; ++it) {
        if (in_cols[static_cast<std::size_t>(it.col())]) ++heavy_ones[static_cast<std::size_t>(it.col())];
      }
    }
    IndexSet violating;
    for (Index j : set_difference(cols, tr.gp_excluded_cols)) {
      if (static_cast<double>(heavy_ones[static_cast<std::size_t>(j)]) > small_limit) violating.push_back(j);
    }
    const Index capacity = static_cast<Index>(cols.size()) / 2 - static_cast<Index>(tr.gp_excluded_cols.size());
    auto [chosen, overflow] = fit_capacity(violating, heavy_ones, capacity);
    tr.heavy_excluded_cols = chosen;
    tr.overflow_cols = overflow;
    tr.exceptional_cols = set_union(tr.gp_excluded_cols, chosen);
  }

  // Same on the transpose: GP row selection on (A - EA)_{I x J'}^T, then the heavy-column row filter.
  {
    if (!tr.light_cols.empty()) {
      const Matrix sub = (dense_block(LinearOp::from_sparse(adj, !a.directed()), rows, tr.light_cols) -
                          dense_block(expected, rows, tr.light_cols))
                             .transpose();
      const GpSelection sel = gp_select(sub, rows, options.delta, options.gp);
      tr.gp_excluded_rows = sel.excluded;
      tr.gp_converged = tr.gp_converged && sel.converged;
    }
    std::vector<bool> is_heavy_col(un, false);
    for (Index j : heavy_cols) is_heavy_col[static_cast<std::size_t>(j)] = true;
    std::vector<Index> heavy_ones(un, 0);
    for (Index i : rows) {
      for (SparseMatrix::InnerIterator it(adj, i); it; ++it) {
        if (is_heavy_col[static_cast<std::size_t>(it.col())]) ++heavy_ones[static_cast<std::size_t>(i)];
      }
    }
    IndexSet violating;
    for (Index i : set_difference(rows, tr.gp_excluded_rows)) {
      if (static_cast<double>(heavy_ones[static_cast<std::size_t>(i)]) > small_limit) violating.push_back(i);
    }
    const Index capacity = static_cast<Index>(rows.size()) / 2 - static_cast<Index>(tr.gp_excluded_rows.size());
    auto [chosen, overflow] = fit_capacity(violating, heavy_ones, capacity);
    tr.heavy_excluded_rows = chosen;
    tr.overflow_rows = overflow;
    tr.exceptional_rows = set_union(tr.gp_excluded_rows, chosen);
  }

  out.exceptional_rows = tr.exceptional_rows;
  out.exceptional_cols = tr.exceptional_cols;

  // Classify by row and column attributes; each attribute pair is a product block.
  auto member = [un](const IndexSet& s) {
    std::vector<bool> f(un, false);
    for (Index i : s) f[static_cast<std::size_t>(i)] = true;
    return f;
  };
  const auto is_light_row = member(tr.light_rows), is_exc_row = member(tr.exceptional_rows),
             is_ovf_row = member(tr.overflow_rows);
  const auto is_light_col = member(tr.light_cols), is_exc_col = member(tr.exceptional_cols),
             is_ovf_col = member(tr.overflow_cols);

  auto row_key = [&](Index i) {
    const auto u = static_cast<std::size_t>(i);
    return (is_light_row[u] ? 1 : 0) | (is_exc_row[u] ? 2 : 0) | (is_ovf_row[u] ? 4 : 0);
  };
  auto col_key = [&](Index j) {
    const auto u = static_cast<std::size_t>(j);
    return (is_light_col[u] ? 1 : 0) | (is_exc_col[u] ? 2 : 0) | (is_ovf_col[u] ? 4 : 0);
  };
  std::array<IndexSet, 8> row_groups, col_groups;
  for (Index i : rows) row_groups[static_cast<std::size_t>(row_key(i))].push_back(i);
  for (Index j : cols) col_groups[static_cast<std::size_t>(col_key(j))].push_back(j);

  for (int rk = 0; rk < 8; ++rk) {
    if (row_groups[static_cast<std::size_t>(rk)].empty()) continue;
    const bool light_r = (rk & 1) != 0, exc_r = (rk & 2) != 0, ovf_r = (rk & 4) != 0;
    for (int ck = 0; ck < 8; ++ck) {
      if (col_groups[static_cast<std::size_t>(ck)].empty()) continue;
      const bool light_c = (ck & 1) != 0, exc_c = (ck & 2) != 0, ovf_c = (ck & 4) != 0;
      if (exc_r && exc_c) continue;
      const bool in_n = (light_r && !exc_c) || (!exc_r && light_c) || (ovf_r && !light_c) || (!light_r && ovf_c);
      const bool in_r = !exc_r && !ovf_r && !light_c;
      const bool in_c = !light_r && !exc_c && !ovf_c;
      EdgeClass cls = EdgeClass::N;
      if (in_n) {
        cls = EdgeClass::N;
      } else if (in_r) {
        cls = EdgeClass::R;
      } else if (in_c) {
        cls = EdgeClass::C;
      } else {
        throw Error("decompose_block: uncovered pair class (internal error)");
      }
      out.blocks.push_back({row_groups[static_cast<std::size_t>(rk)], col_groups[static_cast<std::size_t>(ck)], cls});
    }
  }
  return out;
}

EdgeDecomposition decompose(const SparseGraph& a, const LinearOp& expected, double r, double d,
                            const DecomposeOptions& options) {
  if (!a.directed()) {
    throw InvalidArgument("decompose: graph must be directed; split undirected graphs into triangles first");
  }
  const Index n = a.n();
  if (n > kMaxDecomposeSize) throw SizeExceeded("decompose: n exceeds " + std::to_string(kMaxDecomposeSize));
  if (expected.rows() != n || expected.cols() != n) throw DimensionMismatch("decompose: EA shape");
  if (!(r >= 1.0)) throw InvalidArgument("decompose: r must be >= 1");
  if (!(d > 0.0)) throw InvalidArgument("decompose: d must be positive");

  EdgeDecomposition dec(n, r, d);
  IndexSet rows = full_range(n);
  IndexSet cols = full_range(n);
  double alpha = 1.0;
  const int max_rounds = static_cast<int>(std::ceil(std::log2(std::max<double>(static_cast<double>(n), 1.0)))) + 1;
  for (int round = 0; !rows.empty() && !cols.empty(); ++round) {
    if (round >= max_rounds) throw Error("decompose: block sizes failed to halve (internal error)");
    DecomposeOptions opt = options;
    opt.gp.seed = mix64(options.gp.seed + static_cast<std::uint64_t>(round));
    BlockDecomposition part = decompose_block(a, expected, rows, cols, alpha, r, d, opt);
    for (const Block& b : part.blocks) dec.assign(b);
    part.trace.round = round;
    dec.add_round(std::move(part.trace));
    rows = std::move(part.exceptional_rows);
    cols = std::move(part.exceptional_cols);
    const auto m = static_cast<double>(std::max(rows.size(), cols.size()));
    alpha = std::sqrt(m / static_cast<double>(n));
  }
  // Pairs outside every block only arise when one side of the exceptional block is empty.
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (dec.class_of(i, j) == EdgeClass::Unassigned) throw Error("decompose: pair left unassigned (internal error)");
    }
  }
  return dec;
}

std::pair<SparseGraph, SparseGraph> split_triangles(const SparseGraph& g) {
  if (g.directed()) throw InvalidArgument("split_triangles: graph must be undirected");
  SparseMatrix upper = restrict_to_edges(g.adjacency(), [](Index i, Index j) { return i < j; });
  SparseMatrix lower = restrict_to_edges(g.adjacency(), [](Index i, Index j) { return i > j; });
  return {SparseGraph::from_matrix(std::move(upper), true), SparseGraph::from_matrix(std::move(lower), true)};
}

LinearOp triangle_part(const LinearOp& expected, bool upper) {
  const Index n = expected.rows();
  Eigen::MatrixX<std::uint8_t> mask(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) mask(i, j) = upper ? (i < j) : (i > j);
  }
  const LinearOp out = restrict_to_edges(expected, mask);
  return LinearOp(n, n, [out](const Vector& x) { return out.apply(x); },
                  [out](const Vector& y) { return out.apply_transpose(y); }, false);
}

VerificationReport verify_decomposition(const SparseGraph& a, const LinearOp& expected,
                                        const EdgeDecomposition& dec, double d, double r, double kappa,
                                        const SolverOptions& solver) {
  const Index n = a.n();
  if (dec.n() != n || expected.rows() != n || expected.cols() != n) {
    throw DimensionMismatch("verify_decomposition: inconsistent sizes");
  }
  VerificationReport rep;
  const auto& map = dec.class_map();
  const auto as = [](EdgeClass c) { return static_cast<std::uint8_t>(c); };

  rep.unassigned = 0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const auto c = map(i, j);
      if (c != as(EdgeClass::N) && c != as(EdgeClass::R) && c != as(EdgeClass::C)) ++rep.unassigned;
    }
  }
  rep.partition_ok = rep.unassigned == 0;

  const SparseMatrix& adj = a.adjacency();
  std::vector<Index> r_row(static_cast<std::size_t>(n), 0), c_col(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(adj, i); it; ++it) {
      if (map(i, it.col()) == as(EdgeClass::R)) ++r_row[static_cast<std::size_t>(i)];
      if (map(i, it.col()) == as(EdgeClass::C)) ++c_col[static_cast<std::size_t>(it.col())];
    }
  }
  rep.max_r_row_ones = n == 0 ? 0 : *std::max_element(r_row.begin(), r_row.end());
  rep.max_c_col_ones = n == 0 ? 0 : *std::max_element(c_col.begin(), c_col.end());
  rep.r_rows_ok = static_cast<double>(rep.max_r_row_ones) <= 32.0 * r;
  rep.c_cols_ok = static_cast<double>(rep.max_c_col_ones) <= 32.0 * r;

  for (Index j = 0; j < n; ++j) {
    if ((map.col(j).array() == as(EdgeClass::R)).any()) ++rep.r_columns;
  }
  for (Index i = 0; i < n; ++i) {
    if ((map.row(i).array() == as(EdgeClass::C)).any()) ++rep.c_rows;
  }
  rep.footprint_limit = kappa * static_cast<double>(n) / d;
  rep.footprint_ok = static_cast<double>(rep.r_columns) <= rep.footprint_limit &&
                     static_cast<double>(rep.c_rows) <= rep.footprint_limit;

  Matrix deviation = Matrix(adj) - expected.to_dense();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (map(i, j) != as(EdgeClass::N)) deviation(i, j) = 0.0;
    }
  }
  const NormEstimate norm = spectral_norm_estimate(LinearOp::from_dense(std::move(deviation)), solver);
  rep.core_norm = norm.value;
  rep.norm_converged = norm.converged;
  rep.core_ratio = rep.core_norm / (std::pow(r, 1.5) * std::sqrt(d));
  return rep;
}

}  // namespace graphconc
