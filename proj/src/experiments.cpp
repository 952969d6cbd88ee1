#include "graphconc/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>

#include "graphconc/errors.hpp"

namespace graphconc {

namespace {

std::string num(double x) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", x);
  return {buf, static_cast<std::size_t>(len)};
}

const char* flag(bool b) { return b ? "1" : "0"; }

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

class Run {
 public:
  Run(std::string command, const Json& config, const RunContext& ctx)
      : ctx_(ctx), start_(std::chrono::steady_clock::now()) {
    config_text_ = config.dump(2) + "\n";
    report_["command"] = std::move(command);
    report_["config_hash"] = git_blob_hash(config_text_);
    report_["parameters"] = config;
    report_["seeds"] = {{"master_seed", ctx.seed}, {"trials", ctx.trials}};
    if (!ctx.out_dir.empty()) {
      std::filesystem::create_directories(ctx.out_dir);
      write_text_file(path("config.json"), config_text_);
    }
  }

  Json& report() { return report_; }

  void artifact(const std::string& name, const std::string& content) {
    report_["artifacts"].push_back(name);
    if (!ctx_.out_dir.empty()) write_text_file(path(name), content);
  }

  Json finish() {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
    report_["wall_clock_seconds"] = elapsed.count();
    if (!ctx_.out_dir.empty()) write_text_file(path("report.json"), report_.dump(2) + "\n");
    return report_;
  }

 private:
  std::string path(const std::string& name) const { return (std::filesystem::path(ctx_.out_dir) / name).string(); }

  const RunContext& ctx_;
  std::chrono::steady_clock::time_point start_;
  std::string config_text_;
  Json report_;
};

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<Json> scheme_list(const Json& config) {
  if (config.contains("schemes")) return config.at("schemes").get<std::vector<Json>>();
  if (config.contains("scheme")) return {config.at("scheme")};
  return {Json{{"scheme", "identity"}}};
}

// "identity", "trim(cap_d=2)", ...
std::string scheme_label(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  std::string label = j.at("scheme").get<std::string>();
  std::string args;
  for (const auto& [key, value] : j.items()) {
    if (key == "scheme") continue;
    args += (args.empty() ? "" : ",") + key + "=" + value.dump();
  }
  return args.empty() ? label : label + "(" + args + ")";
}

struct Cell {
  Index n;
  double d;
};

std::vector<Cell> cell_list(const Json& config) {
  std::vector<Cell> cells;
  if (config.contains("cells")) {
    for (const auto& c : config.at("cells")) cells.push_back({c.at("n").get<Index>(), c.at("d").get<double>()});
  } else {
    const double d = config.at("d").get<double>();
    if (config.at("n").is_array()) {
      for (const auto& n : config.at("n")) cells.push_back({n.get<Index>(), d});
    } else {
      cells.push_back({config.at("n").get<Index>(), d});
    }
  }
  if (cells.empty()) throw InvalidArgument("config: no cells");
  return cells;
}

ProbabilityModel uniform_cell(const Cell& c) {
  if (c.n <= 0 || c.d < 0.0 || c.d > static_cast<double>(c.n)) throw InvalidArgument("config: need 0 <= d <= n");
  return ProbabilityModel::uniform(c.n, c.d / static_cast<double>(c.n));
}

std::string spectrum_csv(const SpectrumMeasurement& m) {
  std::ostringstream out;
  out << "index,before,after\n";
  for (Index i = 0; i < m.before.size(); ++i) out << i << ',' << num(m.before[i]) << ',' << num(m.after[i]) << '\n';
  return out.str();
}

std::string histogram_csv(const SpectrumMeasurement& m, int bins) {
  const double lo = std::min(m.before.minCoeff(), m.after.minCoeff());
  const double hi = std::max(m.before.maxCoeff(), m.after.maxCoeff());
  const Histogram hb = histogram(m.before, bins, lo, hi);
  const Histogram ha = histogram(m.after, bins, lo, hi);
  const auto count = static_cast<Index>(hb.counts.size());
  const double width = count > 0 ? (hi - lo) / static_cast<double>(count) : 0.0;
  std::ostringstream out;
  out << "bin_lo,bin_hi,count_before,count_after\n";
  for (Index k = 0; k < count; ++k) {
    const double blo = lo + width * static_cast<double>(k);
    const double bhi = k + 1 == count ? hi : lo + width * static_cast<double>(k + 1);
    out << num(blo) << ',' << num(bhi) << ',' << hb.counts[static_cast<std::size_t>(k)] << ','
        << ha.counts[static_cast<std::size_t>(k)] << '\n';
  }
  return out.str();
}

}  // namespace

Summary summarize(std::vector<double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  return s;
}

Json summary_json(const Summary& s) {
  return {{"count", s.count}, {"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

RegularizationScheme resolve_scheme(const Json& j, double d, double avg_degree) {
  if (j.is_object() && !j.contains("cap") && (j.contains("cap_d") || j.contains("cap_avg"))) {
    Json resolved = j;
    resolved["cap"] = j.contains("cap_d") ? j.at("cap_d").get<double>() * d : j.at("cap_avg").get<double>() * avg_degree;
    return scheme_from_json(resolved);
  }
  return scheme_from_json(j);
}

SolverOptions trial_solver(std::uint64_t seed, std::uint64_t stream, double tol) {
  SolverOptions opts;
  opts.tol = tol;
  opts.seed = mix64(seed ^ mix64(stream + 0x51ed27ULL));
  return opts;
}

std::vector<DeviationMeasurement> concentration_trial(const ProbabilityModel& model, double d,
                                                      const std::vector<Json>& schemes, SeedSpec seed,
                                                      const SolverOptions& solver) {
  const SparseGraph g = sample(model, seed);
  const LinearOp ea = expected_adjacency(model);
  const double avg = average_degree(g);
  const double scale = d > 0.0 ? std::sqrt(d) : 1.0;
  std::vector<DeviationMeasurement> out;
  for (const Json& sj : schemes) {
    const RegularizationScheme scheme = resolve_scheme(sj, d, avg);
    if (scheme.kind == RegularizationScheme::Kind::TauShift) {
      throw InvalidArgument("concentration: tau shift is measured by the laplacian command");
    }
    const SparseGraph reg = apply_scheme(g, scheme);
    const NormEstimate est = spectral_norm_estimate(LinearOp::from_sparse(reg.adjacency(), true) - ea, solver);
    DeviationMeasurement m;
    m.scheme = scheme.name();
    m.norm = est.value;
    m.ratio = d > 0.0 ? est.value / scale : est.value;
    m.max_degree = reg.n() > 0 ? degrees(reg).maxCoeff() : 0.0;
    m.converged = est.converged;
    out.push_back(std::move(m));
  }
  return out;
}

LaplacianMeasurement laplacian_trial(const ProbabilityModel& model, double d, double tau, SeedSpec seed,
                                     const SolverOptions& solver) {
  if (!(tau > 0.0)) throw InvalidArgument("laplacian: tau must be positive");
  const SparseGraph g = sample(model, seed);
  const NormEstimate est = spectral_norm_estimate(laplacian(tau_shift(g, tau)) - expected_laplacian(model, tau), solver);
  return {std::sqrt(d) * est.value, est.value, est.converged};
}

SpectrumMeasurement spectrum_trial(const SparseGraph& g, const Json& scheme_json, double d, double tail_threshold) {
  if (g.n() > kMaxFullSpectrum) throw SizeExceeded("spectrum: n exceeds " + std::to_string(kMaxFullSpectrum));
  const RegularizationScheme scheme = resolve_scheme(scheme_json, d, average_degree(g));
  const SparseGraph reg = apply_scheme(g, scheme);
  SpectrumMeasurement m;
  m.cap = scheme.cap;
  m.before = full_spectrum(Matrix(g.adjacency()));
  m.after = full_spectrum(Matrix(reg.adjacency()));
  m.max_abs_before = m.before.size() > 0 ? m.before.cwiseAbs().maxCoeff() : 0.0;
  m.max_abs_after = m.after.size() > 0 ? m.after.cwiseAbs().maxCoeff() : 0.0;
  m.tail_before = (m.before.array().abs() > tail_threshold).count();
  m.tail_after = (m.after.array().abs() > tail_threshold).count();
  return m;
}

Histogram histogram(const Vector& values, int bins, double lo, double hi) {
  if (bins < 1) throw InvalidArgument("histogram: bins must be positive");
  Histogram h{lo, hi, {}};
  if (!(hi > lo)) {
    h.counts.assign(1, values.size());
    return h;
  }
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  const double width = (hi - lo) / bins;
  for (const double v : values) {
    if (v < lo || v > hi) continue;
    auto k = static_cast<Index>(std::floor((v - lo) / width));
    k = std::clamp<Index>(k, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(k)];
  }
  return h;
}

SbmMeasurement sbm_trial(Index n, double a, double b, double tau, SeedSpec seed, const SolverOptions& solver) {
  const SbmInstance inst = sbm_instance(n, a, b, seed);
  SbmMeasurement m;
  m.average_degree = average_degree(inst.graph);
  m.tau = tau < 0.0 ? m.average_degree : tau;
  const Detection det = detect(inst.graph, m.tau, solver);
  m.misclassification = misclassification(det.labels, inst.truth);
  m.dk = davis_kahan_check(inst.graph, ProbabilityModel::block_two(n, a, b), m.tau, solver);
  return m;
}

std::vector<DecomposePart> decompose_trial(const ProbabilityModel& model, double d, double r, bool directed,
                                           SeedSpec seed, const DecomposeOptions& options, double kappa,
                                           const SolverOptions& solver) {
  const LinearOp ea = expected_adjacency(model);
  std::vector<DecomposePart> parts;
  auto run = [&](std::string name, const SparseGraph& a, const LinearOp& expected) {
    EdgeDecomposition dec = decompose(a, expected, r, d, options);
    VerificationReport rep = verify_decomposition(a, expected, dec, d, r, kappa, solver);
    parts.push_back({std::move(name), std::move(dec), rep});
  };
  if (directed) {
    run("directed", sample_directed(model, seed), ea);
  } else {
    const auto [upper, lower] = split_triangles(sample(model, seed));
    run("upper", upper, triangle_part(ea, true));
    run("lower", lower, triangle_part(ea, false));
  }
  return parts;
}

Matrix random_uniform_matrix(Index k, Index m, SeedSpec seed) {
  const CounterRng rng(seed);
  Matrix b(k, m);
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < m; ++j) b(i, j) = 2.0 * rng.uniform(static_cast<std::uint64_t>(i * m + j)) - 1.0;
  }
  return b;
}

GpMeasurement gp_trial(const Matrix& b, const std::vector<double>& deltas, const GpOptions& options) {
  GpMeasurement m;
  m.inf_to_2 = b.cols() <= kMaxExactInfTo2Width ? inf_to_2_norm_exact(b) : inf_to_2_norm_lower(b, 64, options.seed);
  const PietschWeights w = gp_weights(b, options);
  m.achieved = w.achieved_norm;
  m.lower_bound = w.lower_bound;
  m.ratio = m.achieved / m.inf_to_2;
  m.left_ok = m.inf_to_2 <= m.achieved * (1.0 + 1e-12);
  m.converged = w.converged;
  m.iterations = w.iterations;
  for (const double delta : deltas) m.certificates.push_back(gp_submatrix(b, delta, options));
  return m;
}

// ---------------------------------------------------------------------------

Json cmd_sample(const Json& config, const RunContext& ctx) {
  Run run("sample", config, ctx);
  const ProbabilityModel model = model_from_json(config.at("model"));
  const bool directed = get_or(config, "directed", false);
  const SeedSpec seed{ctx.seed, get_or<std::uint64_t>(config, "stream", 0)};
  const SparseGraph g = directed ? sample_directed(model, seed) : sample(model, seed);
  std::ostringstream out;
  write_graph(out, g);
  run.artifact("graph.csv", out.str());
  auto& rep = run.report();
  rep["measurements"] = {{"n", g.n()},
                         {"directed", directed},
                         {"edge_count", g.edge_count()},
                         {"average_degree", average_degree(g)},
                         {"max_rate", max_rate(model)},
                         {"max_expected_degree", max_expected_degree(model)}};
  return run.finish();
}

Json cmd_spectrum(const Json& config, const RunContext& ctx) {
  Run run("spectrum", config, ctx);
  const int bins = get_or(config, "bins", 100);
  const Json scheme = config.contains("scheme") ? config.at("scheme") : Json{{"scheme", "identity"}};

  std::vector<SparseGraph> graphs;
  double d = 0.0;
  if (config.contains("graph")) {
    graphs.push_back(load_graph(config.at("graph").get<std::string>()));
    d = average_degree(graphs.front());
  } else {
    const ProbabilityModel model = model_from_json(config.at("model"));
    if (model.n() > kMaxFullSpectrum) throw SizeExceeded("spectrum: n exceeds " + std::to_string(kMaxFullSpectrum));
    d = max_rate(model);
    graphs = run_trials(ctx.trials, ctx.threads, [&](int t) {
      return sample(model, {ctx.seed, static_cast<std::uint64_t>(t)});
    });
  }
  const auto measured = run_trials(static_cast<int>(graphs.size()), ctx.threads, [&](int t) {
    const SparseGraph& g = graphs[static_cast<std::size_t>(t)];
    const double threshold = config.contains("tail_threshold") ? config.at("tail_threshold").get<double>()
                                                               : 2.0 * std::sqrt(average_degree(g));
    return spectrum_trial(g, scheme, d, threshold);
  });

  Json trials = Json::array();
  bool max_shrinks = true;
  bool tail_shrinks = true;
  for (std::size_t t = 0; t < measured.size(); ++t) {
    const SpectrumMeasurement& m = measured[t];
    const std::string suffix = "_t" + std::to_string(t) + ".csv";
    run.artifact("eigenvalues" + suffix, spectrum_csv(m));
    run.artifact("histogram" + suffix, histogram_csv(m, bins));
    max_shrinks = max_shrinks && m.max_abs_after < m.max_abs_before;
    tail_shrinks = tail_shrinks && m.tail_after < m.tail_before;
    trials.push_back({{"trial", t},
                      {"cap", m.cap},
                      {"max_abs_before", m.max_abs_before},
                      {"max_abs_after", m.max_abs_after},
                      {"tail_before", m.tail_before},
                      {"tail_after", m.tail_after}});
  }
  auto& rep = run.report();
  rep["measurements"] = std::move(trials);
  rep["flags"] = {{"max_abs_decreases_every_trial", max_shrinks}, {"tail_count_decreases_every_trial", tail_shrinks}};
  return run.finish();
}

Json cmd_concentration(const Json& config, const RunContext& ctx) {
  Run run("concentration", config, ctx);
  const std::vector<Cell> cells = cell_list(config);
  const std::vector<Json> schemes = scheme_list(config);
  const double tol = get_or(config, "tol", 1e-7);

  std::ostringstream csv;
  csv << "cell,n,d,scheme,trial,ratio,norm,max_degree,converged\n";
  Json cell_reports = Json::array();
  std::map<std::string, std::vector<double>> medians;
  std::vector<std::string> order;
  bool all_converged = true;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell cell = cells[c];
    const ProbabilityModel model = uniform_cell(cell);
    const auto results = run_trials(ctx.trials, ctx.threads, [&](int t) {
      const SeedSpec seed{ctx.seed, c * static_cast<std::uint64_t>(ctx.trials) + static_cast<std::uint64_t>(t)};
      return concentration_trial(model, cell.d, schemes, seed, trial_solver(ctx.seed, seed.stream_index, tol));
    });
    Json per_scheme = Json::object();
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      std::vector<double> ratios;
      for (std::size_t t = 0; t < results.size(); ++t) {
        const DeviationMeasurement& m = results[t][s];
        ratios.push_back(m.ratio);
        all_converged = all_converged && m.converged;
        csv << c << ',' << cell.n << ',' << num(cell.d) << ',' << m.scheme << ',' << t << ',' << num(m.ratio) << ','
            << num(m.norm) << ',' << num(m.max_degree) << ',' << flag(m.converged) << '\n';
      }
      const Summary sum = summarize(ratios);
      const std::string label = scheme_label(schemes[s]);
      if (!medians.count(label)) order.push_back(label);
      medians[label].push_back(sum.median);
      per_scheme[label] = summary_json(sum);
    }
    cell_reports.push_back({{"n", cell.n}, {"d", cell.d}, {"ratio", std::move(per_scheme)}});
  }
  run.artifact("measurements.csv", csv.str());

  Json trends = Json::object();
  for (const auto& label : order) {
    const auto& m = medians[label];
    bool increasing = true;
    for (std::size_t k = 1; k < m.size(); ++k) increasing = increasing && m[k] > m[k - 1];
    const double lo = *std::min_element(m.begin(), m.end());
    const double hi = *std::max_element(m.begin(), m.end());
    trends[label] = {{"medians", m},
                     {"strictly_increasing", increasing},
                     {"max_over_min", lo > 0.0 ? hi / lo : 0.0},
                     {"max_median", hi}};
  }
  auto& rep = run.report();
  rep["measurements"] = std::move(cell_reports);
  rep["summary"] = std::move(trends);
  rep["flags"] = {{"all_converged", all_converged}};
  return run.finish();
}

Json cmd_laplacian(const Json& config, const RunContext& ctx) {
  Run run("laplacian", config, ctx);
  const std::vector<Cell> cells = cell_list(config);
  std::vector<double> taus;
  if (config.contains("taus")) {
    taus = config.at("taus").get<std::vector<double>>();
  } else {
    taus.push_back(get_or(config, "tau", 0.0));
  }
  const double tol = get_or(config, "tol", 1e-7);

  std::ostringstream csv;
  csv << "cell,n,d,tau,trial,scaled_deviation,norm,converged\n";
  Json cell_reports = Json::array();
  bool all_converged = true;
  std::vector<std::vector<double>> medians(taus.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell cell = cells[c];
    const ProbabilityModel model = uniform_cell(cell);
    for (std::size_t k = 0; k < taus.size(); ++k) {
      const double tau = taus[k];
      const auto results = run_trials(ctx.trials, ctx.threads, [&](int t) {
        const SeedSpec seed{ctx.seed, c * static_cast<std::uint64_t>(ctx.trials) + static_cast<std::uint64_t>(t)};
        return laplacian_trial(model, cell.d, tau, seed, trial_solver(ctx.seed, seed.stream_index, tol));
      });
      std::vector<double> values;
      for (std::size_t t = 0; t < results.size(); ++t) {
        const LaplacianMeasurement& m = results[t];
        values.push_back(m.scaled);
        all_converged = all_converged && m.converged;
        csv << c << ',' << cell.n << ',' << num(cell.d) << ',' << num(tau) << ',' << t << ',' << num(m.scaled) << ','
            << num(m.norm) << ',' << flag(m.converged) << '\n';
      }
      const Summary sum = summarize(values);
      medians[k].push_back(sum.median);
      cell_reports.push_back({{"n", cell.n}, {"d", cell.d}, {"tau", tau}, {"scaled_deviation", summary_json(sum)}});
    }
  }
  run.artifact("measurements.csv", csv.str());

  Json trends = Json::array();
  for (std::size_t k = 0; k < taus.size(); ++k) {
    bool non_increasing = true;
    for (std::size_t c = 1; c < medians[k].size(); ++c) non_increasing = non_increasing && medians[k][c] <= medians[k][c - 1];
    trends.push_back({{"tau", taus[k]},
                      {"medians", medians[k]},
                      {"non_increasing_in_n", non_increasing},
                      {"max_median", *std::max_element(medians[k].begin(), medians[k].end())}});
  }
  auto& rep = run.report();
  rep["measurements"] = std::move(cell_reports);
  rep["summary"] = std::move(trends);
  rep["flags"] = {{"all_converged", all_converged}};
  return run.finish();
}

Json cmd_sbm(const Json& config, const RunContext& ctx) {
  Run run("sbm", config, ctx);
  const auto n = config.at("n").get<Index>();
  const double a = config.at("a").get<double>();
  const double b = config.at("b").get<double>();
  double tau = -1.0;
  if (config.contains("tau") && config.at("tau").is_number()) tau = config.at("tau").get<double>();
  const double tol = get_or(config, "tol", 1e-8);

  const auto results = run_trials(ctx.trials, ctx.threads, [&](int t) {
    const SeedSpec seed{ctx.seed, static_cast<std::uint64_t>(t)};
    return sbm_trial(n, a, b, tau, seed, trial_solver(ctx.seed, seed.stream_index, tol));
  });

  std::ostringstream csv;
  csv << "trial,misclassification,tau,average_degree,dk_distance,dk_norm_diff,dk_delta,dk_bound,lambda2,lambda3,"
         "premise,holds\n";
  std::vector<double> rates;
  Index premise_count = 0;
  bool dk_all = true;
  for (std::size_t t = 0; t < results.size(); ++t) {
    const SbmMeasurement& m = results[t];
    rates.push_back(m.misclassification);
    if (m.dk.premise) {
      ++premise_count;
      dk_all = dk_all && m.dk.holds;
    }
    csv << t << ',' << num(m.misclassification) << ',' << num(m.tau) << ',' << num(m.average_degree) << ','
        << num(m.dk.distance) << ',' << num(m.dk.norm_diff) << ',' << num(m.dk.delta) << ',' << num(m.dk.bound) << ','
        << num(m.dk.lambda2_sample) << ',' << num(m.dk.lambda3_sample) << ',' << flag(m.dk.premise) << ','
        << flag(m.dk.holds) << '\n';
  }
  run.artifact("measurements.csv", csv.str());
  auto& rep = run.report();
  rep["summary"] = {{"misclassification", summary_json(summarize(rates))}};
  rep["flags"] = {{"davis_kahan_premise_trials", premise_count}, {"davis_kahan_holds_in_premise_trials", dk_all}};
  return run.finish();
}

Json cmd_decompose(const Json& config, const RunContext& ctx) {
  Run run("decompose", config, ctx);
  const auto n = config.at("n").get<Index>();
  const double d = config.at("d").get<double>();
  const double r = get_or(config, "r", 1.0);
  const bool directed = get_or(config, "directed", false);
  const double kappa = get_or(config, "kappa", 4.0);
  const auto write_trials = get_or<std::vector<int>>(config, "write_trials", {0});
  const ProbabilityModel model = config.contains("model") ? model_from_json(config.at("model")) : uniform_cell({n, d});
  if (model.n() != n) throw InvalidArgument("decompose: model size differs from n");

  const auto results = run_trials(ctx.trials, ctx.threads, [&](int t) {
    const SeedSpec seed{ctx.seed, static_cast<std::uint64_t>(t)};
    DecomposeOptions opts;
    opts.gp.seed = mix64(ctx.seed ^ mix64(static_cast<std::uint64_t>(t)));
    return decompose_trial(model, d, r, directed, seed, opts, kappa, trial_solver(ctx.seed, seed.stream_index));
  });

  std::ostringstream csv;
  csv << "trial,part,rounds,partition_ok,max_r_row_ones,r_rows_ok,max_c_col_ones,c_cols_ok,r_columns,c_rows,"
         "footprint_limit,footprint_ok,core_norm,core_ratio,norm_converged\n";
  bool structural = true;
  bool footprint = true;
  std::vector<double> ratios;
  Json per_trial = Json::array();
  for (std::size_t t = 0; t < results.size(); ++t) {
    for (const DecomposePart& p : results[t]) {
      const VerificationReport& v = p.report;
      structural = structural && v.structural_ok();
      footprint = footprint && v.footprint_ok;
      ratios.push_back(v.core_ratio);
      csv << t << ',' << p.name << ',' << p.decomposition.trace().size() << ',' << flag(v.partition_ok) << ','
          << v.max_r_row_ones << ',' << flag(v.r_rows_ok) << ',' << v.max_c_col_ones << ',' << flag(v.c_cols_ok) << ','
          << v.r_columns << ',' << v.c_rows << ',' << num(v.footprint_limit) << ',' << flag(v.footprint_ok) << ','
          << num(v.core_norm) << ',' << num(v.core_ratio) << ',' << flag(v.norm_converged) << '\n';
      per_trial.push_back({{"trial", t}, {"part", p.name}, {"verification", verification_json(v)}});
      if (std::find(write_trials.begin(), write_trials.end(), static_cast<int>(t)) != write_trials.end()) {
        const std::string stem = "_t" + std::to_string(t) + "_" + p.name;
        std::ostringstream classes;
        write_decomposition_csv(classes, p.decomposition);
        run.artifact("decomposition" + stem + ".csv", classes.str());
        run.artifact("trace" + stem + ".json", decomposition_trace_json(p.decomposition).dump(2) + "\n");
      }
    }
  }
  run.artifact("measurements.csv", csv.str());
  auto& rep = run.report();
  rep["measurements"] = std::move(per_trial);
  rep["summary"] = {{"core_ratio", summary_json(summarize(ratios))}};
  rep["flags"] = {{"structural_ok_all", structural}, {"footprint_ok_all", footprint}};
  return run.finish();
}

Json cmd_gp_check(const Json& config, const RunContext& ctx) {
  Run run("gp-check", config, ctx);
  const auto rows = get_or<Index>(config, "rows", 8);
  const auto cols = get_or<Index>(config, "cols", 12);
  const auto deltas = get_or<std::vector<double>>(config, "deltas", {0.25, 0.5});
  const double slack = get_or(config, "slack", 1.10);
  const double limit = std::sqrt(std::acos(-1.0) / 2.0) * slack;
  GpOptions base;
  base.max_iter = get_or(config, "max_iter", base.max_iter);
  base.gap_tol = get_or(config, "gap_tol", base.gap_tol);

  const auto results = run_trials(ctx.trials, ctx.threads, [&](int t) {
    const SeedSpec seed{ctx.seed, static_cast<std::uint64_t>(t)};
    GpOptions opts = base;
    opts.seed = mix64(ctx.seed ^ mix64(static_cast<std::uint64_t>(t) + 1));
    return gp_trial(random_uniform_matrix(rows, cols, seed), deltas, opts);
  });

  std::ostringstream csv;
  std::ostringstream certs;
  csv << "trial,inf_to_2,achieved,ratio,lower_bound,left_ok,ratio_ok,converged,iterations\n";
  certs << "trial,delta,columns,required,submatrix_norm,scaled_norm,achieved_norm,cardinality_ok,norm_ok\n";
  Index left_ok = 0;
  Index ratio_ok = 0;
  Index cert_ok = 0;
  Index cert_total = 0;
  std::vector<double> ratios;
  for (std::size_t t = 0; t < results.size(); ++t) {
    const GpMeasurement& m = results[t];
    const bool within = m.ratio <= limit;
    left_ok += m.left_ok;
    ratio_ok += within;
    ratios.push_back(m.ratio);
    csv << t << ',' << num(m.inf_to_2) << ',' << num(m.achieved) << ',' << num(m.ratio) << ',' << num(m.lower_bound)
        << ',' << flag(m.left_ok) << ',' << flag(within) << ',' << flag(m.converged) << ',' << m.iterations << '\n';
    for (const SubmatrixCertificate& c : m.certificates) {
      ++cert_total;
      cert_ok += c.cardinality_ok && c.norm_ok;
      certs << t << ',' << num(c.delta) << ',' << c.columns.size() << ','
            << num((1.0 - c.delta) * static_cast<double>(cols)) << ',' << num(c.submatrix_norm) << ','
            << num(c.scaled_norm) << ',' << num(c.achieved_norm) << ',' << flag(c.cardinality_ok) << ','
            << flag(c.norm_ok) << '\n';
    }
  }
  run.artifact("measurements.csv", csv.str());
  run.artifact("certificates.csv", certs.str());
  const auto total = static_cast<double>(results.size());
  auto& rep = run.report();
  rep["summary"] = {{"ratio", summary_json(summarize(ratios))}, {"ratio_limit", limit}};
  rep["flags"] = {{"left_inequality_fraction", total > 0 ? static_cast<double>(left_ok) / total : 1.0},
                  {"ratio_within_limit_fraction", total > 0 ? static_cast<double>(ratio_ok) / total : 1.0},
                  {"certificates_ok", cert_ok},
                  {"certificates_total", cert_total}};
  return run.finish();
}

Json run_command(const std::string& name, const Json& config, const RunContext& ctx) {
  if (name == "sample") return cmd_sample(config, ctx);
  if (name == "spectrum") return cmd_spectrum(config, ctx);
  if (name == "concentration") return cmd_concentration(config, ctx);
  if (name == "laplacian") return cmd_laplacian(config, ctx);
  if (name == "sbm") return cmd_sbm(config, ctx);
  if (name == "decompose") return cmd_decompose(config, ctx);
  if (name == "gp-check" || name == "gp_check") return cmd_gp_check(config, ctx);
  throw InvalidArgument("unknown command '" + name + "'");
}

}  // namespace graphconc
