#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "graphconc/community.hpp"
#include "graphconc/gp_decompose.hpp"
#include "graphconc/graph_io.hpp"
#include "graphconc/regularize.hpp"

namespace graphconc {

struct RunContext {
  std::uint64_t seed = 0;
  int trials = 1;
  int threads = 0;  // 0: hardware concurrency
  std::string out_dir;  // empty: no files written
};

struct Summary {
  std::size_t count = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Order statistics with linear interpolation between closest ranks.
Summary summarize(std::vector<double> values);
Json summary_json(const Summary& s);

/// Runs f(stream) for stream = 0 .. trials-1 on up to `threads` workers and
/// returns the results indexed by stream, so the outcome never depends on
/// scheduling. The first exception thrown by any trial is rethrown.
template <typename F>
auto run_trials(int trials, int threads, F f) -> std::vector<decltype(f(0))> {
  using T = decltype(f(0));
  std::vector<std::optional<T>> slots(static_cast<std::size_t>(std::max(trials, 0)));
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::max(1, std::min(workers, trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        slots[static_cast<std::size_t>(t)].emplace(f(t));
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// Scheme from config JSON. Besides an absolute "cap", a cap can be given
/// relative to the model rate d ("cap_d": 2 means cap = 2d) or to the
/// average degree of the graph at hand ("cap_avg": 1).
RegularizationScheme resolve_scheme(const Json& j, double d, double avg_degree);

/// Solver seed for a given stream; fixed so that reruns reproduce.
SolverOptions trial_solver(std::uint64_t seed, std::uint64_t stream, double tol = 1e-7);

// ---------------------------------------------------------------------------
// Single-trial measurements
// ---------------------------------------------------------------------------

struct DeviationMeasurement {
  std::string scheme;
  double ratio = 0.0;  // ||A' - EA|| / sqrt(d)
  double norm = 0.0;
  double max_degree = 0.0;
  bool converged = false;
};

/// Samples the model once and measures ||A' - EA|| / sqrt(d) for every scheme.
std::vector<DeviationMeasurement> concentration_trial(const ProbabilityModel& model, double d,
                                                      const std::vector<Json>& schemes, SeedSpec seed,
                                                      const SolverOptions& solver);

struct LaplacianMeasurement {
  double scaled = 0.0;  // sqrt(d) ||L(A_tau) - L(EA_tau)||
  double norm = 0.0;
  bool converged = false;
};

LaplacianMeasurement laplacian_trial(const ProbabilityModel& model, double d, double tau, SeedSpec seed,
                                     const SolverOptions& solver);

struct SpectrumMeasurement {
  Vector before;  // ascending eigenvalues of A
  Vector after;   // ascending eigenvalues of A'
  double cap = 0.0;
  double max_abs_before = 0.0;
  double max_abs_after = 0.0;
  Index tail_before = 0;  // #{ |lambda| > tail_threshold }
  Index tail_after = 0;
};

/// Full spectra of A and the regularized A'. Throws SizeExceeded above
/// kMaxFullSpectrum.
SpectrumMeasurement spectrum_trial(const SparseGraph& g, const Json& scheme, double d, double tail_threshold);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<Index> counts;
};

/// `bins` equal bins over [lo, hi], the last one closed. A degenerate range
/// lo == hi gives a single bin holding every value.
Histogram histogram(const Vector& values, int bins, double lo, double hi);

struct SbmMeasurement {
  double misclassification = 0.0;
  double tau = 0.0;
  double average_degree = 0.0;
  DavisKahanCheck dk;
};

/// tau < 0 selects the average degree of the sample.
SbmMeasurement sbm_trial(Index n, double a, double b, double tau, SeedSpec seed, const SolverOptions& solver);

struct DecomposePart {
  std::string name;  // "directed", "upper" or "lower"
  EdgeDecomposition decomposition;
  VerificationReport report;
};

/// Directed: one decomposition of a directed sample. Undirected: the sample
/// is split into its upper and lower triangles, each decomposed against the
/// matching triangle of EA.
std::vector<DecomposePart> decompose_trial(const ProbabilityModel& model, double d, double r, bool directed,
                                           SeedSpec seed, const DecomposeOptions& options, double kappa,
                                           const SolverOptions& solver);

struct GpMeasurement {
  double inf_to_2 = 0.0;
  double achieved = 0.0;
  double ratio = 0.0;
  double lower_bound = 0.0;
  bool left_ok = false;  // ||B||_{inf->2} <= ||B D^{-1/2}||
  bool converged = false;
  int iterations = 0;
  std::vector<SubmatrixCertificate> certificates;
};

/// Random k x m matrix with entries uniform in [-1, 1].
Matrix random_uniform_matrix(Index k, Index m, SeedSpec seed);

GpMeasurement gp_trial(const Matrix& b, const std::vector<double>& deltas, const GpOptions& options);

// ---------------------------------------------------------------------------
// Commands. Each takes the effective config, writes config.json, report.json
// and its CSV artifacts to ctx.out_dir (when set) and returns the report.
// ---------------------------------------------------------------------------

Json cmd_sample(const Json& config, const RunContext& ctx);
Json cmd_spectrum(const Json& config, const RunContext& ctx);
Json cmd_concentration(const Json& config, const RunContext& ctx);
Json cmd_laplacian(const Json& config, const RunContext& ctx);
Json cmd_sbm(const Json& config, const RunContext& ctx);
Json cmd_decompose(const Json& config, const RunContext& ctx);
Json cmd_gp_check(const Json& config, const RunContext& ctx);

/// Dispatches on the subcommand name ("gp-check" or "gp_check" both work).
Json run_command(const std::string& name, const Json& config, const RunContext& ctx);

}  // namespace graphconc
