#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdfm/diagram.hpp"
#include "pdfm/grouping.hpp"

namespace pdfm {

/// Seeded 64-bit stream. Each (seed, a, b) triple selects an independent
/// stream, so Monte Carlo cells can be evaluated in any order. The output
/// sequence is fixed by the standard (std::seed_seq + std::mt19937_64) and
/// bounded draws use rejection sampling, so results do not depend on the
/// standard library vendor.
class StreamRng {
 public:
  static constexpr std::string_view kName = "mt19937_64/seed_seq-v1";

  explicit StreamRng(std::uint64_t seed, std::uint64_t stream_a = 0, std::uint64_t stream_b = 0);

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, n). Precondition: n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct InducedSample {
  std::vector<std::size_t> draws;  ///< 0-based population indices
  Grouping grouping;               ///< B columns copied from the population grouping
  PersistenceDiagram mean;         ///< mean_diagram(grouping)
};

/// Builds the induced grouping for a fixed sequence of draws.
InducedSample induced_from_draws(const Grouping& population, std::span<const std::size_t> draws);

/// Draws B population indices uniformly with replacement and forms the
/// induced grouping and its mean.
InducedSample sample_induced_mean(const Grouping& population, std::size_t B, StreamRng& rng);

struct ConvergenceReport {
  std::size_t B = 0;
  std::size_t trials = 0;
  double estimate = 0.0;   ///< mean of W₂²(D̄, D⋆) over trials
  double std_error = 0.0;  ///< sample standard deviation / √trials
  double bound = 0.0;      ///< V(G)/B
  std::uint64_t seed = 0;
  std::vector<double> per_trial;  ///< empty unless requested
};

struct ExperimentOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  bool keep_per_trial = false;
  unsigned threads = 1;
};

/// For each B, replicates sample_induced_mean `trials` times (trial t uses
/// the stream (seed, B, t)) and measures W₂²(D̄, D⋆) with the full matcher,
/// where D⋆ = mean_diagram(population).
std::vector<ConvergenceReport> convergence_experiment(const Grouping& population, std::span<const std::size_t> B_list,
                                                      const ExperimentOptions& options);

/// Least-squares slope of log(estimate) against log(B). Reports with
/// nonpositive estimates are skipped; throws ArityError when fewer than
/// three distinct B remain.
double rate_fit(std::span<const ConvergenceReport> reports);

/// CSV with header B,trials,estimate,std_error,bound,seed.
std::string reports_to_csv(std::span<const ConvergenceReport> reports);

/// Pairwise (cascade) summation in index order.
double pairwise_sum(std::span<const double> xs);

}  // namespace pdfm
