#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pdfm/diagram.hpp"
#include "pdfm/grouping.hpp"
#include "pdfm/wasserstein.hpp"

namespace pdfm {

inline constexpr std::size_t kDefaultGroupingCap = 9;
inline constexpr std::size_t kMaxBruteForceColumns = 3;

/// F(D) = (1/L) Σ W₂²(D, Dᵢ). Throws ArityError for an empty collection.
double frechet_function(const PersistenceDiagram& d, std::span<const PersistenceDiagram> diagrams);

/// The grouping induced by optimal matchings from `candidate` to every
/// diagram: one row per candidate point, plus a singleton row for each
/// diagram point the matching sends to the candidate's diagonal.
Grouping induced_grouping(const PersistenceDiagram& candidate, std::span<const PersistenceDiagram> diagrams,
                          std::span<const Matching> matchings);

/// Starting candidate: an index into the diagram collection or an explicit
/// diagram.
using TurnerInit = std::variant<std::size_t, PersistenceDiagram>;

struct TurnerOptions {
  std::size_t max_iters = 100;
  /// Check each matching step for multiple optima with brute_force_w2 when
  /// the pair is within `tie_cap` points.
  bool detect_ties = true;
  std::size_t tie_cap = kDefaultMatchingCap;
};

struct FrechetResult {
  PersistenceDiagram mean;
  Grouping grouping;
  double variance = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool unique_certified = false;
  std::string init_descriptor;

  std::vector<double> variance_trace;  ///< V(G) of every grouping visited
  bool tie_detected = false;
  bool tie_check_complete = true;  ///< false if some step exceeded tie_cap
};

/// Alternates optimal matching and grouping means until the grouping
/// repeats. Returns a local minimum of the Fréchet function; converged is
/// false when max_iters runs out or the trajectory cycles.
FrechetResult turner_mean(std::span<const PersistenceDiagram> diagrams, const TurnerInit& init = std::size_t{0},
                          const TurnerOptions& options = {});

struct OptimalGroupings {
  Grouping grouping;
  double variance = 0.0;
  std::size_t optima_count = 0;  ///< distinct optimal groupings up to row permutation
};

/// Enumerates every grouping of the pooled points (rows take at most one
/// point per diagram). Refuses with CapExceededError above `cap` points or
/// more than three diagrams.
OptimalGroupings brute_force_optimal_grouping(std::span<const PersistenceDiagram> diagrams,
                                              std::size_t cap = kDefaultGroupingCap);

struct UniqueMeanCertificate {
  PersistenceDiagram mean;
  Grouping grouping;
  FlatnessReport report;
};

/// mean(G⋆) for a flat grouping G⋆ when one is found; nullopt leaves
/// uniqueness undetermined.
std::optional<UniqueMeanCertificate> certify_unique_mean(std::span<const PersistenceDiagram> diagrams);

}  // namespace pdfm
