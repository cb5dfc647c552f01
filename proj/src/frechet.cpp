#include "pdfm/frechet.hpp"

#include <functional>
#include <limits>
#include <string>

#include "pdfm/errors.hpp"

namespace pdfm {

double frechet_function(const PersistenceDiagram& d, std::span<const PersistenceDiagram> diagrams) {
  if (diagrams.empty()) throw ArityError("frechet_function: empty diagram collection");
  double s = 0.0;
  for (const auto& di : diagrams) s += w2_squared(d, di);
  return s / static_cast<double>(diagrams.size());
}

Grouping induced_grouping(const PersistenceDiagram& candidate, std::span<const PersistenceDiagram> diagrams,
                          std::span<const Matching> matchings) {
  const std::size_t L = diagrams.size();
  if (matchings.size() != L) throw ArityError("induced_grouping: need one matching per diagram");

  std::vector<std::vector<Cell>> rows(candidate.size(), std::vector<Cell>(L));
  for (std::size_t j = 0; j < L; ++j) {
    for (const auto& p : matchings[j].pairs) {
      if (p.left) {
        rows.at(*p.left)[j] = p.right;
      } else {
        std::vector<Cell> row(L);
        row[j] = p.right;
        rows.push_back(std::move(row));
      }
    }
  }
  return Grouping({diagrams.begin(), diagrams.end()}, std::move(rows));
}

FrechetResult turner_mean(std::span<const PersistenceDiagram> diagrams, const TurnerInit& init,
                          const TurnerOptions& options) {
  const std::size_t L = diagrams.size();
  if (L == 0) throw ArityError("turner_mean: empty diagram collection");

  FrechetResult result;
  PersistenceDiagram candidate;
  if (const auto* idx = std::get_if<std::size_t>(&init)) {
    if (*idx >= L) throw RangeError("turner_mean: init index " + std::to_string(*idx) + " out of range");
    candidate = diagrams[*idx];
    result.init_descriptor = "diagram " + std::to_string(*idx + 1);
  } else {
    candidate = std::get<PersistenceDiagram>(init);
    result.init_descriptor = "custom diagram";
  }

  std::vector<Grouping> visited;
  std::optional<Grouping> current;
  for (std::size_t step = 0; step <= options.max_iters; ++step) {
    std::vector<Matching> matchings;
    matchings.reserve(L);
    for (const auto& d : diagrams) {
      matchings.push_back(w2_distance(candidate, d).matching);
      if (options.detect_ties) {
        if (candidate.size() + d.size() <= options.tie_cap) {
          if (brute_force_w2(candidate, d, options.tie_cap).multiple_optima()) result.tie_detected = true;
        } else {
          result.tie_check_complete = false;
        }
      }
    }
    Grouping g = induced_grouping(candidate, diagrams, matchings);
    result.variance_trace.push_back(variance_definitional(g));

    if (current && same_assignment(g, *current)) {
      result.converged = true;
      current = std::move(g);
      break;
    }
    bool cycled = false;
    for (const auto& old : visited) cycled = cycled || same_assignment(g, old);
    if (cycled || step == options.max_iters) {
      current = std::move(g);
      break;
    }

    candidate = mean_diagram(g);
    ++result.iterations;
    if (current) visited.push_back(std::move(*current));
    current = std::move(g);
  }

  result.grouping = std::move(*current);
  result.mean = mean_diagram(result.grouping);
  result.variance = variance_definitional(result.grouping);
  result.unique_certified = check_flatness(result.grouping).flat;
  return result;
}

OptimalGroupings brute_force_optimal_grouping(std::span<const PersistenceDiagram> diagrams, std::size_t cap) {
  const std::size_t L = diagrams.size();
  std::size_t total = 0;
  for (const auto& d : diagrams) total += d.size();
  if (total > cap) {
    throw CapExceededError("brute_force_optimal_grouping: " + std::to_string(total) +
                               " off-diagonal points exceed the enumeration cap of " + std::to_string(cap),
                           cap);
  }
  if (L > kMaxBruteForceColumns) {
    throw CapExceededError("brute_force_optimal_grouping: " + std::to_string(L) + " diagrams exceed the limit of " +
                               std::to_string(kMaxBruteForceColumns),
                           kMaxBruteForceColumns);
  }

  struct Pooled {
    std::size_t column, index;
  };
  std::vector<Pooled> pooled;
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t i = 0; i < diagrams[j].size(); ++i) pooled.push_back({j, i});
  }

  const std::vector<PersistenceDiagram> owned(diagrams.begin(), diagrams.end());
  std::vector<std::vector<Cell>> rows;
  std::vector<double> variances;
  double best = std::numeric_limits<double>::infinity();
  std::optional<Grouping> best_grouping;

  // Each set partition is produced once: a point joins an earlier row or
  // opens a new one, and rows are ordered by their first point.
  std::function<void(std::size_t)> rec = [&](std::size_t p) {
    if (p == pooled.size()) {
      Grouping g(owned, rows);
      const double v = variance_definitional(g);
      variances.push_back(v);
      if (v < best) {
        best = v;
        best_grouping = std::move(g);
      }
      return;
    }
    const auto [col, idx] = pooled[p];
    const std::size_t open = rows.size();
    for (std::size_t r = 0; r < open; ++r) {
      if (rows[r][col]) continue;
      rows[r][col] = idx;
      rec(p + 1);
      rows[r][col].reset();
    }
    rows.emplace_back(L);
    rows.back()[col] = idx;
    rec(p + 1);
    rows.pop_back();
  };
  rec(0);

  OptimalGroupings out;
  out.grouping = std::move(*best_grouping);
  out.variance = best;
  const double tol = 1e-12 * std::max(1.0, best);
  for (double v : variances) {
    if (v <= best + tol) ++out.optima_count;
  }
  return out;
}

std::optional<UniqueMeanCertificate> certify_unique_mean(std::span<const PersistenceDiagram> diagrams) {
  auto g = find_flat_grouping(diagrams);
  if (!g) return std::nullopt;
  UniqueMeanCertificate cert{mean_diagram(*g), *g, check_flatness(*g)};
  return cert;
}

}  // namespace pdfm
