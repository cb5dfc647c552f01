#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <json.hpp>

#include "pdfm/diagram.hpp"

namespace pdfm {

inline constexpr std::size_t kDefaultMatchingCap = 8;

/// One pair of a bijection between augmented diagrams. An empty side is the
/// diagonal; otherwise it is the index of a point in that side's diagram.
/// (Diagonal, Diagonal) pairs are never stored.
struct MatchedPair {
  std::optional<std::size_t> left;
  std::optional<std::size_t> right;

  friend bool operator==(const MatchedPair&, const MatchedPair&) = default;
};

struct Matching {
  std::vector<MatchedPair> pairs;
  double cost = 0.0;  ///< Σ squared entry distances over `pairs`.
};

/// Validates that `pairs` covers every point of both diagrams exactly once,
/// puts the pairs in canonical order (left points by index, then
/// diagonal→right points by index) and computes the cost in that order.
Matching make_matching(const PersistenceDiagram& left, const PersistenceDiagram& right,
                       std::vector<MatchedPair> pairs);

DiagramEntry left_entry(const PersistenceDiagram& left, const MatchedPair& p);
DiagramEntry right_entry(const PersistenceDiagram& right, const MatchedPair& p);

struct W2Result {
  double distance = 0.0;
  Matching matching;
};

/// Exact W₂ via the (m+n)×(m+n) diagonal-augmented assignment problem.
W2Result w2_distance(const PersistenceDiagram& a, const PersistenceDiagram& b);

inline double w2_squared(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  return w2_distance(a, b).matching.cost;
}

/// W₂(D, D∅).
double total_persistence(const PersistenceDiagram& d);

/// Point γ(t) of the geodesic from `a` to `b` carried by `matching`:
/// each pair moves linearly, a diagonal side standing for the moving point's
/// own projection. Points that land on the diagonal are dropped.
/// Throws RangeError when t ∉ [0, 1].
PersistenceDiagram geodesic(const PersistenceDiagram& a, const PersistenceDiagram& b,
                            const Matching& matching, double t);

struct BruteForceW2 {
  double distance = 0.0;
  Matching matching;
  std::size_t optimal_count = 0;  ///< matchings within tie tolerance of the optimum

  bool multiple_optima() const noexcept { return optimal_count > 1; }
};

/// Exhaustive enumeration of every augmented bijection. Refuses
/// (CapExceededError) when |a| + |b| > cap.
BruteForceW2 brute_force_w2(const PersistenceDiagram& a, const PersistenceDiagram& b,
                            std::size_t cap = kDefaultMatchingCap);

/// Matching JSON: {"cost": c, "pairs": [[e1, e2], ...], "indices": [[i|null, j|null], ...]}
/// where an entry e is ["p", birth, death] or "diag".
nlohmann::json matching_to_json(const PersistenceDiagram& left, const PersistenceDiagram& right,
                                const Matching& m);

}  // namespace pdfm
