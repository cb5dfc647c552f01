#include "pdfm/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "pdfm/assignment.hpp"
#include "pdfm/errors.hpp"

namespace pdfm {

namespace {

double pair_cost(const PersistenceDiagram& a, const PersistenceDiagram& b, const MatchedPair& p) {
  return distance_squared(left_entry(a, p), right_entry(b, p));
}

bool canonical_less(const MatchedPair& x, const MatchedPair& y) {
  // Pairs with a left point come first, ordered by that index.
  if (x.left && y.left) return *x.left < *y.left;
  if (x.left != y.left) return x.left.has_value();
  return x.right < y.right;
}

}  // namespace

DiagramEntry left_entry(const PersistenceDiagram& left, const MatchedPair& p) {
  return p.left ? DiagramEntry(left[*p.left]) : DiagramEntry::diagonal();
}

DiagramEntry right_entry(const PersistenceDiagram& right, const MatchedPair& p) {
  return p.right ? DiagramEntry(right[*p.right]) : DiagramEntry::diagonal();
}

Matching make_matching(const PersistenceDiagram& left, const PersistenceDiagram& right,
                       std::vector<MatchedPair> pairs) {
  std::vector<int> seen_left(left.size(), 0), seen_right(right.size(), 0);
  for (const auto& p : pairs) {
    if (!p.left && !p.right) throw ValidationError("matching: (diagonal, diagonal) pair");
    if (p.left) {
      if (*p.left >= left.size()) throw ValidationError("matching: left index out of range");
      ++seen_left[*p.left];
    }
    if (p.right) {
      if (*p.right >= right.size()) throw ValidationError("matching: right index out of range");
      ++seen_right[*p.right];
    }
  }
  for (std::size_t i = 0; i < left.size(); ++i) {
    if (seen_left[i] != 1) throw ValidationError("matching: left point " + std::to_string(i) + " not matched exactly once");
  }
  for (std::size_t j = 0; j < right.size(); ++j) {
    if (seen_right[j] != 1) throw ValidationError("matching: right point " + std::to_string(j) + " not matched exactly once");
  }

  std::sort(pairs.begin(), pairs.end(), canonical_less);
  Matching m;
  m.pairs = std::move(pairs);
  for (const auto& p : m.pairs) m.cost += pair_cost(left, right, p);
  return m;
}

W2Result w2_distance(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  const std::size_t size = m + n;

  // Rows: a's points, then n diagonal copies. Columns: b's points, then m
  // diagonal copies.
  std::vector<double> cost(size * size, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * size + j] = norm2(a[i].vec() - b[j].vec());
    const double to_diag = distance_to_diagonal_squared(a[i]);
    for (std::size_t j = n; j < size; ++j) cost[i * size + j] = to_diag;
  }
  for (std::size_t i = m; i < size; ++i) {
    for (std::size_t j = 0; j < n; ++j) cost[i * size + j] = distance_to_diagonal_squared(b[j]);
  }

  const auto assignment = solve_assignment(cost, size);
  std::vector<MatchedPair> pairs;
  pairs.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = assignment[i];
    MatchedPair p;
    if (i < m) p.left = i;
    if (j < n) p.right = j;
    if (p.left || p.right) pairs.push_back(p);
  }

  W2Result r;
  r.matching = make_matching(a, b, std::move(pairs));
  r.distance = std::sqrt(r.matching.cost);
  return r;
}

double total_persistence(const PersistenceDiagram& d) {
  double s = 0.0;
  for (const auto& p : d) s += distance_to_diagonal_squared(p);
  return std::sqrt(s);
}

PersistenceDiagram geodesic(const PersistenceDiagram& a, const PersistenceDiagram& b,
                            const Matching& matching, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw RangeError("geodesic: t = " + std::to_string(t) + " outside [0, 1]");
  // Re-validate coverage; the cost is not needed.
  make_matching(a, b, matching.pairs);

  PersistenceDiagram out;
  for (const auto& p : matching.pairs) {
    Vec2 from, to;
    if (p.left && p.right) {
      from = a[*p.left].vec();
      to = b[*p.right].vec();
    } else if (p.left) {
      from = a[*p.left].vec();
      to = diagonal_projection(from);
    } else {
      to = b[*p.right].vec();
      from = diagonal_projection(to);
    }
    const Vec2 x = (1.0 - t) * from + t * to;
    if (PlanePoint::admissible(x.x, x.y)) out.push_back(PlanePoint::from_vec(x));
  }
  return out;
}

BruteForceW2 brute_force_w2(const PersistenceDiagram& a, const PersistenceDiagram& b, std::size_t cap) {
  if (a.size() + b.size() > cap) {
    throw CapExceededError("brute_force_w2: " + std::to_string(a.size() + b.size()) +
                               " off-diagonal points exceed the enumeration cap of " + std::to_string(cap),
                           cap);
  }

  const std::size_t m = a.size();
  const std::size_t n = b.size();
  // target[i] = index in b, or n for the diagonal.
  std::vector<std::size_t> target(m, n);
  std::vector<char> used(n, 0);

  BruteForceW2 best;
  double min_cost = std::numeric_limits<double>::infinity();
  std::vector<double> costs;
  std::vector<std::vector<MatchedPair>> candidates;

  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == m) {
      std::vector<MatchedPair> pairs;
      for (std::size_t k = 0; k < m; ++k) {
        MatchedPair p{k, std::nullopt};
        if (target[k] < n) p.right = target[k];
        pairs.push_back(p);
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (!used[j]) pairs.push_back({std::nullopt, j});
      }
      Matching mt = make_matching(a, b, std::move(pairs));
      costs.push_back(mt.cost);
      if (mt.cost < min_cost) {
        min_cost = mt.cost;
        best.matching = std::move(mt);
      }
      return;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      target[i] = j;
      rec(i + 1);
      used[j] = 0;
    }
    target[i] = n;
    rec(i + 1);
  };
  rec(0);

  const double tol = 1e-12 * std::max(1.0, min_cost);
  best.optimal_count =
      static_cast<std::size_t>(std::count_if(costs.begin(), costs.end(), [&](double c) { return c <= min_cost + tol; }));
  best.distance = std::sqrt(min_cost);
  return best;
}

nlohmann::json matching_to_json(const PersistenceDiagram& left, const PersistenceDiagram& right,
                                const Matching& m) {
  using nlohmann::json;
  auto entry = [](const DiagramEntry& e) -> json {
    if (e.is_diagonal()) return "diag";
    return json::array({"p", e.point().birth(), e.point().death()});
  };
  auto index = [](const std::optional<std::size_t>& i) -> json { return i ? json(*i) : json(nullptr); };
  json pairs = json::array();
  json indices = json::array();
  for (const auto& p : m.pairs) {
    pairs.push_back(json::array({entry(left_entry(left, p)), entry(right_entry(right, p))}));
    indices.push_back(json::array({index(p.left), index(p.right)}));
  }
  return json{{"cost", m.cost}, {"pairs", std::move(pairs)}, {"indices", std::move(indices)}};
}

}  // namespace pdfm
