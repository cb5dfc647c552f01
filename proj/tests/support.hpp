#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "pdfm/convergence.hpp"
#include "pdfm/diagram.hpp"
#include "pdfm/grouping.hpp"

namespace testkit {

using pdfm::Cell;
using pdfm::Grouping;
using pdfm::PersistenceDiagram;
using pdfm::PlanePoint;
using pdfm::StreamRng;

inline PlanePoint random_point(StreamRng& rng, double lo = 0.0, double hi = 10.0) {
  for (;;) {
    double b = rng.uniform(lo, hi), d = rng.uniform(lo, hi);
    if (d < b) std::swap(b, d);
    if (d > b) return PlanePoint(b, d);
  }
}

inline PersistenceDiagram random_diagram(StreamRng& rng, std::size_t max_points, std::size_t min_points = 0,
                                         double lo = 0.0, double hi = 10.0) {
  const std::size_t n = min_points + static_cast<std::size_t>(rng.below(max_points - min_points + 1));
  PersistenceDiagram d;
  for (std::size_t i = 0; i < n; ++i) d.push_back(random_point(rng, lo, hi));
  return d;
}

inline std::vector<oracle::Pt> raw(const PersistenceDiagram& d) {
  std::vector<oracle::Pt> out;
  for (const auto& p : d) out.emplace_back(p.birth(), p.death());
  return out;
}

inline void shuffle(std::vector<std::size_t>& v, StreamRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

// Random valid grouping: every column's points land in distinct random rows
// among K = Σ k_j, so rows freely mix points and diagonal cells.
inline Grouping random_grouping(StreamRng& rng, std::size_t max_columns, std::size_t max_points) {
  const std::size_t L = 1 + rng.below(max_columns);
  std::vector<PersistenceDiagram> ds;
  std::size_t K = 0;
  for (std::size_t j = 0; j < L; ++j) {
    ds.push_back(random_diagram(rng, max_points));
    K += ds.back().size();
  }
  std::vector<std::vector<Cell>> rows(K, std::vector<Cell>(L));
  for (std::size_t j = 0; j < L; ++j) {
    std::vector<std::size_t> slots(K);
    std::iota(slots.begin(), slots.end(), 0);
    shuffle(slots, rng);
    for (std::size_t i = 0; i < ds[j].size(); ++i) rows[slots[i]][j] = i;
  }
  return Grouping(std::move(ds), std::move(rows));
}

inline std::vector<std::vector<oracle::Entry>> raw_rows(const Grouping& g) {
  std::vector<std::vector<oracle::Entry>> out;
  for (std::size_t i = 0; i < g.row_count(); ++i) {
    std::vector<oracle::Entry> row;
    for (std::size_t j = 0; j < g.column_count(); ++j) {
      if (const auto& c = g.row(i)[j]) {
        const auto& p = g.diagrams()[j][*c];
        row.emplace_back(oracle::Pt{p.birth(), p.death()});
      } else {
        row.emplace_back(std::nullopt);
      }
    }
    out.push_back(std::move(row));
  }
  return out;
}

struct FlatInstance {
  std::vector<PersistenceDiagram> diagrams;
  std::size_t k = 0;
  double max_diameter = 0.0;
  double min_separation = 0.0;
  double min_clearance = 0.0;
};

// L diagrams of k points each: cluster r sits near (10r + u, 10r + u + h)
// with h ∈ [10, 20], and each diagram holds one point within 0.5 of every
// cluster centre, stored in random order. This keeps clusters separated by
// well over five diameters and far from the diagonal; the returned
// measurements let callers assert the margins.
inline FlatInstance random_flat_instance(StreamRng& rng, std::size_t L, std::size_t k) {
  FlatInstance inst;
  inst.k = k;
  std::vector<std::pair<double, double>> centres;
  for (std::size_t r = 0; r < k; ++r) {
    const double b = 20.0 * static_cast<double>(r) + rng.uniform(0.0, 2.0);
    centres.emplace_back(b, b + rng.uniform(10.0, 20.0));
  }
  std::vector<std::vector<PlanePoint>> clusters(k);
  for (std::size_t j = 0; j < L; ++j) {
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    PersistenceDiagram d;
    for (std::size_t r : order) {
      const double a = rng.uniform(0.0, 2.0 * std::numbers::pi), rad = 0.5 * std::sqrt(rng.uniform());
      PlanePoint p(centres[r].first + rad * std::cos(a), centres[r].second + rad * std::sin(a));
      clusters[r].push_back(p);
      d.push_back(p);
    }
    inst.diagrams.push_back(std::move(d));
  }

  auto dist = [](const PlanePoint& a, const PlanePoint& b) { return std::hypot(a.birth() - b.birth(), a.death() - b.death()); };
  inst.min_separation = inst.min_clearance = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < k; ++r) {
    for (const auto& p : clusters[r]) {
      inst.min_clearance = std::min(inst.min_clearance, (p.death() - p.birth()) / std::sqrt(2.0));
      for (const auto& q : clusters[r]) inst.max_diameter = std::max(inst.max_diameter, dist(p, q));
      for (std::size_t s = r + 1; s < k; ++s)
        for (const auto& q : clusters[s]) inst.min_separation = std::min(inst.min_separation, dist(p, q));
    }
  }
  return inst;
}

// Probability vector of length L, redrawn until some weight is at least 0.05
// away from uniform.
inline std::vector<double> random_weights(StreamRng& rng, std::size_t L) {
  for (;;) {
    std::vector<double> w(L);
    double s = 0.0;
    for (auto& x : w) s += (x = -std::log(1.0 - rng.uniform()));
    for (auto& x : w) x /= s;
    // Renormalize so the weights sum to 1 within rounding.
    w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
    if (w.back() < 0.0) continue;
    const double u = 1.0 / static_cast<double>(L);
    if (std::any_of(w.begin(), w.end(), [&](double x) { return std::abs(x - u) >= 0.05; })) return w;
  }
}

}  // namespace testkit
