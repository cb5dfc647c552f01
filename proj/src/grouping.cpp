#include "pdfm/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "pdfm/errors.hpp"

namespace pdfm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool cell_less(const Cell& a, const Cell& b) {
  if (a && b) return *a < *b;
  return a.has_value() && !b.has_value();
}

std::vector<PlanePoint> off_diagonal_points(const Grouping& g, std::size_t i) {
  std::vector<PlanePoint> pts;
  for (std::size_t j = 0; j < g.column_count(); ++j) {
    if (const auto& c = g.row(i)[j]) pts.push_back(g.diagrams()[j][*c]);
  }
  return pts;
}

double dist(const PlanePoint& a, const PlanePoint& b) { return norm(a.vec() - b.vec()); }

}  // namespace

Grouping::Grouping(std::vector<PersistenceDiagram> diagrams, std::vector<std::vector<Cell>> rows)
    : diagrams_(std::move(diagrams)) {
  const std::size_t L = diagrams_.size();
  std::vector<std::vector<int>> seen(L);
  std::size_t K = 0;
  for (std::size_t j = 0; j < L; ++j) {
    seen[j].assign(diagrams_[j].size(), 0);
    K += diagrams_[j].size();
  }

  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != L) {
      throw ValidationError("grouping: row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                            " cells, expected " + std::to_string(L));
    }
    for (std::size_t j = 0; j < L; ++j) {
      if (!rows[i][j]) continue;
      const std::size_t idx = *rows[i][j];
      if (idx >= diagrams_[j].size()) {
        throw ValidationError("grouping: row " + std::to_string(i) + ", column " + std::to_string(j) +
                              ": point index " + std::to_string(idx) + " out of range");
      }
      if (++seen[j][idx] > 1) {
        throw ValidationError("grouping: point " + std::to_string(idx) + " of column " + std::to_string(j) +
                              " appears more than once");
      }
    }
  }
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t idx = 0; idx < seen[j].size(); ++idx) {
      if (seen[j][idx] == 0) {
        throw ValidationError("grouping: point " + std::to_string(idx) + " of column " + std::to_string(j) +
                              " is missing");
      }
    }
  }

  for (auto& r : rows) {
    if (std::any_of(r.begin(), r.end(), [](const Cell& c) { return c.has_value(); })) rows_.push_back(std::move(r));
  }
  nontrivial_ = rows_.size();
  rows_.resize(K, std::vector<Cell>(L));
}

DiagramEntry Grouping::entry(std::size_t i, std::size_t j) const {
  const Cell& c = rows_.at(i).at(j);
  return c ? DiagramEntry(diagrams_[j][*c]) : DiagramEntry::diagonal();
}

std::vector<DiagramEntry> Grouping::row_entries(std::size_t i) const {
  std::vector<DiagramEntry> out;
  out.reserve(column_count());
  for (std::size_t j = 0; j < column_count(); ++j) out.push_back(entry(i, j));
  return out;
}

std::size_t Grouping::off_diagonal_count(std::size_t i) const {
  const auto& r = rows_.at(i);
  return static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [](const Cell& c) { return c.has_value(); }));
}

std::vector<std::vector<Cell>> Grouping::canonical_rows() const {
  std::vector<std::vector<Cell>> out(rows_.begin(), rows_.begin() + static_cast<std::ptrdiff_t>(nontrivial_));
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), cell_less);
  });
  return out;
}

bool same_assignment(const Grouping& a, const Grouping& b) {
  return a.column_count() == b.column_count() && a.canonical_rows() == b.canonical_rows();
}

DiagramEntry mean_point(std::span<const DiagramEntry> q, std::size_t L) {
  if (q.size() != L) {
    throw ArityError("mean_point: selection has " + std::to_string(q.size()) + " entries, expected " +
                     std::to_string(L));
  }
  Vec2 sum;
  std::size_t s = 0;
  for (const auto& e : q) {
    if (e.is_diagonal()) continue;
    sum += e.point().vec();
    ++s;
  }
  if (s == 0) return DiagramEntry::diagonal();

  const Vec2 mean_off = sum / static_cast<double>(s);
  const double sd = static_cast<double>(s);
  const double Ld = static_cast<double>(L);
  const Vec2 m = (sd * mean_off + (Ld - sd) * diagonal_projection(mean_off)) / Ld;
  if (!PlanePoint::admissible(m.x, m.y)) return DiagramEntry::diagonal();
  return PlanePoint::from_vec(m);
}

PersistenceDiagram mean_diagram(const Grouping& g, std::size_t* dropped) {
  PersistenceDiagram out;
  std::size_t lost = 0;
  for (std::size_t i = 0; i < g.nontrivial_row_count(); ++i) {
    const auto q = g.row_entries(i);
    const DiagramEntry m = mean_point(q, g.column_count());
    if (m.is_diagonal()) {
      ++lost;
    } else {
      out.push_back(m.point());
    }
  }
  if (dropped) *dropped = lost;
  return out;
}

double variance_definitional(const Grouping& g) {
  const std::size_t L = g.column_count();
  if (L == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < g.nontrivial_row_count(); ++i) {
    const auto q = g.row_entries(i);
    const DiagramEntry m = mean_point(q, L);
    double row = 0.0;
    for (const auto& e : q) row += distance_squared(e, m);
    total += row;
  }
  return total / static_cast<double>(L);
}

double variance_closed_form(const Grouping& g) {
  const std::size_t L = g.column_count();
  if (L == 0) return 0.0;
  const double L2 = static_cast<double>(L) * static_cast<double>(L);
  double total = 0.0;
  for (std::size_t i = 0; i < g.nontrivial_row_count(); ++i) {
    const auto q = g.row_entries(i);
    double pairwise = 0.0;
    for (std::size_t w = 0; w < L; ++w) {
      for (std::size_t l = w + 1; l < L; ++l) pairwise += distance_squared(q[w], q[l]);
    }

    std::vector<Vec2> projections;
    for (const auto& e : q) {
      if (!e.is_diagonal()) projections.push_back(diagonal_projection(e.point()));
    }
    const std::size_t s = projections.size();
    double along = 0.0;
    for (std::size_t w = 0; w < s; ++w) {
      for (std::size_t l = w + 1; l < s; ++l) along += norm2(projections[w] - projections[l]);
    }
    const double weight = static_cast<double>(L - s) / (L2 * static_cast<double>(s));
    total += pairwise / L2 + weight * along;
  }
  return total;
}

FlatnessReport check_flatness(const Grouping& g) {
  FlatnessReport r;
  r.row_diameters.assign(g.row_count(), 0.0);
  r.min_inter_distance = kInf;
  r.min_diagonal_clearance = kInf;

  const std::size_t rows = g.nontrivial_row_count();
  std::vector<std::vector<PlanePoint>> pts(rows);
  bool mixed = false;
  for (std::size_t i = 0; i < rows; ++i) {
    pts[i] = off_diagonal_points(g, i);
    if (pts[i].size() < g.column_count()) mixed = true;
  }

  for (std::size_t i = 0; i < rows; ++i) {
    double d = 0.0;
    for (std::size_t a = 0; a < pts[i].size(); ++a) {
      for (std::size_t b = a + 1; b < pts[i].size(); ++b) d = std::max(d, dist(pts[i][a], pts[i][b]));
      r.min_diagonal_clearance = std::min(r.min_diagonal_clearance, distance_to_diagonal(pts[i][a]));
    }
    r.row_diameters[i] = d;
    r.max_diameter = std::max(r.max_diameter, d);

    for (std::size_t k = i + 1; k < rows; ++k) {
      for (const auto& p : pts[i]) {
        for (const auto& q : pts[k]) r.min_inter_distance = std::min(r.min_inter_distance, dist(p, q));
      }
    }
  }

  const double hi = std::min(r.min_inter_distance, r.min_diagonal_clearance);
  if (mixed) {
    r.reason = "mixed selection";
  } else if (!(r.max_diameter < hi)) {
    r.reason = "diameter not below separation";
  } else {
    r.flat = true;
    r.feasible_interval = OpenInterval{r.max_diameter, hi};
    r.witness_lambda = std::isfinite(hi) ? 0.5 * (r.max_diameter + hi) : r.max_diameter + 1.0;
  }
  return r;
}

std::optional<Grouping> find_flat_grouping(std::span<const PersistenceDiagram> diagrams) {
  const std::size_t L = diagrams.size();
  if (L == 0) return std::nullopt;
  const std::size_t k = diagrams[0].size();
  for (const auto& d : diagrams) {
    if (d.size() != k) return std::nullopt;
  }
  std::vector<PersistenceDiagram> owned(diagrams.begin(), diagrams.end());
  if (k == 0) return Grouping(std::move(owned), {});

  // Pooled point p = j*k + idx.
  const std::size_t n = L * k;
  auto point = [&](std::size_t p) -> const PlanePoint& { return diagrams[p / k][p % k]; };

  struct Edge {
    double d;
    std::size_t a, b;
  };
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1) / 2);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) edges.push_back({dist(point(a), point(b)), a, b});
  }
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.d < y.d; });

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t components = n;

  auto try_clustering = [&]() -> std::optional<Grouping> {
    // Each cluster must hold exactly one point per diagram; rows are ordered
    // by the cluster's point from diagram 0.
    std::vector<std::vector<Cell>> rows(k, std::vector<Cell>(L));
    std::vector<std::size_t> row_of_root(n, n);
    for (std::size_t idx = 0; idx < k; ++idx) row_of_root[find(idx)] = idx;
    for (std::size_t p = 0; p < n; ++p) {
      const std::size_t row = row_of_root[find(p)];
      if (row == n) return std::nullopt;
      Cell& c = rows[row][p / k];
      if (c) return std::nullopt;
      c = p % k;
    }
    Grouping g(owned, std::move(rows));
    if (!check_flatness(g).flat) return std::nullopt;
    return g;
  };

  if (components == k) {
    if (auto g = try_clustering()) return g;
  }
  std::size_t e = 0;
  while (e < edges.size() && components > k) {
    const double d = edges[e].d;
    for (; e < edges.size() && edges[e].d == d; ++e) {
      const std::size_t ra = find(edges[e].a), rb = find(edges[e].b);
      if (ra != rb) {
        parent[std::max(ra, rb)] = std::min(ra, rb);
        --components;
      }
    }
    if (components == k) return try_clustering();
  }
  return std::nullopt;
}

}  // namespace pdfm
