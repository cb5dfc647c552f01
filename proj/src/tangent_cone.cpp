#include "pdfm/tangent_cone.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "pdfm/assignment.hpp"
#include "pdfm/errors.hpp"

namespace pdfm {

namespace {

constexpr double kPerpTolerance = 1e-12;

struct Aligned {
  double inner = 0.0;
  double dist2 = 0.0;  ///< Σ ‖a_k − b_σ(k)‖², computed without cancellation
  Aligned& operator+=(const Aligned& o) {
    inner += o.inner;
    dist2 += o.dist2;
    return *this;
  }
};

/// The bijection σ maximizing Σ ⟨a_k, b_σ(k)⟩, the shorter list padded with
/// zero vectors.
Aligned best_pairing(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  Aligned r;
  if (a.empty() || b.empty()) {
    for (const auto& x : a) r.dist2 += norm2(x);
    for (const auto& y : b) r.dist2 += norm2(y);
    return r;
  }
  if (a.size() == 1 && b.size() == 1) return {dot(a[0], b[0]), norm2(a[0] - b[0])};
  const std::size_t n = std::max(a.size(), b.size());
  std::vector<double> cost(n * n, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) cost[i * n + j] = -dot(a[i], b[j]);
  }
  const auto col = solve_assignment(cost, n);
  std::vector<bool> used(b.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (col[i] < b.size()) {
      r.inner += dot(a[i], b[col[i]]);
      r.dist2 += norm2(a[i] - b[col[i]]);
      used[col[i]] = true;
    } else {
      r.dist2 += norm2(a[i]);
    }
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!used[j]) r.dist2 += norm2(b[j]);
  }
  return r;
}

void require_same_base(const TangentVector& u, const TangentVector& v) {
  if (!identical(u.base(), v.base())) throw ValidationError("tangent vectors live at different base diagrams");
}

}  // namespace

TangentVector::TangentVector(PersistenceDiagram base, std::vector<Vec2> point_vectors,
                             std::vector<DiagonalVector> diagonal_vectors)
    : base_(std::move(base)), point_vectors_(std::move(point_vectors)), diagonal_vectors_(std::move(diagonal_vectors)) {
  if (point_vectors_.size() != base_.size()) {
    throw ArityError("TangentVector: " + std::to_string(point_vectors_.size()) + " point vectors for a base of " +
                     std::to_string(base_.size()) + " points");
  }
  for (const auto& pv : point_vectors_) norm2_ += pdfm::norm2(pv);
  for (const auto& dv : diagonal_vectors_) {
    if (std::abs(dv.v.x + dv.v.y) > kPerpTolerance * std::max(1.0, pdfm::norm(dv.v))) {
      throw ValidationError("TangentVector: diagonal vector is not perpendicular to the diagonal");
    }
    norm2_ += pdfm::norm2(dv.v);
  }
}

TangentVector TangentVector::zero(PersistenceDiagram base) {
  std::vector<Vec2> pv(base.size());
  return TangentVector(std::move(base), std::move(pv), {});
}

LogVector log_map(const PersistenceDiagram& base, const PersistenceDiagram& target) {
  W2Result w = w2_distance(base, target);
  std::vector<Vec2> pv(base.size());
  std::vector<DiagonalVector> dv;
  for (const auto& p : w.matching.pairs) {
    if (p.left && p.right) {
      pv[*p.left] = target[*p.right].vec() - base[*p.left].vec();
    } else if (p.left) {
      pv[*p.left] = -perpendicular(base[*p.left]);
    } else {
      const PlanePoint& y = target[*p.right];
      dv.push_back({diagonal_projection(y), perpendicular(y)});
    }
  }

  LogVector out{TangentVector(base, std::move(pv), std::move(dv)), std::move(w.matching), std::nullopt};
  if (base.size() + target.size() <= kDefaultMatchingCap) {
    out.unique_matching = !brute_force_w2(base, target).multiple_optima();
  }
  return out;
}

namespace {

Aligned align(const TangentVector& u, const TangentVector& v) {
  require_same_base(u, v);
  const auto& base = u.base();
  Aligned s;

  // Base points with equal coordinates are interchangeable for small t.
  std::map<PlanePoint, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < base.size(); ++i) groups[base[i]].push_back(i);
  for (const auto& [pt, idx] : groups) {
    if (idx.size() == 1) {
      const Vec2 a = u.point_vectors()[idx[0]], b = v.point_vectors()[idx[0]];
      s += Aligned{dot(a, b), norm2(a - b)};
      continue;
    }
    std::vector<Vec2> a, b;
    for (std::size_t i : idx) {
      a.push_back(u.point_vectors()[i]);
      b.push_back(v.point_vectors()[i]);
    }
    s += best_pairing(a, b);
  }

  // Diagonal vectors only interact when born at the same anchor.
  auto key = [](Vec2 a) { return std::pair{a.x, a.y}; };
  std::map<std::pair<double, double>, std::pair<std::vector<Vec2>, std::vector<Vec2>>> anchors;
  for (const auto& d : u.diagonal_vectors()) anchors[key(d.anchor)].first.push_back(d.v);
  for (const auto& d : v.diagonal_vectors()) anchors[key(d.anchor)].second.push_back(d.v);
  for (const auto& [k, lists] : anchors) s += best_pairing(lists.first, lists.second);
  return s;
}

}  // namespace

double inner_product(const TangentVector& u, const TangentVector& v) { return align(u, v).inner; }

std::optional<double> cosine(const TangentVector& u, const TangentVector& v) {
  const double ip = inner_product(u, v);
  const double den = u.norm() * v.norm();
  if (den == 0.0) return std::nullopt;
  return std::clamp(ip / den, -1.0, 1.0);
}

std::optional<AngleReport> alexandrov_angle(const LogVector& u, const LogVector& v) {
  const auto c = cosine(u.vector, v.vector);
  if (!c) return std::nullopt;
  AngleReport r;
  r.cosine = *c;
  r.angle = std::acos(*c);
  r.caveat = !(u.unique_matching.value_or(false) && v.unique_matching.value_or(false));
  return r;
}

double cone_distance_squared(const TangentVector& u, const TangentVector& v) {
  return align(u, v).dist2;
}

double comparison_cosine(const PersistenceDiagram& base, const PersistenceDiagram& target_u,
                         const PersistenceDiagram& target_v, double t, double s) {
  const auto gu = geodesic(base, target_u, w2_distance(base, target_u).matching, t);
  const auto gv = geodesic(base, target_v, w2_distance(base, target_v).matching, s);
  const double a2 = w2_squared(base, gu);
  const double b2 = w2_squared(base, gv);
  const double c2 = w2_squared(gu, gv);
  const double den = 2.0 * std::sqrt(a2) * std::sqrt(b2);
  if (den == 0.0) throw DomainError("comparison_cosine: a geodesic point coincides with the base");
  return (a2 + b2 - c2) / den;
}

std::optional<TangentVector> opposite_vector(const TangentVector& u) {
  for (const auto& d : u.diagonal_vectors()) {
    if (d.v != Vec2{}) return std::nullopt;
  }
  std::vector<Vec2> pv;
  pv.reserve(u.point_vectors().size());
  for (const auto& v : u.point_vectors()) pv.push_back(-v);
  return TangentVector(u.base(), std::move(pv), {});
}

TangentVector pushforward_mean(std::span<const TangentVector> vectors) {
  if (vectors.empty()) throw ArityError("pushforward_mean: no vectors");
  const auto& base = vectors.front().base();
  std::vector<Vec2> acc(base.size());
  for (const auto& v : vectors) {
    if (!identical(v.base(), base)) throw ValidationError("pushforward_mean: vectors at different bases");
    if (!in_hilbert_subcone(v)) throw ValidationError("pushforward_mean: vector outside the Hilbert subcone");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v.point_vectors()[i];
  }
  const double n = static_cast<double>(vectors.size());
  for (auto& a : acc) a = a / n;
  return TangentVector(base, std::move(acc), {});
}

double hugging(const PersistenceDiagram& z, const PersistenceDiagram& y, const PersistenceDiagram& x) {
  const double yz2 = w2_squared(y, z);
  if (yz2 == 0.0) throw DomainError("hugging: undefined for y = z (the definition divides by W2^2(y, z))");
  const auto lx = log_map(z, x);
  const auto ly = log_map(z, y);
  return 1.0 - (cone_distance_squared(lx, ly) - w2_squared(x, y)) / yz2;
}

double barycenter_equality_check(std::span<const PersistenceDiagram> diagrams, const PersistenceDiagram& candidate) {
  if (diagrams.empty()) throw ArityError("barycenter_equality_check: empty diagram collection");
  std::vector<TangentVector> logs;
  logs.reserve(diagrams.size());
  for (const auto& d : diagrams) logs.push_back(log_map(candidate, d).vector);
  double s = 0.0;
  for (const auto& a : logs) {
    for (const auto& b : logs) s += inner_product(a, b);
  }
  const double L = static_cast<double>(diagrams.size());
  return s / (L * L);
}

double barycenter_one_sided(std::span<const PersistenceDiagram> diagrams, const PersistenceDiagram& candidate,
                            const PersistenceDiagram& y) {
  if (diagrams.empty()) throw ArityError("barycenter_one_sided: empty diagram collection");
  const auto ly = log_map(candidate, y);
  double s = 0.0;
  for (const auto& d : diagrams) s += inner_product(log_map(candidate, d), ly);
  return s / static_cast<double>(diagrams.size());
}

HuggingEquality hugging_equality_check(std::span<const PersistenceDiagram> diagrams, const PersistenceDiagram& z_star,
                                       const PersistenceDiagram& y) {
  if (diagrams.empty()) throw ArityError("hugging_equality_check: empty diagram collection");
  const double yz2 = w2_squared(y, z_star);
  if (yz2 == 0.0) throw DomainError("hugging_equality_check: y coincides with z*, the hugging function is undefined");

  HuggingEquality r;
  double kappa_sum = 0.0, rhs_sum = 0.0;
  for (const auto& d : diagrams) {
    r.kappa.push_back(hugging(z_star, y, d));
    kappa_sum += r.kappa.back();
    rhs_sum += w2_squared(d, y) - w2_squared(d, z_star);
  }
  const double L = static_cast<double>(diagrams.size());
  r.lhs = yz2 * kappa_sum / L;
  r.rhs = rhs_sum / L;
  return r;
}

PersistenceDiagram lambda_mixture(const Grouping& g, std::span<const double> weights) {
  const std::size_t L = g.column_count();
  if (weights.size() != L) {
    throw ArityError("lambda_mixture: " + std::to_string(weights.size()) + " weights for " + std::to_string(L) +
                     " diagrams");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("lambda_mixture: weights must be finite and nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("lambda_mixture: weights must sum to 1");

  PersistenceDiagram out;
  for (std::size_t i = 0; i < g.nontrivial_row_count(); ++i) {
    if (g.off_diagonal_count(i) != L) {
      throw ValidationError("lambda_mixture: row " + std::to_string(i) + " mixes points and the diagonal");
    }
    Vec2 p;
    for (std::size_t j = 0; j < L; ++j) p += weights[j] * g.entry(i, j).point().vec();
    out.push_back(PlanePoint::from_vec(p));
  }
  return out;
}

CauchyCheck cauchy_family_check(std::size_t n_max, std::size_t N, std::size_t M) {
  if (!(1 <= N && N <= M && M <= n_max)) {
    throw RangeError("cauchy_family_check: need 1 <= N <= M <= n_max, got N=" + std::to_string(N) +
                     ", M=" + std::to_string(M) + ", n_max=" + std::to_string(n_max));
  }
  PersistenceDiagram base;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double nd = static_cast<double>(n);
    base.push_back(PlanePoint(0.0, 1.0 / (nd * nd)));
  }
  auto truncated = [&](std::size_t upto) {
    std::vector<Vec2> pv(n_max);
    for (std::size_t n = 1; n <= upto; ++n) {
      const double inv = 1.0 / static_cast<double>(n);
      pv[n - 1] = {inv, -inv};
    }
    return TangentVector(base, std::move(pv), {});
  };

  CauchyCheck r;
  r.cone_distance2 = cone_distance_squared(truncated(N), truncated(M));
  for (std::size_t n = N + 1; n <= M; ++n) {
    const double nd = static_cast<double>(n);
    r.bound += 1.0 / (nd * nd);
  }
  r.bound *= 2.0;
  return r;
}

}  // namespace pdfm
