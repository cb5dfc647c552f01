#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pdfm/diagram.hpp"
#include "pdfm/grouping.hpp"
#include "pdfm/wasserstein.hpp"

namespace pdfm {

/// A vector born on the diagonal at `anchor`; `v` is perpendicular to the
/// diagonal.
struct DiagonalVector {
  Vec2 anchor;
  Vec2 v;
};

/// Tangent vector at a base diagram: one 2-vector per base point (in base
/// storage order) plus vectors emanating from the diagonal.
class TangentVector {
 public:
  TangentVector() = default;
  TangentVector(PersistenceDiagram base, std::vector<Vec2> point_vectors, std::vector<DiagonalVector> diagonal_vectors);

  static TangentVector zero(PersistenceDiagram base);

  const PersistenceDiagram& base() const noexcept { return base_; }
  const std::vector<Vec2>& point_vectors() const noexcept { return point_vectors_; }
  const std::vector<DiagonalVector>& diagonal_vectors() const noexcept { return diagonal_vectors_; }

  double norm2() const noexcept { return norm2_; }
  double norm() const { return std::sqrt(norm2_); }

 private:
  PersistenceDiagram base_;
  std::vector<Vec2> point_vectors_;
  std::vector<DiagonalVector> diagonal_vectors_;
  double norm2_ = 0.0;
};

/// log_base(target) for the deterministic optimal matching, which is kept as
/// provenance.
struct LogVector {
  TangentVector vector;
  Matching matching;
  /// Whether the optimal matching is unique; empty when the pair exceeds the
  /// brute-force cap and was not checked.
  std::optional<bool> unique_matching;

  operator const TangentVector&() const noexcept { return vector; }  // NOLINT
};

LogVector log_map(const PersistenceDiagram& base, const PersistenceDiagram& target);

/// Σ of component inner products under the best alignment: point vectors
/// pair by base point (duplicated base points are paired optimally among
/// themselves), diagonal vectors pair within equal anchors, unpaired
/// components meet the zero vector. Throws ValidationError for different bases.
double inner_product(const TangentVector& u, const TangentVector& v);

/// Clamped cosine of the angle between u and v; nullopt if either is the tip.
std::optional<double> cosine(const TangentVector& u, const TangentVector& v);

struct AngleReport {
  double cosine = 1.0;
  double angle = 0.0;  ///< radians
  /// Set when either log's optimal matching was not verified unique, so the
  /// aligned angle may differ from the Alexandrov angle of another geodesic.
  bool caveat = false;
};
std::optional<AngleReport> alexandrov_angle(const LogVector& u, const LogVector& v);

/// C²(u, v) = ‖u‖² + ‖v‖² − 2‖u‖‖v‖cos∠(u, v).
double cone_distance_squared(const TangentVector& u, const TangentVector& v);
inline double cone_metric(const TangentVector& u, const TangentVector& v) {
  return std::sqrt(cone_distance_squared(u, v));
}

/// Finite-difference comparison cosine at `base` between the geodesics
/// towards `target_u` (at time t) and `target_v` (at time s).
double comparison_cosine(const PersistenceDiagram& base, const PersistenceDiagram& target_u,
                         const PersistenceDiagram& target_v, double t, double s);

/// Negation of u when it is again a valid tangent direction; its existence
/// certifies membership of u in the Hilbert subcone. Vectors born on the
/// diagonal cannot be reversed.
std::optional<TangentVector> opposite_vector(const TangentVector& u);
inline bool in_hilbert_subcone(const TangentVector& u) { return opposite_vector(u).has_value(); }

/// Component-wise average of Hilbert-subcone vectors sharing a base.
TangentVector pushforward_mean(std::span<const TangentVector> vectors);

/// κ_z^y(x) = 1 − (C_z²(log_z x, log_z y) − W₂²(x, y)) / W₂²(y, z).
/// Throws DomainError when y = z.
double hugging(const PersistenceDiagram& z, const PersistenceDiagram& y, const PersistenceDiagram& x);

/// (1/L²) Σᵢ Σⱼ ⟨log Dᵢ, log Dⱼ⟩ at `candidate`; zero at a Fréchet mean.
double barycenter_equality_check(std::span<const PersistenceDiagram> diagrams, const PersistenceDiagram& candidate);

/// (1/L) Σᵢ ⟨log Dᵢ, log y⟩ at `candidate`; nonpositive at a Fréchet mean.
double barycenter_one_sided(std::span<const PersistenceDiagram> diagrams, const PersistenceDiagram& candidate,
                            const PersistenceDiagram& y);

struct HuggingEquality {
  double lhs = 0.0;
  double rhs = 0.0;
  std::vector<double> kappa;  ///< κ_{z⋆}^y(Dᵢ) per diagram

  double residual() const { return std::abs(lhs - rhs); }
};

/// lhs = W₂²(y, z⋆)·(1/L) Σᵢ κ_{z⋆}^y(Dᵢ), rhs = (1/L) Σᵢ (W₂²(Dᵢ, y) − W₂²(Dᵢ, z⋆)).
HuggingEquality hugging_equality_check(std::span<const PersistenceDiagram> diagrams, const PersistenceDiagram& z_star,
                                       const PersistenceDiagram& y);

/// D_Λ: one point per nontrivial row at Σⱼ λⱼ G_i^j. Requires every
/// nontrivial row to be free of diagonal cells and Λ to be a probability
/// vector of length L.
PersistenceDiagram lambda_mixture(const Grouping& g, std::span<const double> weights);

struct CauchyCheck {
  double cone_distance2 = 0.0;
  double bound = 0.0;
};

/// Truncated family on the base {(0, 1/n²) : n ≤ n_max} with
/// v_n = (1/n, −1/n) on the first N (resp. M) points.
CauchyCheck cauchy_family_check(std::size_t n_max, std::size_t N, std::size_t M);

}  // namespace pdfm
