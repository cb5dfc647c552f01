#pragma once

#include <cmath>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pdfm {

/// Plain 2-vector used for displacements and off-half-plane coordinates.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
  constexpr Vec2& operator+=(Vec2 b) {
    x += b.x;
    y += b.y;
    return *this;
  }
  friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// A point (birth, death) of the open half-plane death > birth.
/// Construction throws ValidationError for non-finite or on/below-diagonal
/// coordinates.
class PlanePoint {
 public:
  PlanePoint(double birth, double death);

  double birth() const noexcept { return birth_; }
  double death() const noexcept { return death_; }
  Vec2 vec() const noexcept { return {birth_, death_}; }

  static PlanePoint from_vec(Vec2 v) { return {v.x, v.y}; }
  /// True when (birth, death) would be accepted by the constructor.
  static bool admissible(double birth, double death) noexcept;

  friend bool operator==(const PlanePoint&, const PlanePoint&) = default;
  friend auto operator<=>(const PlanePoint&, const PlanePoint&) = default;

 private:
  double birth_;
  double death_;
};

/// x^⊤: orthogonal projection onto the line y = x.
inline Vec2 diagonal_projection(Vec2 x) {
  const double m = 0.5 * (x.x + x.y);
  return {m, m};
}
inline Vec2 diagonal_projection(const PlanePoint& x) { return diagonal_projection(x.vec()); }

/// x^⊥ = x - x^⊤.
inline Vec2 perpendicular(Vec2 x) {
  const double h = 0.5 * (x.y - x.x);
  return {-h, h};
}
inline Vec2 perpendicular(const PlanePoint& x) { return perpendicular(x.vec()); }

/// ‖x^⊥‖ = (death - birth) / √2.
inline double distance_to_diagonal(const PlanePoint& x) {
  return (x.death() - x.birth()) / std::sqrt(2.0);
}
/// ‖x^⊥‖², computed as (death - birth)² / 2 without a square root.
inline double distance_to_diagonal_squared(const PlanePoint& x) {
  const double d = x.death() - x.birth();
  return 0.5 * d * d;
}

/// Either an off-diagonal point or the diagonal ∂Ω.
class DiagramEntry {
 public:
  DiagramEntry(const PlanePoint& p) : point_(p), diagonal_(false) {}  // NOLINT
  static DiagramEntry diagonal() { return DiagramEntry(); }

  bool is_diagonal() const noexcept { return diagonal_; }
  /// Precondition: !is_diagonal().
  const PlanePoint& point() const;

  friend bool operator==(const DiagramEntry& a, const DiagramEntry& b) {
    if (a.diagonal_ || b.diagonal_) return a.diagonal_ == b.diagonal_;
    return a.point_ == b.point_;
  }

 private:
  DiagramEntry() : point_(0.0, 1.0), diagonal_(true) {}
  PlanePoint point_;
  bool diagonal_;
};

/// Squared distance with ‖x − ∂Ω‖ = ‖x^⊥‖ and ‖∂Ω − ∂Ω‖ = 0.
double distance_squared(const DiagramEntry& a, const DiagramEntry& b);

/// Finite multiset of off-diagonal points. Storage order is kept (other
/// modules index points by position) but equality is multiset equality.
class PersistenceDiagram {
 public:
  PersistenceDiagram() = default;
  explicit PersistenceDiagram(std::vector<PlanePoint> points) : points_(std::move(points)) {}
  PersistenceDiagram(std::initializer_list<PlanePoint> points) : points_(points) {}

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const PlanePoint& operator[](std::size_t i) const { return points_[i]; }
  std::span<const PlanePoint> points() const noexcept { return points_; }
  auto begin() const noexcept { return points_.begin(); }
  auto end() const noexcept { return points_.end(); }

  void push_back(const PlanePoint& p) { points_.push_back(p); }

  /// Multiset equality (order-insensitive, exact coordinates).
  friend bool operator==(const PersistenceDiagram& a, const PersistenceDiagram& b);

  /// Element-wise equality in storage order.
  friend bool identical(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    return a.points_ == b.points_;
  }

 private:
  std::vector<PlanePoint> points_;
};

bool identical(const PersistenceDiagram& a, const PersistenceDiagram& b);

}  // namespace pdfm
