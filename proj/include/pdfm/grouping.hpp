#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdfm/diagram.hpp"

namespace pdfm {

/// A grouping cell: the index of a point in that column's diagram, or empty
/// for the diagonal.
using Cell = std::optional<std::size_t>;

/// K×L multi-matching of L diagrams. Column j holds every point of diagram j
/// exactly once and K − k_j diagonal cells, with K = k₁ + ⋯ + k_L.
///
/// The constructor accepts any set of rows that covers each column exactly
/// once; trivial (all-diagonal) rows are dropped and the matrix is padded
/// with trivial rows up to K, so nontrivial rows keep their given order and
/// come first.
class Grouping {
 public:
  Grouping() = default;
  Grouping(std::vector<PersistenceDiagram> diagrams, std::vector<std::vector<Cell>> rows);

  std::size_t row_count() const noexcept { return rows_.size(); }
  std::size_t column_count() const noexcept { return diagrams_.size(); }
  const std::vector<PersistenceDiagram>& diagrams() const noexcept { return diagrams_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

  const std::vector<Cell>& row(std::size_t i) const { return rows_.at(i); }
  DiagramEntry entry(std::size_t i, std::size_t j) const;
  std::vector<DiagramEntry> row_entries(std::size_t i) const;

  /// s_i, the number of off-diagonal cells in row i.
  std::size_t off_diagonal_count(std::size_t i) const;
  bool is_trivial(std::size_t i) const { return off_diagonal_count(i) == 0; }
  std::size_t nontrivial_row_count() const noexcept { return nontrivial_; }

  /// Nontrivial rows sorted lexicographically (diagonal sorts last); two
  /// groupings are the same assignment iff these agree.
  std::vector<std::vector<Cell>> canonical_rows() const;

 private:
  std::vector<PersistenceDiagram> diagrams_;
  std::vector<std::vector<Cell>> rows_;
  std::size_t nontrivial_ = 0;
};

bool same_assignment(const Grouping& a, const Grouping& b);

/// Mean of a selection of L entries: the arithmetic mean when all are
/// off-diagonal, (s·Q̄ₒ + (L−s)·Q̄ₒ^⊤)/L with s off-diagonal entries, and the
/// diagonal when s = 0. Throws ArityError when q.size() != L.
DiagramEntry mean_point(std::span<const DiagramEntry> q, std::size_t L);

/// One point per nontrivial row at that row's mean. A row whose computed mean
/// is not strictly above the diagonal (only possible through rounding) is
/// dropped and counted in `dropped`.
PersistenceDiagram mean_diagram(const Grouping& g, std::size_t* dropped = nullptr);

/// (1/L) Σ_j Σ_i ‖G_i^j − Ḡ_i‖².
double variance_definitional(const Grouping& g);

/// Pairwise form: (1/L²) Σ_i Σ_{w<ℓ} ‖G_i^w − G_i^ℓ‖²
///   + Σ_i (L−s_i)/(L² s_i) Σ_{w<ℓ≤s_i} ‖(G_i^{j_w})^⊤ − (G_i^{j_ℓ})^⊤‖².
double variance_closed_form(const Grouping& g);

struct OpenInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct FlatnessReport {
  std::vector<double> row_diameters;  ///< d_max(i) per row, 0 for trivial rows
  double max_diameter = 0.0;
  double min_inter_distance = 0.0;    ///< +∞ with fewer than two nontrivial rows
  double min_diagonal_clearance = 0.0;  ///< +∞ when there are no points
  std::optional<OpenInterval> feasible_interval;
  std::optional<double> witness_lambda;
  bool flat = false;
  std::string reason;  ///< empty when flat
};

/// Evaluates the three flatness conditions over off-diagonal cells with
/// exact strict comparisons.
FlatnessReport check_flatness(const Grouping& g);

/// Single-linkage search for a flat grouping. Sound (any result is flat);
/// returns nullopt when diagram sizes differ or no threshold separates the
/// pooled points into one-point-per-diagram clusters.
std::optional<Grouping> find_flat_grouping(std::span<const PersistenceDiagram> diagrams);

}  // namespace pdfm
