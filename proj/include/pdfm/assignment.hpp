#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pdfm {

/// Exact minimum-cost perfect assignment for an n×n row-major cost matrix,
/// using the O(n³) shortest-augmenting-path method with dual potentials.
/// Returns the column assigned to each row. Ties are broken by scanning
/// order (lowest column index first), so the result is deterministic.
std::vector<std::size_t> solve_assignment(std::span<const double> cost, std::size_t n);

}  // namespace pdfm
