#pragma once

#include <span>
#include <vector>

namespace wpt {

struct TransportEntry {
  int source = 0;
  int target = 0;
  double mass = 0.0;
};

struct TransportSolution {
  std::vector<TransportEntry> plan;  // positive-mass entries, row-major order
  double cost = 0.0;
  long pivots = 0;
};

/// Exact solver for the balanced transportation problem
///   min sum_ij P_ij C_ij  s.t. P 1 = a, P^T 1 = b, P >= 0
/// by the primal network simplex on the complete bipartite graph.
/// `cost` is row-major n x m. Strongly feasible spanning trees (Cunningham's
/// leaving-arc rule) rule out cycling; entering arcs are chosen by block
/// search with lowest-index tie-breaking, so results are deterministic.
TransportSolution solve_transport(std::span<const double> cost, std::span<const double> a,
                                  std::span<const double> b);

}  // namespace wpt
