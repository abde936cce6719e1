#pragma once
// Exact Prohorov distance between two finite atomic measures supported on a
// common finite point set: bisection on epsilon where each one-sided
// condition  m2(A) <= m1(A^eps) + eps  (A^eps the open eps-neighborhood)
// over all closed sets A reduces to a max-flow feasibility check on the
// bipartite graph with edges between points at distance < eps.

#include <span>
#include <vector>

namespace bimt {

// dist is a row-major K x K metric matrix; m1, m2 are the masses the two
// measures put on each of the K points. Result accurate to `tol`.
double prohorov_distance(std::span<const double> dist, size_t K, std::span<const double> m1,
                         std::span<const double> m2, double tol = 1e-9);

// true iff eps satisfies both one-sided Prohorov conditions
bool prohorov_feasible(std::span<const double> dist, size_t K, std::span<const double> m1,
                       std::span<const double> m2, double eps);

}  // namespace bimt
