#pragma once
// Upper-bound estimator for the n-pointed Gromov-Prohorov distance between
// two pointed samples: candidate metrics on the disjoint union are built from
// the root/marked-point correspondence stretched linearly along root paths,
// measures are discretized onto a shared grid, and the pGP objective is
// evaluated exactly on the grid. A pushforward Prohorov distance of the
// distance-vector distributions provides the paired lower bound.

#include "subtree.hpp"

namespace bimt {

// grid_frac: grid step as a fraction of the larger tree height (the config
// knob recorded in outputs); max_points caps the flow problem size.
double gp_distance_upper(const PointedSample& a, const PointedSample& b,
                         double grid_frac = 1e-3, size_t max_points = 1500);

double gp_pushforward_lower(const PointedSample& a, const PointedSample& b,
                            double grid_frac = 1e-3, size_t max_points = 1500);

}  // namespace bimt
