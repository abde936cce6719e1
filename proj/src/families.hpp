#pragma once
// Rescaling and the standard measure families on conditioned Galton-Watson
// trees: normalized length / uniform node sampling measures, their pruning
// counterparts, height-slice atoms and the node-degree (ADH) pruning measure,
// plus the CRT and alpha-stable scaling constants.

#include <memory>

#include "measure.hpp"
#include "tree.hpp"

namespace bimt {

// Same shape with all edge lengths multiplied by a > 0.
std::shared_ptr<const FiniteRTree> rescale(const FiniteRTree& tree, double a);

struct StandardMeasures {
  TreeMeasure mu_ske;  // normalized length measure (total mass 1)
  TreeMeasure mu_nod;  // uniform measure on the non-root nodes (total mass 1)
  TreeMeasure nu_ske;  // length measure of the rescaled tree (mass a_N * N)
  TreeMeasure nu_nod;  // a_N * N * mu_nod
};

// `rescaled` must be the N-node tree already rescaled to edge length a_N.
StandardMeasures standard_measures(std::shared_ptr<const FiniteRTree> rescaled, int n_nodes,
                                   double a_n);

// Unit atoms at every point of height exactly `a` that is not a leaf; empty
// when a exceeds the tree height.
TreeMeasure height_slice_measure(std::shared_ptr<const FiniteRTree> tree, double a);

// Atom c(v) - 1 at every node with at least two children.
TreeMeasure adh_measure(std::shared_ptr<const FiniteRTree> tree);

double crt_scale(double sigma, int n_nodes);                     // sigma / sqrt(N)
double stable_scale(double alpha, double c_tail, int n_nodes);   // alpha-stable a_N

}  // namespace bimt
