#pragma once
// Galton-Watson trees conditioned on their size, generated exactly by the
// Lukasiewicz-path + cycle-lemma rotation: draw i.i.d. offspring counts
// conditioned (by rejection) on summing to the node count, then rotate to the
// unique valid depth-first sequence.

#include <memory>

#include "offspring.hpp"
#include "tree.hpp"

namespace bimt {

// Tree with exactly `n_nodes` nodes in addition to the root, unit edge
// lengths, distributed as the GW(eta) tree conditioned on that node count.
// Throws std::domain_error when the sum-rejection budget is exhausted (the
// conditioning event is impossible or vanishingly rare), e.g. binary offspring
// with odd n_nodes.
std::shared_ptr<const FiniteRTree> gw_conditioned(const OffspringDistribution& eta,
                                                  int n_nodes, Rng& rng,
                                                  long max_tries = 2000000);

// Builds the tree for an explicit depth-first offspring sequence (preorder);
// used by the generator internally and by enumeration oracles in tests.
std::shared_ptr<const FiniteRTree> tree_from_offspring_sequence(std::span<const int> counts);

// Depth-first offspring sequence of a tree (children in stored order); the
// canonical plane-shape key.
std::vector<int> offspring_sequence(const FiniteRTree& tree);

// All plane trees with `n_nodes` non-root nodes and their exact conditional
// probabilities under eta (product of offspring weights, normalized over the
// shape set). Feasible for small n only; the reference that samplers are
// tested against.
std::vector<std::pair<std::vector<int>, double>> enumerate_conditioned_shapes(
    const OffspringDistribution& eta, int n_nodes);

}  // namespace bimt
