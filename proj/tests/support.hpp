#pragma once
// Shared fixtures and independent oracles for the test and acceptance suites.
// Oracles here deliberately avoid the production code paths they check:
// brute-force edge marking for span geometry, subset enumeration for the
// Prohorov distance, rejection sampling for conditioned GW trees, and the
// unthinned Poisson construction of the pruning process.

#include <memory>
#include <vector>

#include "measure.hpp"
#include "offspring.hpp"
#include "pruning.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace bimt::test {

// random topology with random edge lengths in (0.1, max_len)
std::shared_ptr<const FiniteRTree> random_tree(Rng& rng, int max_nodes, double max_len = 2.0);

TreePoint random_point(const FiniteRTree& t, Rng& rng);  // uniform w.r.t. length
std::vector<TreePoint> random_points(const FiniteRTree& t, Rng& rng, int k);

// brute-force per-edge marking: coverage of each edge is the max over
// generating points, computed independently of the Span walk
double span_length_oracle(const FiniteRTree& t, std::span<const TreePoint> gens);
bool span_contains_oracle(const FiniteRTree& t, std::span<const TreePoint> gens,
                          const TreePoint& p);

// definitional membership in T^{cuts}: no cut lies on [root, p]
bool pruned_contains_oracle(const FiniteRTree& t, std::span<const TreePoint> cuts,
                            const TreePoint& p);

// smallest eps on a grid satisfying both one-sided conditions over all 2^K
// subsets (the closed sets of a finite space)
double prohorov_grid_oracle(std::span<const double> dist, size_t K, std::span<const double> m1,
                            std::span<const double> m2, double step);

// unconditioned GW tree by direct branching, capped; nullptr when the cap hits
std::shared_ptr<const FiniteRTree> gw_free(const OffspringDistribution& eta, Rng& rng,
                                           int max_vertices);
// conditioned tree by rejection on the node count
std::shared_ptr<const FiniteRTree> gw_rejection(const OffspringDistribution& eta, int n_nodes,
                                                Rng& rng, long max_tries = 10000000);

// full Poisson point process on [0, horizon] x T with intensity Lebesgue x nu,
// sorted by time and post-filtered to the effective cuts
struct NaiveEvent {
  double time;
  TreePoint point;
  bool effective;
};
std::vector<NaiveEvent> naive_ppp_prune(const BiMeasureTree& x, double horizon, Rng& rng);

// random small bi-measure instance with atomic mu (and atomic or mixed nu)
BiMeasureTree random_atomic_instance(Rng& rng, int max_mu_atoms, bool atomic_nu,
                                     int max_nodes = 12);

TreeMeasure random_measure(std::shared_ptr<const FiniteRTree> tree, Rng& rng, bool with_length,
                           int max_atoms);

// the cherry: root -1- b, b -1- u1, b -1- u2  (node ids 0,1,2,3)
std::shared_ptr<const FiniteRTree> cherry();

}  // namespace bimt::test
