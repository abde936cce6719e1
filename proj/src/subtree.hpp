#pragma once
// tau^n: the n-pointed subtree spanned by the root and a point tuple,
// materialized as its own tree and carrying the restriction of the pruning
// measure; plus the samplers of the subtree-vector and distance-matrix
// distributions.

#include <memory>

#include "measure.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace bimt {

struct PointedSample {
  std::shared_ptr<const FiniteRTree> tree;  // the materialized span
  std::vector<TreePoint> marked;            // images of u_1..u_n in that tree
  TreeMeasure nu;                           // restricted pruning measure
};

PointedSample tau_n(const BiMeasureTree& x, std::span<const TreePoint> u);

// u drawn i.i.d. from the normalized mu, then tau_n.
PointedSample sample_subtree_vector(const BiMeasureTree& x, int n, Rng& rng);

// One draw of the distance matrix R(root, marked, V) with V ~ (mu^o)^{tensor m}.
DistMatrix distance_matrix_sample(const BiMeasureTree& x, std::span<const TreePoint> marked,
                                  int m, Rng& rng);

}  // namespace bimt
