#pragma once
// Piecewise-linear excursions on [0,1], the depth-first contour of a discrete
// tree, and the glue map sending an excursion to the quotient metric tree
// carrying the pushforward of Lebesgue measure.

#include <memory>
#include <vector>

#include "measure.hpp"
#include "tree.hpp"

namespace bimt {

struct Excursion {
  // (time, value) breakpoints; linear in between. Validated: times strictly
  // increasing from 0 to 1, values >= 0, endpoints 0.
  std::vector<std::pair<double, double>> breakpoints;

  explicit Excursion(std::vector<std::pair<double, double>> pts);
  double value(double t) const;
  Excursion scaled(double height_factor) const;
};

// Contour process: breakpoints at k/2N for the depth-first node visit order
// y_0 = root, ..., y_2N = root, with values h(y_k).
Excursion contour(const FiniteRTree& tree);

struct GlueResult {
  std::shared_ptr<const FiniteRTree> tree;
  TreeMeasure mu;  // pushforward of Lebesgue on [0,1]
};

// Quotient tree of the pseudo-distance r_e(x,y) = e(x) + e(y) - 2 inf_[x,y] e.
// Flat stretches of the excursion turn into point atoms of mu.
GlueResult glue(const Excursion& e);

}  // namespace bimt
