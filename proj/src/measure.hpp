#pragma once
// Finite measures on a finite R-tree: a length component (piecewise-constant
// density per edge, held as segment lists so restrictions stay closed-form)
// plus a finite atom list. Bi-measure trees bundle a sampling measure mu and
// a pruning measure nu and enforce the structural conditions between them.

#include <map>
#include <memory>
#include <span>
#include <vector>

#include "rng.hpp"
#include "tree.hpp"

namespace bimt {

struct Atom {
  TreePoint point;
  double mass;
};

// Half-open description is not needed here: a segment [lo, hi] on the edge
// into `child` carries density `coeff` (mass coeff * (hi - lo)).
struct Segment {
  double lo, hi, coeff;
};

class TreeMeasure {
 public:
  static TreeMeasure zero(std::shared_ptr<const FiniteRTree> tree);
  static TreeMeasure length_measure(std::shared_ptr<const FiniteRTree> tree,
                                    double coeff = 1.0);
  static TreeMeasure from_edge_coeffs(std::shared_ptr<const FiniteRTree> tree,
                                      std::span<const double> coeff_by_child);
  static TreeMeasure atoms_only(std::shared_ptr<const FiniteRTree> tree,
                                std::vector<Atom> atoms);
  static TreeMeasure make(std::shared_ptr<const FiniteRTree> tree,
                          std::span<const double> coeff_by_child, std::vector<Atom> atoms);

  const FiniteRTree& tree() const { return *tree_; }
  std::shared_ptr<const FiniteRTree> tree_ptr() const { return tree_; }

  double total() const { return total_; }
  bool is_atomic() const;        // no length component
  bool is_whole_edge() const;    // every edge either uncovered or one full-edge segment
  std::span<const Atom> atoms() const { return atoms_; }
  double atom_at(const TreePoint& p) const;
  const std::vector<Segment>& segments(NodeId child) const { return segs_[child]; }
  std::vector<double> edge_coeffs() const;  // whole-edge form only

  // mass of the edge prefix [0, h] (closed=true) or [0, h) on the edge into
  // `child`; counts atoms carried on that edge, not the parent node atom
  double prefix_mass(NodeId child, double h, bool closed) const;
  double node_atom(NodeId v) const;  // atom sitting exactly at node v

  double mass_of_span(const Span& span) const;
  double mass_on_pruned(const PrunedView& view) const;
  TreeMeasure restricted_to_span(const Span& span) const;
  TreeMeasure restricted_to_pruned(const PrunedView& view) const;
  // re-expresses a restriction on the materialized tree
  TreeMeasure transported(const Materialized& m) const;
  // new tree = same shape with edge lengths scaled by `length_scale`;
  // masses multiplied by `mass_factor`
  TreeMeasure rescaled(std::shared_ptr<const FiniteRTree> scaled_tree, double length_scale,
                       double mass_factor) const;
  TreeMeasure scaled(double mass_factor) const;
  TreeMeasure normalized() const;  // throws std::domain_error on zero measure

  TreePoint sample(Rng& rng) const;  // throws std::domain_error on zero measure

  // atoms + length segments chopped into pieces of length <= max_seg with the
  // mass lumped at the midpoint; for Prohorov-style comparisons
  std::vector<Atom> discretized(double max_seg) const;

 private:
  explicit TreeMeasure(std::shared_ptr<const FiniteRTree> tree);
  void finalize();  // sort atoms, drop zero masses, cache totals
  std::shared_ptr<const FiniteRTree> tree_;
  std::vector<std::vector<Segment>> segs_;  // by child id; disjoint, sorted
  std::vector<Atom> atoms_;                 // canonical order
  std::vector<double> atom_cdf_;            // prefix sums over atoms_
  double total_ = 0.0;
  double length_total_ = 0.0;
};

double measure_of_span(const TreeMeasure& m, std::span<const TreePoint> points);

// mu-skeleton membership and mu-leaves per the half-open convention: p is in
// the skeleton iff p lies strictly below some support point of mu or carries
// a mu-atom; mu-leaves are the remaining points of span(supp mu).
bool mu_skeleton_contains(const TreeMeasure& mu, const TreePoint& p);
std::vector<TreePoint> mu_leaves(const TreeMeasure& mu);

class BiMeasureTree {
 public:
  // Validates the bi-measure conditions; throws std::invalid_argument when a
  // nu-atom sits on a mu-leaf.
  BiMeasureTree(std::shared_ptr<const FiniteRTree> tree, TreeMeasure mu, TreeMeasure nu);

  const FiniteRTree& tree() const { return *tree_; }
  std::shared_ptr<const FiniteRTree> tree_ptr() const { return tree_; }
  const TreeMeasure& mu() const { return mu_; }
  const TreeMeasure& nu() const { return nu_; }

 private:
  std::shared_ptr<const FiniteRTree> tree_;
  TreeMeasure mu_, nu_;
};

}  // namespace bimt
