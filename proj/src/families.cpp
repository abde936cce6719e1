#include "families.hpp"

#include <cmath>
#include <stdexcept>

namespace bimt {

std::shared_ptr<const FiniteRTree> rescale(const FiniteRTree& tree, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("rescale: factor must be > 0");
  std::vector<FiniteRTree::NodeSpec> spec;
  spec.reserve(tree.node_count());
  spec.push_back({kNoNode, 0.0});
  for (NodeId v = 1; v < tree.node_count(); ++v)
    spec.push_back({tree.parent(v), tree.edge_length(v) * a});
  return std::make_shared<FiniteRTree>(std::move(spec));
}

StandardMeasures standard_measures(std::shared_ptr<const FiniteRTree> rescaled, int n_nodes,
                                   double a_n) {
  const FiniteRTree& t = *rescaled;
  if (n_nodes != t.edge_count())
    throw std::invalid_argument("standard_measures: node count does not match the tree");
  if (!(a_n > 0.0)) throw std::invalid_argument("standard_measures: a_N must be > 0");
  double total_len = t.total_length();
  std::vector<Atom> node_atoms;
  node_atoms.reserve(n_nodes);
  for (NodeId v = 1; v < t.node_count(); ++v)
    node_atoms.push_back({TreePoint::at_node(v), 1.0 / n_nodes});
  StandardMeasures out{
      TreeMeasure::length_measure(rescaled, 1.0 / total_len),
      TreeMeasure::atoms_only(rescaled, node_atoms),
      TreeMeasure::length_measure(rescaled, 1.0),
      TreeMeasure::atoms_only(rescaled, node_atoms).scaled(a_n * n_nodes),
  };
  return out;
}

TreeMeasure height_slice_measure(std::shared_ptr<const FiniteRTree> tree, double a) {
  const FiniteRTree& t = *tree;
  if (!(a >= 0.0)) throw std::invalid_argument("height_slice_measure: height must be >= 0");
  std::vector<Atom> atoms;
  if (a == 0.0) {
    if (!t.is_leaf(t.root())) atoms.push_back({TreePoint::at_node(t.root()), 1.0});
    return TreeMeasure::atoms_only(std::move(tree), std::move(atoms));
  }
  for (NodeId v = 1; v < t.node_count(); ++v) {
    double hp = t.height(t.parent(v));
    double hc = t.height(v);
    if (hp < a && a < hc) {
      TreePoint p = make_point(t, v, std::min(a - hp, t.edge_length(v)));
      if (p.is_node() && t.is_leaf(p.node)) continue;  // fp canonicalization guard
      atoms.push_back({p, 1.0});
    } else if (hc == a && !t.is_leaf(v)) {
      atoms.push_back({TreePoint::at_node(v), 1.0});
    }
  }
  return TreeMeasure::atoms_only(std::move(tree), std::move(atoms));
}

TreeMeasure adh_measure(std::shared_ptr<const FiniteRTree> tree) {
  const FiniteRTree& t = *tree;
  std::vector<Atom> atoms;
  for (NodeId v = 0; v < t.node_count(); ++v) {
    int c = t.child_count(v);
    if (c >= 2) atoms.push_back({TreePoint::at_node(v), static_cast<double>(c - 1)});
  }
  return TreeMeasure::atoms_only(std::move(tree), std::move(atoms));
}

double crt_scale(double sigma, int n_nodes) {
  if (!(sigma > 0.0) || n_nodes < 1) throw std::invalid_argument("crt_scale: bad arguments");
  return sigma / std::sqrt(static_cast<double>(n_nodes));
}

double stable_scale(double alpha, double c_tail, int n_nodes) {
  if (!(alpha > 1.0) || !(alpha < 2.0) || !(c_tail > 0.0) || n_nodes < 1)
    throw std::invalid_argument("stable_scale: bad arguments");
  double abar = 1.0 - 1.0 / alpha;
  double k = alpha * (alpha - 1.0) / (c_tail * std::tgamma(2.0 - alpha));
  return std::pow(static_cast<double>(n_nodes), -abar) * std::pow(k, -1.0 / alpha);
}

}  // namespace bimt
