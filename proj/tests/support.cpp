#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bimt::test {

std::shared_ptr<const FiniteRTree> random_tree(Rng& rng, int max_nodes, double max_len) {
  int n = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_nodes)));
  std::vector<FiniteRTree::NodeSpec> spec;
  spec.push_back({kNoNode, 0.0});
  for (int v = 1; v <= n; ++v) {
    NodeId parent = static_cast<NodeId>(rng.below(static_cast<uint64_t>(v)));
    double len = 0.1 + (max_len - 0.1) * rng.uniform01();
    spec.push_back({parent, len});
  }
  return std::make_shared<FiniteRTree>(std::move(spec));
}

TreePoint random_point(const FiniteRTree& t, Rng& rng) {
  if (t.node_count() == 1) return TreePoint::at_node(t.root());
  double target = rng.uniform01() * t.total_length();
  double acc = 0.0;
  for (NodeId v = 1; v < t.node_count(); ++v) {
    acc += t.edge_length(v);
    if (target < acc || v == t.node_count() - 1) {
      double off = t.edge_length(v) * rng.uniform01();
      return make_point(t, v, off);
    }
  }
  return TreePoint::at_node(t.root());
}

std::vector<TreePoint> random_points(const FiniteRTree& t, Rng& rng, int k) {
  std::vector<TreePoint> out;
  out.reserve(k);
  for (int i = 0; i < k; ++i) {
    // mix of nodes and edge-interior points
    if (rng.uniform01() < 0.3) {
      out.push_back(TreePoint::at_node(static_cast<NodeId>(rng.below(t.node_count()))));
    } else {
      out.push_back(random_point(t, rng));
    }
  }
  return out;
}

double span_length_oracle(const FiniteRTree& t, std::span<const TreePoint> gens) {
  double total = 0.0;
  for (NodeId c = 1; c < t.node_count(); ++c) {
    double covered = 0.0;
    TreePoint child_node = TreePoint::at_node(c);
    for (const auto& v : gens) {
      if (weak_ancestor(t, child_node, v)) {
        covered = t.edge_length(c);
        break;
      }
      if (!v.is_node() && v.edge == c) covered = std::max(covered, v.offset);
    }
    total += covered;
  }
  return total;
}

bool span_contains_oracle(const FiniteRTree& t, std::span<const TreePoint> gens,
                          const TreePoint& p) {
  for (const auto& v : gens)
    if (weak_ancestor(t, p, v)) return true;
  return false;
}

bool pruned_contains_oracle(const FiniteRTree& t, std::span<const TreePoint> cuts,
                            const TreePoint& p) {
  for (const auto& c : cuts)
    if (weak_ancestor(t, c, p)) return false;
  return true;
}

double prohorov_grid_oracle(std::span<const double> dist, size_t K, std::span<const double> m1,
                            std::span<const double> m2, double step) {
  auto feasible = [&](double eps) {
    for (uint32_t A = 0; A < (1u << K); ++A) {
      double m1A = 0.0, m2A = 0.0, m1Ae = 0.0, m2Ae = 0.0;
      for (size_t i = 0; i < K; ++i) {
        bool in_a = A & (1u << i);
        if (in_a) {
          m1A += m1[i];
          m2A += m2[i];
        }
        // i in A^eps iff some element of A is at distance < eps
        bool in_eps = false;
        for (size_t j = 0; j < K && !in_eps; ++j)
          if ((A & (1u << j)) && dist[j * K + i] < eps) in_eps = true;
        if (in_eps) {
          m1Ae += m1[i];
          m2Ae += m2[i];
        }
      }
      if (m2A > m1Ae + eps + 1e-12) return false;
      if (m1A > m2Ae + eps + 1e-12) return false;
    }
    return true;
  };
  double hi = 1.0;
  for (double d : dist) hi = std::max(hi, d);
  double t1 = 0.0, t2 = 0.0;
  for (double m : m1) t1 += m;
  for (double m : m2) t2 += m;
  hi = std::max({hi, t1, t2}) + step;
  for (double eps = step; eps <= hi + step; eps += step) {
    if (feasible(eps)) return eps;
  }
  return hi;
}

std::shared_ptr<const FiniteRTree> gw_free(const OffspringDistribution& eta, Rng& rng,
                                           int max_vertices) {
  std::vector<FiniteRTree::NodeSpec> spec;
  spec.push_back({kNoNode, 0.0});
  // breadth-first branching; order within the tree is generation order
  std::vector<NodeId> frontier{0};
  while (!frontier.empty()) {
    std::vector<NodeId> next;
    for (NodeId v : frontier) {
      long c = eta.sample(rng);
      for (long k = 0; k < c; ++k) {
        if (static_cast<int>(spec.size()) >= max_vertices) return nullptr;
        NodeId id = static_cast<NodeId>(spec.size());
        spec.push_back({v, 1.0});
        next.push_back(id);
      }
    }
    frontier = std::move(next);
  }
  return std::make_shared<FiniteRTree>(std::move(spec));
}

std::shared_ptr<const FiniteRTree> gw_rejection(const OffspringDistribution& eta, int n_nodes,
                                                Rng& rng, long max_tries) {
  for (long i = 0; i < max_tries; ++i) {
    auto t = gw_free(eta, rng, 4 * (n_nodes + 1) + 64);
    if (t && t->node_count() == n_nodes + 1) return t;
  }
  throw std::domain_error("gw_rejection: budget exhausted");
}

std::vector<NaiveEvent> naive_ppp_prune(const BiMeasureTree& x, double horizon, Rng& rng) {
  std::vector<NaiveEvent> events;
  double mass = x.nu().total();
  if (!(mass > 0.0) || !(horizon > 0.0)) return events;
  long k = rng.poisson(horizon * mass);
  events.reserve(k);
  for (long i = 0; i < k; ++i)
    events.push_back({horizon * rng.uniform01(), x.nu().sample(rng), false});
  std::sort(events.begin(), events.end(),
            [](const NaiveEvent& a, const NaiveEvent& b) { return a.time < b.time; });
  std::vector<TreePoint> effective;
  for (auto& ev : events) {
    if (pruned_contains_oracle(x.tree(), effective, ev.point)) {
      ev.effective = true;
      effective.push_back(ev.point);
    }
  }
  return events;
}

TreeMeasure random_measure(std::shared_ptr<const FiniteRTree> tree, Rng& rng, bool with_length,
                           int max_atoms) {
  const FiniteRTree& t = *tree;
  std::vector<double> coeffs(t.node_count(), 0.0);
  if (with_length) {
    for (NodeId v = 1; v < t.node_count(); ++v)
      if (rng.uniform01() < 0.7) coeffs[v] = 0.2 + rng.uniform01();
  }
  std::vector<Atom> atoms;
  int n_atoms = static_cast<int>(rng.below(max_atoms + 1));
  for (int i = 0; i < n_atoms; ++i) {
    TreePoint p = rng.uniform01() < 0.4
                      ? TreePoint::at_node(static_cast<NodeId>(rng.below(t.node_count())))
                      : random_point(t, rng);
    atoms.push_back({p, 0.1 + rng.uniform01()});
  }
  return TreeMeasure::make(std::move(tree), coeffs, std::move(atoms));
}

BiMeasureTree random_atomic_instance(Rng& rng, int max_mu_atoms, bool atomic_nu, int max_nodes) {
  while (true) {
    auto tree = random_tree(rng, max_nodes);
    int k = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_mu_atoms)));
    std::vector<Atom> mu_atoms;
    for (int i = 0; i < k; ++i) {
      TreePoint p = rng.uniform01() < 0.4
                        ? TreePoint::at_node(static_cast<NodeId>(rng.below(tree->node_count())))
                        : random_point(*tree, rng);
      mu_atoms.push_back({p, 0.1 + rng.uniform01()});
    }
    TreeMeasure mu = TreeMeasure::atoms_only(tree, std::move(mu_atoms));
    TreeMeasure nu = random_measure(tree, rng, !atomic_nu, 4);
    if (!(nu.total() > 0.0)) continue;
    // atomic mu has no mu-leaves, so the bi-measure conditions always hold
    return BiMeasureTree(tree, std::move(mu), std::move(nu));
  }
}

std::shared_ptr<const FiniteRTree> cherry() {
  return std::make_shared<FiniteRTree>(std::vector<FiniteRTree::NodeSpec>{
      {kNoNode, 0.0}, {0, 1.0}, {1, 1.0}, {1, 1.0}});
}

}  // namespace bimt::test
