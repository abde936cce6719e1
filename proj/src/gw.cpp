#include "gw.hpp"

#include <functional>
#include <stdexcept>
#include <vector>

namespace bimt {

std::shared_ptr<const FiniteRTree> tree_from_offspring_sequence(std::span<const int> counts) {
  const int v_total = static_cast<int>(counts.size());
  if (v_total == 0) throw std::invalid_argument("empty offspring sequence");
  long sum = 0;
  for (int c : counts) sum += c;
  if (sum != v_total - 1) throw std::invalid_argument("offspring sequence does not code a tree");
  std::vector<FiniteRTree::NodeSpec> spec;
  spec.reserve(v_total);
  spec.push_back({kNoNode, 0.0});
  // preorder: a stack of (node id, children still owed)
  std::vector<std::pair<NodeId, int>> stack;
  stack.emplace_back(0, counts[0]);
  for (int i = 1; i < v_total; ++i) {
    while (!stack.empty() && stack.back().second == 0) stack.pop_back();
    if (stack.empty()) throw std::invalid_argument("offspring sequence does not code a tree");
    NodeId parent = stack.back().first;
    --stack.back().second;
    NodeId id = static_cast<NodeId>(spec.size());
    spec.push_back({parent, 1.0});
    stack.emplace_back(id, counts[i]);
  }
  while (!stack.empty() && stack.back().second == 0) stack.pop_back();
  if (!stack.empty()) throw std::invalid_argument("offspring sequence does not code a tree");
  return std::make_shared<FiniteRTree>(std::move(spec));
}

std::vector<int> offspring_sequence(const FiniteRTree& tree) {
  std::vector<int> out;
  out.reserve(tree.node_count());
  std::vector<std::pair<NodeId, int>> walk;
  walk.emplace_back(tree.root(), 0);
  out.push_back(tree.child_count(tree.root()));
  while (!walk.empty()) {
    auto& [v, idx] = walk.back();
    auto kids = tree.children(v);
    if (idx < static_cast<int>(kids.size())) {
      NodeId c = kids[idx++];
      out.push_back(tree.child_count(c));
      walk.emplace_back(c, 0);
    } else {
      walk.pop_back();
    }
  }
  return out;
}

std::vector<std::pair<std::vector<int>, double>> enumerate_conditioned_shapes(
    const OffspringDistribution& eta, int n_nodes) {
  if (n_nodes < 1 || n_nodes > 12)
    throw std::invalid_argument("shape enumeration supported for 1..12 nodes");
  const int v_total = n_nodes + 1;
  std::vector<std::pair<std::vector<int>, double>> out;
  // depth-first over offspring sequences (c_1..c_V) with the Lukasiewicz
  // constraint: partial sums of (c_i - 1) stay >= 0 until -1 at the end
  std::vector<int> seq;
  double weight = 1.0;
  auto pmf = [&](int k) {
    return k <= eta.max_k() ? eta.pmf[static_cast<size_t>(k)] : 0.0;
  };
  std::function<void(int, long)> rec = [&](int pos, long open) {
    // open = 1 + sum of (c_i - 1) so far = vertices still awaiting children
    if (pos == v_total) {
      if (open == 0 && weight > 0.0) out.emplace_back(seq, weight);
      return;
    }
    if (open <= 0) return;
    int remaining = v_total - pos;
    for (int c = 0; c <= v_total - 1; ++c) {
      long next_open = open + c - 1;
      if (next_open > remaining - 1) continue;  // cannot close in time
      double p = pmf(c);
      if (p <= 0.0) continue;
      seq.push_back(c);
      weight *= p;
      rec(pos + 1, next_open);
      weight /= p;
      seq.pop_back();
    }
  };
  rec(0, 1);
  double total = 0.0;
  for (const auto& [s, w] : out) total += w;
  if (!(total > 0.0))
    throw std::domain_error("no tree of the requested size has positive probability");
  for (auto& [s, w] : out) w /= total;
  return out;
}

std::shared_ptr<const FiniteRTree> gw_conditioned(const OffspringDistribution& eta, int n_nodes,
                                                  Rng& rng, long max_tries) {
  if (n_nodes < 1) throw std::invalid_argument("gw_conditioned: need at least one node");
  const int v_total = n_nodes + 1;  // vertices including the root
  std::vector<int> counts(v_total);
  bool ok = false;
  for (long attempt = 0; attempt < max_tries; ++attempt) {
    long sum = 0;
    for (int i = 0; i < v_total; ++i) {
      counts[i] = static_cast<int>(eta.sample(rng));
      sum += counts[i];
    }
    if (sum == v_total - 1) {
      ok = true;
      break;
    }
  }
  if (!ok)
    throw std::domain_error(
        "gw_conditioned: offspring-sum rejection budget exhausted; the requested "
        "node count is impossible or extremely unlikely under this family");

  // cycle lemma: with steps x_i = counts_i - 1 summing to -1, rotation to just
  // after the first prefix-sum minimum is the unique tree coding
  int best_pos = -1;
  long best = 1, prefix = 0;
  for (int i = 0; i < v_total; ++i) {
    prefix += counts[i] - 1;
    if (prefix < best) {
      best = prefix;
      best_pos = i;
    }
  }
  std::vector<int> rotated(v_total);
  for (int i = 0; i < v_total; ++i) rotated[i] = counts[(best_pos + 1 + i) % v_total];
  // cheap sanity on the rotation invariant
  long check = 0;
  for (int i = 0; i < v_total - 1; ++i) {
    check += rotated[i] - 1;
    if (check < 0) throw std::logic_error("cycle lemma rotation failed");
  }
  return tree_from_offspring_sequence(rotated);
}

}  // namespace bimt
