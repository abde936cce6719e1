#include "tree.hpp"

#include <algorithm>
#include <cmath>

namespace bimt {

FiniteRTree::FiniteRTree(std::vector<NodeSpec> nodes) {
  const int n = static_cast<int>(nodes.size());
  if (n == 0) throw std::invalid_argument("tree must have at least the root");
  if (nodes[0].parent != kNoNode) throw std::invalid_argument("node 0 must be the root");
  parent_.resize(n);
  length_.resize(n);
  height_.resize(n);
  depth_.resize(n);
  parent_[0] = kNoNode;
  length_[0] = 0.0;
  height_[0] = 0.0;
  depth_[0] = 0;
  std::vector<int> child_count(n, 0);
  for (NodeId v = 1; v < n; ++v) {
    const auto& s = nodes[v];
    if (s.parent == kNoNode) throw std::invalid_argument("multiple roots");
    if (s.parent < 0 || s.parent >= v)
      throw std::invalid_argument("nodes must be listed parent-before-child");
    if (!(s.edge_length > 0.0) || !std::isfinite(s.edge_length))
      throw std::invalid_argument("edge lengths must be strictly positive and finite");
    parent_[v] = s.parent;
    length_[v] = s.edge_length;
    height_[v] = height_[s.parent] + s.edge_length;
    depth_[v] = depth_[s.parent] + 1;
    total_length_ += s.edge_length;
    max_height_ = std::max(max_height_, height_[v]);
    ++child_count[s.parent];
  }
  child_begin_.assign(n + 1, 0);
  for (NodeId v = 0; v < n; ++v) child_begin_[v + 1] = child_begin_[v] + child_count[v];
  child_list_.resize(n - 1 >= 0 ? n - 1 : 0);
  std::vector<int> fill(child_begin_.begin(), child_begin_.end() - 1);
  for (NodeId v = 1; v < n; ++v) child_list_[fill[parent_[v]]++] = v;

  // Euler tour for O(1) ancestor tests; children in stored order.
  tin_.resize(n);
  tout_.resize(n);
  int clock = 0;
  std::vector<std::pair<NodeId, int>> stack;
  stack.emplace_back(0, 0);
  tin_[0] = clock++;
  while (!stack.empty()) {
    auto& [v, idx] = stack.back();
    auto kids = children(v);
    if (idx < static_cast<int>(kids.size())) {
      NodeId c = kids[idx++];
      tin_[c] = clock++;
      stack.emplace_back(c, 0);
    } else {
      tout_[v] = clock++;
      stack.pop_back();
    }
  }
}

std::shared_ptr<const FiniteRTree> FiniteRTree::single_edge(double length) {
  return std::make_shared<FiniteRTree>(
      std::vector<NodeSpec>{{kNoNode, 0.0}, {0, length}});
}

std::shared_ptr<const FiniteRTree> FiniteRTree::root_only() {
  return std::make_shared<FiniteRTree>(std::vector<NodeSpec>{{kNoNode, 0.0}});
}

double FiniteRTree::edge_length(NodeId v) const {
  check(v);
  if (v == 0) throw std::invalid_argument("root has no parent edge");
  return length_[v];
}

std::span<const NodeId> FiniteRTree::children(NodeId v) const {
  check(v);
  return {child_list_.data() + child_begin_[v],
          static_cast<size_t>(child_begin_[v + 1] - child_begin_[v])};
}

int FiniteRTree::child_count(NodeId v) const {
  check(v);
  return child_begin_[v + 1] - child_begin_[v];
}

NodeId FiniteRTree::node_lca(NodeId a, NodeId b) const {
  check(a);
  check(b);
  while (a != b) {
    if (depth_[a] < depth_[b]) std::swap(a, b);
    a = parent_[a];
  }
  return a;
}

std::vector<NodeId> FiniteRTree::leaves() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < node_count(); ++v)
    if (is_leaf(v)) out.push_back(v);
  return out;
}

TreePoint make_point(const FiniteRTree& t, NodeId child, double offset) {
  if (child <= 0 || child >= t.node_count())
    throw std::invalid_argument("make_point: invalid edge (child id)");
  double len = t.edge_length(child);
  if (offset < 0.0 || offset > len || !std::isfinite(offset))
    throw std::invalid_argument("make_point: offset outside [0, edge length]");
  if (offset == 0.0) return TreePoint::at_node(t.parent(child));
  if (offset == len) return TreePoint::at_node(child);
  return TreePoint::on_edge(child, offset);
}

void validate_point(const FiniteRTree& t, const TreePoint& p) {
  if (p.is_node()) {
    if (p.node < 0 || p.node >= t.node_count())
      throw std::invalid_argument("point references invalid node");
    return;
  }
  if (p.edge <= 0 || p.edge >= t.node_count())
    throw std::invalid_argument("point references invalid edge");
  if (!(p.offset > 0.0) || !(p.offset < t.edge_length(p.edge)))
    throw std::invalid_argument("edge point offset must lie strictly inside the edge");
}

double point_height(const FiniteRTree& t, const TreePoint& p) {
  validate_point(t, p);
  if (p.is_node()) return t.height(p.node);
  return t.height(t.parent(p.edge)) + p.offset;
}

bool weak_ancestor(const FiniteRTree& t, const TreePoint& a, const TreePoint& b) {
  validate_point(t, a);
  validate_point(t, b);
  NodeId cb = b.carrier();
  if (a.is_node()) {
    if (!t.node_on_root_path(a.node, cb)) return false;
    // a node above b's carrier always lies on [root, b]; the one exception is
    // b strictly inside the edge below that very node
    return !(a.node == cb && !b.is_node());
  }
  if (!t.node_on_root_path(a.edge, cb)) return false;
  if (cb == a.edge && !b.is_node()) return a.offset <= b.offset;
  return true;  // b at or below the child end of a's edge
}

TreePoint branch_point(const FiniteRTree& t, const TreePoint& x, const TreePoint& y) {
  validate_point(t, x);
  validate_point(t, y);
  if (weak_ancestor(t, x, y)) return x;
  if (weak_ancestor(t, y, x)) return y;
  NodeId l = t.node_lca(x.carrier(), y.carrier());
  // neither point is an ancestor of the other, so both sit strictly above l
  return TreePoint::at_node(l);
}

double distance(const FiniteRTree& t, const TreePoint& x, const TreePoint& y) {
  TreePoint b = branch_point(t, x, y);
  return point_height(t, x) + point_height(t, y) - 2.0 * point_height(t, b);
}

DistMatrix distance_matrix(const FiniteRTree& t, std::span<const TreePoint> points) {
  DistMatrix m;
  m.n = static_cast<int>(points.size());
  m.d.assign(static_cast<size_t>(m.n + 1) * (m.n + 1), 0.0);
  std::vector<TreePoint> all;
  all.reserve(points.size() + 1);
  all.push_back(TreePoint::at_node(t.root()));
  all.insert(all.end(), points.begin(), points.end());
  for (int i = 0; i <= m.n; ++i)
    for (int j = i + 1; j <= m.n; ++j) {
      double d = distance(t, all[i], all[j]);
      m.at(i, j) = d;
      m.at(j, i) = d;
    }
  return m;
}

// ---------------------------------------------------------------------------
// Span

Span::Span(const FiniteRTree& tree, std::span<const TreePoint> points) : tree_(&tree) {
  if (points.empty()) throw std::invalid_argument("span: point list must be nonempty");
  points_.assign(points.begin(), points.end());
  std::vector<double> prefix(tree.node_count(), 0.0);
  for (const auto& p : points_) {
    validate_point(tree, p);
    NodeId v;
    if (p.is_node()) {
      v = p.node;
    } else {
      prefix[p.edge] = std::max(prefix[p.edge], p.offset);
      v = tree.parent(p.edge);
    }
    // mark full edges up to the root, stopping at already-full coverage
    while (v != tree.root()) {
      double len = tree.edge_length(v);
      if (prefix[v] == len) break;
      prefix[v] = len;
      v = tree.parent(v);
    }
  }
  for (NodeId v = 1; v < tree.node_count(); ++v) {
    if (prefix[v] > 0.0) {
      cover_.emplace_back(v, prefix[v]);
      length_ += prefix[v];
    }
  }
}

double Span::covered_prefix(NodeId child) const {
  auto it = std::lower_bound(cover_.begin(), cover_.end(), child,
                             [](const auto& a, NodeId b) { return a.first < b; });
  if (it == cover_.end() || it->first != child) return 0.0;
  return it->second;
}

bool Span::contains(const TreePoint& p) const {
  validate_point(*tree_, p);
  if (p.is_node()) {
    if (p.node == tree_->root()) return true;
    return covered_prefix(p.node) == tree_->edge_length(p.node);
  }
  return p.offset <= covered_prefix(p.edge);
}

// ---------------------------------------------------------------------------
// PrunedView

PrunedView::PrunedView(std::shared_ptr<const FiniteRTree> tree, std::vector<TreePoint> cuts)
    : tree_(std::move(tree)), cuts_(std::move(cuts)) {
  const FiniteRTree& t = *tree_;
  const int n = t.node_count();
  alive_.assign(n, 1);
  kept_.resize(n, 0.0);
  for (NodeId v = 1; v < n; ++v) kept_[v] = t.edge_length(v);
  // lowest cut on each edge; a node cut kills the node but spares the edge
  std::vector<char> node_cut(n, 0);
  for (const auto& c : cuts_) {
    validate_point(t, c);
    if (c.is_node()) {
      node_cut[c.node] = 1;
    } else {
      kept_[c.edge] = std::min(kept_[c.edge], c.offset);
    }
  }
  if (node_cut[t.root()]) {
    root_alive_ = false;
    std::fill(alive_.begin(), alive_.end(), 0);
    std::fill(kept_.begin(), kept_.end(), 0.0);
    return;
  }
  alive_[t.root()] = 1;
  for (NodeId v = 1; v < n; ++v) {
    bool parent_alive = alive_[t.parent(v)];
    if (!parent_alive) {
      alive_[v] = 0;
      kept_[v] = 0.0;
      continue;
    }
    alive_[v] = (!node_cut[v] && kept_[v] == t.edge_length(v)) ? 1 : 0;
  }
}

bool PrunedView::contains(const TreePoint& p) const {
  validate_point(*tree_, p);
  if (!root_alive_) return false;
  if (p.is_node()) return alive_[p.node];
  if (!alive_[tree_->parent(p.edge)]) return false;
  return p.offset < kept_[p.edge];
}

// ---------------------------------------------------------------------------
// Materialization

TreePoint Materialized::map_point(const FiniteRTree& base, const TreePoint& p) const {
  if (p.is_node()) {
    NodeId nv = node_map[p.node];
    if (nv == kNoNode) throw std::invalid_argument("point not in the materialized set");
    return TreePoint::at_node(nv);
  }
  // an edge point maps into the (possibly truncated) image of its edge
  NodeId child_img = node_map[p.edge] != kNoNode ? node_map[p.edge] : tip_of[p.edge];
  if (child_img == kNoNode) throw std::invalid_argument("point not in the materialized set");
  double len = tree->edge_length(child_img);
  if (p.offset > len) throw std::invalid_argument("point not in the materialized set");
  if (p.offset == len) return TreePoint::at_node(child_img);
  return TreePoint::on_edge(child_img, p.offset);
}

namespace {

// Shared builder: `keep` gives per-edge retained prefix (0 = drop edge,
// len = keep whole edge and child node, otherwise insert a tip node).
// `node_kept(v)` refines whether a fully-reached node itself survives.
template <typename NodeKept>
Materialized build_materialized(const FiniteRTree& base, const std::vector<double>& keep,
                                NodeKept node_kept, bool root_present) {
  Materialized out;
  const int n = base.node_count();
  out.node_map.assign(n, kNoNode);
  out.tip_of.assign(n, kNoNode);
  std::vector<FiniteRTree::NodeSpec> spec;
  if (!root_present) {
    out.tree = FiniteRTree::root_only();
    return out;
  }
  spec.push_back({kNoNode, 0.0});
  out.node_map[base.root()] = 0;
  for (NodeId v = 1; v < n; ++v) {
    double kp = keep[v];
    if (kp <= 0.0) continue;
    NodeId parent_img = out.node_map[base.parent(v)];
    if (parent_img == kNoNode) continue;  // detached by an ancestor cut
    double len = base.edge_length(v);
    NodeId img = static_cast<NodeId>(spec.size());
    spec.push_back({parent_img, kp});
    if (kp == len && node_kept(v)) {
      out.node_map[v] = img;
    } else {
      out.tip_of[v] = img;
    }
  }
  out.tree = std::make_shared<FiniteRTree>(std::move(spec));
  return out;
}

}  // namespace

Materialized materialize(const PrunedView& view) {
  const FiniteRTree& t = view.tree();
  std::vector<double> keep(t.node_count(), 0.0);
  for (NodeId v = 1; v < t.node_count(); ++v) keep[v] = view.kept_prefix(v);
  return build_materialized(t, keep, [&](NodeId v) { return view.node_alive(v); },
                            !view.empty_tree());
}

Materialized materialize(const Span& span) {
  const FiniteRTree& t = span.tree();
  std::vector<double> keep(t.node_count(), 0.0);
  for (const auto& [child, prefix] : span.covered()) keep[child] = prefix;
  return build_materialized(t, keep, [](NodeId) { return true; }, true);
}

}  // namespace bimt
