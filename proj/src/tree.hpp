#pragma once
// Finite rooted R-trees with positive real edge lengths, plus the point,
// span and pruning geometry on them. Trees are immutable after construction
// and safe to share across threads; spans and pruned views are value types
// referencing an immutable base tree.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace bimt {

using NodeId = int32_t;
constexpr NodeId kNoNode = -1;

// A location on the tree: either a node, or a point strictly inside the edge
// leading into `edge` (offset measured from the parent endpoint). Points are
// kept canonical (offset in the open interval), so equality is structural.
struct TreePoint {
  NodeId node = kNoNode;
  NodeId edge = kNoNode;
  double offset = 0.0;

  bool is_node() const { return node != kNoNode; }
  NodeId carrier() const { return is_node() ? node : edge; }
  static TreePoint at_node(NodeId v) { return TreePoint{v, kNoNode, 0.0}; }
  static TreePoint on_edge(NodeId child, double off) { return TreePoint{kNoNode, child, off}; }
  bool operator==(const TreePoint&) const = default;
};

class FiniteRTree {
 public:
  struct NodeSpec {
    NodeId parent;       // kNoNode for the root
    double edge_length;  // ignored for the root; must be > 0 otherwise
  };

  // Nodes must be listed parent-before-child with dense ids starting at 0,
  // so node 0 is the root. Child order is the listed order.
  explicit FiniteRTree(std::vector<NodeSpec> nodes);

  static std::shared_ptr<const FiniteRTree> single_edge(double length);
  static std::shared_ptr<const FiniteRTree> root_only();

  int node_count() const { return static_cast<int>(parent_.size()); }
  NodeId root() const { return 0; }
  NodeId parent(NodeId v) const { return parent_[check(v)]; }
  double edge_length(NodeId v) const;  // length of the edge into v (v != root)
  double height(NodeId v) const { return height_[check(v)]; }
  int depth(NodeId v) const { return depth_[check(v)]; }
  std::span<const NodeId> children(NodeId v) const;
  int child_count(NodeId v) const;
  bool is_leaf(NodeId v) const { return child_count(v) == 0; }
  double total_length() const { return total_length_; }
  double max_height() const { return max_height_; }
  int edge_count() const { return node_count() - 1; }

  // a lies on [root, b] (as nodes)
  bool node_on_root_path(NodeId a, NodeId b) const {
    return tin_[check(a)] <= tin_[check(b)] && tout_[b] <= tout_[a];
  }
  NodeId node_lca(NodeId a, NodeId b) const;
  std::vector<NodeId> leaves() const;

 private:
  NodeId check(NodeId v) const {
    if (v < 0 || v >= node_count()) throw std::invalid_argument("invalid node id");
    return v;
  }
  std::vector<NodeId> parent_;
  std::vector<double> length_;
  std::vector<double> height_;
  std::vector<int> depth_;
  std::vector<int> tin_, tout_;
  std::vector<NodeId> child_list_;   // CSR
  std::vector<int> child_begin_;
  double total_length_ = 0.0;
  double max_height_ = 0.0;
};

// Canonicalizes an edge location: offset 0 becomes the parent node, offset
// equal to the edge length becomes the child. Throws on out-of-range input.
TreePoint make_point(const FiniteRTree& t, NodeId child, double offset);
void validate_point(const FiniteRTree& t, const TreePoint& p);

double point_height(const FiniteRTree& t, const TreePoint& p);
// a in [root, b]
bool weak_ancestor(const FiniteRTree& t, const TreePoint& a, const TreePoint& b);
TreePoint branch_point(const FiniteRTree& t, const TreePoint& x, const TreePoint& y);
double distance(const FiniteRTree& t, const TreePoint& x, const TreePoint& y);

// Symmetric matrix of pairwise distances for (root, p_1, ..., p_n); row and
// column 0 belong to the root.
struct DistMatrix {
  int n = 0;  // matrix is (n+1) x (n+1)
  std::vector<double> d;
  double operator()(int i, int j) const { return d[static_cast<size_t>(i) * (n + 1) + j]; }
  double& at(int i, int j) { return d[static_cast<size_t>(i) * (n + 1) + j]; }
};
DistMatrix distance_matrix(const FiniteRTree& t, std::span<const TreePoint> points);

// The subtree spanned by the root and a nonempty point list. Per edge the
// covered part is always a prefix [0, h] from the parent end.
class Span {
 public:
  Span(const FiniteRTree& tree, std::span<const TreePoint> points);

  const FiniteRTree& tree() const { return *tree_; }
  bool contains(const TreePoint& p) const;
  double total_length() const { return length_; }
  double covered_prefix(NodeId child) const;
  std::span<const std::pair<NodeId, double>> covered() const { return cover_; }
  std::span<const TreePoint> points() const { return points_; }

 private:
  const FiniteRTree* tree_;
  std::vector<std::pair<NodeId, double>> cover_;  // sorted by child id
  std::vector<TreePoint> points_;
  double length_ = 0.0;
};

// Lazy description of T^{cuts}: the base tree minus, for every cut point v,
// all w with v in [root, w]. A cut at the root empties the tree.
class PrunedView {
 public:
  PrunedView(std::shared_ptr<const FiniteRTree> tree, std::vector<TreePoint> cuts);

  const FiniteRTree& tree() const { return *tree_; }
  std::shared_ptr<const FiniteRTree> tree_ptr() const { return tree_; }
  std::span<const TreePoint> cuts() const { return cuts_; }
  bool empty_tree() const { return !root_alive_; }
  bool node_alive(NodeId v) const { return alive_[v]; }
  // Surviving half-open prefix [0, h) of the edge into v; equals the edge
  // length when alive and untouched. Zero when the whole edge is gone.
  double kept_prefix(NodeId v) const { return kept_[v]; }
  bool contains(const TreePoint& p) const;

 private:
  std::shared_ptr<const FiniteRTree> tree_;
  std::vector<TreePoint> cuts_;
  std::vector<char> alive_;    // node survives
  std::vector<double> kept_;   // per-edge surviving prefix (by child id)
  bool root_alive_ = true;
};

// Materialization of a pruned view (or a span) into a fresh tree. Stumps are
// closed by inserting a node at each cut position; `node_map[old]` gives the
// new id of a surviving old node (kNoNode otherwise), `tip_of[old_child]`
// the new node closing a truncated edge.
struct Materialized {
  std::shared_ptr<const FiniteRTree> tree;
  std::vector<NodeId> node_map;
  std::vector<NodeId> tip_of;
  TreePoint map_point(const FiniteRTree& base, const TreePoint& p) const;
};

Materialized materialize(const PrunedView& view);
Materialized materialize(const Span& span);

}  // namespace bimt
