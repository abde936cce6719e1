#include "excursion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bimt {

Excursion::Excursion(std::vector<std::pair<double, double>> pts) : breakpoints(std::move(pts)) {
  if (breakpoints.size() < 2) throw std::invalid_argument("excursion needs >= 2 breakpoints");
  if (breakpoints.front().first != 0.0 || breakpoints.back().first != 1.0)
    throw std::invalid_argument("excursion must span [0, 1]");
  if (breakpoints.front().second != 0.0 || breakpoints.back().second != 0.0)
    throw std::invalid_argument("excursion endpoints must have value 0");
  for (size_t i = 0; i < breakpoints.size(); ++i) {
    auto [t, v] = breakpoints[i];
    if (!std::isfinite(t) || !std::isfinite(v) || v < 0.0)
      throw std::invalid_argument("excursion values must be finite and >= 0");
    if (i > 0 && !(t > breakpoints[i - 1].first))
      throw std::invalid_argument("excursion times must be strictly increasing");
  }
}

double Excursion::value(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 0.0;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t,
                             [](double x, const auto& bp) { return x < bp.first; });
  auto [t1, v1] = *it;
  auto [t0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

Excursion Excursion::scaled(double height_factor) const {
  if (!(height_factor > 0.0)) throw std::invalid_argument("height factor must be > 0");
  auto pts = breakpoints;
  for (auto& [t, v] : pts) v *= height_factor;
  return Excursion(std::move(pts));
}

Excursion contour(const FiniteRTree& tree) {
  const int n_edges = tree.edge_count();
  if (n_edges < 1) throw std::invalid_argument("contour: tree needs at least one edge");
  std::vector<double> heights;
  heights.reserve(2 * n_edges + 1);
  heights.push_back(0.0);
  std::vector<std::pair<NodeId, int>> walk;
  walk.emplace_back(tree.root(), 0);
  while (!walk.empty()) {
    auto& [v, idx] = walk.back();
    auto kids = tree.children(v);
    if (idx < static_cast<int>(kids.size())) {
      NodeId c = kids[idx++];
      heights.push_back(tree.height(c));
      walk.emplace_back(c, 0);
    } else {
      walk.pop_back();
      if (!walk.empty()) heights.push_back(tree.height(walk.back().first));
    }
  }
  std::vector<std::pair<double, double>> pts;
  pts.reserve(heights.size());
  const double denom = static_cast<double>(heights.size() - 1);
  for (size_t k = 0; k < heights.size(); ++k)
    pts.emplace_back(static_cast<double>(k) / denom, heights[k]);
  pts.back().first = 1.0;
  return Excursion(std::move(pts));
}

namespace {

struct BuildNode {
  int parent = -1;
  double height = 0.0;
  double coeff = 0.0;  // accumulated length density on the edge into this node
  double atom = 0.0;
  std::vector<int> children;
};

}  // namespace

GlueResult glue(const Excursion& e) {
  std::vector<BuildNode> nodes(1);  // 0 = root at height 0
  std::vector<int> spine{0};        // root path to the current position

  auto new_child = [&](int parent, double height) {
    int id = static_cast<int>(nodes.size());
    nodes.push_back({parent, height, 0.0, 0.0, {}});
    nodes[parent].children.push_back(id);
    return id;
  };

  const auto& bp = e.breakpoints;
  for (size_t i = 0; i + 1 < bp.size(); ++i) {
    double h0 = bp[i].second, h1 = bp[i + 1].second;
    double dt = bp[i + 1].first - bp[i].first;
    if (h1 > h0) {
      int u = new_child(spine.back(), h1);
      nodes[u].coeff += dt / (h1 - h0);
      spine.push_back(u);
    } else if (h1 < h0) {
      double density = dt / (h0 - h1);
      while (true) {
        int top = spine.back();
        int below = spine[spine.size() - 2];
        double hb = nodes[below].height;
        if (hb >= h1) {
          nodes[top].coeff += density;
          spine.pop_back();
          if (hb == h1) break;
        } else {
          // split the edge below->top at height h1; the upper part keeps the
          // accumulated density and receives this fall's share
          int mid = static_cast<int>(nodes.size());
          nodes.push_back({below, h1, nodes[top].coeff, 0.0, {top}});
          auto& kids = nodes[below].children;
          *std::find(kids.begin(), kids.end(), top) = mid;
          nodes[top].parent = mid;
          nodes[top].coeff += density;
          spine.back() = mid;
          break;
        }
      }
    } else {
      nodes[spine.back()].atom += dt;  // flat stretch collapses to one point
    }
  }

  // renumber depth-first so ids are parent-before-child in traversal order
  std::vector<NodeId> new_id(nodes.size(), kNoNode);
  std::vector<int> order;
  order.reserve(nodes.size());
  std::vector<std::pair<int, int>> walk{{0, 0}};
  new_id[0] = 0;
  order.push_back(0);
  while (!walk.empty()) {
    auto& [v, idx] = walk.back();
    if (idx < static_cast<int>(nodes[v].children.size())) {
      int c = nodes[v].children[idx++];
      new_id[c] = static_cast<NodeId>(order.size());
      order.push_back(c);
      walk.emplace_back(c, 0);
    } else {
      walk.pop_back();
    }
  }
  std::vector<FiniteRTree::NodeSpec> spec;
  spec.reserve(order.size());
  spec.push_back({kNoNode, 0.0});
  for (size_t k = 1; k < order.size(); ++k) {
    const auto& nd = nodes[order[k]];
    spec.push_back({new_id[nd.parent], nd.height - nodes[nd.parent].height});
  }
  auto tree = std::make_shared<FiniteRTree>(std::move(spec));
  std::vector<double> coeffs(order.size(), 0.0);
  std::vector<Atom> atoms;
  for (size_t k = 0; k < order.size(); ++k) {
    const auto& nd = nodes[order[k]];
    if (k > 0) coeffs[k] = nd.coeff;
    if (nd.atom > 0.0) atoms.push_back({TreePoint::at_node(static_cast<NodeId>(k)), nd.atom});
  }
  TreeMeasure mu = TreeMeasure::make(tree, coeffs, std::move(atoms));
  return {tree, std::move(mu)};
}

}  // namespace bimt
