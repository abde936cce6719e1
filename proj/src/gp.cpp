#include "gp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prohorov.hpp"

namespace bimt {

namespace {

// the point of [root, top] at height h (h <= height(top))
TreePoint point_on_root_path(const FiniteRTree& t, const TreePoint& top, double h) {
  if (h <= 0.0) return TreePoint::at_node(t.root());
  double h_top = point_height(t, top);
  if (h >= h_top) return top;
  NodeId carrier = top.carrier();
  // descend the carrier chain until the edge containing height h
  NodeId v = carrier;
  while (v != t.root() && t.height(t.parent(v)) >= h) v = t.parent(v);
  // now height(parent(v)) < h <= height(v) along the path
  return make_point(t, v, h - t.height(t.parent(v)));
}

struct Side {
  const PointedSample* s;
  std::vector<TreePoint> grid;    // anchors + segment grid + measure support
  std::vector<double> mass;       // discretized nu mass per grid point (0 for plain grid)
  std::vector<double> height;
};

double grid_step(const PointedSample& a, const PointedSample& b, double grid_frac,
                 size_t max_points) {
  double h = std::max({a.tree->max_height(), b.tree->max_height(), 1e-9});
  double step = std::max(grid_frac * h, 1e-12);
  double total_len = a.tree->total_length() + b.tree->total_length();
  if (total_len / step > static_cast<double>(max_points))
    step = total_len / static_cast<double>(max_points);
  return step;
}

Side build_side(const PointedSample& s, double step) {
  Side side;
  side.s = &s;
  const FiniteRTree& t = *s.tree;
  std::vector<TreePoint> pts;
  pts.push_back(TreePoint::at_node(t.root()));
  for (const auto& u : s.marked) pts.push_back(u);
  for (size_t i = 0; i < s.marked.size(); ++i)
    for (size_t j = i + 1; j < s.marked.size(); ++j)
      pts.push_back(branch_point(t, s.marked[i], s.marked[j]));
  for (NodeId v = 0; v < t.node_count(); ++v) pts.push_back(TreePoint::at_node(v));
  for (NodeId v = 1; v < t.node_count(); ++v) {
    double len = t.edge_length(v);
    int k = static_cast<int>(std::floor(len / step));
    for (int i = 1; i <= k; ++i) {
      double off = i * step;
      if (off < len) pts.push_back(make_point(t, v, off));
    }
  }
  auto atoms = s.nu.discretized(step);
  std::vector<double> atom_mass;
  for (const auto& a : atoms) {
    pts.push_back(a.point);
    atom_mass.push_back(a.mass);
  }
  // dedupe identical points, accumulating masses (mass entries align with the
  // tail of pts)
  size_t mass_begin = pts.size() - atoms.size();
  std::vector<TreePoint> uniq;
  std::vector<double> uniq_mass;
  for (size_t i = 0; i < pts.size(); ++i) {
    double m = i >= mass_begin ? atom_mass[i - mass_begin] : 0.0;
    auto it = std::find(uniq.begin(), uniq.end(), pts[i]);
    if (it == uniq.end()) {
      uniq.push_back(pts[i]);
      uniq_mass.push_back(m);
    } else {
      uniq_mass[static_cast<size_t>(it - uniq.begin())] += m;
    }
  }
  side.grid = std::move(uniq);
  side.mass = std::move(uniq_mass);
  side.height.reserve(side.grid.size());
  for (const auto& p : side.grid) side.height.push_back(point_height(t, p));
  return side;
}

// root-path stretch map from side `from` into side `to`
std::vector<TreePoint> stretch_map(const Side& from, const Side& to) {
  const FiniteRTree& ta = *from.s->tree;
  const FiniteRTree& tb = *to.s->tree;
  size_t n = from.s->marked.size();
  std::vector<double> ha(n), hb(n);
  for (size_t k = 0; k < n; ++k) {
    ha[k] = point_height(ta, from.s->marked[k]);
    hb[k] = point_height(tb, to.s->marked[k]);
  }
  std::vector<TreePoint> img;
  img.reserve(from.grid.size());
  for (size_t i = 0; i < from.grid.size(); ++i) {
    const TreePoint& x = from.grid[i];
    size_t k = n;  // first marked point whose root path contains x
    for (size_t c = 0; c < n; ++c) {
      if (weak_ancestor(ta, x, from.s->marked[c])) {
        k = c;
        break;
      }
    }
    if (k == n || ha[k] <= 0.0) {
      img.push_back(TreePoint::at_node(tb.root()));
      continue;
    }
    double h = from.height[i] * (hb[k] / ha[k]);
    img.push_back(point_on_root_path(tb, to.s->marked[k], h));
  }
  return img;
}

double objective_for_map(const Side& a, const Side& b) {
  const FiniteRTree& ta = *a.s->tree;
  const FiniteRTree& tb = *b.s->tree;
  std::vector<TreePoint> fimg = stretch_map(a, b);
  const size_t ka = a.grid.size(), kb = b.grid.size();

  // distances within each side and from images to the b-grid
  std::vector<double> da(ka * ka), db(kb * kb), dfb(ka * kb);
  for (size_t i = 0; i < ka; ++i)
    for (size_t j = i; j < ka; ++j) {
      double d = i == j ? 0.0 : distance(ta, a.grid[i], a.grid[j]);
      da[i * ka + j] = d;
      da[j * ka + i] = d;
    }
  for (size_t i = 0; i < kb; ++i)
    for (size_t j = i; j < kb; ++j) {
      double d = i == j ? 0.0 : distance(tb, b.grid[i], b.grid[j]);
      db[i * kb + j] = d;
      db[j * kb + i] = d;
    }
  std::vector<double> dff(ka * ka);
  for (size_t i = 0; i < ka; ++i)
    for (size_t j = i; j < ka; ++j) {
      double d = i == j ? 0.0 : distance(tb, fimg[i], fimg[j]);
      dff[i * ka + j] = d;
      dff[j * ka + i] = d;
    }
  for (size_t i = 0; i < ka; ++i)
    for (size_t j = 0; j < kb; ++j) dfb[i * kb + j] = distance(tb, fimg[i], b.grid[j]);

  // grid distortion of the map
  double dis = 0.0;
  for (size_t i = 0; i < ka; ++i)
    for (size_t j = 0; j < ka; ++j)
      dis = std::max(dis, std::fabs(da[i * ka + j] - dff[i * ka + j]));

  // union metric restricted to the grid: d(x_i, y_j) = min_z [r_a(x,z) +
  // r_b(f(z), y)] + dis/2
  const size_t K = ka + kb;
  std::vector<double> d(K * K, 0.0);
  for (size_t i = 0; i < ka; ++i)
    for (size_t j = 0; j < ka; ++j) d[i * K + j] = da[i * ka + j];
  for (size_t i = 0; i < kb; ++i)
    for (size_t j = 0; j < kb; ++j) d[(ka + i) * K + (ka + j)] = db[i * kb + j];
  for (size_t i = 0; i < ka; ++i) {
    for (size_t j = 0; j < kb; ++j) {
      double best = HUGE_VAL;
      for (size_t z = 0; z < ka; ++z)
        best = std::min(best, da[i * ka + z] + dfb[z * kb + j]);
      double val = best + 0.5 * dis;
      d[i * K + (ka + j)] = val;
      d[(ka + j) * K + i] = val;
    }
  }

  std::vector<double> m1(K, 0.0), m2(K, 0.0);
  for (size_t i = 0; i < ka; ++i) m1[i] = a.mass[i];
  for (size_t j = 0; j < kb; ++j) m2[ka + j] = b.mass[j];
  double dpr = prohorov_distance(d, K, m1, m2, 1e-9);

  // root and marked-point alignment terms
  auto cross = [&](const TreePoint& xa, const TreePoint& yb) {
    double best = HUGE_VAL;
    for (size_t z = 0; z < ka; ++z)
      best = std::min(best, distance(ta, xa, a.grid[z]) + distance(tb, fimg[z], yb));
    return best + 0.5 * dis;
  };
  double total = dpr + cross(TreePoint::at_node(ta.root()), TreePoint::at_node(tb.root()));
  for (size_t k = 0; k < a.s->marked.size(); ++k)
    total += cross(a.s->marked[k], b.s->marked[k]);
  return total;
}

}  // namespace

double gp_distance_upper(const PointedSample& a, const PointedSample& b, double grid_frac,
                         size_t max_points) {
  if (a.marked.size() != b.marked.size())
    throw std::invalid_argument("gp_distance_upper: samples must have the same n");
  double step = grid_step(a, b, grid_frac, max_points);
  Side sa = build_side(a, step);
  Side sb = build_side(b, step);
  double via_ab = objective_for_map(sa, sb);
  double via_ba = objective_for_map(sb, sa);
  return std::min(via_ab, via_ba);
}

double gp_pushforward_lower(const PointedSample& a, const PointedSample& b, double grid_frac,
                            size_t max_points) {
  if (a.marked.size() != b.marked.size())
    throw std::invalid_argument("gp_pushforward_lower: samples must have the same n");
  double step = grid_step(a, b, grid_frac, max_points);
  const size_t n = a.marked.size();

  auto vectors = [&](const PointedSample& s, std::vector<std::vector<double>>& vs,
                     std::vector<double>& ms) {
    const FiniteRTree& t = *s.tree;
    for (const auto& atom : s.nu.discretized(step)) {
      std::vector<double> v;
      v.reserve(n + 1);
      v.push_back(point_height(t, atom.point));
      for (const auto& u : s.marked) v.push_back(distance(t, u, atom.point));
      vs.push_back(std::move(v));
      ms.push_back(atom.mass);
    }
  };
  std::vector<std::vector<double>> va, vb;
  std::vector<double> ma, mb;
  vectors(a, va, ma);
  vectors(b, vb, mb);
  const size_t K = va.size() + vb.size();
  if (K == 0) return 0.0;
  auto sup_dist = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0.0;
    for (size_t i = 0; i < x.size(); ++i) d = std::max(d, std::fabs(x[i] - y[i]));
    return d;
  };
  std::vector<std::vector<double>*> all;
  for (auto& v : va) all.push_back(&v);
  for (auto& v : vb) all.push_back(&v);
  std::vector<double> d(K * K, 0.0);
  for (size_t i = 0; i < K; ++i)
    for (size_t j = i + 1; j < K; ++j) {
      double dd = sup_dist(*all[i], *all[j]);
      d[i * K + j] = dd;
      d[j * K + i] = dd;
    }
  std::vector<double> m1(K, 0.0), m2(K, 0.0);
  for (size_t i = 0; i < va.size(); ++i) m1[i] = ma[i];
  for (size_t j = 0; j < vb.size(); ++j) m2[va.size() + j] = mb[j];
  return prohorov_distance(d, K, m1, m2, 1e-9);
}

}  // namespace bimt
