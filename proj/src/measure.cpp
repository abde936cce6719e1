#include "measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bimt {

namespace {

// canonical atom order: by carrier edge, interior offsets ascending, the node
// atom (top of its edge) last; root atom first overall
struct AtomKey {
  NodeId carrier;
  int at_node;
  double offset;
  bool operator<(const AtomKey& o) const {
    if (carrier != o.carrier) return carrier < o.carrier;
    if (at_node != o.at_node) return at_node < o.at_node;
    return offset < o.offset;
  }
  bool operator==(const AtomKey& o) const {
    return carrier == o.carrier && at_node == o.at_node && offset == o.offset;
  }
};

AtomKey key_of(const TreePoint& p) {
  return AtomKey{p.carrier(), p.is_node() ? 1 : 0, p.offset};
}

}  // namespace

TreeMeasure::TreeMeasure(std::shared_ptr<const FiniteRTree> tree) : tree_(std::move(tree)) {
  if (!tree_) throw std::invalid_argument("measure requires a tree");
  segs_.resize(tree_->node_count());
}

TreeMeasure TreeMeasure::zero(std::shared_ptr<const FiniteRTree> tree) {
  TreeMeasure m(std::move(tree));
  m.finalize();
  return m;
}

TreeMeasure TreeMeasure::length_measure(std::shared_ptr<const FiniteRTree> tree, double coeff) {
  TreeMeasure m(std::move(tree));
  if (!(coeff >= 0.0)) throw std::invalid_argument("length coefficient must be >= 0");
  if (coeff > 0.0) {
    for (NodeId v = 1; v < m.tree_->node_count(); ++v)
      m.segs_[v].push_back({0.0, m.tree_->edge_length(v), coeff});
  }
  m.finalize();
  return m;
}

TreeMeasure TreeMeasure::from_edge_coeffs(std::shared_ptr<const FiniteRTree> tree,
                                          std::span<const double> coeff_by_child) {
  return make(std::move(tree), coeff_by_child, {});
}

TreeMeasure TreeMeasure::atoms_only(std::shared_ptr<const FiniteRTree> tree,
                                    std::vector<Atom> atoms) {
  return make(std::move(tree), {}, std::move(atoms));
}

TreeMeasure TreeMeasure::make(std::shared_ptr<const FiniteRTree> tree,
                              std::span<const double> coeff_by_child, std::vector<Atom> atoms) {
  TreeMeasure m(std::move(tree));
  const FiniteRTree& t = *m.tree_;
  if (!coeff_by_child.empty()) {
    if (static_cast<int>(coeff_by_child.size()) != t.node_count())
      throw std::invalid_argument("coeff vector must have one entry per node");
    for (NodeId v = 1; v < t.node_count(); ++v) {
      double c = coeff_by_child[v];
      if (!(c >= 0.0) || !std::isfinite(c))
        throw std::invalid_argument("length coefficients must be finite and >= 0");
      if (c > 0.0) m.segs_[v].push_back({0.0, t.edge_length(v), c});
    }
  }
  for (auto& a : atoms) {
    validate_point(t, a.point);
    if (!(a.mass >= 0.0) || !std::isfinite(a.mass))
      throw std::invalid_argument("atom masses must be finite and >= 0");
  }
  m.atoms_ = std::move(atoms);
  m.finalize();
  return m;
}

void TreeMeasure::finalize() {
  // drop empty pieces, sort atoms canonically, merge duplicates, cache totals
  length_total_ = 0.0;
  for (auto& list : segs_) {
    std::vector<Segment> kept;
    for (const auto& s : list) {
      if (s.coeff > 0.0 && s.hi > s.lo) kept.push_back(s);
    }
    std::sort(kept.begin(), kept.end(),
              [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
    list = std::move(kept);
    for (const auto& s : list) length_total_ += s.coeff * (s.hi - s.lo);
  }
  std::vector<Atom> kept;
  kept.reserve(atoms_.size());
  for (const auto& a : atoms_)
    if (a.mass > 0.0) kept.push_back(a);
  std::sort(kept.begin(), kept.end(),
            [](const Atom& a, const Atom& b) { return key_of(a.point) < key_of(b.point); });
  atoms_.clear();
  for (const auto& a : kept) {
    if (!atoms_.empty() && key_of(atoms_.back().point) == key_of(a.point))
      atoms_.back().mass += a.mass;
    else
      atoms_.push_back(a);
  }
  double atom_total = 0.0;
  atom_cdf_.clear();
  atom_cdf_.reserve(atoms_.size());
  for (const auto& a : atoms_) atom_cdf_.push_back(atom_total += a.mass);
  total_ = length_total_ + atom_total;
}

bool TreeMeasure::is_atomic() const { return length_total_ == 0.0; }

bool TreeMeasure::is_whole_edge() const {
  for (NodeId v = 1; v < tree_->node_count(); ++v) {
    const auto& list = segs_[v];
    if (list.empty()) continue;
    if (list.size() != 1) return false;
    if (list[0].lo != 0.0 || list[0].hi != tree_->edge_length(v)) return false;
  }
  return true;
}

std::vector<double> TreeMeasure::edge_coeffs() const {
  if (!is_whole_edge())
    throw std::logic_error("measure has partial-edge segments; materialize first");
  std::vector<double> out(tree_->node_count(), 0.0);
  for (NodeId v = 1; v < tree_->node_count(); ++v)
    if (!segs_[v].empty()) out[v] = segs_[v][0].coeff;
  return out;
}

double TreeMeasure::atom_at(const TreePoint& p) const {
  AtomKey k = key_of(p);
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), k,
                             [](const Atom& a, const AtomKey& kk) { return key_of(a.point) < kk; });
  if (it != atoms_.end() && key_of(it->point) == k) return it->mass;
  return 0.0;
}

double TreeMeasure::node_atom(NodeId v) const { return atom_at(TreePoint::at_node(v)); }

double TreeMeasure::prefix_mass(NodeId child, double h, bool closed) const {
  double out = 0.0;
  for (const auto& s : segs_[child]) {
    double hi = std::min(s.hi, h);
    if (hi > s.lo) out += s.coeff * (hi - s.lo);
  }
  for (const auto& a : atoms_) {
    if (a.point.carrier() != child) continue;
    double off = a.point.is_node() ? tree_->edge_length(child) : a.point.offset;
    if (off < h || (closed && off == h)) out += a.mass;
  }
  return out;
}

double TreeMeasure::mass_of_span(const Span& span) const {
  double out = node_atom(tree_->root());
  for (const auto& [child, prefix] : span.covered()) out += prefix_mass(child, prefix, true);
  return out;
}

double TreeMeasure::mass_on_pruned(const PrunedView& view) const {
  if (view.empty_tree()) return 0.0;
  double out = 0.0;
  for (NodeId v = 1; v < tree_->node_count(); ++v) {
    double kp = view.kept_prefix(v);
    if (kp <= 0.0) continue;
    for (const auto& s : segs_[v]) {
      double hi = std::min(s.hi, kp);
      if (hi > s.lo) out += s.coeff * (hi - s.lo);
    }
  }
  for (const auto& a : atoms_)
    if (view.contains(a.point)) out += a.mass;
  return out;
}

TreeMeasure TreeMeasure::restricted_to_span(const Span& span) const {
  TreeMeasure out(tree_);
  for (const auto& [child, prefix] : span.covered()) {
    for (const auto& s : segs_[child]) {
      double hi = std::min(s.hi, prefix);
      if (hi > s.lo) out.segs_[child].push_back({s.lo, hi, s.coeff});
    }
  }
  for (const auto& a : atoms_)
    if (span.contains(a.point)) out.atoms_.push_back(a);
  out.finalize();
  return out;
}

TreeMeasure TreeMeasure::restricted_to_pruned(const PrunedView& view) const {
  TreeMeasure out(tree_);
  if (view.empty_tree()) {
    out.finalize();
    return out;
  }
  for (NodeId v = 1; v < tree_->node_count(); ++v) {
    double kp = view.kept_prefix(v);
    if (kp <= 0.0) continue;
    for (const auto& s : segs_[v]) {
      double hi = std::min(s.hi, kp);
      if (hi > s.lo) out.segs_[v].push_back({s.lo, hi, s.coeff});
    }
  }
  for (const auto& a : atoms_)
    if (view.contains(a.point)) out.atoms_.push_back(a);
  out.finalize();
  return out;
}

TreeMeasure TreeMeasure::transported(const Materialized& m) const {
  TreeMeasure out(m.tree);
  const FiniteRTree& nt = *m.tree;
  for (NodeId v = 1; v < tree_->node_count(); ++v) {
    if (segs_[v].empty()) continue;
    NodeId img = m.node_map[v] != kNoNode ? m.node_map[v] : m.tip_of[v];
    if (img == kNoNode) {
      // the measure must already be restricted to the materialized set
      throw std::logic_error("transported: segments outside the materialized set");
    }
    double new_len = nt.edge_length(img);
    for (const auto& s : segs_[v]) {
      if (s.lo > new_len)
        throw std::logic_error("transported: segment outside the materialized set");
      out.segs_[img].push_back({s.lo, std::min(s.hi, new_len), s.coeff});
    }
  }
  for (const auto& a : atoms_) out.atoms_.push_back({m.map_point(*tree_, a.point), a.mass});
  out.finalize();
  return out;
}

TreeMeasure TreeMeasure::rescaled(std::shared_ptr<const FiniteRTree> scaled_tree,
                                  double length_scale, double mass_factor) const {
  if (!(length_scale > 0.0)) throw std::invalid_argument("length scale must be > 0");
  TreeMeasure out(std::move(scaled_tree));
  const FiniteRTree& nt = *out.tree_;
  if (nt.node_count() != tree_->node_count())
    throw std::invalid_argument("rescaled: tree shape mismatch");
  for (NodeId v = 1; v < tree_->node_count(); ++v) {
    double new_len = nt.edge_length(v);
    for (const auto& s : segs_[v]) {
      double lo = std::min(s.lo * length_scale, new_len);
      double hi = std::min(s.hi * length_scale, new_len);
      out.segs_[v].push_back({lo, hi, s.coeff * (mass_factor / length_scale)});
    }
  }
  for (const auto& a : atoms_) {
    TreePoint p = a.point;
    if (!p.is_node()) {
      double new_len = nt.edge_length(p.edge);
      p = make_point(nt, p.edge, std::min(p.offset * length_scale, new_len));
    }
    out.atoms_.push_back({p, a.mass * mass_factor});
  }
  out.finalize();
  return out;
}

TreeMeasure TreeMeasure::scaled(double mass_factor) const {
  if (!(mass_factor >= 0.0) || !std::isfinite(mass_factor))
    throw std::invalid_argument("mass factor must be finite and >= 0");
  TreeMeasure out(tree_);
  out.segs_ = segs_;
  for (auto& list : out.segs_)
    for (auto& s : list) s.coeff *= mass_factor;
  out.atoms_ = atoms_;
  for (auto& a : out.atoms_) a.mass *= mass_factor;
  out.finalize();
  return out;
}

TreeMeasure TreeMeasure::normalized() const {
  if (!(total_ > 0.0)) throw std::domain_error("cannot normalize the zero measure");
  return scaled(1.0 / total_);
}

TreePoint TreeMeasure::sample(Rng& rng) const {
  if (!(total_ > 0.0)) throw std::domain_error("cannot sample from the zero measure");
  double u = rng.uniform01() * total_;
  if (u < length_total_ && length_total_ > 0.0) {
    // walk the segments; measures here are small enough that a linear pass is
    // fine, and the atom path below is the hot one
    double target = rng.uniform01() * length_total_;
    double acc = 0.0;
    for (NodeId v = 1; v < tree_->node_count(); ++v) {
      for (const auto& s : segs_[v]) {
        double w = s.coeff * (s.hi - s.lo);
        acc += w;
        if (target < acc) {
          double off = s.lo + (s.hi - s.lo) * rng.uniform01();
          return make_point(*tree_, v, off);
        }
      }
    }
    // roundoff fell off the end: take the last positive segment
    for (NodeId v = tree_->node_count() - 1; v >= 1; --v)
      if (!segs_[v].empty()) {
        const auto& s = segs_[v].back();
        return make_point(*tree_, v, s.lo + (s.hi - s.lo) * rng.uniform01());
      }
  }
  if (atoms_.empty()) return sample(rng);  // only roundoff can get here
  return atoms_[rng.discrete_cdf(atom_cdf_)].point;
}

std::vector<Atom> TreeMeasure::discretized(double max_seg) const {
  if (!(max_seg > 0.0)) throw std::invalid_argument("discretization step must be > 0");
  std::vector<Atom> out(atoms_.begin(), atoms_.end());
  for (NodeId v = 1; v < tree_->node_count(); ++v) {
    for (const auto& s : segs_[v]) {
      double len = s.hi - s.lo;
      int k = std::max(1, static_cast<int>(std::ceil(len / max_seg)));
      double step = len / k;
      for (int i = 0; i < k; ++i) {
        double mid = s.lo + (i + 0.5) * step;
        out.push_back({make_point(*tree_, v, mid), s.coeff * step});
      }
    }
  }
  return out;
}

double measure_of_span(const TreeMeasure& m, std::span<const TreePoint> points) {
  Span span(m.tree(), points);
  return m.mass_of_span(span);
}

bool mu_skeleton_contains(const TreeMeasure& mu, const TreePoint& p) {
  const FiniteRTree& t = mu.tree();
  validate_point(t, p);
  if (mu.atom_at(p) > 0.0) return true;
  for (const auto& a : mu.atoms()) {
    if (weak_ancestor(t, p, a.point) && !(p == a.point)) return true;
  }
  for (NodeId v = 1; v < t.node_count(); ++v) {
    const auto& list = mu.segments(v);
    if (list.empty()) continue;
    double top = 0.0;
    for (const auto& s : list) top = std::max(top, s.hi);
    TreePoint q = make_point(t, v, top);
    if (weak_ancestor(t, p, q) && !(p == q)) return true;
  }
  return false;
}

std::vector<TreePoint> mu_leaves(const TreeMeasure& mu) {
  const FiniteRTree& t = mu.tree();
  std::vector<TreePoint> out;
  for (NodeId v = 1; v < t.node_count(); ++v) {
    const auto& list = mu.segments(v);
    if (list.empty()) continue;
    double top = 0.0;
    for (const auto& s : list) top = std::max(top, s.hi);
    TreePoint q = make_point(t, v, top);
    if (!mu_skeleton_contains(mu, q)) out.push_back(q);
  }
  return out;
}

BiMeasureTree::BiMeasureTree(std::shared_ptr<const FiniteRTree> tree, TreeMeasure mu,
                             TreeMeasure nu)
    : tree_(std::move(tree)), mu_(std::move(mu)), nu_(std::move(nu)) {
  if (!tree_) throw std::invalid_argument("bi-measure tree requires a tree");
  if (mu_.tree_ptr().get() != tree_.get() || nu_.tree_ptr().get() != tree_.get())
    throw std::invalid_argument("mu and nu must live on the given tree");
  if (!std::isfinite(mu_.total()) || !std::isfinite(nu_.total()))
    throw std::invalid_argument("measures must be finite");
  // nu must vanish on the mu-leaves; with finite measures only atoms can sit
  // on the finitely many mu-leaf points
  auto leaves = mu_leaves(mu_);
  for (const auto& a : nu_.atoms()) {
    for (const auto& lf : leaves) {
      if (a.point == lf)
        throw std::invalid_argument("nu has an atom on a mu-leaf");
    }
  }
}

}  // namespace bimt
