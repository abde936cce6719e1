#include "pruning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bimt {

// ---------------------------------------------------------------------------
// PrunedState

PrunedState::PrunedState(std::shared_ptr<const BiMeasureTree> base, std::vector<TreePoint> cuts)
    : base_(std::move(base)), view_(base_->tree_ptr(), std::move(cuts)) {}

double PrunedState::mu_total() const {
  if (mu_total_ < 0.0) mu_total_ = base_->mu().mass_on_pruned(view_);
  return mu_total_;
}

double PrunedState::nu_total() const {
  if (nu_total_ < 0.0) nu_total_ = base_->nu().mass_on_pruned(view_);
  return nu_total_;
}

TreeMeasure PrunedState::mu_restricted() const { return base_->mu().restricted_to_pruned(view_); }
TreeMeasure PrunedState::nu_restricted() const { return base_->nu().restricted_to_pruned(view_); }

BiMeasureTree PrunedState::materialize() const {
  if (view_.empty_tree()) {
    auto t = FiniteRTree::root_only();
    return BiMeasureTree(t, TreeMeasure::zero(t), TreeMeasure::zero(t));
  }
  Materialized m = bimt::materialize(view_);
  TreeMeasure mu = base_->mu().restricted_to_pruned(view_).transported(m);
  TreeMeasure nu = base_->nu().restricted_to_pruned(view_).transported(m);
  return BiMeasureTree(m.tree, std::move(mu), std::move(nu));
}

// ---------------------------------------------------------------------------
// PruningPath

PruningPath::PruningPath(std::shared_ptr<const BiMeasureTree> initial,
                         std::vector<CutEvent> events, double horizon)
    : initial_(std::move(initial)), events_(std::move(events)), horizon_(horizon) {
  for (size_t i = 1; i < events_.size(); ++i)
    if (!(events_[i].time > events_[i - 1].time))
      throw std::invalid_argument("event times must be strictly increasing");
}

size_t PruningPath::events_up_to(double t) const {
  if (t < 0.0 || t > horizon_) throw std::invalid_argument("state_at: time outside [0, horizon]");
  size_t k = 0;
  while (k < events_.size() && events_[k].time <= t) ++k;
  return k;
}

PrunedState PruningPath::state_at(double t) const {
  size_t k = events_up_to(t);
  std::vector<TreePoint> cuts;
  cuts.reserve(k);
  for (size_t i = 0; i < k; ++i) cuts.push_back(events_[i].point);
  return PrunedState(initial_, std::move(cuts));
}

double PruningPath::mu_total_at(double t) const {
  size_t k = events_up_to(t);
  return k == 0 ? initial_->mu().total() : events_[k - 1].mu_after;
}

double PruningPath::nu_total_at(double t) const {
  size_t k = events_up_to(t);
  return k == 0 ? initial_->nu().total() : events_[k - 1].nu_after;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

// Mutable restriction of one measure under a growing cut set.
struct WorkingMeasure {
  const TreeMeasure* m;
  std::vector<double> edge_mass;       // remaining length mass per edge
  std::vector<char> atom_alive;
  std::vector<int> atoms_begin;        // atoms grouped by carrier (canonical order)
  double length_total = 0.0, atom_total = 0.0;

  explicit WorkingMeasure(const TreeMeasure& meas) : m(&meas) {
    const FiniteRTree& t = meas.tree();
    edge_mass.assign(t.node_count(), 0.0);
    for (NodeId v = 1; v < t.node_count(); ++v)
      for (const auto& s : meas.segments(v)) edge_mass[v] += s.coeff * (s.hi - s.lo);
    atom_alive.assign(meas.atoms().size(), 1);
    atoms_begin.assign(t.node_count() + 1, 0);
    {
      auto atoms = meas.atoms();
      int n = t.node_count();
      std::vector<int> count(n, 0);
      for (const auto& a : atoms) ++count[a.point.carrier()];
      for (int v = 0; v < n; ++v) atoms_begin[v + 1] = atoms_begin[v] + count[v];
    }
    recompute();
  }

  void recompute() {
    length_total = 0.0;
    for (double x : edge_mass) length_total += x;
    atom_total = 0.0;
    auto atoms = m->atoms();
    for (size_t i = 0; i < atoms.size(); ++i)
      if (atom_alive[i]) atom_total += atoms[i].mass;
  }

  double total() const { return length_total + atom_total; }

  // length mass of edge v on [a, b)
  double seg_mass_between(NodeId v, double a, double b) const {
    double out = 0.0;
    for (const auto& s : m->segments(v)) {
      double lo = std::max(s.lo, a), hi = std::min(s.hi, b);
      if (hi > lo) out += s.coeff * (hi - lo);
    }
    return out;
  }

  // removes [cut_off, old_kept) of edge v: length mass and atoms at >= cut_off
  void clip_edge(NodeId v, double cut_off, double old_kept) {
    edge_mass[v] -= seg_mass_between(v, cut_off, old_kept);
    if (edge_mass[v] < 0.0) edge_mass[v] = 0.0;
    auto atoms = m->atoms();
    for (int i = atoms_begin[v]; i < atoms_begin[v + 1]; ++i) {
      if (!atom_alive[i]) continue;
      const TreePoint& p = atoms[i].point;
      if (!p.is_node() && p.offset >= cut_off) atom_alive[i] = 0;
    }
  }

  void kill_edge_and_node(NodeId v) {
    edge_mass[v] = 0.0;
    for (int i = atoms_begin[v]; i < atoms_begin[v + 1]; ++i) atom_alive[i] = 0;
  }

  void kill_node_atom(NodeId v) {
    auto atoms = m->atoms();
    for (int i = atoms_begin[v]; i < atoms_begin[v + 1]; ++i)
      if (atoms[i].point.is_node()) atom_alive[i] = 0;
  }
};

struct Simulator {
  const BiMeasureTree& x;
  const FiniteRTree& t;
  WorkingMeasure wmu, wnu;
  // gone[v]: the edge into v and its whole subtree carry no remaining measure.
  // A cut at a node or edge interior leaves a stump below it, so the cut
  // child is NOT gone until an ancestor cut sweeps it away.
  std::vector<char> gone;
  std::vector<double> kept;

  explicit Simulator(const BiMeasureTree& x0)
      : x(x0), t(x0.tree()), wmu(x0.mu()), wnu(x0.nu()), gone(t.node_count(), 0),
        kept(t.node_count(), 0.0) {
    for (NodeId v = 1; v < t.node_count(); ++v) kept[v] = t.edge_length(v);
  }

  void kill_subtree_below(NodeId v) {
    // v itself is handled by the caller; removes every remaining descendant
    // edge, including stumps left by earlier cuts
    std::vector<NodeId> stack(t.children(v).begin(), t.children(v).end());
    while (!stack.empty()) {
      NodeId c = stack.back();
      stack.pop_back();
      if (gone[c]) continue;
      gone[c] = 1;
      kept[c] = 0.0;
      wmu.kill_edge_and_node(c);
      wnu.kill_edge_and_node(c);
      for (NodeId g : t.children(c)) stack.push_back(g);
    }
  }

  void apply_cut(const TreePoint& p) {
    if (p.is_node()) {
      NodeId v = p.node;
      wmu.kill_node_atom(v);
      wnu.kill_node_atom(v);
      if (v == t.root()) {
        for (NodeId c = 1; c < t.node_count(); ++c) {
          gone[c] = 1;
          kept[c] = 0.0;
          wmu.kill_edge_and_node(c);
          wnu.kill_edge_and_node(c);
        }
      } else {
        kill_subtree_below(v);
      }
    } else {
      NodeId v = p.edge;
      double old_kept = kept[v];
      kept[v] = std::min(old_kept, p.offset);
      wmu.clip_edge(v, p.offset, old_kept);
      wnu.clip_edge(v, p.offset, old_kept);
      wmu.kill_node_atom(v);
      wnu.kill_node_atom(v);
      kill_subtree_below(v);
    }
    wmu.recompute();
    wnu.recompute();
  }

  // draws a point distributed as the normalized current restriction of nu
  TreePoint sample_nu(Rng& rng) {
    double total = wnu.total();
    double u = rng.uniform01() * total;
    if (u < wnu.length_total && wnu.length_total > 0.0) {
      double target = rng.uniform01() * wnu.length_total;
      double acc = 0.0;
      for (NodeId v = 1; v < t.node_count(); ++v) {
        if (wnu.edge_mass[v] <= 0.0) continue;
        acc += wnu.edge_mass[v];
        if (target < acc) {
          // inside this edge: pick a segment clipped to the kept prefix
          double seg_total = wnu.seg_mass_between(v, 0.0, kept[v]);
          double pick = rng.uniform01() * seg_total;
          double sacc = 0.0;
          for (const auto& s : wnu.m->segments(v)) {
            double lo = s.lo, hi = std::min(s.hi, kept[v]);
            if (hi <= lo) continue;
            double w = s.coeff * (hi - lo);
            sacc += w;
            if (pick < sacc || &s == &wnu.m->segments(v).back()) {
              double off = lo + (hi - lo) * rng.uniform01();
              return make_point(t, v, off);
            }
          }
        }
      }
    }
    // atom component
    auto atoms = wnu.m->atoms();
    double pick = rng.uniform01() * wnu.atom_total;
    double acc = 0.0;
    size_t last_alive = atoms.size();
    for (size_t i = 0; i < atoms.size(); ++i) {
      if (!wnu.atom_alive[i]) continue;
      last_alive = i;
      acc += atoms[i].mass;
      if (pick < acc) return atoms[i].point;
    }
    if (last_alive < atoms.size()) return atoms[last_alive].point;
    throw std::logic_error("sample_nu called on an exhausted measure");
  }
};

}  // namespace

PruningPath simulate(const BiMeasureTree& x, double horizon, Rng& rng) {
  return simulate(std::make_shared<BiMeasureTree>(x), horizon, rng);
}

PruningPath simulate(std::shared_ptr<const BiMeasureTree> x, double horizon, Rng& rng) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("simulate: horizon must be >= 0");
  Simulator sim(*x);
  std::vector<CutEvent> events;
  double now = 0.0;
  while (true) {
    double rate = sim.wnu.total();
    if (!(rate > 0.0)) break;
    now += rng.exponential(rate);
    if (now > horizon) break;
    TreePoint p = sim.sample_nu(rng);
    double mu_before = sim.wmu.total(), nu_before = sim.wnu.total();
    sim.apply_cut(p);
    double mu_after = sim.wmu.total(), nu_after = sim.wnu.total();
    events.push_back({now, p, mu_before - mu_after, nu_before - nu_after, mu_after, nu_after});
  }
  return PruningPath(std::move(x), std::move(events), horizon);
}

PruningPath simulate_until(std::shared_ptr<const BiMeasureTree> x,
                           const std::function<bool(const std::vector<CutEvent>&)>& stop,
                           Rng& rng, long max_cuts) {
  Simulator sim(*x);
  std::vector<CutEvent> events;
  double now = 0.0;
  while (!stop(events)) {
    double rate = sim.wnu.total();
    if (!(rate > 0.0)) break;
    if (static_cast<long>(events.size()) >= max_cuts)
      throw std::runtime_error("simulate_until: cut budget exhausted");
    now += rng.exponential(rate);
    TreePoint p = sim.sample_nu(rng);
    double mu_before = sim.wmu.total(), nu_before = sim.wnu.total();
    sim.apply_cut(p);
    double mu_after = sim.wmu.total(), nu_after = sim.wnu.total();
    events.push_back({now, p, mu_before - mu_after, nu_before - nu_after, mu_after, nu_after});
  }
  return PruningPath(std::move(x), std::move(events), now);
}

}  // namespace bimt
