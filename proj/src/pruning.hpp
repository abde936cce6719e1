#pragma once
// The pruning process: sequential-thinning simulation of the Poisson cut
// process with intensity (Lebesgue time) x nu, cadlag state evaluation, and
// the lazy pruned-state representation.

#include <functional>
#include <memory>
#include <optional>

#include "measure.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace bimt {

struct CutEvent {
  double time;
  TreePoint point;
  double removed_mu, removed_nu;   // mass taken away by this cut
  double mu_after, nu_after;       // state totals right after the cut
};

// Lazy state (base, cut set): measures are restrictions of the initial ones.
class PrunedState {
 public:
  PrunedState(std::shared_ptr<const BiMeasureTree> base, std::vector<TreePoint> cuts);

  const BiMeasureTree& base() const { return *base_; }
  const PrunedView& view() const { return view_; }
  double mu_total() const;
  double nu_total() const;
  bool contains(const TreePoint& p) const { return view_.contains(p); }
  TreeMeasure mu_restricted() const;
  TreeMeasure nu_restricted() const;
  // Fresh bi-measure tree with stumps closed; the empty state materializes
  // as a root-only tree with zero measures.
  BiMeasureTree materialize() const;

 private:
  std::shared_ptr<const BiMeasureTree> base_;
  PrunedView view_;
  mutable double mu_total_ = -1.0, nu_total_ = -1.0;  // caches, set on first use
};

class PruningPath {
 public:
  PruningPath(std::shared_ptr<const BiMeasureTree> initial, std::vector<CutEvent> events,
              double horizon);

  const BiMeasureTree& initial() const { return *initial_; }
  std::shared_ptr<const BiMeasureTree> initial_ptr() const { return initial_; }
  std::span<const CutEvent> events() const { return events_; }
  double horizon() const { return horizon_; }

  // State right after time t (cadlag: events at exactly t are applied).
  PrunedState state_at(double t) const;
  // Totals of the restricted measures at time t, from the event log.
  double mu_total_at(double t) const;
  double nu_total_at(double t) const;

 private:
  size_t events_up_to(double t) const;
  std::shared_ptr<const BiMeasureTree> initial_;
  std::vector<CutEvent> events_;
  double horizon_;
};

// Sequential thinning: wait Exp(nu(current)), place the cut from the
// normalized restricted nu, apply, repeat until the horizon or nu(current)=0.
PruningPath simulate(const BiMeasureTree& x, double horizon, Rng& rng);
PruningPath simulate(std::shared_ptr<const BiMeasureTree> x, double horizon, Rng& rng);

// Same dynamics driven until `stop(cuts so far, state)` says done or the cut
// measure dies; used by the cutting-down experiments. The returned horizon is
// the last event time.
PruningPath simulate_until(std::shared_ptr<const BiMeasureTree> x,
                           const std::function<bool(const std::vector<CutEvent>&)>& stop,
                           Rng& rng, long max_cuts = 100000000);

}  // namespace bimt
