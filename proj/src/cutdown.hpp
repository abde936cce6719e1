#pragma once
// Cutting-down experiments: mu-averaged separation times extracted from a
// single pruning event log, the exact joint-survival product formula, the
// nested-span moment formula for Theta, and effective-cut counts.

#include <optional>

#include "measure.hpp"
#include "pruning.hpp"
#include "rng.hpp"

namespace bimt {

struct CutdownRun {
  double theta = 0.0;        // integral mu(du) * separation time of u
  long cut_count = 0;        // effective cuts until every mu-atom is separated
  bool infinite = false;     // some atom can never separate (nu vanishes on its path)
  std::vector<double> separation_times;  // per mu-atom, canonical atom order
};

// Runs the pruning process until every mu-atom is separated from the root.
// Requires atomic mu (mode error otherwise).
CutdownRun theta_simulate(const BiMeasureTree& x, Rng& rng);

// P(E^{u_1} >= t_1, ..., E^{u_n} >= t_n): product over the time-ordered
// nested spans of exp(-t * nu(S_l minus S_{l+1})).
double joint_survival(const BiMeasureTree& x, std::span<const TreePoint> u,
                      std::span<const double> t);

struct MomentResult {
  double value = 0.0;
  bool infinite = false;  // a nu(span) = 0 term was hit with positive mu-weight
  bool exact = true;
  double se = 0.0;   // standard error in MC mode
  long samples = 0;  // MC samples when not exact
};

// E[Theta^n | x] = n! int mu^{tensor n}(du) prod_j 1 / nu(span(u_1..u_j)).
// Exact when (#mu-atoms)^n fits the tuple budget, else MC over mu-tuples.
MomentResult theta_moment(const BiMeasureTree& x, int n, long mc_samples = 0,
                          Rng* rng = nullptr);

// Number of effective cuts until every mu-atom is separated; nullopt when the
// configuration cannot terminate.
std::optional<long> cutdown_count(const BiMeasureTree& x, Rng& rng);

}  // namespace bimt
