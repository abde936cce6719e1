#pragma once
// Exact semigroup and generator formulas of the pruning process on atomic-mu
// states, Monte-Carlo expectation over simulated paths, and the two
// independent generator evaluation routes used for cross-checking.

#include "measure.hpp"
#include "pruning.hpp"
#include "testfunc.hpp"

namespace bimt {

// S_t Psi(x). For trivial gamma this is the closed form
//   int mu^{tensor n}(du) e^{-t nu(span u)} Phi~(tau^n(u))
// summed exactly over mu-atom n-tuples. For damped gamma the survival
// pattern of the atom set is enumerated (inclusion-exclusion over spans),
// which requires at most 20 atoms. Throws std::domain_error outside exact
// range ("mode error").
double semigroup_exact(const BiMeasureTree& x, double t, const TestFunctionSpec& psi);

// Monte-Carlo S_t Psi over mu-tuples (no path simulation); for non-atomic mu.
McValue semigroup_mc(const BiMeasureTree& x, double t, const TestFunctionSpec& psi,
                     long samples, Rng& rng);

// Generator via the sampling form (eq. of -int mu^{tensor n} nu(span) Phi~);
// exact on atomic mu, trivial gamma only.
double generator_sampling_form(const BiMeasureTree& x, const TestFunctionSpec& psi);

// Generator via the jump form  int nu(dv) [Psi(x^v) - Psi(x)]; exact when nu
// is atomic (any gamma), atomic mu.
double generator_jump_form(const BiMeasureTree& x, const TestFunctionSpec& psi);

// Dispatches to the sampling form for trivial gamma, else the jump form.
double generator_apply(const BiMeasureTree& x, const TestFunctionSpec& psi);

// MC generator for non-atomic mu (trivial gamma): -||mu||^n avg nu(span) Phi~.
McValue generator_mc(const BiMeasureTree& x, const TestFunctionSpec& psi, long samples,
                     Rng& rng);

// Psi evaluated on a lazily pruned state, exactly (atomic mu): sums over
// surviving atom tuples; by ancestor closure their spans still carry the
// original nu.
double eval_psi_on_state(const PrunedState& s, const TestFunctionSpec& psi);

// avg over independent simulated paths of Psi(X_t); exact inner evaluation
// for atomic mu, otherwise `inner_samples` mu-draws per path (the estimator
// stays unbiased by the tower property).
McValue mc_expectation(const BiMeasureTree& x, double t, const TestFunctionSpec& psi,
                       long replicates, uint64_t seed, int threads = 1,
                       long inner_samples = 4);

}  // namespace bimt
