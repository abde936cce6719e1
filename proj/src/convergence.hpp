#pragma once
// Convergence diagnostics: Monte-Carlo means of a test-function suite over a
// size-indexed family of random bi-measure trees, with the Cauchy-trend
// differences |mean(N) - mean(2N)| that the LWV-convergence statements are
// probed with at desk scale.

#include <memory>
#include <string>

#include "measure.hpp"
#include "offspring.hpp"
#include "testfunc.hpp"

namespace bimt {

struct FamilySpec {
  OffspringDistribution eta = OffspringDistribution::poisson(1.0);
  std::string mu_kind = "nod";     // "ske" | "nod"
  std::string nu_kind = "ske";     // "ske" | "nod" | "adh" | "height:<a>" | "none"
  std::string scale_kind = "crt";  // "crt" | "stable" | "fixed:<a>" | "unit"
  double nu_scale = 1.0;           // extra factor on nu (e.g. the exploratory b_N)
};

double family_scale(const FamilySpec& f, int n_nodes);
BiMeasureTree make_family_instance(const FamilySpec& f, int n_nodes, Rng& rng);

struct ConvergenceRow {
  int n_nodes;
  std::string psi_id;
  double t;
  double mean;
  double se;
  long replicates;
};

// For each N and Psi and time t: the MC mean of Psi(X_t) started from a fresh
// family instance per replicate. Inner mu-integrals are estimated with
// `inner_samples` draws per replicate (any count is unbiased by the tower
// property; more draws only reduce variance).
std::vector<ConvergenceRow> convergence_report(const FamilySpec& family,
                                               std::span<const int> sizes,
                                               std::span<const double> times,
                                               std::span<const TestFunctionSpec> suite,
                                               long replicates, uint64_t seed, int threads,
                                               long inner_samples = 1);

// |mean(N) - mean(2N)| sequences per (psi, t), in the order of `sizes`.
struct TrendRow {
  std::string psi_id;
  double t;
  std::vector<double> diffs;
};
std::vector<TrendRow> cauchy_trend(std::span<const ConvergenceRow> rows);

}  // namespace bimt
