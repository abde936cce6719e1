#include "convergence.hpp"

#include <cmath>
#include <stdexcept>

#include "families.hpp"
#include "gw.hpp"
#include "pruning.hpp"
#include "semigroup.hpp"
#include "stats.hpp"
#include "threadpool.hpp"

namespace bimt {

double family_scale(const FamilySpec& f, int n_nodes) {
  if (f.scale_kind == "unit") return 1.0;
  if (f.scale_kind == "crt") {
    double sigma2 = f.eta.variance;
    if (!(sigma2 > 0.0)) throw std::invalid_argument("crt scaling needs positive variance");
    return crt_scale(std::sqrt(sigma2), n_nodes);
  }
  if (f.scale_kind.rfind("fixed:", 0) == 0) {
    double a = std::stod(f.scale_kind.substr(6));
    if (!(a > 0.0)) throw std::invalid_argument("fixed scale must be > 0");
    return a;
  }
  if (f.scale_kind.rfind("stable:", 0) == 0) {
    // expects "stable:alpha=...,C=..." mirroring the offspring family
    auto spec = f.scale_kind.substr(7);
    double alpha = 0.0, c = 0.0;
    if (std::sscanf(spec.c_str(), "alpha=%lf,C=%lf", &alpha, &c) != 2)
      throw std::invalid_argument("stable scale spec must be alpha=<a>,C=<c>");
    return stable_scale(alpha, c, n_nodes);
  }
  throw std::invalid_argument("unknown scale kind '" + f.scale_kind + "'");
}

BiMeasureTree make_family_instance(const FamilySpec& f, int n_nodes, Rng& rng) {
  auto discrete = gw_conditioned(f.eta, n_nodes, rng);
  double a_n = family_scale(f, n_nodes);
  auto tree = rescale(*discrete, a_n);
  StandardMeasures sm = standard_measures(tree, n_nodes, a_n);

  TreeMeasure mu = f.mu_kind == "ske" ? sm.mu_ske
                 : f.mu_kind == "nod" ? sm.mu_nod
                                      : throw std::invalid_argument("mu kind must be ske|nod");
  TreeMeasure nu = TreeMeasure::zero(tree);
  if (f.nu_kind == "ske")
    nu = sm.nu_ske;
  else if (f.nu_kind == "nod")
    nu = sm.nu_nod;
  else if (f.nu_kind == "adh")
    nu = adh_measure(tree);
  else if (f.nu_kind.rfind("height:", 0) == 0)
    nu = height_slice_measure(tree, std::stod(f.nu_kind.substr(7)));
  else if (f.nu_kind != "none")
    throw std::invalid_argument("nu kind must be ske|nod|adh|height:<a>|none");
  if (f.nu_scale != 1.0) nu = nu.scaled(f.nu_scale);
  return BiMeasureTree(tree, std::move(mu), std::move(nu));
}

std::vector<ConvergenceRow> convergence_report(const FamilySpec& family,
                                               std::span<const int> sizes,
                                               std::span<const double> times,
                                               std::span<const TestFunctionSpec> suite,
                                               long replicates, uint64_t seed, int threads,
                                               long inner_samples) {
  if (suite.empty()) throw std::invalid_argument("convergence_report: psi suite is empty");
  if (replicates < 2) throw std::invalid_argument("convergence_report: need >= 2 replicates");
  if (inner_samples < 1) throw std::invalid_argument("convergence_report: inner_samples >= 1");
  std::vector<ConvergenceRow> rows;
  const long cells = static_cast<long>(suite.size()) * static_cast<long>(times.size());
  for (size_t si = 0; si < sizes.size(); ++si) {
    int n_nodes = sizes[si];
    // one tree + one path per replicate, shared across the psi/time grid
    std::vector<double> vals(static_cast<size_t>(replicates) * cells, 0.0);
    double t_max = 0.0;
    for (double t : times) t_max = std::max(t_max, t);
    parallel_for(replicates, threads, [&](long rep) {
      Rng rng = Rng::stream(seed + 7919 * static_cast<uint64_t>(si), static_cast<uint64_t>(rep));
      auto x = std::make_shared<BiMeasureTree>(make_family_instance(family, n_nodes, rng));
      PruningPath path = t_max > 0.0 ? simulate(x, t_max, rng)
                                     : PruningPath(x, {}, 0.0);
      for (size_t ti = 0; ti < times.size(); ++ti) {
        PrunedState state = path.state_at(times[ti]);
        double mu_total = state.mu_total();
        TreeMeasure mu_t = state.mu_restricted();
        for (size_t pi = 0; pi < suite.size(); ++pi) {
          const TestFunctionSpec& psi = suite[pi];
          double val;
          if (psi.n == 0) {
            val = psi.gamma(mu_total);
          } else if (!(mu_total > 0.0)) {
            val = 0.0;
          } else {
            std::vector<TreePoint> u(psi.n);
            double acc = 0.0;
            for (long s = 0; s < inner_samples; ++s) {
              for (int k = 0; k < psi.n; ++k) u[k] = mu_t.sample(rng);
              acc += eval_phi_tilde(state.base(), u, psi);
            }
            val = psi.gamma(mu_total) * std::pow(mu_total, psi.n) * acc /
                  static_cast<double>(inner_samples);
          }
          vals[static_cast<size_t>(rep) * cells + ti * suite.size() + pi] = val;
        }
      }
    });
    for (size_t ti = 0; ti < times.size(); ++ti) {
      for (size_t pi = 0; pi < suite.size(); ++pi) {
        std::vector<double> col(replicates);
        for (long rep = 0; rep < replicates; ++rep)
          col[rep] = vals[static_cast<size_t>(rep) * cells + ti * suite.size() + pi];
        auto ms = mean_stderr(col);
        rows.push_back({n_nodes, suite[pi].id, times[ti], ms.mean, ms.se, replicates});
      }
    }
  }
  return rows;
}

std::vector<TrendRow> cauchy_trend(std::span<const ConvergenceRow> rows) {
  std::vector<TrendRow> out;
  for (const auto& r : rows) {
    TrendRow* tr = nullptr;
    for (auto& cand : out)
      if (cand.psi_id == r.psi_id && cand.t == r.t) tr = &cand;
    if (!tr) {
      out.push_back({r.psi_id, r.t, {}});
      tr = &out.back();
    }
  }
  for (auto& tr : out) {
    std::vector<std::pair<int, double>> series;
    for (const auto& r : rows)
      if (r.psi_id == tr.psi_id && r.t == tr.t) series.emplace_back(r.n_nodes, r.mean);
    for (size_t i = 0; i + 1 < series.size(); ++i)
      tr.diffs.push_back(std::fabs(series[i].second - series[i + 1].second));
  }
  return out;
}

}  // namespace bimt
