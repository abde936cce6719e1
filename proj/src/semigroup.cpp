#include "semigroup.hpp"

#include <cmath>
#include <stdexcept>

#include "kernels.hpp"
#include "stats.hpp"
#include "threadpool.hpp"

namespace bimt {

namespace {

void require_atomic_mu(const BiMeasureTree& x, int n) {
  if (n == 0) return;
  if (!x.mu().is_atomic())
    throw std::domain_error("exact mode requires atomic mu; use the MC mode");
  double tuples = std::pow(static_cast<double>(x.mu().atoms().size()), n);
  if (tuples > static_cast<double>(kExactTupleBudget))
    throw std::domain_error("exact mode exceeds the atom-tuple budget; use the MC mode");
}

// iterates all n-tuples over the atom list, calling fn(mask, weight, tuple);
// the support mask is only meaningful for atom lists of at most 32 entries
template <typename Fn>
void for_each_tuple(std::span<const Atom> atoms, int n, Fn&& fn) {
  if (n == 0 || atoms.empty()) return;
  const bool with_mask = atoms.size() <= 32;
  std::vector<int> idx(n, 0);
  std::vector<TreePoint> u(n);
  while (true) {
    double w = 1.0;
    uint32_t mask = 0;
    for (int k = 0; k < n; ++k) {
      const Atom& a = atoms[idx[k]];
      u[k] = a.point;
      w *= a.mass;
      if (with_mask) mask |= 1u << idx[k];
    }
    fn(mask, w, std::span<const TreePoint>(u));
    int k = n - 1;
    while (k >= 0 && ++idx[k] == static_cast<int>(atoms.size())) idx[k--] = 0;
    if (k < 0) break;
  }
}

}  // namespace

double semigroup_exact(const BiMeasureTree& x, double t, const TestFunctionSpec& psi) {
  psi.validate();
  if (!(t >= 0.0)) throw std::invalid_argument("semigroup_exact: t must be >= 0");
  const TreeMeasure& mu = x.mu();

  if (psi.gamma.trivial()) {
    if (psi.n == 0) return 1.0;  // Psi is the constant 1
    require_atomic_mu(x, psi.n);
    auto atoms = mu.atoms();
    std::vector<double> weights, span_mass;
    for_each_tuple(atoms, psi.n, [&](uint32_t, double w, std::span<const TreePoint> u) {
      double phi = eval_phi_tilde(x, u, psi);
      if (phi != 0.0 || w != 0.0) {
        weights.push_back(w * phi);
        span_mass.push_back(x.nu().mass_of_span(Span(x.tree(), u)));
      }
    });
    return kern::weighted_exp_sum(weights.data(), span_mass.data(), weights.size(), t);
  }

  // damped gamma: enumerate survival patterns of the atom set
  if (!mu.is_atomic())
    throw std::domain_error("exact mode with damping requires atomic mu; use mc_expectation");
  auto atoms = mu.atoms();
  const int k = static_cast<int>(atoms.size());
  if (k > 20)
    throw std::domain_error("exact mode with damping supports at most 20 mu-atoms");
  if (psi.n > 0 && std::pow(static_cast<double>(k), psi.n) > static_cast<double>(kExactTupleBudget))
    throw std::domain_error("exact mode exceeds the atom-tuple budget");
  const uint32_t full = k == 0 ? 0 : (k == 32 ? ~0u : (1u << k) - 1u);

  // span masses of every atom subset
  std::vector<double> span_mass(full + 1, 0.0);
  std::vector<TreePoint> pts;
  for (uint32_t B = 1; B <= full && k > 0; ++B) {
    pts.clear();
    for (int i = 0; i < k; ++i)
      if (B & (1u << i)) pts.push_back(atoms[i].point);
    span_mass[B] = x.nu().mass_of_span(Span(x.tree(), pts));
  }

  // P(exactly A survives) by Moebius inversion over supersets of
  // P(all of B survive) = exp(-t nu(span B))
  std::vector<double> p(full + 1);
  for (uint32_t B = 0; B <= full; ++B) p[B] = std::exp(-t * span_mass[B]);
  for (int b = 0; b < k; ++b) {
    for (uint32_t A = 0; A <= full; ++A)
      if (!(A & (1u << b))) p[A] -= p[A | (1u << b)];
  }

  // mu masses of subsets and the inner tuple sums with support inside A
  std::vector<double> mass(full + 1, 0.0);
  for (uint32_t A = 1; A <= full; ++A) {
    uint32_t low = A & (~A + 1u);
    int i = __builtin_ctz(low);
    mass[A] = mass[A ^ low] + atoms[i].mass;
  }
  std::vector<double> inner(full + 1, 0.0);
  if (psi.n == 0) {
    for (uint32_t A = 0; A <= full; ++A) inner[A] = 1.0;
  } else {
    for_each_tuple(atoms, psi.n, [&](uint32_t mask, double w, std::span<const TreePoint> u) {
      inner[mask] += w * eval_phi_tilde(x, u, psi);
    });
    for (int b = 0; b < k; ++b) {
      for (uint32_t A = 0; A <= full; ++A)
        if (A & (1u << b)) inner[A] += inner[A ^ (1u << b)];
    }
  }

  double out = 0.0;
  for (uint32_t A = 0; A <= full; ++A) out += p[A] * psi.gamma(mass[A]) * inner[A];
  return out;
}

McValue semigroup_mc(const BiMeasureTree& x, double t, const TestFunctionSpec& psi, long samples,
                     Rng& rng) {
  psi.validate();
  if (!psi.gamma.trivial())
    throw std::domain_error("semigroup_mc covers trivial damping only; use mc_expectation");
  if (psi.n == 0) return {1.0, 0.0, samples};
  if (samples < 2) throw std::invalid_argument("semigroup_mc: need >= 2 samples");
  const TreeMeasure& mu = x.mu();
  if (!(mu.total() > 0.0)) return {0.0, 0.0, samples};
  double scale = std::pow(mu.total(), psi.n);
  std::vector<double> vals;
  vals.reserve(samples);
  std::vector<TreePoint> u(psi.n);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < psi.n; ++i) u[i] = mu.sample(rng);
    double sm = x.nu().mass_of_span(Span(x.tree(), u));
    vals.push_back(scale * std::exp(-t * sm) * eval_phi_tilde(x, u, psi));
  }
  auto ms = mean_stderr(vals);
  return {ms.mean, ms.se, samples};
}

double generator_sampling_form(const BiMeasureTree& x, const TestFunctionSpec& psi) {
  psi.validate();
  if (!psi.gamma.trivial())
    throw std::domain_error("the sampling-form generator is defined for trivial damping");
  if (psi.n == 0) return 0.0;  // constants are harmonic
  require_atomic_mu(x, psi.n);
  double total = 0.0;
  for_each_tuple(x.mu().atoms(), psi.n, [&](uint32_t, double w, std::span<const TreePoint> u) {
    double sm = x.nu().mass_of_span(Span(x.tree(), u));
    total += w * sm * eval_phi_tilde(x, u, psi);
  });
  return -total;
}

double eval_psi_on_state(const PrunedState& s, const TestFunctionSpec& psi) {
  psi.validate();
  const BiMeasureTree& base = s.base();
  double g = psi.gamma(s.mu_total());
  if (psi.n == 0) return g;
  if (!base.mu().is_atomic())
    throw std::domain_error("eval_psi_on_state requires atomic mu");
  std::vector<Atom> alive;
  for (const auto& a : base.mu().atoms())
    if (s.contains(a.point)) alive.push_back(a);
  if (alive.empty()) return 0.0;
  // spans of surviving tuples lie inside the pruned tree, so the restricted
  // nu agrees with the original nu there
  double total = 0.0;
  for_each_tuple(alive, psi.n, [&](uint32_t, double w, std::span<const TreePoint> u) {
    total += w * eval_phi_tilde(base, u, psi);
  });
  return g * total;
}

double generator_jump_form(const BiMeasureTree& x, const TestFunctionSpec& psi) {
  psi.validate();
  if (!x.nu().is_atomic())
    throw std::domain_error("the jump-form generator requires atomic nu");
  auto base = std::make_shared<BiMeasureTree>(x);
  double psi_x = eval_test_function_exact(x, psi);
  double total = 0.0;
  for (const auto& a : x.nu().atoms()) {
    PrunedState cut(base, {a.point});
    total += a.mass * (eval_psi_on_state(cut, psi) - psi_x);
  }
  return total;
}

double generator_apply(const BiMeasureTree& x, const TestFunctionSpec& psi) {
  if (psi.gamma.trivial()) return generator_sampling_form(x, psi);
  return generator_jump_form(x, psi);
}

McValue generator_mc(const BiMeasureTree& x, const TestFunctionSpec& psi, long samples,
                     Rng& rng) {
  psi.validate();
  if (!psi.gamma.trivial())
    throw std::domain_error("generator_mc covers trivial damping only");
  if (psi.n == 0) return {0.0, 0.0, samples};
  if (samples < 2) throw std::invalid_argument("generator_mc: need >= 2 samples");
  const TreeMeasure& mu = x.mu();
  if (!(mu.total() > 0.0)) return {0.0, 0.0, samples};
  double scale = std::pow(mu.total(), psi.n);
  std::vector<double> vals;
  vals.reserve(samples);
  std::vector<TreePoint> u(psi.n);
  for (long s = 0; s < samples; ++s) {
    for (int i = 0; i < psi.n; ++i) u[i] = mu.sample(rng);
    double sm = x.nu().mass_of_span(Span(x.tree(), u));
    vals.push_back(-scale * sm * eval_phi_tilde(x, u, psi));
  }
  auto ms = mean_stderr(vals);
  return {ms.mean, ms.se, samples};
}

McValue mc_expectation(const BiMeasureTree& x, double t, const TestFunctionSpec& psi,
                       long replicates, uint64_t seed, int threads, long inner_samples) {
  psi.validate();
  if (replicates < 2) throw std::invalid_argument("mc_expectation: need >= 2 replicates");
  if (!(t >= 0.0)) throw std::invalid_argument("mc_expectation: t must be >= 0");
  auto base = std::make_shared<BiMeasureTree>(x);
  bool inner_exact = false;
  if (psi.n == 0) {
    inner_exact = true;
  } else if (base->mu().is_atomic()) {
    double tuples = std::pow(static_cast<double>(base->mu().atoms().size()), psi.n);
    inner_exact = tuples <= 65536.0;
  }
  std::vector<double> vals(replicates, 0.0);
  parallel_for(replicates, threads, [&](long i) {
    Rng rng = Rng::stream(seed, static_cast<uint64_t>(i));
    PruningPath path = simulate(base, t, rng);
    PrunedState state = path.state_at(t);
    if (inner_exact) {
      vals[i] = eval_psi_on_state(state, psi);
      return;
    }
    double mu_total = state.mu_total();
    double g = psi.gamma(mu_total);
    if (!(mu_total > 0.0)) {
      vals[i] = 0.0;
      return;
    }
    TreeMeasure mu_t = state.mu_restricted();
    double scale = g * std::pow(mu_total, psi.n);
    double acc = 0.0;
    std::vector<TreePoint> u(psi.n);
    for (long sidx = 0; sidx < inner_samples; ++sidx) {
      for (int kk = 0; kk < psi.n; ++kk) u[kk] = mu_t.sample(rng);
      acc += eval_phi_tilde(*base, u, psi);
    }
    vals[i] = scale * acc / static_cast<double>(inner_samples);
  });
  auto ms = mean_stderr(vals);
  return {ms.mean, ms.se, replicates};
}

}  // namespace bimt
