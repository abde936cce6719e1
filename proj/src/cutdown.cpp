#include "cutdown.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "stats.hpp"
#include "testfunc.hpp"

namespace bimt {

CutdownRun theta_simulate(const BiMeasureTree& x, Rng& rng) {
  if (!x.mu().is_atomic())
    throw std::domain_error("theta_simulate requires atomic mu");
  auto atoms = x.mu().atoms();
  CutdownRun out;
  out.separation_times.assign(atoms.size(), std::numeric_limits<double>::infinity());
  if (atoms.empty()) return out;

  // an atom whose closed root path carries no nu-mass can never separate
  for (const auto& a : atoms) {
    std::vector<TreePoint> single{a.point};
    if (!(x.nu().mass_of_span(Span(x.tree(), single)) > 0.0)) {
      out.infinite = true;
      out.theta = std::numeric_limits<double>::infinity();
      return out;
    }
  }

  const FiniteRTree& t = x.tree();
  size_t remaining = atoms.size();
  size_t processed = 0;
  auto base = std::make_shared<BiMeasureTree>(x);
  auto stop = [&](const std::vector<CutEvent>& events) {
    for (; processed < events.size(); ++processed) {
      const auto& ev = events[processed];
      for (size_t i = 0; i < atoms.size(); ++i) {
        if (std::isfinite(out.separation_times[i])) continue;
        if (weak_ancestor(t, ev.point, atoms[i].point)) {
          out.separation_times[i] = ev.time;
          --remaining;
        }
      }
    }
    return remaining == 0;
  };
  PruningPath path = simulate_until(base, stop, rng);
  out.cut_count = static_cast<long>(path.events().size());
  if (remaining > 0) {
    // nu died before everyone separated; cannot happen given the precheck
    out.infinite = true;
    out.theta = std::numeric_limits<double>::infinity();
    return out;
  }
  double theta = 0.0;
  for (size_t i = 0; i < atoms.size(); ++i) theta += atoms[i].mass * out.separation_times[i];
  out.theta = theta;
  return out;
}

double joint_survival(const BiMeasureTree& x, std::span<const TreePoint> u,
                      std::span<const double> t) {
  if (u.size() != t.size() || u.empty())
    throw std::invalid_argument("joint_survival: need matching nonempty points and times");
  for (double ti : t)
    if (ti < 0.0) throw std::invalid_argument("joint_survival: times must be >= 0");
  const size_t n = u.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return t[a] < t[b]; });
  // S_l spans the points with the l-th smallest time onwards
  std::vector<double> span_mass(n + 2, 0.0);
  std::vector<TreePoint> pts;
  for (size_t l = n; l >= 1; --l) {
    pts.push_back(u[order[l - 1]]);
    span_mass[l] = x.nu().mass_of_span(Span(x.tree(), pts));
  }
  double exponent = 0.0;
  for (size_t l = 1; l <= n; ++l)
    exponent += t[order[l - 1]] * (span_mass[l] - span_mass[l + 1]);
  return std::exp(-exponent);
}

namespace {

struct MomentAccum {
  double total = 0.0;
  bool infinite = false;
};

void moment_rec(const BiMeasureTree& x, std::span<const Atom> atoms, int level, int n,
                std::vector<TreePoint>& pts, double weight, double prod, MomentAccum& acc) {
  if (acc.infinite) return;
  if (level == n) {
    acc.total += weight * prod;
    return;
  }
  for (const auto& a : atoms) {
    pts.push_back(a.point);
    double mass = x.nu().mass_of_span(Span(x.tree(), pts));
    if (!(mass > 0.0)) {
      acc.infinite = true;
      pts.pop_back();
      return;
    }
    moment_rec(x, atoms, level + 1, n, pts, weight * a.mass, prod / mass, acc);
    pts.pop_back();
  }
}

}  // namespace

MomentResult theta_moment(const BiMeasureTree& x, int n, long mc_samples, Rng* rng) {
  if (n < 1) throw std::invalid_argument("theta_moment: n must be >= 1");
  MomentResult out;
  double factorial = 1.0;
  for (int k = 2; k <= n; ++k) factorial *= k;

  if (x.mu().is_atomic() &&
      std::pow(static_cast<double>(x.mu().atoms().size()), n) <=
          static_cast<double>(kExactTupleBudget) &&
      mc_samples <= 0) {
    auto atoms = x.mu().atoms();
    if (atoms.empty()) return out;  // zero measure: moment 0
    MomentAccum acc;
    std::vector<TreePoint> pts;
    moment_rec(x, atoms, 0, n, pts, 1.0, 1.0, acc);
    if (acc.infinite) {
      out.infinite = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.value = factorial * acc.total;
    return out;
  }

  if (mc_samples <= 1 || rng == nullptr)
    throw std::domain_error("theta_moment: exact mode unavailable; provide MC samples and rng");
  if (!(x.mu().total() > 0.0)) return out;
  double scale = factorial * std::pow(x.mu().total(), n);
  std::vector<double> vals;
  vals.reserve(mc_samples);
  std::vector<TreePoint> pts;
  for (long s = 0; s < mc_samples; ++s) {
    pts.clear();
    double prod = 1.0;
    for (int j = 0; j < n; ++j) {
      pts.push_back(x.mu().sample(*rng));
      double mass = x.nu().mass_of_span(Span(x.tree(), pts));
      if (!(mass > 0.0)) {
        out.infinite = true;
        out.value = std::numeric_limits<double>::infinity();
        return out;
      }
      prod /= mass;
    }
    vals.push_back(scale * prod);
  }
  auto ms = mean_stderr(vals);
  out.value = ms.mean;
  out.se = ms.se;
  out.exact = false;
  out.samples = mc_samples;
  return out;
}

std::optional<long> cutdown_count(const BiMeasureTree& x, Rng& rng) {
  CutdownRun run = theta_simulate(x, rng);
  if (run.infinite) return std::nullopt;
  return run.cut_count;
}

}  // namespace bimt
