#include "testfunc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "stats.hpp"

namespace bimt {

double GammaSpec::operator()(double x) const { return c == 0.0 ? 1.0 : std::exp(-c * x); }

double GammaSpec::sup_pow(int k) const {
  if (k == 0) return 1.0;
  if (c == 0.0) return std::numeric_limits<double>::infinity();
  // maximum of x^k e^{-cx} at x = k/c
  return std::pow(static_cast<double>(k) / (c * M_E), static_cast<double>(k));
}

// ---------------------------------------------------------------------------
// PhiExpr

PhiExpr PhiExpr::constant(double c) {
  PhiExpr e;
  e.kind_ = Kind::kConst;
  e.a_ = c;
  return e;
}

PhiExpr PhiExpr::exp_neg(double lambda, int i, int j) {
  if (!(lambda > 0.0)) throw std::invalid_argument("exp_neg: lambda must be > 0");
  PhiExpr e;
  e.kind_ = Kind::kExpNeg;
  e.a_ = lambda;
  e.i_ = i;
  e.j_ = j;
  return e;
}

PhiExpr PhiExpr::inv_one_plus(int i, int j) {
  PhiExpr e;
  e.kind_ = Kind::kInvOnePlus;
  e.i_ = i;
  e.j_ = j;
  return e;
}

PhiExpr PhiExpr::ratio(int i, int j) {
  PhiExpr e;
  e.kind_ = Kind::kRatio;
  e.i_ = i;
  e.j_ = j;
  return e;
}

PhiExpr PhiExpr::sum(std::vector<PhiExpr> terms) {
  PhiExpr e;
  e.kind_ = Kind::kSum;
  e.kids_ = std::move(terms);
  return e;
}

PhiExpr PhiExpr::product(std::vector<PhiExpr> factors) {
  PhiExpr e;
  e.kind_ = Kind::kProd;
  e.kids_ = std::move(factors);
  return e;
}

double PhiExpr::eval(const DistMatrix& r) const {
  switch (kind_) {
    case Kind::kConst:
      return a_;
    case Kind::kExpNeg:
      return std::exp(-a_ * r(i_, j_));
    case Kind::kInvOnePlus:
      return 1.0 / (1.0 + r(i_, j_));
    case Kind::kRatio: {
      double d = r(i_, j_);
      return d / (1.0 + d);
    }
    case Kind::kSum: {
      double s = 0.0;
      for (const auto& k : kids_) s += k.eval(r);
      return s;
    }
    case Kind::kProd: {
      double p = 1.0;
      for (const auto& k : kids_) p *= k.eval(r);
      return p;
    }
  }
  return 0.0;
}

double PhiExpr::sup() const {
  switch (kind_) {
    case Kind::kConst:
      return std::fabs(a_);
    case Kind::kExpNeg:
    case Kind::kInvOnePlus:
    case Kind::kRatio:
      return 1.0;
    case Kind::kSum: {
      double s = 0.0;
      for (const auto& k : kids_) s += k.sup();
      return s;
    }
    case Kind::kProd: {
      double p = 1.0;
      for (const auto& k : kids_) p *= k.sup();
      return p;
    }
  }
  return 0.0;
}

int PhiExpr::max_index() const {
  switch (kind_) {
    case Kind::kConst:
      return 0;
    case Kind::kExpNeg:
    case Kind::kInvOnePlus:
    case Kind::kRatio:
      return std::max(i_, j_);
    default: {
      int m = 0;
      for (const auto& k : kids_) m = std::max(m, k.max_index());
      return m;
    }
  }
}

double PolynomialSpec::sup_bound() const {
  // |Phi| <= sup|phi| * ||m||^m * gamma(||m||) <= sup|phi| * sup_x x^m gamma(x)
  return phi.sup() * gamma.sup_pow(m);
}

double TestFunctionSpec::sup_bound() const {
  double prod = 1.0;
  for (const auto& f : factors) prod *= f.poly.sup_bound();
  return gamma.sup_pow(n) * prod;
}

void TestFunctionSpec::validate() const {
  if (n < 0) throw std::invalid_argument("test function: n must be >= 0");
  for (const auto& f : factors) {
    if (static_cast<int>(f.subset.size()) != f.poly.n)
      throw std::invalid_argument("test function: factor subset size must equal its n");
    for (int idx : f.subset)
      if (idx < 1 || idx > n)
        throw std::invalid_argument("test function: subset indices must lie in 1..n");
    if (f.poly.phi.max_index() > f.poly.n + f.poly.m)
      throw std::invalid_argument("test function: phi references an out-of-range index");
  }
}

std::vector<TestFunctionSpec> default_suite() {
  std::vector<TestFunctionSpec> suite;

  // damped constant: exp(-||mu||)
  suite.push_back({"mass_damped_const", 0, GammaSpec{1.0}, {}});

  // n=1, phi = exp(-r(root, u1))
  suite.push_back(
      {"height1", 1, GammaSpec{}, {TestFactor{{1}, {1, 0, PhiExpr::exp_neg(1.0, 0, 1), {}}}}});

  // n=2, phi = exp(-r(u1, u2))
  suite.push_back(
      {"pair_dist", 2, GammaSpec{}, {TestFactor{{1, 2}, {2, 0, PhiExpr::exp_neg(1.0, 1, 2), {}}}}});

  // n=1, factor exp(-nu([root, u1]))
  suite.push_back(
      {"nu_path", 1, GammaSpec{}, {TestFactor{{1}, {1, 0, PhiExpr::constant(1.0), GammaSpec{1.0}}}}});

  // n=2, product over I in {{1},{2},{1,2}} of exp(-nu(span_I))
  suite.push_back({"nu_spans",
                   2,
                   GammaSpec{},
                   {TestFactor{{1}, {1, 0, PhiExpr::constant(1.0), GammaSpec{1.0}}},
                    TestFactor{{2}, {1, 0, PhiExpr::constant(1.0), GammaSpec{1.0}}},
                    TestFactor{{1, 2}, {2, 0, PhiExpr::constant(1.0), GammaSpec{1.0}}}}});

  for (auto& s : suite) s.validate();
  return suite;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

// enumerates m-tuples of atoms, accumulating weight * phi(R(root, marked, v))
double atom_tuple_sum(const FiniteRTree& tree, std::span<const TreePoint> marked,
                      std::span<const Atom> atoms, int m, const PhiExpr& phi) {
  std::vector<TreePoint> pts(marked.begin(), marked.end());
  pts.resize(marked.size() + m);
  double total = 0.0;
  std::vector<int> idx(m, 0);
  if (m == 0) return phi.eval(distance_matrix(tree, pts));
  double tuples = std::pow(static_cast<double>(atoms.size()), m);
  if (tuples > static_cast<double>(kExactTupleBudget))
    throw std::domain_error("exact polynomial evaluation exceeds the tuple budget");
  if (atoms.empty()) return 0.0;
  while (true) {
    double w = 1.0;
    for (int k = 0; k < m; ++k) {
      pts[marked.size() + k] = atoms[idx[k]].point;
      w *= atoms[idx[k]].mass;
    }
    total += w * phi.eval(distance_matrix(tree, pts));
    int k = m - 1;
    while (k >= 0 && ++idx[k] == static_cast<int>(atoms.size())) idx[k--] = 0;
    if (k < 0) break;
  }
  return total;
}

}  // namespace

double eval_polynomial(const FiniteRTree& tree, std::span<const TreePoint> marked,
                       const TreeMeasure& meas, const PolynomialSpec& spec,
                       const EvalOptions& opts) {
  if (static_cast<int>(marked.size()) != spec.n)
    throw std::invalid_argument("eval_polynomial: marked point count must equal n");
  double g = spec.gamma(meas.total());
  if (spec.m == 0) {
    return g * spec.phi.eval(distance_matrix(tree, marked));
  }
  if (opts.exact) {
    if (!meas.is_atomic())
      throw std::domain_error("exact polynomial evaluation requires an atomic measure");
    return g * atom_tuple_sum(tree, marked, meas.atoms(), spec.m, spec.phi);
  }
  if (opts.mc_samples <= 0 || opts.rng == nullptr)
    throw std::invalid_argument("eval_polynomial: MC mode needs samples and an rng");
  if (!(meas.total() > 0.0)) return 0.0;
  double scale = std::pow(meas.total(), spec.m);
  std::vector<TreePoint> pts(marked.begin(), marked.end());
  pts.resize(marked.size() + spec.m);
  double acc = 0.0;
  for (long s = 0; s < opts.mc_samples; ++s) {
    for (int k = 0; k < spec.m; ++k) pts[marked.size() + k] = meas.sample(*opts.rng);
    acc += spec.phi.eval(distance_matrix(tree, pts));
  }
  return g * scale * acc / static_cast<double>(opts.mc_samples);
}

double eval_phi_tilde(const BiMeasureTree& x, std::span<const TreePoint> u,
                      const TestFunctionSpec& spec) {
  if (static_cast<int>(u.size()) != spec.n)
    throw std::invalid_argument("eval_phi_tilde: tuple size must equal n");
  double prod = 1.0;
  std::vector<TreePoint> sub;
  for (const auto& f : spec.factors) {
    sub.clear();
    for (int idx : f.subset) sub.push_back(u[idx - 1]);
    Span span(x.tree(), sub);
    if (f.poly.m == 0) {
      double g = f.poly.gamma(x.nu().mass_of_span(span));
      prod *= g * f.poly.phi.eval(distance_matrix(x.tree(), sub));
    } else {
      TreeMeasure nu_span = x.nu().restricted_to_span(span);
      prod *= eval_polynomial(x.tree(), sub, nu_span, f.poly);
    }
    if (prod == 0.0) break;
  }
  return prod;
}

double eval_test_function_exact(const BiMeasureTree& x, const TestFunctionSpec& spec) {
  spec.validate();
  const TreeMeasure& mu = x.mu();
  double g = spec.gamma(mu.total());
  if (spec.n == 0) return g;
  if (!mu.is_atomic())
    throw std::domain_error("exact test-function evaluation requires atomic mu");
  auto atoms = mu.atoms();
  double tuples = std::pow(static_cast<double>(atoms.size()), spec.n);
  if (tuples > static_cast<double>(kExactTupleBudget))
    throw std::domain_error("exact test-function evaluation exceeds the tuple budget");
  if (atoms.empty()) return 0.0;
  std::vector<int> idx(spec.n, 0);
  std::vector<TreePoint> u(spec.n);
  double total = 0.0;
  while (true) {
    double w = 1.0;
    for (int k = 0; k < spec.n; ++k) {
      u[k] = atoms[idx[k]].point;
      w *= atoms[idx[k]].mass;
    }
    total += w * eval_phi_tilde(x, u, spec);
    int k = spec.n - 1;
    while (k >= 0 && ++idx[k] == static_cast<int>(atoms.size())) idx[k--] = 0;
    if (k < 0) break;
  }
  return g * total;
}

McValue eval_test_function_mc(const BiMeasureTree& x, const TestFunctionSpec& spec, long samples,
                              Rng& rng) {
  spec.validate();
  if (samples < 2) throw std::invalid_argument("eval_test_function_mc: need >= 2 samples");
  const TreeMeasure& mu = x.mu();
  double g = spec.gamma(mu.total());
  if (spec.n == 0) return {g, 0.0, samples};
  if (!(mu.total() > 0.0)) return {0.0, 0.0, samples};
  double scale = g * std::pow(mu.total(), spec.n);
  std::vector<double> vals;
  vals.reserve(samples);
  std::vector<TreePoint> u(spec.n);
  for (long s = 0; s < samples; ++s) {
    for (int k = 0; k < spec.n; ++k) u[k] = mu.sample(rng);
    vals.push_back(scale * eval_phi_tilde(x, u, spec));
  }
  auto ms = mean_stderr(vals);
  return {ms.mean, ms.se, samples};
}

}  // namespace bimt
