#pragma once
// Test-function calculus: polynomials Phi^{gamma,m,phi} on n-pointed measure
// trees, built from a closed primitive family over distance-matrix entries
// (so sup bounds are computable), and the product class applied to sublist
// projections. Evaluation is exact on atomic measures and Monte-Carlo
// otherwise.

#include <memory>
#include <string>
#include <vector>

#include "measure.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace bimt {

// gamma(x) = 1 (c == 0) or exp(-c x); the damping family keeps x^k gamma -> 0.
struct GammaSpec {
  double c = 0.0;
  double operator()(double x) const;
  bool trivial() const { return c == 0.0; }
  // sup over x >= 0 of x^k * gamma(x); infinity for the trivial gamma, k >= 1
  double sup_pow(int k) const;
};

// Expression over entries r_{ij} of a distance matrix with rows
// 0 = root, 1..n marked points, n+1..n+m sampled points.
class PhiExpr {
 public:
  static PhiExpr constant(double c);
  static PhiExpr exp_neg(double lambda, int i, int j);   // exp(-lambda r_ij)
  static PhiExpr inv_one_plus(int i, int j);             // 1 / (1 + r_ij)
  static PhiExpr ratio(int i, int j);                    // r_ij / (1 + r_ij)
  static PhiExpr sum(std::vector<PhiExpr> terms);
  static PhiExpr product(std::vector<PhiExpr> factors);

  double eval(const DistMatrix& r) const;
  double sup() const;       // computable upper bound on |phi|
  int max_index() const;    // largest matrix index referenced

 private:
  enum class Kind { kConst, kExpNeg, kInvOnePlus, kRatio, kSum, kProd };
  Kind kind_ = Kind::kConst;
  double a_ = 0.0;  // constant value or lambda
  int i_ = 0, j_ = 0;
  std::vector<PhiExpr> kids_;
};

// Phi^{gamma,m,phi} acting on an n-pointed measure space (X, u, m):
//   gamma(||m||) * integral m^{tensor m}(dv) phi(R(root, u, v))
struct PolynomialSpec {
  int n = 0;
  int m = 0;
  PhiExpr phi = PhiExpr::constant(1.0);
  GammaSpec gamma;
  double sup_bound() const;  // may be +infinity when gamma is trivial and m >= 1
};

// One factor of a product test function: a polynomial applied to the sublist
// projection pi_I (1-based indices into the marked points).
struct TestFactor {
  std::vector<int> subset;
  PolynomialSpec poly;
};

// Psi^{gamma,n,Phi~}(x) = gamma(||mu||) int mu^{tensor n}(du) prod_f Phi_f(pi_I_f(tau^n_x(u)))
struct TestFunctionSpec {
  std::string id;
  int n = 0;
  GammaSpec gamma;
  std::vector<TestFactor> factors;
  double sup_bound() const;
  void validate() const;
};

// The five-function default suite exercising the mu-geometry and
// nu-restriction channels.
std::vector<TestFunctionSpec> default_suite();

// --- evaluation on a pointed measure space -------------------------------

struct EvalOptions {
  bool exact = true;      // exact requires an atomic measure when m >= 1
  long mc_samples = 0;    // used when exact is impossible
  Rng* rng = nullptr;
};

// Phi^{gamma,m,phi} on (tree, marked, meas). Exact mode enumerates atom
// m-tuples; throws std::domain_error for a non-atomic measure.
double eval_polynomial(const FiniteRTree& tree, std::span<const TreePoint> marked,
                       const TreeMeasure& meas, const PolynomialSpec& spec,
                       const EvalOptions& opts = {});

// Phi~ = product of factors at the marked tuple u, with nu taken from x
// restricted to the relevant spans (exact; factor m >= 1 needs atomic nu).
double eval_phi_tilde(const BiMeasureTree& x, std::span<const TreePoint> u,
                      const TestFunctionSpec& spec);

// Psi(x): exact enumeration over mu-atom n-tuples. Throws std::domain_error
// when mu is not atomic or the tuple budget (10^7) is exceeded.
double eval_test_function_exact(const BiMeasureTree& x, const TestFunctionSpec& spec);

// Monte-Carlo Psi(x) for non-atomic mu: u-tuples drawn i.i.d. from the
// normalized mu; returns mean and standard error of the estimator.
struct McValue {
  double estimate = 0.0;
  double se = 0.0;
  long samples = 0;
};
McValue eval_test_function_mc(const BiMeasureTree& x, const TestFunctionSpec& spec,
                              long samples, Rng& rng);

constexpr long kExactTupleBudget = 10000000;

}  // namespace bimt
