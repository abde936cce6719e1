#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "convergence.hpp"
#include "gp.hpp"
#include "kernels.hpp"
#include "stats.hpp"
#include "subtree.hpp"
#include "support.hpp"

using namespace bimt;
using namespace bimt::test;

TEST_CASE("tau_n on the single edge keeps the whole nu") {
  auto t = FiniteRTree::single_edge(1.5);
  BiMeasureTree x(t, TreeMeasure::atoms_only(t, {{TreePoint::at_node(1), 1.0}}),
                  TreeMeasure::length_measure(t));
  std::vector<TreePoint> leaf{TreePoint::at_node(1)};
  PointedSample s = tau_n(x, leaf);
  CHECK(s.tree->total_length() == 1.5);
  CHECK(s.nu.total() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(s.marked.size() == 1);
  CHECK_THROWS_AS(tau_n(x, std::vector<TreePoint>{}), std::invalid_argument);
}

TEST_CASE("tau_n at the root keeps only a root atom") {
  auto t = cherry();
  TreeMeasure nu = TreeMeasure::make(
      t, std::vector<double>(t->node_count(), 1.0), {{TreePoint::at_node(0), 0.25}});
  BiMeasureTree x(t, TreeMeasure::atoms_only(t, {{TreePoint::at_node(2), 1.0}}), nu);
  std::vector<TreePoint> rho{TreePoint::at_node(0), TreePoint::at_node(0)};
  PointedSample s = tau_n(x, rho);
  CHECK(s.tree->node_count() == 1);
  CHECK(s.nu.total() == 0.25);
}

TEST_CASE("tau_n restricted mass equals measure_of_span") {
  Rng rng(71);
  for (int i = 0; i < 60; ++i) {
    BiMeasureTree x = random_atomic_instance(rng, 4, false);
    auto pts = random_points(x.tree(), rng, 3);
    PointedSample s = tau_n(x, pts);
    CHECK(s.nu.total() == doctest::Approx(measure_of_span(x.nu(), pts)).epsilon(1e-12));
    // marked points preserve their pairwise distances
    DistMatrix a = distance_matrix(x.tree(), pts);
    DistMatrix b = distance_matrix(*s.tree, s.marked);
    for (int r = 0; r <= a.n; ++r)
      for (int c = 0; c <= a.n; ++c) CHECK(a(r, c) == doctest::Approx(b(r, c)).epsilon(1e-12));
  }
}

TEST_CASE("sample_subtree_vector from a Dirac mu is deterministic") {
  auto t = cherry();
  BiMeasureTree x(t, TreeMeasure::atoms_only(t, {{TreePoint::at_node(3), 2.0}}),
                  TreeMeasure::length_measure(t));
  Rng rng(72);
  for (int i = 0; i < 10; ++i) {
    PointedSample s = sample_subtree_vector(x, 2, rng);
    CHECK(s.nu.total() == doctest::Approx(2.0).epsilon(1e-12));  // span [rho, u2]
    CHECK(s.marked[0] == s.marked[1]);
  }
}

TEST_CASE("expected restricted-nu mass for n=1 matches exact enumeration") {
  Rng rng(73);
  for (int i = 0; i < 10; ++i) {
    BiMeasureTree x = random_atomic_instance(rng, 5, false);
    double exact = 0.0;
    double mu_total = x.mu().total();
    for (const auto& a : x.mu().atoms()) {
      std::vector<TreePoint> u{a.point};
      exact += (a.mass / mu_total) * measure_of_span(x.nu(), u);
    }
    const long n = 4000;
    std::vector<double> vals;
    for (long s = 0; s < n; ++s) vals.push_back(sample_subtree_vector(x, 1, rng).nu.total());
    auto ms = mean_stderr(vals);
    CHECK(std::fabs(ms.mean - exact) <= 3.0 * ms.se + 1e-12);
  }
}

TEST_CASE("projection consistency: sampling n then taking a sublist = sampling |I|") {
  Rng rng(74);
  BiMeasureTree x = random_atomic_instance(rng, 5, false);
  const long n = 4000;
  std::vector<double> projected, direct;
  for (long i = 0; i < n; ++i) {
    // sample 3 points, project to the first two
    std::vector<TreePoint> u;
    for (int k = 0; k < 3; ++k) u.push_back(x.mu().normalized().sample(rng));
    std::vector<TreePoint> sub(u.begin(), u.begin() + 2);
    projected.push_back(measure_of_span(x.nu(), sub));
    direct.push_back(sample_subtree_vector(x, 2, rng).nu.total());
  }
  auto snap = [](double v) { return std::round(v * 1e9) / 1e9; };
  for (auto& v : projected) v = snap(v);
  for (auto& v : direct) v = snap(v);
  CHECK(ks_two_sample_p(projected, direct) > 0.01);
}

TEST_CASE("eval_polynomial: phi == 1 gives ||m||^m") {
  Rng rng(75);
  for (int i = 0; i < 40; ++i) {
    auto t = random_tree(rng, 10);
    TreeMeasure m = random_measure(t, rng, false, 5);
    for (int mm : {0, 1, 2, 3}) {
      PolynomialSpec spec{0, mm, PhiExpr::constant(1.0), GammaSpec{}};
      double got = eval_polynomial(*t, {}, m, spec);
      CHECK(got == doctest::Approx(std::pow(m.total(), mm)).epsilon(1e-12));
    }
  }
}

TEST_CASE("eval_polynomial m=0 depends only on marked distances") {
  auto t = cherry();
  TreeMeasure m = TreeMeasure::zero(t);
  std::vector<TreePoint> pts{TreePoint::at_node(2), TreePoint::at_node(3)};
  PolynomialSpec spec{2, 0, PhiExpr::exp_neg(1.0, 1, 2), GammaSpec{}};
  CHECK(eval_polynomial(*t, pts, m, spec) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("eval_polynomial exact vs MC agree") {
  Rng rng(76);
  for (int i = 0; i < 5; ++i) {
    auto t = random_tree(rng, 8);
    TreeMeasure m = random_measure(t, rng, false, 4);
    if (!(m.total() > 0.0)) continue;
    auto marked = random_points(*t, rng, 1);
    PolynomialSpec spec{1, 2,
                        PhiExpr::product({PhiExpr::exp_neg(0.7, 0, 2), PhiExpr::ratio(1, 3)}),
                        GammaSpec{}};
    double exact = eval_polynomial(*t, marked, m, spec);
    // a crude bound on the MC spread: phi in [0,1], weights ||m||^2
    const long samples = 20000;
    EvalOptions opts;
    opts.exact = false;
    opts.mc_samples = samples;
    opts.rng = &rng;
    double mc = eval_polynomial(*t, marked, m, spec, opts);
    double bound = 3.0 * std::pow(m.total(), 2) / std::sqrt(static_cast<double>(samples));
    CHECK(std::fabs(mc - exact) <= bound + 1e-9);
  }
  // exact mode on a non-atomic measure is a mode error
  auto t = cherry();
  TreeMeasure len = TreeMeasure::length_measure(t);
  PolynomialSpec spec{0, 1, PhiExpr::constant(1.0), GammaSpec{}};
  CHECK_THROWS_AS(eval_polynomial(*t, {}, len, spec), std::domain_error);
}

TEST_CASE("distance_matrix_sample: Dirac mu gives constant matrices") {
  auto t = FiniteRTree::single_edge(2.0);
  BiMeasureTree x(t, TreeMeasure::atoms_only(t, {{TreePoint::at_node(1), 1.0}}),
                  TreeMeasure::zero(t));
  Rng rng(77);
  for (int i = 0; i < 10; ++i) {
    DistMatrix m = distance_matrix_sample(x, {}, 3, rng);
    for (int a = 1; a <= 3; ++a) {
      CHECK(m(0, a) == 2.0);
      for (int b = 1; b <= 3; ++b) CHECK(m(a, b) == 0.0);
    }
  }
}

TEST_CASE("distance_matrix_sample moments match exact atomic computation") {
  Rng rng(78);
  BiMeasureTree x = random_atomic_instance(rng, 6, false);
  double mu_total = x.mu().total();
  double exact_mean = 0.0;
  for (const auto& a : x.mu().atoms())
    exact_mean += (a.mass / mu_total) * point_height(x.tree(), a.point);
  const long n = 6000;
  std::vector<double> heights;
  std::vector<double> quads;
  for (long i = 0; i < n; ++i) {
    DistMatrix m = distance_matrix_sample(x, {}, 4, rng);
    heights.push_back(m(0, 1));
    // every draw satisfies the four-point condition
    quads.push_back(m(1, 2));
    quads.push_back(m(3, 4));
    quads.push_back(m(1, 3));
    quads.push_back(m(2, 4));
    quads.push_back(m(1, 4));
    quads.push_back(m(2, 3));
  }
  auto ms = mean_stderr(heights);
  CHECK(std::fabs(ms.mean - exact_mean) <= 3.0 * ms.se + 1e-12);
  CHECK(kern::four_point_excess(quads.data(), quads.size() / 6) <= 1e-12);
}

TEST_CASE("test function sup bounds hold on random instances") {
  Rng rng(79);
  auto suite = default_suite();
  for (int i = 0; i < 40; ++i) {
    BiMeasureTree x = random_atomic_instance(rng, 5, false);
    for (const auto& psi : suite) {
      double bound = psi.sup_bound();
      if (!std::isfinite(bound)) continue;
      CHECK(std::fabs(eval_test_function_exact(x, psi)) <= bound + 1e-12);
    }
  }
  // damped gamma: sup x^k gamma(x) -> the damping keeps products bounded
  GammaSpec g{2.0};
  CHECK(g.sup_pow(0) == 1.0);
  CHECK(g.sup_pow(3) == doctest::Approx(std::pow(3.0 / (2.0 * M_E), 3.0)).epsilon(1e-12));
  CHECK(std::isinf(GammaSpec{}.sup_pow(1)));
}

TEST_CASE("factor products are permutation consistent in distribution") {
  Rng rng(80);
  BiMeasureTree x = random_atomic_instance(rng, 5, false);
  // Phi_I on pi_I(u) for I={2}: same law as evaluating on a fresh 1-sample
  const long n = 4000;
  std::vector<double> via_projection, direct;
  TreeMeasure mu_n = x.mu().normalized();
  for (long i = 0; i < n; ++i) {
    TreePoint u1 = mu_n.sample(rng), u2 = mu_n.sample(rng);
    (void)u1;
    std::vector<TreePoint> sub{u2};
    via_projection.push_back(std::exp(-measure_of_span(x.nu(), sub)));
    std::vector<TreePoint> v{mu_n.sample(rng)};
    direct.push_back(std::exp(-measure_of_span(x.nu(), v)));
  }
  auto snap = [](double vv) { return std::round(vv * 1e9) / 1e9; };
  for (auto& vv : via_projection) vv = snap(vv);
  for (auto& vv : direct) vv = snap(vv);
  CHECK(ks_two_sample_p(via_projection, direct) > 0.01);
}

TEST_CASE("gp upper bound: identical samples give ~0") {
  Rng rng(81);
  for (int i = 0; i < 5; ++i) {
    BiMeasureTree x = random_atomic_instance(rng, 4, true, 8);
    auto pts = random_points(x.tree(), rng, 2);
    PointedSample s = tau_n(x, pts);
    CHECK(gp_distance_upper(s, s, 1e-3, 400) <= 1e-6);
  }
}

TEST_CASE("gp upper bound on stretched single edges") {
  const double L = 1.0, delta = 0.05;
  auto ta = FiniteRTree::single_edge(L);
  auto tb = FiniteRTree::single_edge(L + delta);
  PointedSample a{ta, {TreePoint::at_node(1)},
                  TreeMeasure::atoms_only(ta, {{TreePoint::at_node(1), 1.0}})};
  PointedSample b{tb, {TreePoint::at_node(1)},
                  TreeMeasure::atoms_only(tb, {{TreePoint::at_node(1), 1.0}})};
  double bound = gp_distance_upper(a, b, 1e-3, 400);
  CHECK(bound <= 2.0 * delta + 1e-6);
  CHECK(bound >= 0.0);
}

TEST_CASE("gp upper bound dominates the pushforward lower bound") {
  Rng rng(82);
  for (int i = 0; i < 6; ++i) {
    BiMeasureTree x = random_atomic_instance(rng, 3, true, 6);
    BiMeasureTree y = random_atomic_instance(rng, 3, true, 6);
    auto pa = random_points(x.tree(), rng, 2);
    auto pb = random_points(y.tree(), rng, 2);
    PointedSample a = tau_n(x, pa);
    PointedSample b = tau_n(y, pb);
    double upper = gp_distance_upper(a, b, 5e-3, 300);
    double lower = gp_pushforward_lower(a, b, 5e-3, 300);
    double sym = gp_distance_upper(b, a, 5e-3, 300);
    CHECK(upper == doctest::Approx(sym).epsilon(1e-9));  // symmetry of the construction
    CHECK(lower <= upper + 0.05);  // discretization slack
  }
}

TEST_CASE("convergence report: constant family has flat means") {
  FamilySpec f;
  f.eta = OffspringDistribution::poisson(1.0);
  f.mu_kind = "nod";
  f.nu_kind = "ske";
  f.scale_kind = "fixed:0.5";
  std::vector<int> sizes{10};
  std::vector<double> times{0.0};
  auto suite = default_suite();
  auto rows = convergence_report(f, sizes, times, suite, 400, 99, 2);
  REQUIRE(rows.size() == suite.size());
  // psi = total-mass polynomial on the normalized family: exactly 1
  for (const auto& r : rows) {
    if (r.psi_id == "mass_damped_const") {
      CHECK(r.mean == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
      CHECK(r.se <= 1e-15);
    }
  }
}

TEST_CASE("cauchy trend rows pair consecutive sizes") {
  std::vector<ConvergenceRow> rows{{125, "a", 0.0, 1.0, 0.0, 10},
                                   {250, "a", 0.0, 0.6, 0.0, 10},
                                   {500, "a", 0.0, 0.4, 0.0, 10}};
  auto tr = cauchy_trend(rows);
  REQUIRE(tr.size() == 1);
  REQUIRE(tr[0].diffs.size() == 2);
  CHECK(tr[0].diffs[0] == doctest::Approx(0.4));
  CHECK(tr[0].diffs[1] == doctest::Approx(0.2));
}

TEST_CASE("stats utilities sanity") {
  // KS on identical continuous samples
  Rng rng(83);
  std::vector<double> a, b;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(rng.uniform01());
    b.push_back(rng.uniform01());
  }
  CHECK(ks_two_sample_p(a, b) > 0.01);
  // chi-square p-value against known value: stat=0 -> p=1
  CHECK(chi_square_p(0.0, 3) == doctest::Approx(1.0));
  CHECK(chi_square_p(100.0, 3) < 1e-6);
  // slope fit on an exact line
  std::vector<double> xs{0.0, 1.0, 2.0}, ys{1.0, 3.0, 5.0};
  CHECK(fit_slope(xs, ys) == doctest::Approx(2.0).epsilon(1e-12));
}
