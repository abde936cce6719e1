#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "excursion.hpp"
#include "families.hpp"
#include "gw.hpp"
#include "prohorov.hpp"
#include "stats.hpp"
#include "support.hpp"

using namespace bimt;
using namespace bimt::test;

namespace {

std::string shape_key(const FiniteRTree& t) {
  std::string k;
  for (int c : offspring_sequence(t)) {
    k += std::to_string(c);
    k += '-';
  }
  return k;
}

}  // namespace

TEST_CASE("offspring families are valid pmfs") {
  for (auto spec : {"poisson:1.0", "geometric:0.5", "binary", "stable:alpha=1.9,C=1"}) {
    auto d = OffspringDistribution::parse(spec);
    long double sum = 0.0;
    for (double p : d.pmf) sum += p;
    CHECK(std::fabs(static_cast<double>(sum) - 1.0) <= 1e-12);
    CHECK(d.critical_or_subcritical);
  }
  CHECK(OffspringDistribution::geometric(0.5).mean == doctest::Approx(1.0));
  CHECK(OffspringDistribution::poisson(1.0).variance == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(OffspringDistribution::parse("nonsense:1"), std::invalid_argument);
  // alpha=1.5 с C=1 cannot be critical; the error names the constraint
  CHECK_THROWS_AS(OffspringDistribution::parse("stable:alpha=1.5,C=1"), std::domain_error);
  CHECK_NOTHROW(OffspringDistribution::parse("stable:alpha=1.5,C=0.5"));
}

TEST_CASE("heavy-tail pmf is critical and reports truncation") {
  auto d = OffspringDistribution::heavy_tail(1.5, 0.5);
  CHECK(std::fabs(d.mean - 1.0) <= 1e-9);
  CHECK(d.truncation_mass < 1e-8);
  CHECK(d.pmf[2] == doctest::Approx(0.5 * std::pow(2.0, -2.5)).epsilon(1e-9));
}

TEST_CASE("gw_conditioned has exactly N non-root nodes with unit edges") {
  Rng rng(41);
  auto eta = OffspringDistribution::poisson(1.0);
  for (int n : {1, 2, 5, 17}) {
    for (int rep = 0; rep < 20; ++rep) {
      auto t = gw_conditioned(eta, n, rng);
      CHECK(t->node_count() == n + 1);
      for (NodeId v = 1; v < t->node_count(); ++v) CHECK(t->edge_length(v) == 1.0);
    }
  }
  // N=1 is always the single edge
  auto t1 = gw_conditioned(eta, 1, rng);
  CHECK(t1->node_count() == 2);
  CHECK(t1->is_leaf(1));
}

TEST_CASE("binary family with odd node count is impossible") {
  Rng rng(42);
  auto eta = OffspringDistribution::binary(0.5, 0.5);
  CHECK_THROWS_AS(gw_conditioned(eta, 3, rng, 2000), std::domain_error);
  CHECK_NOTHROW(gw_conditioned(eta, 4, rng));
}

TEST_CASE("conditioned shapes match the enumeration oracle: geometric, N=3") {
  Rng rng(43);
  auto eta = OffspringDistribution::geometric(0.5);
  auto shapes = enumerate_conditioned_shapes(eta, 3);
  CHECK(shapes.size() == 5);  // the plane trees on 3 non-root nodes
  std::map<std::string, double> exact;
  for (const auto& [seq, p] : shapes) {
    std::string k;
    for (int c : seq) k += std::to_string(c) + "-";
    exact[k] = p;
  }
  const long n = 100000;
  std::map<std::string, long> counts;
  for (long i = 0; i < n; ++i) counts[shape_key(*gw_conditioned(eta, 3, rng))] += 1;
  std::vector<long> obs;
  std::vector<double> probs;
  for (const auto& [k, p] : exact) {
    probs.push_back(p);
    obs.push_back(counts.count(k) ? counts.at(k) : 0);
  }
  CHECK(chi_square_gof_p(obs, probs) > 0.01);
}

TEST_CASE("poisson N=2: path vs root-cherry in ratio 2:1") {
  auto eta = OffspringDistribution::poisson(1.0);
  auto shapes = enumerate_conditioned_shapes(eta, 2);
  REQUIRE(shapes.size() == 2);
  std::map<std::string, double> exact;
  for (const auto& [seq, p] : shapes) {
    std::string k;
    for (int c : seq) k += std::to_string(c) + "-";
    exact[k] = p;
  }
  CHECK(exact.at("1-1-0-") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(exact.at("2-0-0-") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  Rng rng(44);
  long paths = 0;
  const long n = 100000;
  for (long i = 0; i < n; ++i)
    if (gw_conditioned(eta, 2, rng)->child_count(0) == 1) ++paths;
  double se = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / n);
  CHECK(std::fabs(static_cast<double>(paths) / n - 2.0 / 3.0) <= 3.0 * se);
}

TEST_CASE("cycle-lemma and rejection sampling agree in distribution") {
  Rng rng(45);
  auto eta = OffspringDistribution::poisson(1.0);
  for (int n : {2, 3, 4}) {
    std::map<std::string, std::pair<long, long>> counts;
    const long reps = 100000;
    for (long i = 0; i < reps; ++i) counts[shape_key(*gw_conditioned(eta, n, rng))].first += 1;
    for (long i = 0; i < reps; ++i) counts[shape_key(*gw_rejection(eta, n, rng))].second += 1;
    std::vector<long> a, b;
    for (const auto& [k, c] : counts) {
      a.push_back(c.first);
      b.push_back(c.second);
    }
    CHECK(chi_square_homogeneity_p(a, b) > 0.01);
  }
}

TEST_CASE("contour of simple trees") {
  auto edge = FiniteRTree::single_edge(1.0);
  Excursion e1 = contour(*edge);
  REQUIRE(e1.breakpoints.size() == 3);
  CHECK(e1.breakpoints[0] == std::pair{0.0, 0.0});
  CHECK(e1.breakpoints[1] == std::pair{0.5, 1.0});
  CHECK(e1.breakpoints[2] == std::pair{1.0, 0.0});

  // path of 2 edges: 0 -> 1 -> 2 -> 1 -> 0
  FiniteRTree path({{kNoNode, 0.0}, {0, 1.0}, {1, 1.0}});
  Excursion e2 = contour(path);
  std::vector<double> vals;
  for (auto [t, v] : e2.breakpoints) vals.push_back(v);
  CHECK(vals == std::vector<double>{0, 1, 2, 1, 0});

  // root with one child that has two children: 0,1,2,1,2,1,0 at k/6
  FiniteRTree coff({{kNoNode, 0.0}, {0, 1.0}, {1, 1.0}, {1, 1.0}});
  Excursion e3 = contour(coff);
  std::vector<double> vals3;
  for (auto [t, v] : e3.breakpoints) vals3.push_back(v);
  CHECK(vals3 == std::vector<double>{0, 1, 2, 1, 2, 1, 0});
  for (size_t k = 0; k < e3.breakpoints.size(); ++k)
    CHECK(e3.breakpoints[k].first == doctest::Approx(k / 6.0).epsilon(1e-15));
}

TEST_CASE("excursion validation") {
  CHECK_THROWS_AS(Excursion({{0.0, 0.0}, {0.5, -1.0}, {1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Excursion({{0.0, 0.5}, {1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Excursion({{0.0, 0.0}, {0.4, 1.0}, {0.4, 2.0}, {1.0, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("glue of a tent is a single edge with normalized length measure") {
  Excursion tent({{0.0, 0.0}, {0.5, 2.5}, {1.0, 0.0}});
  GlueResult g = glue(tent);
  CHECK(g.tree->node_count() == 2);
  CHECK(g.tree->edge_length(1) == 2.5);
  CHECK(g.mu.total() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.mu.is_atomic() == false);
}

TEST_CASE("glue handles flat stretches as atoms") {
  Excursion e({{0.0, 0.0}, {0.25, 1.0}, {0.5, 1.0}, {1.0, 0.0}});
  GlueResult g = glue(e);
  CHECK(g.tree->node_count() == 2);
  CHECK(g.mu.atom_at(TreePoint::at_node(1)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(g.mu.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("glue(contour(T)) reproduces T's node distance matrix exactly") {
  Rng rng(46);
  auto eta = OffspringDistribution::poisson(1.0);
  for (int rep = 0; rep < 300; ++rep) {
    int n = 1 + static_cast<int>(rng.below(8));
    auto t = gw_conditioned(eta, n, rng);
    GlueResult g = glue(contour(*t));
    REQUIRE(g.tree->node_count() == t->node_count());
    std::vector<TreePoint> pts, pts_g;
    for (NodeId v = 0; v < t->node_count(); ++v) {
      pts.push_back(TreePoint::at_node(v));
      pts_g.push_back(TreePoint::at_node(v));
    }
    DistMatrix a = distance_matrix(*t, pts);
    DistMatrix b = distance_matrix(*g.tree, pts_g);
    for (int i = 0; i <= a.n; ++i)
      for (int j = 0; j <= a.n; ++j) CHECK(a(i, j) == b(i, j));
    // mu_e gives every edge mass 1/N
    for (NodeId v = 1; v < g.tree->node_count(); ++v) {
      const auto& segs = g.mu.segments(v);
      REQUIRE(segs.size() == 1);
      CHECK(segs[0].coeff * (segs[0].hi - segs[0].lo) ==
            doctest::Approx(1.0 / n).epsilon(1e-12));
    }
  }
}

TEST_CASE("rescale scales all distances linearly") {
  auto t = cherry();
  auto half = rescale(*t, 0.5);
  CHECK(distance(*half, TreePoint::at_node(2), TreePoint::at_node(3)) == 1.0);
  CHECK(rescale(*t, 1.0)->total_length() == t->total_length());
  CHECK_THROWS_AS(rescale(*t, 0.0), std::invalid_argument);
}

TEST_CASE("standard measures have the prescribed masses") {
  Rng rng(47);
  auto eta = OffspringDistribution::poisson(1.0);
  for (int n : {10, 50}) {
    auto disc = gw_conditioned(eta, n, rng);
    double a_n = crt_scale(1.0, n);
    auto tree = rescale(*disc, a_n);
    StandardMeasures sm = standard_measures(tree, n, a_n);
    CHECK(sm.mu_ske.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sm.mu_nod.total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sm.nu_ske.total() == doctest::Approx(a_n * n).epsilon(1e-12));
    CHECK(sm.nu_nod.total() == doctest::Approx(a_n * n).epsilon(1e-12));
  }
}

TEST_CASE("Prohorov distance between mu_ske and mu_nod is at most a_N") {
  Rng rng(48);
  auto eta = OffspringDistribution::poisson(1.0);
  int n = 40;
  auto disc = gw_conditioned(eta, n, rng);
  double a_n = crt_scale(1.0, n);
  auto tree = rescale(*disc, a_n);
  StandardMeasures sm = standard_measures(tree, n, a_n);
  // discretize both onto a shared support and compare exactly there
  double step = a_n / 8.0;
  auto atoms_ske = sm.mu_ske.discretized(step);
  auto atoms_nod = sm.mu_nod.discretized(step);
  std::vector<TreePoint> pts;
  std::vector<double> m1, m2;
  for (const auto& a : atoms_ske) pts.push_back(a.point);
  for (const auto& a : atoms_nod) pts.push_back(a.point);
  size_t K = pts.size();
  std::vector<double> dist(K * K, 0.0);
  for (size_t i = 0; i < K; ++i)
    for (size_t j = i + 1; j < K; ++j) {
      double d = distance(*tree, pts[i], pts[j]);
      dist[i * K + j] = d;
      dist[j * K + i] = d;
    }
  m1.assign(K, 0.0);
  m2.assign(K, 0.0);
  for (size_t i = 0; i < atoms_ske.size(); ++i) m1[i] = atoms_ske[i].mass;
  for (size_t j = 0; j < atoms_nod.size(); ++j) m2[atoms_ske.size() + j] = atoms_nod[j].mass;
  double d = prohorov_distance(dist, K, m1, m2, 1e-6);
  CHECK(d <= a_n + step + 1e-6);
}

TEST_CASE("height-slice measure hits non-leaf points at the exact height") {
  auto t = cherry();
  TreeMeasure h_half = height_slice_measure(t, 0.5);
  CHECK(h_half.total() == 1.0);
  CHECK(h_half.atom_at(make_point(*t, 1, 0.5)) == 1.0);
  // at height 1 the slice hits the branch node only (not the leaves above)
  TreeMeasure h_one = height_slice_measure(t, 1.0);
  CHECK(h_one.total() == 1.0);
  CHECK(h_one.atom_at(TreePoint::at_node(1)) == 1.0);
  // height 2 crosses only the leaves, which are excluded
  CHECK(height_slice_measure(t, 2.0).total() == 0.0);
  // beyond the tree: empty, not an error
  CHECK(height_slice_measure(t, 9.0).total() == 0.0);
}

TEST_CASE("adh measure: atom c(v)-1 on branch nodes, total #leaves-1") {
  Rng rng(49);
  auto eta = OffspringDistribution::poisson(1.0);
  for (int rep = 0; rep < 50; ++rep) {
    int n = 2 + static_cast<int>(rng.below(40));
    auto t = gw_conditioned(eta, n, rng);
    TreeMeasure adh = adh_measure(t);
    for (const auto& a : adh.atoms()) {
      REQUIRE(a.point.is_node());
      CHECK(t->child_count(a.point.node) >= 2);
      CHECK(a.mass == static_cast<double>(t->child_count(a.point.node) - 1));
    }
    long n_leaves = static_cast<long>(t->leaves().size());
    long n_internal = t->node_count() - n_leaves;
    CHECK(adh.total() == static_cast<double>(n_leaves - 1));
    CHECK(adh.total() == static_cast<double>(t->edge_count() - n_internal));
  }
}

TEST_CASE("scaling constants") {
  CHECK(crt_scale(1.0, 100) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(crt_scale(2.0, 400) == doctest::Approx(0.1).epsilon(1e-12));
  // alpha-stable: N^{-(1-1/alpha)} (alpha(alpha-1)/(C Gamma(2-alpha)))^{-1/alpha}
  double alpha = 1.5, c = 0.5;
  int n = 1000;
  double expect = std::pow(n, -(1.0 - 1.0 / alpha)) *
                  std::pow(alpha * (alpha - 1.0) / (c * std::tgamma(2.0 - alpha)), -1.0 / alpha);
  CHECK(stable_scale(alpha, c, n) == doctest::Approx(expect).epsilon(1e-14));
}
