#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "io.hpp"
#include "measure.hpp"
#include "stats.hpp"
#include "support.hpp"

using namespace bimt;
using namespace bimt::test;

TEST_CASE("total mass and normalize basics") {
  auto t = cherry();
  TreeMeasure dirac = TreeMeasure::atoms_only(t, {{TreePoint::at_node(2), 1.0}});
  CHECK(dirac.total() == 1.0);
  CHECK(dirac.normalized().total() == 1.0);
  CHECK(dirac.normalized().atom_at(TreePoint::at_node(2)) == 1.0);

  TreeMeasure len = TreeMeasure::length_measure(t);
  CHECK(len.total() == 3.0);

  auto edge = FiniteRTree::single_edge(2.0);
  std::vector<double> coeff{0.0, 1.0};
  TreeMeasure mixed = TreeMeasure::make(edge, coeff, {{make_point(*edge, 1, 0.5), 0.5}});
  CHECK(mixed.total() == 2.5);
  CHECK(mixed.normalized().atom_at(make_point(*edge, 1, 0.5)) == doctest::Approx(0.2));

  Rng rng(1);
  CHECK_THROWS_AS(TreeMeasure::zero(t).normalized(), std::domain_error);
  CHECK_THROWS_AS(TreeMeasure::zero(t).sample(rng), std::domain_error);
}

TEST_CASE("zero-mass atoms are dropped and duplicates merged") {
  auto t = cherry();
  TreeMeasure m = TreeMeasure::atoms_only(t, {{TreePoint::at_node(2), 0.0},
                                              {TreePoint::at_node(3), 0.5},
                                              {TreePoint::at_node(3), 0.25}});
  CHECK(m.atoms().size() == 1);
  CHECK(m.atom_at(TreePoint::at_node(3)) == 0.75);
  CHECK_THROWS_AS(TreeMeasure::atoms_only(t, {{TreePoint::at_node(2), -1.0}}),
                  std::invalid_argument);
}

TEST_CASE("restriction to spans: cherry cases") {
  auto t = cherry();
  TreeMeasure len = TreeMeasure::length_measure(t);
  Span to_u1(*t, std::vector<TreePoint>{TreePoint::at_node(2)});
  CHECK(len.restricted_to_span(to_u1).total() == 2.0);
  CHECK(len.mass_of_span(to_u1) == 2.0);

  // a point's own cut removes its atom
  TreePoint v = make_point(*t, 1, 0.5);
  TreeMeasure dv = TreeMeasure::atoms_only(t, {{v, 1.0}});
  PrunedView view(t, {v});
  CHECK(dv.restricted_to_pruned(view).total() == 0.0);
}

TEST_CASE("restrict is additive against the complement") {
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    auto t = random_tree(rng, 15);
    TreeMeasure m = random_measure(t, rng, true, 4);
    auto cuts = random_points(*t, rng, 3);
    PrunedView view(t, cuts);
    TreeMeasure inside = m.restricted_to_pruned(view);
    CHECK(inside.total() == doctest::Approx(m.mass_on_pruned(view)).epsilon(1e-12));
    double outside = m.total() - inside.total();
    CHECK(outside >= -1e-12);
  }
}

TEST_CASE("restrict is monotone in the region") {
  Rng rng(22);
  for (int i = 0; i < 100; ++i) {
    auto t = random_tree(rng, 15);
    TreeMeasure m = random_measure(t, rng, true, 4);
    auto pts = random_points(*t, rng, 4);
    Span small(*t, std::span<const TreePoint>(pts.data(), 2));
    Span big(*t, pts);
    CHECK(m.mass_of_span(small) <= m.mass_of_span(big) + 1e-12);
  }
}

TEST_CASE("restricted span mass matches Monte-Carlo point sampling") {
  Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    auto t = random_tree(rng, 12);
    TreeMeasure m = random_measure(t, rng, true, 3);
    if (!(m.total() > 0.0)) continue;
    auto pts = random_points(*t, rng, 3);
    Span span(*t, pts);
    double exact = m.mass_of_span(span);
    const long n = 10000;
    long hits = 0;
    for (long s = 0; s < n; ++s)
      if (span.contains(m.sample(rng))) ++hits;
    double p = exact / m.total();
    double se = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
    CHECK(std::fabs(static_cast<double>(hits) / n - p) <= 4.0 * se + 1e-9);
  }
}

TEST_CASE("measure_of_span equals restrict-then-total") {
  Rng rng(24);
  for (int i = 0; i < 100; ++i) {
    auto t = random_tree(rng, 15);
    TreeMeasure m = random_measure(t, rng, true, 4);
    auto pts = random_points(*t, rng, 3);
    Span span(*t, pts);
    CHECK(measure_of_span(m, pts) ==
          doctest::Approx(m.restricted_to_span(span).total()).epsilon(1e-12));
  }
}

TEST_CASE("measure_of_span simple exact cases") {
  auto edge = FiniteRTree::single_edge(2.5);
  TreeMeasure len = TreeMeasure::length_measure(edge);
  std::vector<TreePoint> leaf{TreePoint::at_node(1)};
  CHECK(measure_of_span(len, leaf) == 2.5);

  auto t = cherry();
  TreeMeasure db = TreeMeasure::atoms_only(t, {{TreePoint::at_node(1), 1.0}});
  std::vector<TreePoint> u1{TreePoint::at_node(2)};
  CHECK(measure_of_span(db, u1) == 1.0);  // b lies on [root, u1]
}

TEST_CASE("sample_point reproduces the measure") {
  Rng rng(25);
  auto edge = FiniteRTree::single_edge(2.0);

  // uniform offset on a single edge
  TreeMeasure len = TreeMeasure::length_measure(edge);
  double acc = 0.0;
  const long n = 10000;
  for (long i = 0; i < n; ++i) acc += point_height(*edge, len.sample(rng));
  double mean = acc / n;
  double se = (2.0 / std::sqrt(12.0)) / std::sqrt(static_cast<double>(n));
  CHECK(std::fabs(mean - 1.0) <= 3.0 * se);

  // two atoms 0.25 / 0.75
  TreeMeasure two = TreeMeasure::atoms_only(
      edge, {{TreePoint::at_node(0), 0.25}, {TreePoint::at_node(1), 0.75}});
  long at_root = 0;
  for (long i = 0; i < n; ++i)
    if (two.sample(rng) == TreePoint::at_node(0)) ++at_root;
  double p_hat = static_cast<double>(at_root) / n;
  double se2 = std::sqrt(0.25 * 0.75 / n);
  CHECK(std::fabs(p_hat - 0.25) <= 3.0 * se2);

  // a Dirac measure always yields its point
  TreeMeasure dirac = TreeMeasure::atoms_only(edge, {{TreePoint::at_node(1), 1.0}});
  for (int i = 0; i < 20; ++i) CHECK(dirac.sample(rng) == TreePoint::at_node(1));
}

TEST_CASE("empirical frequency of a span converges to its normalized mass") {
  Rng rng(26);
  auto t = random_tree(rng, 10);
  TreeMeasure m = random_measure(t, rng, true, 3);
  if (!(m.total() > 0.0)) return;
  auto pts = random_points(*t, rng, 2);
  Span span(*t, pts);
  const long n = 10000;
  long hits = 0;
  for (long i = 0; i < n; ++i)
    if (span.contains(m.sample(rng))) ++hits;
  double p = m.mass_of_span(span) / m.total();
  double se = std::sqrt(std::max(p * (1 - p), 1e-12) / n);
  CHECK(std::fabs(static_cast<double>(hits) / n - p) <= 3.0 * se + 1e-9);
}

TEST_CASE("mu-skeleton and mu-leaves") {
  auto edge = FiniteRTree::single_edge(1.0);
  TreePoint leaf = TreePoint::at_node(1);

  // atom at the leaf: the skeleton contains the leaf via the atom clause
  TreeMeasure dl = TreeMeasure::atoms_only(edge, {{leaf, 1.0}});
  CHECK(mu_skeleton_contains(dl, leaf));
  CHECK(mu_skeleton_contains(dl, make_point(*edge, 1, 0.5)));
  CHECK(mu_leaves(dl).empty());

  // length measure: mu-leaves are the tree's leaf nodes
  auto t = cherry();
  TreeMeasure len = TreeMeasure::length_measure(t);
  auto lvs = mu_leaves(len);
  REQUIRE(lvs.size() == 2);
  CHECK(lvs[0] == TreePoint::at_node(2));
  CHECK(lvs[1] == TreePoint::at_node(3));
  CHECK_FALSE(mu_skeleton_contains(len, TreePoint::at_node(2)));
  CHECK(mu_skeleton_contains(len, TreePoint::at_node(1)));
}

TEST_CASE("mu-skeleton membership matches the definition on dense samples") {
  Rng rng(27);
  for (int i = 0; i < 50; ++i) {
    auto t = random_tree(rng, 12);
    TreeMeasure m = random_measure(t, rng, true, 3);
    for (int q = 0; q < 30; ++q) {
      TreePoint p = random_point(*t, rng);
      bool expect = m.atom_at(p) > 0.0;
      if (!expect) {
        for (const auto& a : m.atoms())
          if (weak_ancestor(*t, p, a.point) && !(p == a.point)) expect = true;
        for (NodeId v = 1; v < t->node_count() && !expect; ++v) {
          for (const auto& s : m.segments(v)) {
            TreePoint top = make_point(*t, v, s.hi);
            if (weak_ancestor(*t, p, top) && !(p == top)) expect = true;
          }
        }
      }
      CHECK(mu_skeleton_contains(m, p) == expect);
    }
  }
}

TEST_CASE("bi-measure tree rejects nu-atoms on mu-leaves") {
  auto t = cherry();
  TreeMeasure mu = TreeMeasure::length_measure(t);
  TreeMeasure bad_nu = TreeMeasure::atoms_only(t, {{TreePoint::at_node(2), 1.0}});
  CHECK_THROWS_AS(BiMeasureTree(t, mu, bad_nu), std::invalid_argument);
  TreeMeasure good_nu = TreeMeasure::atoms_only(t, {{TreePoint::at_node(1), 1.0}});
  CHECK_NOTHROW(BiMeasureTree(t, mu, good_nu));
  // atomic mu never has mu-leaves, so any nu is fine
  TreeMeasure mu_atoms = TreeMeasure::atoms_only(t, {{TreePoint::at_node(2), 1.0}});
  CHECK_NOTHROW(BiMeasureTree(t, mu_atoms, bad_nu));
}

TEST_CASE("rescaling scales lengths and masses consistently") {
  Rng rng(28);
  auto t = random_tree(rng, 10);
  TreeMeasure m = random_measure(t, rng, true, 3);
  std::vector<FiniteRTree::NodeSpec> spec;
  spec.push_back({kNoNode, 0.0});
  for (NodeId v = 1; v < t->node_count(); ++v)
    spec.push_back({t->parent(v), 0.5 * t->edge_length(v)});
  auto half = std::make_shared<FiniteRTree>(std::move(spec));
  TreeMeasure mh = m.rescaled(half, 0.5, 2.0);
  CHECK(mh.total() == doctest::Approx(2.0 * m.total()).epsilon(1e-12));
}

TEST_CASE("tree and measure serialization round-trips") {
  Rng rng(29);
  auto t = random_tree(rng, 10);
  TreeMeasure m = random_measure(t, rng, true, 3);
  Json j = measure_to_json(m);
  TreeMeasure back = measure_from_json(j, t);
  CHECK(back.total() == doctest::Approx(m.total()).epsilon(1e-15));
  CHECK(back.atoms().size() == m.atoms().size());

  auto t2 = tree_from_json(tree_to_json(*t));
  CHECK(t2->node_count() == t->node_count());
  for (NodeId v = 1; v < t->node_count(); ++v) {
    CHECK(t2->parent(v) == t->parent(v));
    CHECK(t2->edge_length(v) == t->edge_length(v));
  }
}
