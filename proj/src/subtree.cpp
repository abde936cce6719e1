#include "subtree.hpp"

#include <stdexcept>

namespace bimt {

PointedSample tau_n(const BiMeasureTree& x, std::span<const TreePoint> u) {
  if (u.empty()) throw std::invalid_argument("tau_n: point list must be nonempty");
  Span span(x.tree(), u);
  Materialized m = materialize(span);
  PointedSample out{m.tree, {}, x.nu().restricted_to_span(span).transported(m)};
  out.marked.reserve(u.size());
  for (const auto& p : u) out.marked.push_back(m.map_point(x.tree(), p));
  return out;
}

PointedSample sample_subtree_vector(const BiMeasureTree& x, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_subtree_vector: n must be >= 1");
  if (!(x.mu().total() > 0.0))
    throw std::domain_error("sample_subtree_vector: mu has zero mass");
  std::vector<TreePoint> u;
  u.reserve(n);
  for (int k = 0; k < n; ++k) u.push_back(x.mu().sample(rng));
  return tau_n(x, u);
}

DistMatrix distance_matrix_sample(const BiMeasureTree& x, std::span<const TreePoint> marked,
                                  int m, Rng& rng) {
  if (m < 0) throw std::invalid_argument("distance_matrix_sample: m must be >= 0");
  std::vector<TreePoint> pts(marked.begin(), marked.end());
  for (int k = 0; k < m; ++k) pts.push_back(x.mu().sample(rng));
  return distance_matrix(x.tree(), pts);
}

}  // namespace bimt
