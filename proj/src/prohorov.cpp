#include "prohorov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace bimt {

namespace {

// Dinic max-flow on doubles; node 0 = source, node 1 = sink.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1) {}

  void add_edge(int a, int b, double cap) {
    edges_.push_back({b, head_[a], cap});
    head_[a] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({a, head_[b], 0.0});
    head_[b] = static_cast<int>(edges_.size()) - 1;
  }

  double run(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      iter_ = head_;
      double f;
      while ((f = dfs(s, t, std::numeric_limits<double>::infinity())) > kEps) flow += f;
    }
    return flow;
  }

 private:
  static constexpr double kEps = 1e-13;
  struct Edge {
    int to, next;
    double cap;
  };
  std::vector<Edge> edges_;
  std::vector<int> head_, level_, iter_;

  bool bfs(int s, int t) {
    level_.assign(head_.size(), -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (int e = head_[v]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > kEps && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[v] + 1;
          q.push(edges_[e].to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int v, int t, double limit) {
    if (v == t) return limit;
    for (int& e = iter_[v]; e != -1; e = edges_[e].next) {
      Edge& ed = edges_[e];
      if (ed.cap > kEps && level_[ed.to] == level_[v] + 1) {
        double f = dfs(ed.to, t, std::min(limit, ed.cap));
        if (f > kEps) {
          ed.cap -= f;
          edges_[e ^ 1].cap += f;
          return f;
        }
      }
    }
    return 0.0;
  }
};

// max over subsets A of [from(A) - to(A^eps)] <= eps, via min-cut duality:
// it equals ||from|| minus the max flow with edges where d < eps.
bool one_sided(std::span<const double> dist, size_t K, std::span<const double> from,
               std::span<const double> to, double eps) {
  double from_total = 0.0;
  for (double m : from) from_total += m;
  MaxFlow mf(static_cast<int>(2 * K + 2));
  const int src = 0, sink = 1;
  for (size_t i = 0; i < K; ++i) {
    if (from[i] > 0.0) mf.add_edge(src, static_cast<int>(2 + i), from[i]);
    if (to[i] > 0.0) mf.add_edge(static_cast<int>(2 + K + i), sink, to[i]);
  }
  for (size_t i = 0; i < K; ++i) {
    if (from[i] <= 0.0) continue;
    for (size_t j = 0; j < K; ++j) {
      if (to[j] <= 0.0) continue;
      if (dist[i * K + j] < eps)
        mf.add_edge(static_cast<int>(2 + i), static_cast<int>(2 + K + j), from_total);
    }
  }
  double flow = mf.run(src, sink);
  return from_total - flow <= eps + 1e-12;
}

}  // namespace

bool prohorov_feasible(std::span<const double> dist, size_t K, std::span<const double> m1,
                       std::span<const double> m2, double eps) {
  return one_sided(dist, K, m2, m1, eps) && one_sided(dist, K, m1, m2, eps);
}

double prohorov_distance(std::span<const double> dist, size_t K, std::span<const double> m1,
                         std::span<const double> m2, double tol) {
  if (m1.size() != K || m2.size() != K || dist.size() != K * K)
    throw std::invalid_argument("prohorov_distance: size mismatch");
  for (size_t i = 0; i < K; ++i) {
    if (m1[i] < 0.0 || m2[i] < 0.0)
      throw std::invalid_argument("prohorov_distance: negative masses");
  }
  double t1 = 0.0, t2 = 0.0, dmax = 0.0;
  for (double m : m1) t1 += m;
  for (double m : m2) t2 += m;
  for (double d : dist) dmax = std::max(dmax, d);
  if (t1 == 0.0 && t2 == 0.0) return 0.0;
  double hi = std::max({t1, t2, dmax}) + 1.0;
  double lo = 0.0;
  // the feasible set is an up-set in eps; bisect to tol
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (prohorov_feasible(dist, K, m1, m2, mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace bimt
