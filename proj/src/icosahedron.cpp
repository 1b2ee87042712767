#include "entfate/icosahedron.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <deque>
#include <string>

#include "entfate/errors.hpp"

namespace entfate {

SiteGraph::SiteGraph(int n_vertices, std::vector<kernels::Edge> edges) : n_(n_vertices) {
  if (n_ < 1) throw DomainError("SiteGraph: need at least one vertex");
  for (auto& [a, b] : edges) {
    if (a < 1 || b < 1 || a > n_ || b > n_ || a == b) throw DomainError("SiteGraph: bad edge");
    if (a > b) std::swap(a, b);
  }
  std::sort(edges.begin(), edges.end());
  if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw DomainError("SiteGraph: duplicate edge");
  }
  edges_ = std::move(edges);

  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_ + 1));
  for (auto [a, b] : edges_) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }

  dist_.assign(static_cast<std::size_t>(n_ * n_), -1);
  for (int s = 1; s <= n_; ++s) {
    std::deque<int> queue{s};
    dist_[static_cast<std::size_t>((s - 1) * n_ + (s - 1))] = 0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int w : adj[static_cast<std::size_t>(v)]) {
        auto& dw = dist_[static_cast<std::size_t>((s - 1) * n_ + (w - 1))];
        if (dw < 0) {
          dw = distance(s, v) + 1;
          queue.push_back(w);
        }
      }
    }
  }

  for (auto [a, b] : edges_) {
    for (int c = b + 1; c <= n_; ++c) {
      if (adjacent(a, c) && adjacent(b, c)) faces_.push_back({a, b, c});
    }
  }
}

int SiteGraph::distance(int a, int b) const {
  if (a < 1 || b < 1 || a > n_ || b > n_) throw DomainError("SiteGraph::distance: bad vertex");
  return dist_[static_cast<std::size_t>((a - 1) * n_ + (b - 1))];
}

int SiteGraph::degree(int v) const {
  int d = 0;
  for (int w = 1; w <= n_; ++w) d += (w != v && adjacent(v, w)) ? 1 : 0;
  return d;
}

std::array<double, 3> icosahedron_vertex(int label) {
  if (label < 1 || label > 12) throw DomainError("icosahedron_vertex: label out of range");
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  const int k = label - 1;
  const double s1 = (k / 6) == 0 ? 1.0 : -1.0;
  const double s2 = ((k / 3) % 2) == 0 ? 1.0 : -1.0;
  switch (k % 3) {
    case 0: return {0.0, s1, s2 * phi};
    case 1: return {s1, s2 * phi, 0.0};
    default: return {s2 * phi, 0.0, s1};
  }
}

SiteGraph build_icosahedron() {
  std::array<std::array<double, 3>, 12> x;
  for (int v = 1; v <= 12; ++v) x[static_cast<std::size_t>(v - 1)] = icosahedron_vertex(v);
  auto d2 = [&](int a, int b) {
    double s = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double diff = x[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] -
                          x[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)];
      s += diff * diff;
    }
    return s;
  };
  double dmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 12; ++a)
    for (int b = a + 1; b < 12; ++b) dmin = std::min(dmin, d2(a, b));
  std::vector<kernels::Edge> edges;
  for (int a = 0; a < 12; ++a)
    for (int b = a + 1; b < 12; ++b)
      if (d2(a, b) < dmin * (1.0 + 1e-9)) edges.emplace_back(a + 1, b + 1);
  return SiteGraph(12, std::move(edges));
}

SubsystemSpec pair_at_distance(const SiteGraph& graph, int d) {
  if (d < 1) throw DomainError("pair_at_distance: distance must be positive");
  const int n = graph.vertex_count();
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b)
      if (graph.distance(a, b) == d) return SubsystemSpec{a, b};
  throw DomainError("pair_at_distance: no pair at distance " + std::to_string(d));
}

SubsystemSpec triangle_scaled(const SiteGraph& graph, int scale) {
  if (scale < 1) throw DomainError("triangle_scaled: scale must be positive");
  const int n = graph.vertex_count();
  for (int a = 1; a <= n; ++a)
    for (int b = a + 1; b <= n; ++b) {
      if (graph.distance(a, b) != scale) continue;
      for (int c = b + 1; c <= n; ++c)
        if (graph.distance(a, c) == scale && graph.distance(b, c) == scale) {
          return SubsystemSpec{a, b, c};
        }
    }
  throw DomainError("triangle_scaled: no triangle with side " + std::to_string(scale));
}

}  // namespace entfate
