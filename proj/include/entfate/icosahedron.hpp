#pragma once

#include <array>
#include <vector>

#include "entfate/kernels.hpp"
#include "entfate/qstate.hpp"

namespace entfate {

// Undirected simple graph on vertices 1..n with all-pairs BFS distances.
// Only the icosahedron is wired to the drivers; the type is general so tests
// can build small graphs.
class SiteGraph {
 public:
  SiteGraph(int n_vertices, std::vector<kernels::Edge> edges);

  int vertex_count() const { return n_; }
  const std::vector<kernels::Edge>& edges() const { return edges_; }
  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  // -1 when unreachable
  int distance(int a, int b) const;
  int degree(int v) const;
  bool adjacent(int a, int b) const { return distance(a, b) == 1; }

 private:
  int n_;
  std::vector<kernels::Edge> edges_;         // (a, b) with a < b, sorted
  std::vector<std::array<int, 3>> faces_;    // triangles, sorted
  std::vector<int> dist_;                    // n x n
};

// Icosahedron from the golden-ratio vertices, i.e. the cyclic permutations of
// (0, ±1, ±φ). Labels follow the generation order
//   (0, s1, s2 φ), (s1, s2 φ, 0), (s2 φ, 0, s1)   for s1, s2 in (+, -)
// with s1 the outer loop. Edges join vertex pairs at minimal distance.
SiteGraph build_icosahedron();

// Cartesian coordinates of vertex `label` in the construction above.
std::array<double, 3> icosahedron_vertex(int label);

// Lexicographically smallest pair at graph distance d.
SubsystemSpec pair_at_distance(const SiteGraph& graph, int d);

// Lexicographically smallest triple whose three pairwise distances all equal
// `scale` (scale 1 gives a face).
SubsystemSpec triangle_scaled(const SiteGraph& graph, int scale);

}  // namespace entfate
