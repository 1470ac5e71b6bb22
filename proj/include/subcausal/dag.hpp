#pragma once

#include <array>
#include <set>
#include <utility>
#include <vector>

#include "subcausal/rational.hpp"

namespace subcausal::dag {

using Edge = std::pair<int, int>;
using EdgeSet = std::set<Edge>;

// Directed acyclic graph over nodes {0, ..., node_count-1}; node 0 is the
// action, node node_count-1 the consequence. Restriction keeps the node set
// and drops edges (the paper's R ∩ N'×N').
class Dag {
 public:
  Dag(int node_count, EdgeSet edges);

  int node_count() const { return node_count_; }
  int consequence() const { return node_count_ - 1; }
  const EdgeSet& edges() const { return edges_; }
  bool edge(int i, int j) const { return edges_.count({i, j}) > 0; }
  bool linked(int i, int j) const { return edge(i, j) || edge(j, i); }
  const std::vector<int>& parents(int j) const { return parents_[j]; }
  const std::vector<int>& children(int i) const { return children_[i]; }

  bool operator==(const Dag& o) const {
    return node_count_ == o.node_count_ && edges_ == o.edges_;
  }

 private:
  int node_count_;
  EdgeSet edges_;
  std::vector<std::vector<int>> parents_, children_;
};

struct DagProperties {
  bool uninformed = false;   // no edges into node 0
  bool nontrivial = false;   // a directed path 0 -> n+1 exists
  bool perfect = false;      // no v-colliders
  bool well_behaved = false; // perfect & uninformed & nontrivial & R ⊆ N*(R)^2
  std::vector<std::array<int, 3>> v_colliders;  // (i, j, k) with i < j
};

DagProperties classify(const Dag& R);

// All minimal active paths (0, i1, ..., n+1): consecutive edges, no shortcut
// edge between non-consecutive nodes. Sorted lexicographically.
std::vector<std::vector<int>> enumerate_maps(const Dag& R);

// Links present in every uninformed DAG equivalent to R, via the
// distance/recursion characterization with d(0,·) the shortest directed
// path length from node 0. Requires R perfect, uninformed, nontrivial.
EdgeSet fundamental_links(const Dag& R);

// N*(R): the union of nodes over all R-MAPs. Requires perfect, uninformed,
// nontrivial.
std::vector<int> relevant_nodes(const Dag& R);

struct JunctionTree {
  std::vector<std::vector<int>> cliques;        // C_1, ..., C_m (sorted node lists)
  std::vector<std::vector<int>> intersections;  // A_i = C_i ∩ C_{i+1}, i = 1..m-1
};

// Maximal clique junction tree of the skeleton restricted to N*(R), as a
// path anchored at the clique containing node 0. Requires the restriction
// of R to N*(R) to be well-behaved ("unsupported" otherwise).
JunctionTree mcjt(const Dag& R);

// The ordered minimal separators A*_1, ..., A*_m with A*_m = {n+1} and the
// implicit A*_0 = {0}.
struct SeparatorOrder {
  std::vector<std::vector<int>> sets;
  int size() const { return static_cast<int>(sets.size()); }
};

SeparatorOrder separator_order_from_dag(const Dag& R);

// Markov equivalence: same skeleton and same v-collider set.
bool is_equivalent(const Dag& R, const Dag& Rp);

// The perfect revealed DAG of an order: edges A*_i -> A*_{i+1} \ A*_i (with
// A*_0 = {0}) plus ascending-index edges inside each A*_{i+1} \ A*_i.
Dag revealed_dag_from_order(const SeparatorOrder& ord, int n_covariates);

// Induced edge set on `keep`; node set unchanged. `keep` must contain 0 and
// the consequence node.
Dag restrict_to(const Dag& R, const std::vector<int>& keep);

// Convenience: R restricted to its relevant nodes.
Dag core(const Dag& R);

}  // namespace subcausal::dag
