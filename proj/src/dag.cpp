#include "subcausal/dag.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace subcausal::dag {

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 2;

std::vector<int> sorted_intersection(const std::vector<int>& a,
                                     const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

bool contains(const std::vector<int>& sorted, int x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

}  // namespace

Dag::Dag(int node_count, EdgeSet edges)
    : node_count_(node_count), edges_(std::move(edges)),
      parents_(node_count), children_(node_count) {
  if (node_count_ < 2) throw Error("domain", "a DAG needs at least nodes 0 and n+1");
  for (const auto& [i, j] : edges_) {
    if (i < 0 || j < 0 || i >= node_count_ || j >= node_count_)
      throw Error("domain", "edge endpoint out of range");
    if (i == j) throw Error("acyclicity", "self-loop on node " + std::to_string(i));
    parents_[j].push_back(i);
    children_[i].push_back(j);
  }
  for (auto& v : parents_) std::sort(v.begin(), v.end());
  for (auto& v : children_) std::sort(v.begin(), v.end());
  // Kahn's algorithm; leftover nodes mean a cycle.
  std::vector<int> indeg(node_count_);
  for (int j = 0; j < node_count_; ++j) indeg[j] = static_cast<int>(parents_[j].size());
  std::deque<int> q;
  for (int j = 0; j < node_count_; ++j)
    if (indeg[j] == 0) q.push_back(j);
  int seen = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    ++seen;
    for (int v : children_[u])
      if (--indeg[v] == 0) q.push_back(v);
  }
  if (seen != node_count_) throw Error("acyclicity", "edge list contains a cycle");
}

DagProperties classify(const Dag& R) {
  DagProperties props;
  props.uninformed = R.parents(0).empty();

  std::vector<char> reach(R.node_count(), 0);
  std::deque<int> q{0};
  reach[0] = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : R.children(u))
      if (!reach[v]) { reach[v] = 1; q.push_back(v); }
  }
  props.nontrivial = reach[R.consequence()] != 0;

  for (int k = 0; k < R.node_count(); ++k) {
    const auto& pa = R.parents(k);
    for (size_t x = 0; x < pa.size(); ++x)
      for (size_t y = x + 1; y < pa.size(); ++y)
        if (!R.linked(pa[x], pa[y]))
          props.v_colliders.push_back({pa[x], pa[y], k});
  }
  props.perfect = props.v_colliders.empty();

  if (props.perfect && props.uninformed && props.nontrivial) {
    std::set<int> relevant;
    for (const auto& m : enumerate_maps(R)) relevant.insert(m.begin(), m.end());
    bool inside = true;
    for (const auto& [i, j] : R.edges())
      if (!relevant.count(i) || !relevant.count(j)) { inside = false; break; }
    props.well_behaved = inside;
  }
  return props;
}

std::vector<std::vector<int>> enumerate_maps(const Dag& R) {
  std::vector<std::vector<int>> maps;
  std::vector<int> path{0};
  auto minimal = [&](const std::vector<int>& p) {
    for (size_t a = 0; a + 1 < p.size(); ++a)
      for (size_t b = 0; b < p.size(); ++b)
        if (b != a + 1 && R.edge(p[a], p[b])) return false;
    return true;
  };
  // DFS over all directed paths 0 -> n+1; the graph is acyclic so paths are simple.
  std::vector<std::pair<int, size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& ch = R.children(node);
    if (node == R.consequence()) {
      if (minimal(path)) maps.push_back(path);
      stack.pop_back();
      path.pop_back();
      continue;
    }
    if (next >= ch.size()) {
      stack.pop_back();
      path.pop_back();
      continue;
    }
    int v = ch[next++];
    path.push_back(v);
    stack.push_back({v, 0});
  }
  std::sort(maps.begin(), maps.end());
  return maps;
}

namespace {

void require_punt(const Dag& R, const char* op) {
  DagProperties p = classify(R);
  if (!p.perfect || !p.uninformed || !p.nontrivial)
    throw Error("unsupported",
                std::string(op) + " needs a perfect, uninformed, nontrivial DAG");
}

}  // namespace

EdgeSet fundamental_links(const Dag& R) {
  require_punt(R, "fundamental_links");
  std::vector<int> d0(R.node_count(), kInf);
  d0[0] = 0;
  std::deque<int> q{0};
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int v : R.children(u))
      if (d0[v] == kInf) { d0[v] = d0[u] + 1; q.push_back(v); }
  }
  EdgeSet fund;
  for (const auto& [j, k] : R.edges())
    if (d0[j] < kInf && d0[k] < kInf && d0[j] == d0[k] - 1) fund.insert({j, k});
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& [j, k] : R.edges()) {
      if (fund.count({j, k})) continue;
      for (int l = 1; l < R.node_count(); ++l) {
        if (fund.count({l, j}) && !R.edge(l, k)) {
          fund.insert({j, k});
          grew = true;
          break;
        }
      }
    }
  }
  return fund;
}

std::vector<int> relevant_nodes(const Dag& R) {
  require_punt(R, "relevant_nodes");
  std::set<int> nodes;
  for (const auto& m : enumerate_maps(R)) nodes.insert(m.begin(), m.end());
  return {nodes.begin(), nodes.end()};
}

Dag restrict_to(const Dag& R, const std::vector<int>& keep) {
  std::vector<int> k = keep;
  std::sort(k.begin(), k.end());
  if (!contains(k, 0) || !contains(k, R.consequence()))
    throw Error("domain", "restriction must keep nodes 0 and n+1");
  EdgeSet edges;
  for (const auto& e : R.edges())
    if (contains(k, e.first) && contains(k, e.second)) edges.insert(e);
  return Dag(R.node_count(), std::move(edges));
}

Dag core(const Dag& R) { return restrict_to(R, relevant_nodes(R)); }

namespace {

// Bron-Kerbosch on the skeleton restricted to `verts`. Fine at this scale.
void bron_kerbosch(const Dag& R, std::vector<int> r, std::vector<int> p,
                   std::vector<int> x, std::vector<std::vector<int>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  std::vector<int> p_copy = p;
  for (int v : p_copy) {
    std::vector<int> r2 = r;
    r2.push_back(v);
    std::sort(r2.begin(), r2.end());
    std::vector<int> p2, x2;
    for (int u : p)
      if (R.linked(u, v)) p2.push_back(u);
    for (int u : x)
      if (R.linked(u, v)) x2.push_back(u);
    bron_kerbosch(R, r2, p2, x2, out);
    p.erase(std::find(p.begin(), p.end(), v));
    x.push_back(v);
  }
}

}  // namespace

JunctionTree mcjt(const Dag& R) {
  require_punt(R, "mcjt");
  Dag res = core(R);
  auto verts = relevant_nodes(R);

  std::vector<std::vector<int>> cliques;
  bron_kerbosch(res, {}, verts, {}, cliques);
  std::sort(cliques.begin(), cliques.end());

  // The cliques of a well-behaved DAG form a path junction tree: anchor at
  // the unique clique containing 0, then repeatedly take the unique unused
  // clique containing the running separator.
  std::vector<std::vector<int>> ordered;
  std::vector<char> used(cliques.size(), 0);
  int start = -1;
  for (size_t i = 0; i < cliques.size(); ++i) {
    if (contains(cliques[i], 0)) {
      if (start >= 0)
        throw Error("unsupported", "node 0 appears in more than one maximal clique");
      start = static_cast<int>(i);
    }
  }
  if (start < 0) throw Error("unsupported", "no maximal clique contains node 0");
  ordered.push_back(cliques[start]);
  used[start] = 1;
  std::vector<std::vector<int>> intersections;
  while (ordered.size() < cliques.size()) {
    std::vector<int> rest_union;
    for (size_t i = 0; i < cliques.size(); ++i)
      if (!used[i]) rest_union.insert(rest_union.end(), cliques[i].begin(), cliques[i].end());
    std::sort(rest_union.begin(), rest_union.end());
    rest_union.erase(std::unique(rest_union.begin(), rest_union.end()), rest_union.end());
    auto sep = sorted_intersection(ordered.back(), rest_union);
    if (sep.empty())
      throw Error("unsupported", "clique graph is disconnected on N*(R)");
    int next = -1;
    for (size_t i = 0; i < cliques.size(); ++i) {
      if (used[i]) continue;
      if (sorted_intersection(cliques[i], sep) == sep) {
        if (next >= 0)
          throw Error("unsupported", "separator contained in two unused cliques");
        next = static_cast<int>(i);
      }
    }
    if (next < 0)
      throw Error("unsupported", "running separator not contained in any unused clique");
    intersections.push_back(sep);
    ordered.push_back(cliques[next]);
    used[next] = 1;
  }

  if (!contains(ordered.back(), R.consequence()))
    throw Error("unsupported", "consequence node not in the last clique");
  for (size_t i = 0; i + 1 < ordered.size(); ++i)
    if (contains(ordered[i], R.consequence()))
      throw Error("unsupported", "consequence node in an interior clique");
  for (size_t i = 1; i < ordered.size(); ++i)
    if (contains(ordered[i], 0))
      throw Error("unsupported", "node 0 in an interior clique");

  JunctionTree jt;
  jt.cliques = std::move(ordered);
  jt.intersections = std::move(intersections);
  return jt;
}

SeparatorOrder separator_order_from_dag(const Dag& R) {
  JunctionTree jt = mcjt(R);
  SeparatorOrder ord;
  ord.sets = jt.intersections;
  ord.sets.push_back({R.consequence()});
  return ord;
}

bool is_equivalent(const Dag& R, const Dag& Rp) {
  if (R.node_count() != Rp.node_count())
    throw Error("domain", "equivalence compares DAGs over the same node set");
  EdgeSet sk1, sk2;
  for (const auto& [i, j] : R.edges()) sk1.insert({std::min(i, j), std::max(i, j)});
  for (const auto& [i, j] : Rp.edges()) sk2.insert({std::min(i, j), std::max(i, j)});
  if (sk1 != sk2) return false;
  auto colliders = [](const Dag& d) {
    auto v = classify(d).v_colliders;
    std::sort(v.begin(), v.end());
    return v;
  };
  return colliders(R) == colliders(Rp);
}

Dag revealed_dag_from_order(const SeparatorOrder& ord, int n_covariates) {
  int n1 = n_covariates + 1;
  if (ord.sets.empty() || ord.sets.back() != std::vector<int>{n1})
    throw Error("domain", "separator order must end with {n+1}");
  for (const auto& s : ord.sets) {
    if (s.empty()) throw Error("domain", "empty separator");
    for (int v : s)
      if (v < 1 || v > n1) throw Error("domain", "separator member outside {1..n+1}");
  }
  for (size_t i = 0; i < ord.sets.size(); ++i)
    for (size_t j = 0; j < ord.sets.size(); ++j)
      if (i != j && sorted_intersection(ord.sets[i], ord.sets[j]) == ord.sets[i])
        throw Error("domain", "separator order contains nested sets");

  EdgeSet edges;
  std::vector<int> prev{0};
  for (const auto& cur : ord.sets) {
    std::vector<int> fresh;
    for (int k : cur)
      if (!contains(prev, k)) fresh.push_back(k);
    for (int j : prev)
      for (int k : fresh) edges.insert({j, k});
    for (size_t a = 0; a < fresh.size(); ++a)
      for (size_t b = a + 1; b < fresh.size(); ++b)
        edges.insert({fresh[a], fresh[b]});
    prev = cur;
  }
  Dag out(n_covariates + 2, std::move(edges));
  DagProperties p = classify(out);
  if (!p.perfect || !p.uninformed || !p.nontrivial)
    throw Error("internal", "revealed DAG is not perfect/uninformed/nontrivial");
  return out;
}

}  // namespace subcausal::dag
