#pragma once

// Test-side generators and independent oracles. Everything here stays out of
// the library so the brute-force routes cannot share code with the
// implementations they check.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "subcausal/dag.hpp"
#include "subcausal/probspace.hpp"
#include "subcausal/scr.hpp"

namespace testutil {

using subcausal::Rat;
using subcausal::dag::Dag;
using subcausal::dag::EdgeSet;
using subcausal::probspace::Assignment;
using subcausal::probspace::Joint;
using subcausal::probspace::VarSpace;
using subcausal::probspace::VarSpacePtr;

inline VarSpacePtr binary_space(int n_covariates) {
  std::vector<std::vector<double>> sup(n_covariates + 1, std::vector<double>{0, 1});
  return std::make_shared<const VarSpace>(n_covariates, sup);
}

// Random DAG over {0..n+1}: node order fixed as 0 < 1 < ... < n+1, each
// forward edge present independently. Uninformed by construction.
inline Dag random_dag(int n_covariates, std::mt19937_64& rng, double edge_prob = 0.45) {
  int nodes = n_covariates + 2;
  std::bernoulli_distribution flip(edge_prob);
  EdgeSet edges;
  for (int i = 0; i < nodes; ++i)
    for (int j = std::max(i, 1) + 1; j < nodes; ++j)
      if (flip(rng)) edges.insert({i, j});
  return Dag(nodes, std::move(edges));
}

// Rejection-samples a well-behaved DAG (perfect, uninformed, nontrivial,
// edges within N*), returned as the core restriction.
inline Dag random_well_behaved_dag(int n_covariates, std::mt19937_64& rng) {
  for (int tries = 0; tries < 100000; ++tries) {
    Dag R = random_dag(n_covariates, rng);
    auto props = subcausal::dag::classify(R);
    if (!props.perfect || !props.uninformed || !props.nontrivial) continue;
    Dag core = subcausal::dag::core(R);
    if (subcausal::dag::classify(core).well_behaved) return core;
  }
  throw std::runtime_error("random_well_behaved_dag: rejection sampling exhausted");
}

inline subcausal::scr::Utility random_monotone_utility(int points, std::mt19937_64& rng,
                                                       double min_gap = 1.0,
                                                       double max_gap = 4.0) {
  std::uniform_real_distribution<double> gap(min_gap, max_gap);
  subcausal::scr::Utility u;
  double v = 0.0;
  for (int i = 0; i < points; ++i) {
    u.value.push_back(v);
    v += gap(rng);
  }
  return u;
}

// Full-support random joint over variables 0..n+1 with small exact entries.
inline Joint random_full_joint(const VarSpacePtr& space, int action_card,
                               std::mt19937_64& rng) {
  std::vector<int> vars{0};
  for (int v = 1; v <= space->consequence(); ++v) vars.push_back(v);
  std::uniform_int_distribution<int> weight(1, 32);
  std::vector<std::pair<Assignment, long>> cells;
  long total = 0;
  Assignment x(vars.size(), 0);
  while (true) {
    long w = weight(rng);
    cells.emplace_back(x, w);
    total += w;
    size_t k = 0;
    for (; k < vars.size(); ++k) {
      int card = vars[k] == 0 ? action_card : space->cardinality(vars[k]);
      if (++x[k] < card) break;
      x[k] = 0;
    }
    if (k == vars.size()) break;
  }
  std::map<Assignment, Rat> table;
  for (auto& [key, w] : cells) table[key] = Rat(w, total);
  return Joint::raw(space, vars, std::move(table), action_card);
}

// Brute-force marginal by explicit summation over the table.
inline double brute_marginal_prob(const Joint& p, const std::vector<int>& J,
                                  const Assignment& values) {
  double total = 0;
  for (const auto& [key, pr] : p.table()) {
    bool match = true;
    for (size_t t = 0; t < J.size(); ++t)
      if (key[p.index_of(J[t])] != values[t]) { match = false; break; }
    if (match) total += subcausal::to_double(pr);
  }
  return total;
}

// All uninformed acyclic orientations of R's skeleton with the same
// v-colliders, i.e. the uninformed DAGs equivalent to R.
inline std::vector<Dag> equivalent_uninformed_dags(const Dag& R) {
  std::vector<std::pair<int, int>> skeleton;
  for (const auto& [i, j] : R.edges()) skeleton.push_back({std::min(i, j), std::max(i, j)});
  std::sort(skeleton.begin(), skeleton.end());
  skeleton.erase(std::unique(skeleton.begin(), skeleton.end()), skeleton.end());
  std::vector<Dag> out;
  const int m = static_cast<int>(skeleton.size());
  for (long mask = 0; mask < (1L << m); ++mask) {
    EdgeSet edges;
    bool informed = false;
    for (int t = 0; t < m; ++t) {
      auto [i, j] = skeleton[t];
      if (mask & (1L << t)) std::swap(i, j);
      if (j == 0) informed = true;
      edges.insert({i, j});
    }
    if (informed) continue;
    try {
      Dag cand(R.node_count(), edges);
      if (subcausal::dag::is_equivalent(R, cand)) out.push_back(std::move(cand));
    } catch (const subcausal::Error&) {
      // cyclic orientation
    }
  }
  return out;
}

// Numerical I-projection: minimizes KL(p || q_theta) over the conditional
// tables of the DAG family by multiplicative (mirror-descent) updates from a
// random interior start. Returns the best KL value found.
inline double numeric_iprojection_kl(const Joint& p, const Dag& R, std::mt19937_64& rng,
                                     int iters = 4000, double lr = 0.8) {
  const int nodes = R.node_count();
  std::vector<int> card(nodes);
  for (int v = 0; v < nodes; ++v) card[v] = p.cardinality(v);
  long grid = 1;
  for (int v = 0; v < nodes; ++v) grid *= card[v];

  std::vector<double> target(grid, 0.0);
  std::vector<int> stride(nodes, 1);
  for (int v = 1; v < nodes; ++v) stride[v] = stride[v - 1] * card[v - 1];
  for (const auto& [key, pr] : p.table()) {
    long cfg = 0;
    for (int v = 0; v < nodes; ++v) cfg += key[v] * stride[v];
    target[cfg] = subcausal::to_double(pr);
  }

  // theta[j]: array over (parent config, value).
  struct Fac {
    std::vector<int> parents;
    int pgrid, cardj;
    std::vector<double> t;
  };
  std::vector<Fac> facs(nodes);
  std::uniform_real_distribution<double> unif(0.25, 1.0);
  for (int j = 0; j < nodes; ++j) {
    Fac f;
    f.parents = R.parents(j);
    f.pgrid = 1;
    for (int par : f.parents) f.pgrid *= card[par];
    f.cardj = card[j];
    f.t.resize(static_cast<size_t>(f.pgrid) * f.cardj);
    for (int pp = 0; pp < f.pgrid; ++pp) {
      double total = 0;
      for (int v = 0; v < f.cardj; ++v) {
        f.t[pp * f.cardj + v] = unif(rng);
        total += f.t[pp * f.cardj + v];
      }
      for (int v = 0; v < f.cardj; ++v) f.t[pp * f.cardj + v] /= total;
    }
    facs[j] = std::move(f);
  }

  auto ppack = [&](const Fac& f, long cfg) {
    int pp = 0, mult = 1;
    for (int par : f.parents) {
      pp += static_cast<int>((cfg / stride[par]) % card[par]) * mult;
      mult *= card[par];
    }
    return pp;
  };

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> grad;
  for (int it = 0; it < iters; ++it) {
    // KL(p||q) and the per-factor gradients d/d log theta.
    double kl = 0.0;
    for (long cfg = 0; cfg < grid; ++cfg) {
      if (target[cfg] == 0) continue;
      double logq = 0.0;
      for (int j = 0; j < nodes; ++j) {
        const Fac& f = facs[j];
        logq += std::log(f.t[ppack(f, cfg) * f.cardj +
                              static_cast<int>((cfg / stride[j]) % card[j])]);
      }
      kl += target[cfg] * (std::log(target[cfg]) - logq);
    }
    best = std::min(best, kl);
    for (int j = 0; j < nodes; ++j) {
      Fac& f = facs[j];
      grad.assign(f.t.size(), 0.0);
      for (long cfg = 0; cfg < grid; ++cfg) {
        if (target[cfg] == 0) continue;
        grad[ppack(f, cfg) * f.cardj + static_cast<int>((cfg / stride[j]) % card[j])] +=
            target[cfg];
      }
      for (int pp = 0; pp < f.pgrid; ++pp) {
        double total = 0;
        for (int v = 0; v < f.cardj; ++v) {
          size_t idx = static_cast<size_t>(pp) * f.cardj + v;
          double step = std::min(lr * grad[idx] / std::max(f.t[idx], 1e-12), 30.0);
          f.t[idx] *= std::exp(step);
          total += f.t[idx];
        }
        for (int v = 0; v < f.cardj; ++v) f.t[static_cast<size_t>(pp) * f.cardj + v] /= total;
      }
    }
  }
  return best;
}

inline double kl_divergence(const Joint& p, const Joint& q) {
  double kl = 0.0;
  for (const auto& [key, pr] : p.table()) {
    double pv = subcausal::to_double(pr);
    double qv = subcausal::to_double(q.prob(key));
    if (pv > 0) kl += pv * (std::log(pv) - std::log(qv));
  }
  return kl;
}

}  // namespace testutil
