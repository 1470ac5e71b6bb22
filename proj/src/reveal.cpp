#include "subcausal/reveal.hpp"

#include <omp.h>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

namespace subcausal::reveal {

using probspace::Action;
using probspace::Assignment;
using probspace::ChoiceDist;
using probspace::Joint;
using probspace::Menu;
using probspace::VarSpacePtr;

std::string describe_menu(const Menu& S) {
  std::ostringstream os;
  os << "{";
  for (int a = 0; a < S.size(); ++a) {
    if (a) os << ", ";
    os << "action" << a << ": {";
    bool first = true;
    for (const auto& [key, p] : S.actions()[a].dist().table()) {
      if (!first) os << ", ";
      first = false;
      os << "(";
      for (size_t i = 0; i < key.size(); ++i) {
        if (i) os << ",";
        os << S.space()->support(static_cast<int>(i) + 1)[key[i]];
      }
      os << "): " << rat_to_string(p);
    }
    os << "}";
  }
  os << "}";
  return os.str();
}

ChoiceDist RecordedOracle::choose(const Menu& S) const {
  auto it = data_.find(S);
  if (it == data_.end())
    throw Error("missing-data",
                "no recorded choice distribution for the queried menu; collect " +
                    describe_menu(S));
  return it->second;
}

namespace {

bool contains(const std::vector<int>& sorted, int x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

bool is_subset(const std::vector<int>& a, const std::vector<int>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

void check_verdict_selection_independent(const BehaviorOracle& oracle, const Menu& S,
                                         int a_slot, double tol, bool verdict) {
  for (const auto& sigma : oracle.choose_all(S)) {
    bool v = std::abs(sigma.p[a_slot] - 0.5) <= tol;
    if (v != verdict)
      throw Error("selection-dependent-verdict",
                  "a diagnostic verdict differs across personal equilibria");
  }
}

}  // namespace

DiagnosticMenu separation_menu(const std::vector<int>& J, const VarSpacePtr& space,
                               const Rat& eps) {
  const int n = space->covariates();
  const int cons = space->consequence();
  std::vector<int> Js = J;
  std::sort(Js.begin(), Js.end());
  if (Js.empty()) throw Error("domain", "separation needs a nonempty index set");
  for (int v : Js)
    if (v < 1 || v > n)
      throw Error("domain", "separation target must be a set of covariates");
  if (eps <= 0 || eps >= 1) throw Error("domain", "eps outside (0,1)");
  {
    Rat pow = 1;
    for (int i = 0; i <= n; ++i) pow *= (Rat(1) - eps);
    if (!(pow > Rat(1, 2)))
      throw Error("domain", "eps too large: (1-eps)^(n+1) must exceed 1/2");
  }

  std::vector<int> rest;  // N \ J, includes the consequence
  for (int v = 1; v <= cons; ++v)
    if (!contains(Js, v)) rest.push_back(v);

  auto vars = space->realization_vars();
  auto anchor = [&](int var, bool high) { return high ? space->high(var) : 0; };

  // Enumerate the low-consequence anchor configurations of N \ J.
  const int m = static_cast<int>(rest.size());
  std::vector<Assignment> low_cons;  // full assignments, J pinned high
  Assignment base(vars.size());
  for (int v : Js) base[v - 1] = anchor(v, true);
  for (int mask = 0; mask < (1 << (m - 1)); ++mask) {
    Assignment x = base;
    for (int t = 0; t + 1 < m; ++t) x[rest[t] - 1] = anchor(rest[t], (mask >> t) & 1);
    x[cons - 1] = anchor(cons, false);
    low_cons.push_back(x);
  }
  Assignment all_high = base, all_low = base;
  for (int v : rest) all_high[v - 1] = anchor(v, true);
  for (int v : rest) all_low[v - 1] = anchor(v, false);

  Rat off = eps / static_cast<int>(low_cons.size());
  std::map<Assignment, Rat> ta, tb;
  ta[all_high] += Rat(1) - eps;
  for (const auto& x : low_cons) ta[x] += off;
  tb[all_low] += Rat(1) - eps;
  tb[all_high] += off;
  for (const auto& x : low_cons)
    if (x != all_low) tb[x] += off;

  Action a(Joint::raw(space, vars, std::move(ta)));
  Action b(Joint::raw(space, vars, std::move(tb)));
  Menu menu({a, b}, true);

  DiagnosticMenu out{menu, menu.index_of(a), menu.index_of(b), Js, eps};
  return out;
}

bool separates(const BehaviorOracle& oracle, const std::vector<int>& J,
               const RevealParams& params, Transcript* transcript) {
  const auto space = oracle.space();
  std::vector<int> Js = J;
  std::sort(Js.begin(), Js.end());
  if (contains(Js, space->consequence())) return true;  // no query needed

  DiagnosticMenu d = separation_menu(Js, space, params.epsilon);
  ChoiceDist sigma = oracle.choose(d.menu);
  double pa = sigma.p[d.a_slot];
  bool verdict = std::abs(pa - 0.5) <= params.tol;
  if (params.check_selection_independence)
    check_verdict_selection_independent(oracle, d.menu, d.a_slot, params.tol, verdict);
  if (transcript)
    transcript->push_back({"separation", Js, pa, verdict, describe_menu(d.menu)});
  return verdict;
}

std::vector<std::vector<int>> minimal_separators(const BehaviorOracle& oracle,
                                                 const RevealParams& params,
                                                 Transcript* transcript) {
  const auto space = oracle.space();
  const int n = space->covariates();
  if (n > params.max_covariates)
    throw Error("enumeration-budget",
                "subset enumeration over " + std::to_string(n) + " covariates exceeds the guard");

  std::vector<std::vector<int>> found;
  for (int size = 1; size <= n; ++size) {
    // Candidates of this size not containing an already-found separator.
    std::vector<std::vector<int>> layer;
    std::vector<int> comb(size);
    std::iota(comb.begin(), comb.end(), 1);
    while (true) {
      bool pruned = false;
      for (const auto& s : found)
        if (is_subset(s, comb)) { pruned = true; break; }
      if (!pruned) layer.push_back(comb);
      int t = size - 1;
      while (t >= 0 && comb[t] == n - (size - 1 - t)) --t;
      if (t < 0) break;
      ++comb[t];
      for (int r = t + 1; r < size; ++r) comb[r] = comb[r - 1] + 1;
    }

    std::vector<char> verdicts(layer.size(), 0);
    std::vector<Transcript> records(layer.size());
    bool par = params.parallel && oracle.reentrant() && layer.size() > 1;
    std::exception_ptr err;
    int nt = params.threads > 0 ? params.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(nt) if (par)
    for (long i = 0; i < static_cast<long>(layer.size()); ++i) {
      try {
        verdicts[i] = separates(oracle, layer[i], params,
                                transcript ? &records[i] : nullptr);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    for (size_t i = 0; i < layer.size(); ++i) {
      if (transcript)
        transcript->insert(transcript->end(), records[i].begin(), records[i].end());
      if (verdicts[i]) found.push_back(layer[i]);
    }
  }
  found.push_back({space->consequence()});
  std::sort(found.begin(), found.end());
  return found;
}

namespace {

// Exact transversal: one representative per remaining separator, avoiding
// `next`, with j_star forced in. Representatives may cover several sets at
// once but no set twice.
bool pick_transversal(const std::vector<std::vector<int>>& sets,
                      const std::vector<int>& next, int j_star,
                      std::vector<int>* out) {
  const int k = static_cast<int>(sets.size());
  std::vector<int> covered(k, 0);
  std::vector<int> chosen;
  auto covers = [&](int e) {
    std::vector<int> hit;
    for (int s = 0; s < k; ++s)
      if (contains(sets[s], e)) hit.push_back(s);
    return hit;
  };
  // Force j_star first.
  for (int s : covers(j_star)) covered[s] = 1;
  chosen.push_back(j_star);

  std::function<bool()> rec = [&]() -> bool {
    int target = -1;
    for (int s = 0; s < k; ++s)
      if (!covered[s]) { target = s; break; }
    if (target < 0) return true;
    for (int e : sets[target]) {
      if (contains(next, e)) continue;
      auto hit = covers(e);
      bool clash = false;
      for (int s : hit)
        if (covered[s]) { clash = true; break; }
      if (clash) continue;
      for (int s : hit) covered[s] = 1;
      chosen.push_back(e);
      if (rec()) return true;
      chosen.pop_back();
      for (int s : hit) covered[s] = 0;
    }
    return false;
  };
  if (!rec()) return false;
  *out = chosen;
  std::sort(out->begin(), out->end());
  return true;
}

}  // namespace

DiagnosticMenu ordering_menu(const std::vector<int>& candidate,
                             const std::vector<int>& next,
                             const std::vector<std::vector<int>>& remaining,
                             const std::vector<std::vector<int>>& suffix,
                             const VarSpacePtr& space) {
  const int cons = space->consequence();
  std::vector<int> inter = intersect(candidate, next);

  // Maximal-intersection competitors (same intersection with `next`).
  std::vector<std::vector<int>> competitors;
  for (const auto& A : remaining)
    if (A != candidate && intersect(A, next) == inter) competitors.push_back(A);

  // j*: a member of candidate \ next private to the candidate among the
  // remaining separators. The recursive-ordering construction guarantees one
  // for the true next separator; a candidate without one cannot be it.
  int j_star = -1;
  for (int e : candidate) {
    if (contains(next, e)) continue;
    bool private_elem = true;
    for (const auto& A : remaining)
      if (A != candidate && contains(A, e)) { private_elem = false; break; }
    if (private_elem) { j_star = e; break; }
  }
  if (j_star < 0)
    throw Error("candidate-indistinguishable",
                "no member of the candidate is private among the remaining separators");

  // k: a member of next \ candidate, preferring one outside the remaining
  // separators.
  int k_node = -1, best_score = 1 << 20;
  for (int e : next) {
    if (contains(candidate, e)) continue;
    int score = 0;
    for (const auto& A : remaining)
      if (contains(A, e)) ++score;
    if (score < best_score) { best_score = score; k_node = e; }
  }
  if (k_node < 0) throw Error("inconsistent-revealed-causes", "nested separators");

  std::vector<int> transversal;
  if (!pick_transversal(remaining, next, j_star, &transversal))
    throw Error("candidate-indistinguishable",
                "no exact transversal of the remaining separators exists");

  std::vector<int> j_minus;  // competitors' representatives
  for (int e : transversal) {
    if (e == j_star) continue;
    for (const auto& A : competitors)
      if (contains(A, e)) { j_minus.push_back(e); break; }
  }
  std::vector<int> prechain;
  for (int e : transversal)
    if (e != j_star && !contains(j_minus, e)) prechain.push_back(e);

  std::vector<int> post;
  for (size_t l = 1; l < suffix.size(); ++l) {
    std::vector<int> fresh;
    for (int e : suffix[l])
      if (!contains(suffix[l - 1], e)) fresh.push_back(e);
    if (fresh.empty())
      throw Error("inconsistent-revealed-causes", "nested separators in the suffix");
    post.push_back(fresh.front());
  }

  std::vector<int> chain = prechain;
  chain.push_back(j_star);
  chain.insert(chain.end(), j_minus.begin(), j_minus.end());
  chain.push_back(k_node);
  chain.insert(chain.end(), post.begin(), post.end());
  {
    std::vector<int> u = chain;
    std::sort(u.begin(), u.end());
    if (std::adjacent_find(u.begin(), u.end()) != u.end())
      throw Error("inconsistent-revealed-causes", "chain variable repeated");
  }
  if (chain.back() != cons)
    throw Error("inconsistent-revealed-causes", "diagnostic chain does not end at n+1");

  // Positions within the chain.
  const int pos_jstar = static_cast<int>(prechain.size());
  const int pos_k = pos_jstar + 1 + static_cast<int>(j_minus.size());
  std::vector<int> chain_pos(cons + 1, -1);
  for (size_t t = 0; t < chain.size(); ++t) chain_pos[chain[t]] = static_cast<int>(t);

  auto vars = space->realization_vars();
  const Rat q34(3, 4), q14(1, 4), q12(1, 2);

  auto build = [&](const Rat& alpha) {
    std::map<Assignment, Rat> table;
    const int nv = static_cast<int>(vars.size());
    Assignment x(nv);
    std::vector<int> high(nv, 0);
    const int total = 1 << nv;
    for (int mask = 0; mask < total; ++mask) {
      Rat p = 1;
      for (int t = 0; t < nv; ++t) high[t] = (mask >> t) & 1;
      for (int t = 0; t < nv && p != 0; ++t) {
        int var = vars[t];
        int cp = chain_pos[var];
        Rat ph;  // probability this variable is high
        if (cp < 0) {
          ph = q12;
        } else if (cp == 0) {
          ph = alpha;
        } else if (cp == pos_k) {
          ph = q12;
        } else if (cp > pos_jstar && cp < pos_k) {
          ph = (high[chain[pos_jstar] - 1] && high[k_node - 1]) ? q34 : q14;
        } else {
          ph = high[chain[cp - 1] - 1] ? q34 : q14;
        }
        p *= high[t] ? ph : Rat(1) - ph;
      }
      if (p == 0) continue;
      for (int t = 0; t < nv; ++t) x[t] = high[t] ? space->high(vars[t]) : 0;
      table[x] += p;
    }
    return Action(Joint::raw(space, vars, std::move(table)));
  };

  Action a = build(q34), b = build(q14);
  Menu menu({a, b}, true);
  return DiagnosticMenu{menu, menu.index_of(a), menu.index_of(b), candidate, Rat(0)};
}

dag::SeparatorOrder order_separators(const BehaviorOracle& oracle,
                                     const std::vector<std::vector<int>>& separators,
                                     const RevealParams& params, Transcript* transcript) {
  const auto space = oracle.space();
  const int cons = space->consequence();
  std::vector<std::vector<int>> remaining;
  bool has_cons = false;
  for (auto s : separators) {
    std::sort(s.begin(), s.end());
    if (s == std::vector<int>{cons}) { has_cons = true; continue; }
    remaining.push_back(s);
  }
  if (!has_cons)
    throw Error("no-scr", "{n+1} is not a minimal separator; behavior admits no SCR");

  std::vector<std::vector<int>> tail{{cons}};  // A*_m first
  while (!remaining.empty()) {
    const auto& next = tail.back();
    // Maximal intersections with the last determined separator.
    std::vector<std::vector<int>> inters;
    for (const auto& A : remaining) inters.push_back(intersect(A, next));
    std::vector<int> maxcands;
    for (size_t i = 0; i < remaining.size(); ++i) {
      bool dominates = true;
      for (size_t j = 0; j < remaining.size(); ++j)
        if (!is_subset(inters[j], inters[i])) { dominates = false; break; }
      if (dominates) maxcands.push_back(static_cast<int>(i));
    }
    if (maxcands.empty())
      throw Error("inconsistent-revealed-causes",
                  "no candidate has a maximal intersection with the next separator");

    int chosen = -1;
    if (maxcands.size() == 1) {
      chosen = maxcands[0];
    } else {
      std::vector<std::vector<int>> suffix(tail.rbegin(), tail.rend());
      int passes = 0;
      for (int idx : maxcands) {
        const auto& cand = remaining[idx];
        bool verdict;
        try {
          DiagnosticMenu d = ordering_menu(cand, next, remaining, suffix, space);
          ChoiceDist sigma = oracle.choose(d.menu);
          double pa = sigma.p[d.a_slot];
          verdict = std::abs(pa - 0.5) <= params.tol;
          if (params.check_selection_independence)
            check_verdict_selection_independent(oracle, d.menu, d.a_slot, params.tol,
                                                verdict);
          if (transcript)
            transcript->push_back({"ordering", cand, pa, verdict, describe_menu(d.menu)});
        } catch (const Error& e) {
          if (e.kind() != "candidate-indistinguishable") throw;
          verdict = false;
        }
        if (verdict) {
          ++passes;
          chosen = idx;
        }
      }
      if (passes != 1)
        throw Error("inconsistent-revealed-causes",
                    passes == 0 ? "no candidate passed the ordering test"
                                : "several candidates passed the ordering test");
    }
    tail.push_back(remaining[chosen]);
    remaining.erase(remaining.begin() + chosen);
  }

  dag::SeparatorOrder ord;
  ord.sets.assign(tail.rbegin(), tail.rend());
  return ord;
}

dag::EdgeSet revealed_causes(const dag::SeparatorOrder& ord) {
  dag::EdgeSet edges;
  std::vector<int> prev{0};
  for (const auto& cur : ord.sets) {
    for (int j : prev)
      for (int k : cur)
        if (!contains(prev, k) || j == 0) {
          if (!contains(prev, k)) edges.insert({j, k});
        }
    prev = cur;
  }
  return edges;
}

IdentifyResult identify(const BehaviorOracle& oracle, const RevealParams& params) {
  Transcript transcript;
  auto seps = minimal_separators(oracle, params, &transcript);
  auto ord = order_separators(oracle, seps, params, &transcript);
  auto causes = revealed_causes(ord);
  auto revealed = dag::revealed_dag_from_order(ord, oracle.space()->covariates());
  return IdentifyResult(std::move(ord), std::move(causes), std::move(revealed),
                        std::move(transcript));
}

CoarsenessResult coarser_than(const BehaviorOracle& oracle2, const BehaviorOracle& oracle1,
                              const std::vector<int>& irrelevant,
                              const std::vector<Menu>& battery, double tol) {
  CoarsenessResult res;
  const auto space = oracle2.space();
  const int cons = space->consequence();
  for (size_t m = 0; m < battery.size(); ++m) {
    const Menu& S = battery[m];
    bool hypothesis = true;
    for (int i : irrelevant) {
      std::vector<int> others;
      for (int v = 1; v <= cons; ++v)
        if (v != i) others.push_back(v);
      if (!probspace::independent_within(S, {i}, others)) {
        hypothesis = false;
        break;
      }
    }
    if (!hypothesis) {
      res.rejected_menus.push_back(static_cast<int>(m));
      continue;
    }
    ChoiceDist s1 = oracle1.choose(S), s2 = oracle2.choose(S);
    ++res.menus_compared;
    for (int a = 0; a < S.size(); ++a) {
      double gap = std::abs(s1.p[a] - s2.p[a]);
      res.max_gap = std::max(res.max_gap, gap);
      if (gap > tol && !res.offending_menu) res.offending_menu = static_cast<int>(m);
    }
  }
  res.coarser = !res.offending_menu.has_value();
  return res;
}

}  // namespace subcausal::reveal
