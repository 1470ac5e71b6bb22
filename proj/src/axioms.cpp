#include "subcausal/axioms.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace subcausal::axioms {

using probspace::Action;
using probspace::Assignment;
using probspace::ChoiceDist;
using probspace::Joint;
using probspace::Menu;
using probspace::VarSpacePtr;
using reveal::BehaviorOracle;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

namespace {

bool contains(const std::vector<int>& sorted, int x) {
  return std::binary_search(sorted.begin(), sorted.end(), x);
}

std::vector<int> union_of(const std::vector<std::vector<int>>& sets) {
  std::vector<int> u;
  for (const auto& s : sets) u.insert(u.end(), s.begin(), s.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return u;
}

// Representative covariate per separator block: r_i in A*_i \ A*_{i-1}.
std::vector<int> block_reps(const dag::SeparatorOrder& ord) {
  std::vector<int> reps;
  std::vector<int> prev;
  for (int i = 0; i + 1 < ord.size(); ++i) {
    int rep = -1;
    for (int e : ord.sets[i])
      if (!contains(prev, e)) { rep = e; break; }
    if (rep < 0 || std::find(reps.begin(), reps.end(), rep) != reps.end())
      throw Error("inconsistent-revealed-causes",
                  "separator order admits no distinct block representatives");
    reps.push_back(rep);
    prev = ord.sets[i];
  }
  return reps;
}

}  // namespace

bool is_correctly_perceived(const Menu& S, const dag::SeparatorOrder& ord, double tol,
                            std::string* witness) {
  const int m = ord.size();
  if (m == 0) throw Error("domain", "empty separator order");
  std::vector<int> U = union_of(ord.sets);
  const int n_menu = S.size();
  for (int ai = 0; ai < n_menu; ++ai) {
    const Joint& a = S.actions()[ai].dist();
    Joint aU = marginal(a, U);
    // Conditional factors of a along the chain.
    for (int bi = 0; bi < n_menu; ++bi) {
      const Joint& b = S.actions()[bi].dist();
      Joint bU = marginal(b, U);
      Joint bA1 = marginal(b, ord.sets[0]);
      for (const auto& [y, py] : aU.table()) {
        auto slice = [&](const std::vector<int>& vars) {
          Assignment key(vars.size());
          for (size_t t = 0; t < vars.size(); ++t) key[t] = y[aU.index_of(vars[t])];
          return key;
        };
        Rat rhs = bA1.prob(slice(ord.sets[0]));
        for (int i = 0; i + 1 < m && rhs != 0; ++i) {
          const auto& Ai = ord.sets[i];
          std::vector<int> fresh;
          for (int e : ord.sets[i + 1])
            if (!contains(Ai, e)) fresh.push_back(e);
          std::vector<int> both = Ai;
          both.insert(both.end(), fresh.begin(), fresh.end());
          std::sort(both.begin(), both.end());
          Rat num = marginal(a, both).prob(slice(both));
          Rat den = marginal(a, Ai).prob(slice(Ai));
          rhs *= num / den;  // den > 0 since y is in a's support
        }
        if (std::abs(to_double(bU.prob(y) - rhs)) > tol) {
          if (witness) {
            std::ostringstream os;
            os << "factorization gap " << to_double(bU.prob(y) - rhs)
               << " at action pair (" << ai << "," << bi << ")";
            *witness = os.str();
          }
          return false;
        }
      }
    }
  }
  return true;
}

ChainKernel noisy_point_kernel(const probspace::VarSpace& space, int high_point,
                               int low_point, const Rat& eta,
                               const std::vector<int>& spread_points) {
  const int card = space.cardinality(space.consequence());
  if (spread_points.empty()) throw Error("domain", "empty kernel spread");
  ChainKernel k;
  k.row_high.assign(card, Rat(0));
  k.row_low.assign(card, Rat(0));
  Rat share = eta / static_cast<int>(spread_points.size());
  for (int c : spread_points) {
    k.row_high[c] += share;
    k.row_low[c] += share;
  }
  k.row_high[high_point] += Rat(1) - eta;
  k.row_low[low_point] += Rat(1) - eta;
  return k;
}

Action chain_action(const dag::SeparatorOrder& ord, const VarSpacePtr& space,
                    const Rat& alpha, const Rat& eta, const ChainKernel& kernel) {
  const int cons = space->consequence();
  if (ord.sets.empty() || ord.sets.back() != std::vector<int>{cons})
    throw Error("domain", "separator order must end with {n+1}");
  auto reps = block_reps(ord);
  std::vector<int> rep_pos(cons + 1, -1);
  for (size_t i = 0; i < reps.size(); ++i) rep_pos[reps[i]] = static_cast<int>(i);

  auto vars = space->realization_vars();
  const int nv = static_cast<int>(vars.size());
  std::map<Assignment, Rat> table;
  Assignment x(nv, 0);
  while (true) {
    Rat p = 1;
    // Chain state along the representatives.
    for (int t = 0; t < nv && p != 0; ++t) {
      int var = vars[t];
      if (var == cons) {
        if (reps.empty()) {
          p *= alpha * kernel.row_high[x[t]] + (Rat(1) - alpha) * kernel.row_low[x[t]];
        } else {
          int last = reps.back();
          bool hi = x[last - 1] == space->high(last);
          p *= hi ? kernel.row_high[x[t]] : kernel.row_low[x[t]];
        }
        continue;
      }
      int pos = rep_pos[var];
      if (pos < 0) {
        p *= Rat(1, space->cardinality(var));  // background covariate, uniform
        continue;
      }
      // Representatives only take the anchor values.
      bool hi = x[t] == space->high(var);
      bool lo = x[t] == 0;
      if (!hi && !lo) { p = 0; continue; }
      if (pos == 0) {
        p *= hi ? alpha : Rat(1) - alpha;
      } else {
        bool prev_hi = x[reps[pos - 1] - 1] == space->high(reps[pos - 1]);
        Rat copy = Rat(1) - eta;
        p *= (hi == prev_hi) ? copy : eta;
      }
    }
    if (p != 0) table[x] = p;
    int k = 0;
    for (; k < nv; ++k) {
      if (++x[k] < space->cardinality(vars[k])) break;
      x[k] = 0;
    }
    if (k == nv) break;
  }
  return Action(Joint::raw(space, vars, std::move(table)));
}

std::vector<Rat> chain_consequence_marginal(const dag::SeparatorOrder& ord,
                                            const VarSpacePtr& space, const Rat& alpha,
                                            const Rat& eta, const ChainKernel& kernel) {
  auto reps = block_reps(ord);
  Rat p_hi = alpha;
  for (size_t i = 1; i < reps.size(); ++i)
    p_hi = p_hi * (Rat(1) - eta) + (Rat(1) - p_hi) * eta;
  const int card = space->cardinality(space->consequence());
  std::vector<Rat> out(card, Rat(0));
  for (int c = 0; c < card; ++c)
    out[c] = p_hi * kernel.row_high[c] + (Rat(1) - p_hi) * kernel.row_low[c];
  return out;
}

AxiomCheck check_full_support(const BehaviorOracle& oracle,
                              const std::vector<Menu>& battery, double tol) {
  AxiomCheck check{"Full-support", Verdict::pass, "", 1.0};
  if (battery.empty()) {
    check.verdict = Verdict::inconclusive;
    check.detail = "empty battery";
    return check;
  }
  for (size_t m = 0; m < battery.size(); ++m) {
    ChoiceDist sigma = oracle.choose(battery[m]);
    for (size_t a = 0; a < sigma.p.size(); ++a) {
      check.measured = std::min(check.measured, sigma.p[a]);
      if (sigma.p[a] <= tol) {
        check.verdict = Verdict::fail;
        std::ostringstream os;
        os << "rho(action" << a << ", battery menu " << m << ") = " << sigma.p[a];
        check.detail = os.str();
        return check;
      }
    }
  }
  return check;
}

AxiomCheck luce_ratio_bound(const BehaviorOracle& oracle, const std::vector<Menu>& battery,
                            std::optional<double> log_bound) {
  AxiomCheck check{"Bounded Misperception", Verdict::pass, "", 0.0};
  if (battery.empty()) {
    check.verdict = Verdict::inconclusive;
    check.detail = "empty battery";
    return check;
  }
  std::vector<double> per_menu;
  for (const auto& S : battery) {
    ChoiceDist sigma = oracle.choose(S);
    double mx = *std::max_element(sigma.p.begin(), sigma.p.end());
    double mn = *std::min_element(sigma.p.begin(), sigma.p.end());
    if (mn <= 0) {
      check.verdict = Verdict::fail;
      check.detail = "zero choice probability makes the Luce ratio unbounded";
      check.measured = std::numeric_limits<double>::infinity();
      return check;
    }
    per_menu.push_back(mx / mn);
  }
  check.measured = *std::max_element(per_menu.begin(), per_menu.end());
  if (log_bound) {
    double cap = std::exp(*log_bound);
    if (check.measured > cap + 1e-9) {
      check.verdict = Verdict::fail;
      std::ostringstream os;
      os << "sup Luce ratio " << check.measured << " exceeds exp(u range) = " << cap;
      check.detail = os.str();
    }
    return check;
  }
  // Without a known bound, flag batteries whose supremum keeps escalating.
  size_t q = std::max<size_t>(1, per_menu.size() / 4);
  double first = *std::max_element(per_menu.begin(), per_menu.begin() + q);
  double last = *std::max_element(per_menu.end() - q, per_menu.end());
  if (last > 10.0 * first && last == check.measured) {
    check.verdict = Verdict::fail;
    std::ostringstream os;
    os << "unbounded-trend: sup grew from " << first << " to " << last
       << " along the battery";
    check.detail = os.str();
  }
  return check;
}

AxiomCheck check_i5(const BehaviorOracle& oracle, const std::vector<MenuPair>& pairs,
                    double tol) {
  AxiomCheck check{"I5", Verdict::pass, "", 0.0};
  if (pairs.empty()) {
    check.verdict = Verdict::inconclusive;
    check.detail = "no generated pairs";
    return check;
  }
  for (size_t i = 0; i < pairs.size(); ++i) {
    ChoiceDist sigma = oracle.choose(pairs[i].menu);
    double gap = std::abs(sigma.p[pairs[i].a_slot] - sigma.p[pairs[i].b_slot]);
    check.measured = std::max(check.measured, gap);
    if (gap > tol) {
      check.verdict = Verdict::fail;
      std::ostringstream os;
      os << "pair " << i << ": probabilities differ by " << gap
         << " despite equal A*_1 marginals";
      check.detail = os.str();
      return check;
    }
  }
  return check;
}

namespace {

// Max gap between the separator-block conditionals of two datasets
// (marginals over the realization variables), evaluated on the reference's
// support. Undefined conditionals in `other` count as gap 1.
double block_conditional_gap(const Joint& reference, const Joint& other,
                             const dag::SeparatorOrder& ord) {
  double gap = 0.0;
  for (int i = 0; i + 1 < ord.size(); ++i) {
    const auto& Ai = ord.sets[i];
    std::vector<int> fresh;
    for (int e : ord.sets[i + 1])
      if (!contains(Ai, e)) fresh.push_back(e);
    if (fresh.empty()) continue;
    Joint refA = marginal(reference, Ai);
    for (const auto& [ya, pa] : refA.table()) {
      std::vector<std::pair<int, int>> given;
      for (size_t t = 0; t < Ai.size(); ++t) given.emplace_back(Ai[t], ya[t]);
      Joint ref_cond = conditional(reference, fresh, given);
      Joint other_cond;
      try {
        other_cond = conditional(other, fresh, given);
      } catch (const Error& e) {
        if (e.kind() == "undefined-conditional") return 1.0;
        throw;
      }
      std::set<Assignment> keys;
      for (const auto& [k, v] : ref_cond.table()) keys.insert(k);
      for (const auto& [k, v] : other_cond.table()) keys.insert(k);
      for (const auto& k : keys)
        gap = std::max(gap, std::abs(to_double(ref_cond.prob(k) - other_cond.prob(k))));
    }
  }
  return gap;
}

Joint realization_dataset(const Menu& S, const ChoiceDist& sigma) {
  Joint full = induced_dataset(S, sigma);
  return marginal(full, S.space()->realization_vars());
}

}  // namespace

AxiomCheck check_lci(const BehaviorOracle& oracle, const dag::SeparatorOrder& ord,
                     const LciScenario& scenario, double tol, double noise) {
  AxiomCheck check{"LCI", Verdict::pass, "", 0.0};
  int la = scenario.limit.index_of(scenario.a);
  int lb = scenario.limit.index_of(scenario.b);
  if (la < 0 || lb < 0)
    throw Error("domain", "LCI scenario: shared actions not in the limit menu");
  ChoiceDist sigL = oracle.choose(scenario.limit);
  if (sigL.p[la] <= 0 || sigL.p[lb] <= 0) {
    check.verdict = Verdict::fail;
    check.detail = "zero probability in the limit menu";
    return check;
  }
  double ratioL = sigL.p[la] / sigL.p[lb];
  Joint refD = realization_dataset(scenario.limit, sigL);

  std::vector<double> gaps, ratio_dev;
  for (const auto& S : scenario.sequence) {
    int sa = S.index_of(scenario.a), sb = S.index_of(scenario.b);
    if (sa < 0 || sb < 0)
      throw Error("domain", "LCI scenario: shared actions not in a sequence menu");
    ChoiceDist sig = oracle.choose(S);
    if (sig.p[sa] <= 0 || sig.p[sb] <= 0) {
      check.verdict = Verdict::fail;
      check.detail = "zero probability in a sequence menu";
      return check;
    }
    gaps.push_back(block_conditional_gap(refD, realization_dataset(S, sig), ord));
    ratio_dev.push_back(std::abs(sig.p[sa] / sig.p[sb] - ratioL));
  }

  double max_gap = *std::max_element(gaps.begin(), gaps.end());
  if (max_gap <= 1e-12) {
    // Exact instance of the choice axiom: equal inferences, equal ratios.
    double worst = *std::max_element(ratio_dev.begin(), ratio_dev.end());
    check.measured = worst;
    if (worst > tol * std::max(1.0, ratioL)) {
      check.verdict = Verdict::fail;
      check.detail = "Luce ratio differs across menus with identical inferences";
    }
    return check;
  }
  // Hypothesis filter: the conditionals must be converging toward the limit.
  for (size_t m = 1; m < gaps.size(); ++m)
    if (gaps[m] > gaps[m - 1] + noise) {
      check.verdict = Verdict::inconclusive;
      std::ostringstream os;
      os << "hypothesis violated: block conditional gap grows from " << gaps[m - 1]
         << " to " << gaps[m] << " at step " << m;
      check.detail = os.str();
      return check;
    }
  for (size_t m = 1; m < ratio_dev.size(); ++m)
    if (ratio_dev[m] > ratio_dev[m - 1] + noise) {
      check.verdict = Verdict::fail;
      std::ostringstream os;
      os << "ratio deviation grows from " << ratio_dev[m - 1] << " to " << ratio_dev[m]
         << " while inferences converge";
      check.detail = os.str();
      return check;
    }
  check.measured = ratio_dev.back();
  check.detail = "finite-approximation";
  return check;
}

namespace {

Rat kernel_spread_eta() { return Rat(1, 1000); }

std::vector<int> all_consequence_points(const probspace::VarSpace& space) {
  std::vector<int> pts(space.cardinality(space.consequence()));
  for (size_t i = 0; i < pts.size(); ++i) pts[i] = static_cast<int>(i);
  return pts;
}

Action reweight_covariate(const Action& a, int var, const std::vector<Rat>& weights) {
  const auto& space = a.dist().space();
  int card = space->cardinality(var);
  if (static_cast<int>(weights.size()) != card)
    throw Error("domain", "reweight arity mismatch");
  std::map<Assignment, Rat> table;
  int pos = a.dist().index_of(var);
  for (const auto& [key, p] : a.dist().table()) {
    Rat q = p * card * weights[key[pos]];
    if (q != 0) table[key] = q;
  }
  return Action(Joint::raw(space, a.dist().vars(), std::move(table)));
}

}  // namespace

std::vector<MenuPair> make_i5_pairs(const dag::SeparatorOrder& ord,
                                    const VarSpacePtr& space) {
  const int cons = space->consequence();
  auto pts = all_consequence_points(*space);
  Rat eta = kernel_spread_eta();
  ChainKernel up = noisy_point_kernel(*space, space->high(cons), 0, eta, pts);
  ChainKernel down = noisy_point_kernel(*space, 0, space->high(cons), eta, pts);

  std::vector<MenuPair> pairs;
  auto reps = block_reps(ord);
  if (!reps.empty()) {
    // Same A*_1 marginal, opposite consequence kernels.
    Action a = chain_action(ord, space, Rat(3, 4), eta, up);
    Action b = chain_action(ord, space, Rat(3, 4), eta, down);
    Menu menu({a, b}, true);
    pairs.push_back({menu, menu.index_of(a), menu.index_of(b)});
  }
  // Same consequence and A*_1 marginals, different background covariate.
  std::vector<int> a1 = ord.sets[0];
  int free_cov = -1;
  for (int v = 1; v <= space->covariates(); ++v)
    if (!contains(a1, v) &&
        std::find(reps.begin(), reps.end(), v) == reps.end()) { free_cov = v; break; }
  if (free_cov > 0) {
    Action a = chain_action(ord, space, Rat(3, 4), eta, up);
    std::vector<Rat> w(space->cardinality(free_cov), Rat(0));
    w[0] = Rat(3, 4);
    Rat rest = Rat(1, 4) / std::max(1, space->cardinality(free_cov) - 1);
    for (size_t i = 1; i < w.size(); ++i) w[i] = rest;
    Action b = reweight_covariate(a, free_cov, w);
    Menu menu({a, b}, true);
    pairs.push_back({menu, menu.index_of(a), menu.index_of(b)});
  }
  return pairs;
}

LciScenario make_lci_padding_scenario(const dag::SeparatorOrder& ord,
                                      const VarSpacePtr& space) {
  const int cons = space->consequence();
  Rat eta = kernel_spread_eta();
  ChainKernel k = noisy_point_kernel(*space, space->high(cons), 0, eta,
                                     all_consequence_points(*space));
  Action a = chain_action(ord, space, Rat(3, 4), eta, k);
  Action b = chain_action(ord, space, Rat(1, 4), eta, k);
  Action c = chain_action(ord, space, Rat(1, 2), eta, k);
  LciScenario s{{Menu({a, b, c}, true)}, Menu({a, b}, true), a, b};
  return s;
}

LciScenario make_lci_mixture_scenario(const dag::SeparatorOrder& ord,
                                      const VarSpacePtr& space, int depth) {
  const int cons = space->consequence();
  Rat eta = kernel_spread_eta();
  ChainKernel k = noisy_point_kernel(*space, space->high(cons), 0, eta,
                                     all_consequence_points(*space));
  Action a = chain_action(ord, space, Rat(3, 4), eta, k);
  Action b = chain_action(ord, space, Rat(1, 4), eta, k);
  LciScenario s{{}, Menu({a, b}, true), a, b};
  std::vector<Action> acc{a, b};
  for (int m = 2; m <= depth; ++m) {
    acc.push_back(mix(Rat(1, m), a, b));
    s.sequence.push_back(Menu(acc, true));
  }
  return s;
}

CpLogitFixtures make_cp_logit_fixtures(const dag::SeparatorOrder& ord,
                                       const VarSpacePtr& space) {
  const int cons = space->consequence();
  Rat eta = kernel_spread_eta();
  auto pts = all_consequence_points(*space);
  ChainKernel k = noisy_point_kernel(*space, space->high(cons), 0, eta, pts);

  Action p = chain_action(ord, space, Rat(9, 10), eta, k);
  Action r = chain_action(ord, space, Rat(1, 10), eta, k);
  Action mix_a = mix(Rat(1, 2), p, r);
  Action mix_b = mix(Rat(1, 4), p, r);

  CpLogitFixtures f{Menu({mix_a, r}, true), Menu({mix_b, r}, true),
                    0, 0, 0, 0, 0.5, 0.25,
                    Menu({p, r}, true), 0, 0, {}, {}};
  f.alpha_mix_slot = f.alpha_menu.index_of(mix_a);
  f.alpha_ref_slot = f.alpha_menu.index_of(r);
  f.beta_mix_slot = f.beta_menu.index_of(mix_b);
  f.beta_ref_slot = f.beta_menu.index_of(r);
  f.dom_p_slot = f.dom_menu.index_of(p);
  f.dom_q_slot = f.dom_menu.index_of(r);

  for (int m = 1; m <= 8; ++m) {
    Rat delta = eta;
    for (int t = 0; t < m; ++t) delta /= 10;
    ChainKernel km = noisy_point_kernel(*space, space->high(cons), 0, eta + delta, pts);
    Action pm = chain_action(ord, space, Rat(9, 10), eta, km);
    Action qm = chain_action(ord, space, Rat(1, 10), eta, km);
    Menu Sm({pm, qm}, true);
    f.cont_slots.emplace_back(Sm.index_of(pm), Sm.index_of(qm));
    f.cont_sequence.push_back(std::move(Sm));
  }
  return f;
}

AxiomCheck check_cp_logit(const BehaviorOracle& oracle, const dag::SeparatorOrder& ord,
                          const CpLogitFixtures& fixtures, double tol, double cauchy_tol) {
  AxiomCheck check{"Correctly Perceived Independence/Dominance/Continuity",
                   Verdict::pass, "", 0.0};
  for (const Menu* S : {&fixtures.alpha_menu, &fixtures.beta_menu, &fixtures.dom_menu}) {
    std::string w;
    if (!is_correctly_perceived(*S, ord, 1e-12, &w))
      throw Error("fixture-rejected", "fixture menu is not correctly perceived: " + w);
  }
  std::ostringstream detail;

  // Independence: beta ln LR(alpha-menu) = alpha ln LR(beta-menu).
  ChoiceDist sa = oracle.choose(fixtures.alpha_menu);
  ChoiceDist sb = oracle.choose(fixtures.beta_menu);
  double pa = sa.p[fixtures.alpha_mix_slot], qa = sa.p[fixtures.alpha_ref_slot];
  double pb = sb.p[fixtures.beta_mix_slot], qb = sb.p[fixtures.beta_ref_slot];
  if (pa <= 0 || qa <= 0 || pb <= 0 || qb <= 0) {
    check.verdict = Verdict::fail;
    check.detail = "zero probability in a mixture fixture";
    return check;
  }
  double lhs = fixtures.beta * std::log(pa / qa);
  double rhs = fixtures.alpha * std::log(pb / qb);
  double ind_gap = std::abs(lhs - rhs);
  check.measured = ind_gap;
  if (ind_gap > tol) {
    check.verdict = Verdict::fail;
    detail << "independence: |" << lhs << " - " << rhs << "| = " << ind_gap << "; ";
  } else {
    detail << "independence gap " << ind_gap << "; ";
  }

  // Dominance.
  ChoiceDist sd = oracle.choose(fixtures.dom_menu);
  double pd = sd.p[fixtures.dom_p_slot];
  if (!(pd > 0.5)) {
    check.verdict = Verdict::fail;
    detail << "dominance: rho(dominating) = " << pd << " <= 1/2; ";
  } else {
    detail << "dominance rho = " << pd << "; ";
  }

  // Continuity (finite approximation): ratios Cauchy by the 5th term.
  std::vector<double> ratios;
  for (size_t m = 0; m < fixtures.cont_sequence.size(); ++m) {
    ChoiceDist s = oracle.choose(fixtures.cont_sequence[m]);
    double num = s.p[fixtures.cont_slots[m].first];
    double den = s.p[fixtures.cont_slots[m].second];
    if (den <= 0) {
      check.verdict = Verdict::fail;
      detail << "continuity: zero probability; ";
      break;
    }
    ratios.push_back(num / den);
  }
  for (size_t m = 5; m < ratios.size(); ++m)
    if (std::abs(ratios[m] - ratios[m - 1]) > cauchy_tol) {
      check.verdict = Verdict::fail;
      detail << "continuity: step " << m << " moves the ratio by "
             << std::abs(ratios[m] - ratios[m - 1]) << " (finite-approximation); ";
      break;
    }

  check.detail = detail.str();
  return check;
}

RecoveredUtility recover_utility(const BehaviorOracle& oracle,
                                 const dag::SeparatorOrder& ord,
                                 const std::vector<int>& grid, const Rat& eta) {
  if (ord.sets.empty()) throw Error("no-scr", "empty separator order");
  const auto space = oracle.space();
  std::vector<int> g = grid;
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  if (g.size() < 2) throw Error("insufficient-menus", "utility grid needs two points");
  const int card = space->cardinality(space->consequence());
  for (int c : g)
    if (c < 0 || c >= card) throw Error("domain", "grid point outside the consequence support");

  const int M = static_cast<int>(g.size());
  std::vector<std::vector<double>> rows;  // coefficients on u[g[1..M-1]]
  std::vector<double> rhs;
  for (int i = 0; i < M; ++i) {
    for (int j = i + 1; j < M; ++j) {
      ChainKernel k = noisy_point_kernel(*space, g[j], g[i], eta, g);
      Action a = chain_action(ord, space, Rat(3, 4), eta, k);
      Action b = chain_action(ord, space, Rat(1, 4), eta, k);
      Menu menu({a, b}, true);
      ChoiceDist sigma = oracle.choose(menu);
      double p = sigma.p[menu.index_of(a)], q = sigma.p[menu.index_of(b)];
      if (p <= 0 || q <= 0)
        throw Error("insufficient-menus", "zero probability on a recovery menu");
      auto ma = chain_consequence_marginal(ord, space, Rat(3, 4), eta, k);
      auto mb = chain_consequence_marginal(ord, space, Rat(1, 4), eta, k);
      std::vector<double> row(M - 1, 0.0);
      for (int t = 1; t < M; ++t) row[t - 1] = to_double(ma[g[t]] - mb[g[t]]);
      rows.push_back(std::move(row));
      rhs.push_back(std::log(p / q));
    }
  }

  // Least squares by normal equations (tiny, dense).
  const int K = M - 1;
  std::vector<std::vector<double>> ata(K, std::vector<double>(K, 0.0));
  std::vector<double> atb(K, 0.0);
  for (size_t e = 0; e < rows.size(); ++e) {
    for (int i = 0; i < K; ++i) {
      atb[i] += rows[e][i] * rhs[e];
      for (int j = 0; j < K; ++j) ata[i][j] += rows[e][i] * rows[e][j];
    }
  }
  // Gaussian elimination with partial pivoting.
  std::vector<double> x(K, 0.0);
  {
    std::vector<std::vector<double>> A = ata;
    std::vector<double> b = atb;
    for (int col = 0; col < K; ++col) {
      int piv = col;
      for (int r = col + 1; r < K; ++r)
        if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
      if (std::abs(A[piv][col]) < 1e-12)
        throw Error("insufficient-menus", "singular utility recovery system");
      std::swap(A[piv], A[col]);
      std::swap(b[piv], b[col]);
      for (int r = col + 1; r < K; ++r) {
        double f = A[r][col] / A[col][col];
        for (int c = col; c < K; ++c) A[r][c] -= f * A[col][c];
        b[r] -= f * b[col];
      }
    }
    for (int r = K - 1; r >= 0; --r) {
      double s = b[r];
      for (int c = r + 1; c < K; ++c) s -= A[r][c] * x[c];
      x[r] = s / A[r][r];
    }
  }

  RecoveredUtility out;
  out.grid = g;
  out.value.assign(M, 0.0);
  for (int t = 1; t < M; ++t) out.value[t] = x[t - 1];
  for (size_t e = 0; e < rows.size(); ++e) {
    double pred = 0.0;
    for (int t = 0; t < K; ++t) pred += rows[e][t] * x[t];
    out.residual = std::max(out.residual, std::abs(pred - rhs[e]));
  }
  return out;
}

Action random_action(const VarSpacePtr& space, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> weight(1, 19);
  auto vars = space->realization_vars();
  std::vector<std::pair<Assignment, long>> cells;
  Assignment x(vars.size(), 0);
  long total = 0;
  while (true) {
    long w = weight(rng);
    cells.emplace_back(x, w);
    total += w;
    size_t k = 0;
    for (; k < vars.size(); ++k) {
      if (++x[k] < space->cardinality(vars[k])) break;
      x[k] = 0;
    }
    if (k == vars.size()) break;
  }
  std::map<Assignment, Rat> table;
  for (const auto& [key, w] : cells) table[key] = Rat(w, total);
  return Action(Joint::raw(space, vars, std::move(table)));
}

Menu random_menu(const VarSpacePtr& space, int size, std::uint64_t seed) {
  std::vector<Action> actions;
  for (int a = 0; a < size; ++a)
    actions.push_back(random_action(space, seed * 1000003ULL + a));
  return Menu(std::move(actions), true);
}

AxiomReport run_axiom_suite(const BehaviorOracle& oracle, const dag::SeparatorOrder& ord,
                            const SuiteConfig& config) {
  const auto space = oracle.space();
  AxiomReport report;

  std::vector<Menu> battery;
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> size_dist(2, 4);
  for (int i = 0; i < config.battery_size; ++i)
    battery.push_back(random_menu(space, size_dist(rng), config.seed * 7919ULL + i + 1));
  // One menu with a strictly dominated action, so that degenerate rules
  // (argmax-style) reveal themselves on the full-support check.
  CpLogitFixtures fixtures = make_cp_logit_fixtures(ord, space);
  battery.push_back(fixtures.dom_menu);

  report.checks.push_back(check_full_support(oracle, battery));
  AxiomCheck luce = luce_ratio_bound(oracle, battery, config.log_luce_bound);
  report.luce_sup = luce.measured;
  report.checks.push_back(std::move(luce));
  report.checks.push_back(check_i5(oracle, make_i5_pairs(ord, space)));
  {
    AxiomCheck lci_pad =
        check_lci(oracle, ord, make_lci_padding_scenario(ord, space));
    lci_pad.axiom = "LCI (padding)";
    report.checks.push_back(std::move(lci_pad));
    AxiomCheck lci_mix =
        check_lci(oracle, ord, make_lci_mixture_scenario(ord, space, 8));
    lci_mix.axiom = "LCI (nested mixtures)";
    report.checks.push_back(std::move(lci_mix));
  }
  report.checks.push_back(check_cp_logit(oracle, ord, fixtures));
  return report;
}

}  // namespace subcausal::axioms
