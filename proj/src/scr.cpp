#include "subcausal/scr.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace subcausal::scr {

using probspace::Action;
using probspace::Assignment;
using probspace::ChoiceDist;
using probspace::Joint;
using probspace::Menu;

void validate_utility(const Utility& u, const probspace::VarSpace& space) {
  if (static_cast<int>(u.value.size()) != space.cardinality(space.consequence()))
    throw Error("domain", "utility table size must match the consequence support");
  for (size_t i = 1; i < u.value.size(); ++i)
    if (!(u.value[i - 1] < u.value[i]))
      throw Error("domain", "utility must be strictly increasing");
}

ScrModel::ScrModel(dag::Dag R_, Utility u_, probspace::VarSpacePtr space_)
    : R(std::move(R_)), u(std::move(u_)), space(std::move(space_)) {
  if (R.node_count() != space->var_count())
    throw Error("domain", "DAG node count does not match the variable space");
  validate_utility(u, *space);
  auto props = dag::classify(R);
  if (!props.uninformed) throw Error("domain", "SCR DAG must be uninformed");
  if (!props.nontrivial) throw Error("domain", "SCR DAG must be nontrivial");
}

ScrModel ScrModel::scaled(double lambda) const {
  if (lambda < 0) throw Error("domain", "negative utility scale");
  ScrModel out = *this;
  for (double& v : out.u.value) v *= lambda;
  return out;
}

Joint factorize(const Joint& p, const dag::Dag& R) {
  const int nodes = R.node_count();
  if (static_cast<int>(p.vars().size()) != nodes)
    throw Error("domain", "factorize needs a joint over exactly the DAG's nodes");
  for (int v = 0; v < nodes; ++v)
    if (p.vars()[v] != v) throw Error("domain", "factorize needs variables 0..n+1");

  std::vector<Joint> num, den;
  std::vector<std::vector<int>> fam;
  num.reserve(nodes);
  for (int j = 0; j < nodes; ++j) {
    std::vector<int> family = R.parents(j);
    family.push_back(j);
    std::sort(family.begin(), family.end());
    fam.push_back(family);
    num.push_back(marginal(p, family));
    den.push_back(R.parents(j).empty() ? Joint() : marginal(p, R.parents(j)));
  }

  long long grid = 1;
  for (int v = 0; v < nodes; ++v) {
    grid *= p.cardinality(v);
    if (grid > (1 << 22)) throw Error("enumeration-budget", "factorization grid too large");
  }

  std::map<Assignment, Rat> table;
  Rat mass = 0;
  std::string first_undefined;
  Assignment x(nodes, 0);
  while (true) {
    Rat value = 1;
    for (int j = 0; j < nodes && value != 0; ++j) {
      Assignment key_num(fam[j].size());
      for (size_t t = 0; t < fam[j].size(); ++t) key_num[t] = x[fam[j][t]];
      Rat n = num[j].prob(key_num);
      if (R.parents(j).empty()) {
        value *= n;
        continue;
      }
      const auto& pa = R.parents(j);
      Assignment key_den(pa.size());
      for (size_t t = 0; t < pa.size(); ++t) key_den[t] = x[pa[t]];
      Rat d = den[j].prob(key_den);
      if (d == 0) {
        if (first_undefined.empty()) {
          std::ostringstream os;
          os << "undefined conditional for variable " << j << " given";
          for (size_t t = 0; t < pa.size(); ++t) os << " x" << pa[t] << "=" << key_den[t];
          first_undefined = os.str();
        }
        value = 0;
      } else {
        value *= n / d;
      }
    }
    if (value != 0) {
      table[x] = value;
      mass += value;
    }
    int k = 0;
    for (; k < nodes; ++k) {
      if (++x[k] < p.cardinality(k)) break;
      x[k] = 0;
    }
    if (k == nodes) break;
  }

  if (std::abs(to_double(mass) - 1.0) > 1e-12)
    throw Error("mass", "factorized table has mass " + std::to_string(to_double(mass)) +
                            (first_undefined.empty() ? std::string()
                                                     : ("; " + first_undefined)));
  return Joint::raw(p.space(), p.vars(), std::move(table), p.action_card());
}

Joint predict_consequence(const Joint& dataset, const dag::Dag& R, int action_slot) {
  Joint m0 = marginal(dataset, {0});
  if (m0.prob({action_slot}) == 0)
    throw Error("domain", "predict_consequence on a zero-probability action");
  Joint fact = factorize(dataset, R);
  return conditional(fact, {dataset.space()->consequence()}, {{0, action_slot}});
}

// ---------------------------------------------------------------------------
// Dense kernel

MenuPredictor::MenuPredictor(const Menu& S, const ScrModel& model)
    : n_actions_(S.size()) {
  const auto& space = *S.space();
  if (S.space() != model.space)
    throw Error("domain", "menu and model use different variable spaces");
  n_vars_ = space.covariates() + 1;
  card_.resize(n_vars_);
  stride_.resize(n_vars_);
  grid_ = 1;
  for (int i = 0; i < n_vars_; ++i) {
    card_[i] = space.cardinality(i + 1);
    stride_[i] = grid_;
    grid_ *= card_[i];
  }
  if (static_cast<long long>(grid_) * n_actions_ > (1 << 24))
    throw Error("enumeration-budget", "menu grid too large for the dense kernel");

  atab_.assign(static_cast<size_t>(n_actions_) * grid_, 0.0);
  a_nonzero_.resize(n_actions_);
  for (int a = 0; a < n_actions_; ++a) {
    for (const auto& [key, p] : S.actions()[a].dist().table()) {
      int cfg = 0;
      for (int i = 0; i < n_vars_; ++i) cfg += key[i] * stride_[i];
      atab_[static_cast<size_t>(a) * grid_ + cfg] = to_double(p);
      a_nonzero_[a].emplace_back(cfg, to_double(p));
    }
  }
  util_ = model.u.value;

  int cond_off = 0, den_off = 0;
  for (int j = 1; j <= n_vars_; ++j) {
    Factor f;
    f.cardj = card_[j - 1];
    f.has_action_parent = false;
    std::vector<int> cov_parents;
    for (int par : model.R.parents(j)) {
      if (par == 0)
        f.has_action_parent = true;
      else
        cov_parents.push_back(par - 1);
    }
    f.pgrid = 1;
    std::vector<int> pstride(cov_parents.size());
    for (size_t t = 0; t < cov_parents.size(); ++t) {
      pstride[t] = f.pgrid;
      f.pgrid *= card_[cov_parents[t]];
    }
    f.idx.resize(grid_);
    f.pidx.resize(grid_);
    for (int cfg = 0; cfg < grid_; ++cfg) {
      int ppack = 0;
      for (size_t t = 0; t < cov_parents.size(); ++t)
        ppack += ((cfg / stride_[cov_parents[t]]) % card_[cov_parents[t]]) * pstride[t];
      int val = (cfg / stride_[j - 1]) % card_[j - 1];
      f.pidx[cfg] = ppack;
      f.idx[cfg] = ppack * f.cardj + val;
    }
    f.block = f.pgrid * f.cardj;
    f.cond_offset = cond_off;
    f.den_offset = den_off;
    int reps = f.has_action_parent ? n_actions_ : 1;
    cond_off += reps * f.block;
    den_off += reps * f.pgrid;
    factors_.push_back(std::move(f));
  }
  cond_size_ = cond_off;
  den_size_ = den_off;

  cons_val_.resize(grid_);
  for (int cfg = 0; cfg < grid_; ++cfg)
    cons_val_[cfg] = (cfg / stride_[n_vars_ - 1]) % card_[n_vars_ - 1];
}

void MenuPredictor::expected_utilities(const std::vector<double>& sigma,
                                       Workspace& ws, std::vector<double>* eu) const {
  if (static_cast<int>(sigma.size()) != n_actions_)
    throw Error("domain", "choice weights arity mismatch");
  for (double s : sigma)
    if (!(s > 0)) throw Error("domain", "logit response needs full-support weights");

  ws.cond.assign(cond_size_, 0.0);
  ws.den.assign(den_size_, 0.0);
  for (int a = 0; a < n_actions_; ++a) {
    const double w0 = sigma[a];
    for (const auto& [cfg, p] : a_nonzero_[a]) {
      double w = w0 * p;
      for (const Factor& f : factors_) {
        int ab = f.has_action_parent ? a : 0;
        ws.cond[f.cond_offset + ab * f.block + f.idx[cfg]] += w;
        ws.den[f.den_offset + ab * f.pgrid + f.pidx[cfg]] += w;
      }
    }
  }
  for (const Factor& f : factors_) {
    int reps = f.has_action_parent ? n_actions_ : 1;
    for (int r = 0; r < reps; ++r) {
      for (int pp = 0; pp < f.pgrid; ++pp) {
        double d = ws.den[f.den_offset + r * f.pgrid + pp];
        if (d <= 0.0) continue;  // undefined rows keep zero entries
        double* cell = ws.cond.data() + f.cond_offset + r * f.block + pp * f.cardj;
        for (int v = 0; v < f.cardj; ++v) cell[v] /= d;
      }
    }
  }

  eu->assign(n_actions_, 0.0);
  ws.qa.assign(card_.back(), 0.0);
  for (int a = 0; a < n_actions_; ++a) {
    std::fill(ws.qa.begin(), ws.qa.end(), 0.0);
    for (int cfg = 0; cfg < grid_; ++cfg) {
      double w = 1.0;
      for (const Factor& f : factors_) {
        int ab = f.has_action_parent ? a : 0;
        w *= ws.cond[f.cond_offset + ab * f.block + f.idx[cfg]];
        if (w == 0.0) break;
      }
      if (w != 0.0) ws.qa[cons_val_[cfg]] += w;
    }
    double total = 0.0;
    for (double q : ws.qa) total += q;
    if (std::abs(total - 1.0) > 1e-9)
      throw Error("mass", "perceived consequence distribution has mass " +
                              std::to_string(total) +
                              "; the menu violates the domain support condition");
    double v = 0.0;
    for (size_t c = 0; c < ws.qa.size(); ++c) v += util_[c] * ws.qa[c];
    (*eu)[a] = v / total;
  }
}

std::vector<double> MenuPredictor::consequence_dist(const std::vector<double>& sigma,
                                                    int slot) const {
  Workspace ws;
  std::vector<double> eu;
  expected_utilities(sigma, ws, &eu);
  // Recompute the slot's distribution from the telescoped factors.
  std::vector<double> qa(card_.back(), 0.0);
  for (int cfg = 0; cfg < grid_; ++cfg) {
    double w = 1.0;
    for (const Factor& f : factors_) {
      int ab = f.has_action_parent ? slot : 0;
      w *= ws.cond[f.cond_offset + ab * f.block + f.idx[cfg]];
      if (w == 0.0) break;
    }
    if (w != 0.0) qa[cons_val_[cfg]] += w;
  }
  double total = 0.0;
  for (double q : qa) total += q;
  for (double& q : qa) q /= total;
  return qa;
}

void MenuPredictor::softmax(const std::vector<double>& eu, std::vector<double>* out) {
  double m = *std::max_element(eu.begin(), eu.end());
  out->resize(eu.size());
  double total = 0.0;
  for (size_t i = 0; i < eu.size(); ++i) {
    (*out)[i] = std::exp(eu[i] - m);
    total += (*out)[i];
  }
  for (double& x : *out) x /= total;
}

void MenuPredictor::response(const std::vector<double>& sigma, Workspace& ws,
                             std::vector<double>* out) const {
  std::vector<double> eu;
  expected_utilities(sigma, ws, &eu);
  softmax(eu, out);
}

ChoiceDist logit_response(const Menu& S, const ChoiceDist& sigma, const ScrModel& model) {
  probspace::validate_choice_dist(sigma, S.size());
  MenuPredictor pred(S, model);
  MenuPredictor::Workspace ws;
  ChoiceDist out;
  pred.response(sigma.p, ws, &out.p);
  return out;
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

double sigmoid(double w) { return 1.0 / (1.0 + std::exp(-w)); }

constexpr double kTinyWeight = 1e-300;

// g(w) = EU(a) - EU(b) - w at sigma = (sigmoid(w), sigmoid(-w)). Its roots
// are exactly the binary fixed points, and the logit coordinate stays
// well-conditioned for equilibria that are exponentially close to {0, 1}.
double binary_gap(const MenuPredictor& pred, double w, MenuPredictor::Workspace& ws) {
  std::vector<double> sigma = {std::max(sigmoid(w), kTinyWeight),
                               std::max(sigmoid(-w), kTinyWeight)};
  std::vector<double> eu;
  pred.expected_utilities(sigma, ws, &eu);
  return (eu[0] - eu[1]) - w;
}

int effective_threads(const SolveParams& params) {
  return params.threads > 0 ? params.threads : omp_get_max_threads();
}

}  // namespace

void response_gap_grid_serial(const MenuPredictor& pred, const std::vector<double>& ws_logit,
                              std::vector<double>* out) {
  out->resize(ws_logit.size());
  MenuPredictor::Workspace ws;
  for (size_t i = 0; i < ws_logit.size(); ++i)
    (*out)[i] = binary_gap(pred, ws_logit[i], ws);
}

void response_gap_grid(const MenuPredictor& pred, const std::vector<double>& ws_logit,
                       std::vector<double>* out, bool parallel, int threads) {
  out->resize(ws_logit.size());
  if (!parallel) {
    response_gap_grid_serial(pred, ws_logit, out);
    return;
  }
  int nt = threads > 0 ? threads : omp_get_max_threads();
  std::exception_ptr err;
#pragma omp parallel num_threads(nt)
  {
    MenuPredictor::Workspace ws;
#pragma omp for schedule(static)
    for (long i = 0; i < static_cast<long>(ws_logit.size()); ++i) {
      try {
        (*out)[i] = binary_gap(pred, ws_logit[i], ws);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

void run_starts_serial(const MenuPredictor& pred,
                       const std::vector<std::vector<double>>& starts,
                       const SolveParams& params, std::vector<StartResult>* out) {
  out->resize(starts.size());
  MenuPredictor::Workspace ws;
  for (size_t i = 0; i < starts.size(); ++i) {
    std::vector<double> sigma = starts[i], next;
    double residual = 1.0;
    bool converged = false;
    for (int it = 0; it < params.max_iterations; ++it) {
      pred.response(sigma, ws, &next);
      residual = 0.0;
      for (size_t a = 0; a < sigma.size(); ++a)
        residual = std::max(residual, std::abs(next[a] - sigma[a]));
      if (residual <= params.tol) {
        converged = true;
        break;
      }
      for (size_t a = 0; a < sigma.size(); ++a)
        sigma[a] = (1.0 - params.damping) * sigma[a] + params.damping * next[a];
    }
    (*out)[i] = StartResult{sigma, residual, converged};
  }
}

void run_starts(const MenuPredictor& pred, const std::vector<std::vector<double>>& starts,
                const SolveParams& params, std::vector<StartResult>* out, bool parallel) {
  if (!parallel) {
    run_starts_serial(pred, starts, params, out);
    return;
  }
  out->resize(starts.size());
  int nt = effective_threads(params);
  std::exception_ptr err;
#pragma omp parallel num_threads(nt)
  {
    MenuPredictor::Workspace ws;
#pragma omp for schedule(dynamic)
    for (long i = 0; i < static_cast<long>(starts.size()); ++i) {
      try {
        std::vector<StartResult> one;
        run_starts_serial(pred, {starts[i]}, params, &one);
        (*out)[i] = std::move(one[0]);
      } catch (...) {
#pragma omp critical
        if (!err) err = std::current_exception();
      }
    }
  }
  if (err) std::rethrow_exception(err);
}

namespace {

std::vector<std::vector<double>> make_starts(int k, const SolveParams& params) {
  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(k, 1.0 / k));  // start 0: uniform
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int m = params.multistart;
  // Latin hypercube on (0,1)^k, mapped through -log and normalized.
  std::vector<std::vector<double>> lhs(m, std::vector<double>(k));
  for (int d = 0; d < k; ++d) {
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < m; ++i) lhs[i][d] = (perm[i] + unif(rng)) / m;
  }
  for (int i = 0; i < m; ++i) {
    std::vector<double> sigma(k);
    double total = 0.0;
    for (int d = 0; d < k; ++d) {
      sigma[d] = -std::log(std::max(lhs[i][d], 1e-12));
      total += sigma[d];
    }
    for (int d = 0; d < k; ++d) sigma[d] = std::max(sigma[d] / total, 1e-9);
    starts.push_back(std::move(sigma));
  }
  return starts;
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::vector<Equilibrium> binary_roots(const MenuPredictor& pred, const Utility& u,
                                      const SolveParams& params) {
  // |w*| is bounded by the utility range at a fixed point.
  double u_range = u.value.back() - u.value.front();
  double w_edge = std::log(static_cast<double>(params.grid - 1));
  double w_max = u_range + 1.0;

  std::vector<double> ws_grid;
  const double step = 0.05;
  if (w_max > w_edge)
    for (double w = -w_max; w < -w_edge; w += step) ws_grid.push_back(w);
  for (int i = 1; i < params.grid; ++i) {
    double z = static_cast<double>(i) / params.grid;
    ws_grid.push_back(std::log(z / (1.0 - z)));
  }
  if (w_max > w_edge)
    for (double w = w_edge + step; w <= w_max; w += step) ws_grid.push_back(w);

  std::vector<double> gap;
  response_gap_grid(pred, ws_grid, &gap, params.parallel, params.threads);

  MenuPredictor::Workspace scratch;
  std::vector<double> roots_w;
  for (size_t i = 0; i + 1 < ws_grid.size(); ++i) {
    if (gap[i] == 0.0) {
      roots_w.push_back(ws_grid[i]);
      continue;
    }
    if (gap[i] * gap[i + 1] < 0.0) {
      double lo = ws_grid[i], hi = ws_grid[i + 1];
      double glo = gap[i];
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double gm = binary_gap(pred, mid, scratch);
        if (gm == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((gm > 0) == (glo > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
        if (hi - lo < 1e-14 * std::max(1.0, std::abs(lo) + std::abs(hi))) break;
      }
      roots_w.push_back(0.5 * (lo + hi));
    }
  }
  if (gap.back() == 0.0) roots_w.push_back(ws_grid.back());

  std::vector<Equilibrium> eqs;
  for (double w : roots_w) {
    Equilibrium eq;
    eq.sigma.p = {std::max(sigmoid(w), kTinyWeight), std::max(sigmoid(-w), kTinyWeight)};
    eq.logit = w;
    double g = binary_gap(pred, w, scratch);
    eq.residual = std::abs(sigmoid(w + g) - sigmoid(w));
    bool merged = false;
    for (auto& other : eqs)
      if (sup_distance(other.sigma.p, eq.sigma.p) <= params.merge_radius) {
        merged = true;
        if (eq.residual < other.residual) other = eq;
        break;
      }
    if (!merged) eqs.push_back(std::move(eq));
  }
  return eqs;
}

}  // namespace

EquilibriumSet solve_equilibria(const Menu& S, const ScrModel& model,
                                const SolveParams& params) {
  MenuPredictor pred(S, model);
  EquilibriumSet set;
  if (S.size() == 2) {
    set.all = binary_roots(pred, model.u, params);
  } else {
    auto starts = make_starts(S.size(), params);
    std::vector<StartResult> results;
    run_starts(pred, starts, params, &results, params.parallel);
    for (const auto& r : results) {
      if (!r.converged) continue;
      Equilibrium eq;
      eq.sigma.p = r.sigma;
      eq.residual = r.residual;
      bool merged = false;
      for (auto& other : set.all)
        if (sup_distance(other.sigma.p, eq.sigma.p) <= params.merge_radius) {
          merged = true;
          if (eq.residual < other.residual) {
            eq.basin_starts = other.basin_starts;
            other = eq;
          }
          break;
        }
      if (!merged) set.all.push_back(std::move(eq));
    }
    if (set.all.empty())
      throw Error("convergence", "no multistart converged to a fixed point");
  }

  if (params.basins) {
    // Basin attribution: which damped starts end at which equilibrium.
    auto starts = make_starts(S.size(), params);
    std::vector<StartResult> results;
    SolveParams basin_params = params;
    basin_params.max_iterations = std::min(params.max_iterations, 100000);
    run_starts(pred, starts, basin_params, &results, params.parallel);
    for (size_t s = 0; s < results.size(); ++s) {
      if (!results[s].converged) continue;
      for (auto& eq : set.all)
        if (sup_distance(eq.sigma.p, results[s].sigma) <=
            std::max(params.merge_radius, 1e-6)) {
          eq.basin_starts.push_back(static_cast<int>(s));
          break;
        }
    }
  }
  std::sort(set.all.begin(), set.all.end(),
            [](const Equilibrium& a, const Equilibrium& b) { return a.sigma.p < b.sigma.p; });
  return set;
}

ChoiceDist canonical_choice(const Menu& S, const ScrModel& model,
                            const SolveParams& params) {
  MenuPredictor pred(S, model);
  std::vector<std::vector<double>> starts{std::vector<double>(S.size(), 1.0 / S.size())};
  for (double d : {params.damping, 0.1, 0.02, 0.004}) {
    SolveParams p = params;
    p.damping = d;
    std::vector<StartResult> results;
    run_starts_serial(pred, starts, p, &results);
    if (results[0].converged) return ChoiceDist{results[0].sigma};
  }
  throw Error("convergence", "damped iteration from the uniform start did not converge");
}

ChoiceDist escr_choice(const Menu& S, const Joint& q, const ScrModel& model) {
  const auto& space = *S.space();
  if (q.action_card() != S.size())
    throw Error("domain", "exogenous dataset action labels do not match the menu");
  // supp(marg_{0..n} q) must be the product of the per-variable supports.
  {
    std::vector<std::set<int>> per_var(space.covariates() + 1);
    std::set<std::vector<int>> joint;
    for (const auto& [key, p] : q.table()) {
      std::vector<int> head(key.begin(), key.begin() + space.covariates() + 1);
      joint.insert(head);
      for (int v = 0; v <= space.covariates(); ++v) per_var[v].insert(key[v]);
    }
    size_t expected = 1;
    for (const auto& s : per_var) expected *= s.size();
    if (joint.size() != expected)
      throw Error("domain", "exogenous dataset violates the product support condition");
  }
  std::vector<double> eu(S.size());
  for (int slot = 0; slot < S.size(); ++slot) {
    Joint cons = predict_consequence(q, model.R, slot);
    double v = 0.0;
    for (const auto& [key, p] : cons.table()) v += model.u.value[key[0]] * to_double(p);
    eu[slot] = v;
  }
  ChoiceDist out;
  MenuPredictor::softmax(eu, &out.p);
  return out;
}

std::vector<ChoiceDist> solve_equilibria_over_menu_distribution(
    const std::vector<std::pair<double, Menu>>& mu, const ScrModel& model,
    const SolveParams& params) {
  if (mu.empty()) throw Error("domain", "empty menu distribution");
  double wsum = 0.0;
  for (const auto& [w, S] : mu) {
    if (!(w > 0)) throw Error("domain", "menu weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw Error("mass", "menu weights sum to " + std::to_string(wsum));

  // Distinct actions across menus share one label in the pooled dataset.
  std::vector<Action> labels;
  std::vector<std::vector<int>> slot_label(mu.size());
  for (size_t s = 0; s < mu.size(); ++s) {
    for (const auto& a : mu[s].second.actions()) {
      auto it = std::lower_bound(labels.begin(), labels.end(), a);
      if (it == labels.end() || !(*it == a)) labels.insert(it, a);
    }
  }
  for (size_t s = 0; s < mu.size(); ++s)
    for (const auto& a : mu[s].second.actions()) {
      auto it = std::lower_bound(labels.begin(), labels.end(), a);
      slot_label[s].push_back(static_cast<int>(it - labels.begin()));
    }

  Menu pooled_menu = [&] {
    if (labels.size() >= 2) return Menu(labels, false);
    // Single distinct action across all menus cannot happen: menus have >= 2.
    throw Error("internal", "degenerate pooled action set");
  }();
  MenuPredictor pred(pooled_menu, model);
  // Canonical labels after Menu's sort coincide with `labels` (already sorted).

  int K = static_cast<int>(labels.size());
  std::vector<std::vector<double>> sigma(mu.size());
  for (size_t s = 0; s < mu.size(); ++s)
    sigma[s].assign(mu[s].second.size(), 1.0 / mu[s].second.size());

  MenuPredictor::Workspace ws;
  std::vector<double> weights(K), eu;
  double residual = 1.0;
  for (int it = 0; it < params.max_iterations; ++it) {
    std::fill(weights.begin(), weights.end(), 0.0);
    for (size_t s = 0; s < mu.size(); ++s)
      for (size_t slot = 0; slot < sigma[s].size(); ++slot)
        weights[slot_label[s][slot]] += mu[s].first * sigma[s][slot];
    pred.expected_utilities(weights, ws, &eu);
    residual = 0.0;
    std::vector<std::vector<double>> next(mu.size());
    for (size_t s = 0; s < mu.size(); ++s) {
      std::vector<double> menu_eu(sigma[s].size());
      for (size_t slot = 0; slot < sigma[s].size(); ++slot)
        menu_eu[slot] = eu[slot_label[s][slot]];
      MenuPredictor::softmax(menu_eu, &next[s]);
      for (size_t slot = 0; slot < sigma[s].size(); ++slot)
        residual = std::max(residual, std::abs(next[s][slot] - sigma[s][slot]));
    }
    if (residual <= params.tol) break;
    for (size_t s = 0; s < mu.size(); ++s)
      for (size_t slot = 0; slot < sigma[s].size(); ++slot)
        sigma[s][slot] = (1.0 - params.damping) * sigma[s][slot] +
                         params.damping * next[s][slot];
  }
  if (residual > params.tol)
    throw Error("convergence", "pooled fixed-point iteration did not converge");

  std::vector<ChoiceDist> out(mu.size());
  for (size_t s = 0; s < mu.size(); ++s) out[s] = ChoiceDist{sigma[s]};
  return out;
}

std::vector<EquilibriumSet> limit_equilibria(const Menu& S, const ScrModel& model,
                                             const std::vector<double>& lambdas,
                                             const SolveParams& params) {
  for (size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i - 1] < lambdas[i]))
      throw Error("domain", "lambda schedule must be increasing");
  std::vector<EquilibriumSet> out;
  for (double lam : lambdas) out.push_back(solve_equilibria(S, model.scaled(lam), params));
  return out;
}

}  // namespace subcausal::scr
