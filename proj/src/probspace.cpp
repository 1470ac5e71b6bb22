#include "subcausal/probspace.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace subcausal {

Rat rat_from_string(std::string_view s) {
  auto fail = [&] { throw Error("parse", "bad probability literal: '" + std::string(s) + "'"); };
  if (s.empty()) fail();
  auto slash = s.find('/');
  if (slash != std::string_view::npos) {
    std::string num(s.substr(0, slash)), den(s.substr(slash + 1));
    if (num.empty() || den.empty()) fail();
    try {
      boost::multiprecision::cpp_int n(num), d(den);
      return Rat(n, d);
    } catch (const std::exception&) {
      fail();
    }
  }
  auto dot = s.find('.');
  std::string digits;
  int frac_digits = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') continue;
    if (c == '-' || c == '+') {
      if (i != 0) fail();
      digits.push_back(c);
      continue;
    }
    if (c < '0' || c > '9') fail();
    digits.push_back(c);
    if (dot != std::string_view::npos && i > dot) ++frac_digits;
  }
  if (digits.empty() || digits == "-" || digits == "+") fail();
  boost::multiprecision::cpp_int num(digits);
  boost::multiprecision::cpp_int den = 1;
  for (int i = 0; i < frac_digits; ++i) den *= 10;
  return Rat(num, den);
}

std::string rat_to_string(const Rat& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace subcausal

namespace subcausal::probspace {

VarSpace::VarSpace(int n_covariates, std::vector<std::vector<double>> supports)
    : n_(n_covariates), supports_(std::move(supports)) {
  if (n_ < 1) throw Error("domain", "need at least one covariate");
  if (static_cast<int>(supports_.size()) != n_ + 1)
    throw Error("domain", "expected supports for variables 1..n+1");
  for (const auto& sup : supports_)
    if (sup.empty()) throw Error("domain", "empty variable support");
  const auto& cons = supports_.back();
  if (cons.size() < 2)
    throw Error("domain", "consequence support needs at least two points");
  for (size_t i = 1; i < cons.size(); ++i)
    if (!(cons[i - 1] < cons[i]))
      throw Error("domain", "consequence support must be strictly increasing");
}

const std::vector<double>& VarSpace::support(int var) const {
  if (var < 1 || var > n_ + 1)
    throw Error("domain", "no declared support for variable " + std::to_string(var));
  return supports_[var - 1];
}

std::vector<int> VarSpace::realization_vars() const {
  std::vector<int> v(n_ + 1);
  for (int i = 0; i <= n_; ++i) v[i] = i + 1;
  return v;
}

std::vector<int> VarSpace::covariate_vars() const {
  std::vector<int> v(n_);
  for (int i = 0; i < n_; ++i) v[i] = i + 1;
  return v;
}

namespace {

void check_vars_sorted_unique(const std::vector<int>& vars) {
  if (vars.empty()) throw Error("domain", "joint over empty variable set");
  for (size_t i = 1; i < vars.size(); ++i)
    if (vars[i - 1] >= vars[i]) throw Error("domain", "variable list not sorted/unique");
}

}  // namespace

Joint Joint::raw(VarSpacePtr space, std::vector<int> vars,
                 std::map<Assignment, Rat> table, int action_card) {
  check_vars_sorted_unique(vars);
  Joint j;
  j.space_ = std::move(space);
  j.vars_ = std::move(vars);
  j.action_card_ = action_card;
  for (auto it = table.begin(); it != table.end();) {
    if (it->second < 0) throw Error("domain", "negative probability entry");
    if (it->second == 0)
      it = table.erase(it);
    else
      ++it;
  }
  j.table_ = std::move(table);
  return j;
}

Joint Joint::from_entries(VarSpacePtr space, std::vector<int> vars,
                          const std::vector<std::pair<Assignment, Rat>>& entries,
                          int action_card) {
  check_vars_sorted_unique(vars);
  std::map<Assignment, Rat> table;
  for (const auto& [a, p] : entries) {
    if (a.size() != vars.size()) throw Error("domain", "assignment arity mismatch");
    for (size_t i = 0; i < vars.size(); ++i) {
      int card = vars[i] == 0 ? action_card : space->cardinality(vars[i]);
      if (a[i] < 0 || a[i] >= card)
        throw Error("domain", "assignment value out of declared support");
    }
    if (!table.emplace(a, p).second) throw Error("domain", "duplicate table entry");
  }
  Joint j = raw(std::move(space), std::move(vars), std::move(table), action_card);
  double m = to_double(j.mass());
  if (std::abs(m - 1.0) > 1e-12)
    throw Error("mass", "table mass " + std::to_string(m) + " != 1");
  return j;
}

Joint Joint::uniform(VarSpacePtr space, const std::vector<int>& vars) {
  long long total = 1;
  for (int v : vars) total *= space->cardinality(v);
  std::map<Assignment, Rat> table;
  Assignment a(vars.size(), 0);
  Rat u(1, total);
  while (true) {
    table[a] = u;
    size_t k = 0;
    for (; k < vars.size(); ++k) {
      if (++a[k] < space->cardinality(vars[k])) break;
      a[k] = 0;
    }
    if (k == vars.size()) break;
  }
  return raw(std::move(space), vars, std::move(table));
}

bool Joint::covers(int var) const { return index_of(var) >= 0; }

int Joint::index_of(int var) const {
  auto it = std::lower_bound(vars_.begin(), vars_.end(), var);
  if (it == vars_.end() || *it != var) return -1;
  return static_cast<int>(it - vars_.begin());
}

int Joint::cardinality(int var) const {
  return var == 0 ? action_card_ : space_->cardinality(var);
}

Rat Joint::prob(const Assignment& a) const {
  auto it = table_.find(a);
  return it == table_.end() ? Rat(0) : it->second;
}

Rat Joint::mass() const {
  Rat m = 0;
  for (const auto& [a, p] : table_) m += p;
  return m;
}

Joint marginal(const Joint& p, const std::vector<int>& J) {
  std::vector<int> vars = J;
  std::sort(vars.begin(), vars.end());
  check_vars_sorted_unique(vars);
  std::vector<int> pos;
  pos.reserve(vars.size());
  for (int v : vars) {
    int i = p.index_of(v);
    if (i < 0) throw Error("domain", "marginal over variable not covered by the joint");
    pos.push_back(i);
  }
  std::map<Assignment, Rat> table;
  Assignment key(vars.size());
  for (const auto& [a, pr] : p.table()) {
    for (size_t i = 0; i < pos.size(); ++i) key[i] = a[pos[i]];
    table[key] += pr;
  }
  return Joint::raw(p.space(), std::move(vars), std::move(table), p.action_card());
}

Joint conditional(const Joint& p, const std::vector<int>& target,
                  const std::vector<std::pair<int, int>>& given) {
  std::vector<int> tvars = target;
  std::sort(tvars.begin(), tvars.end());
  check_vars_sorted_unique(tvars);
  std::vector<int> tpos;
  for (int v : tvars) {
    int i = p.index_of(v);
    if (i < 0) throw Error("domain", "conditional target not covered by the joint");
    tpos.push_back(i);
  }
  std::vector<std::pair<int, int>> gpos;  // (position in assignment, value)
  for (const auto& [v, val] : given) {
    int i = p.index_of(v);
    if (i < 0) throw Error("domain", "conditioning variable not covered by the joint");
    if (std::binary_search(tvars.begin(), tvars.end(), v))
      throw Error("domain", "conditioning variable overlaps target");
    gpos.emplace_back(i, val);
  }
  std::map<Assignment, Rat> table;
  Rat event_mass = 0;
  Assignment key(tvars.size());
  for (const auto& [a, pr] : p.table()) {
    bool match = true;
    for (const auto& [i, val] : gpos)
      if (a[i] != val) { match = false; break; }
    if (!match) continue;
    event_mass += pr;
    for (size_t i = 0; i < tpos.size(); ++i) key[i] = a[tpos[i]];
    table[key] += pr;
  }
  if (event_mass == 0) {
    std::ostringstream os;
    os << "conditioning event has zero probability:";
    for (const auto& [v, val] : given) os << " x" << v << "=" << val;
    throw Error("undefined-conditional", os.str());
  }
  for (auto& [a, pr] : table) pr /= event_mass;
  return Joint::raw(p.space(), std::move(tvars), std::move(table), p.action_card());
}

Action::Action(Joint dist) : dist_(std::move(dist)) {
  if (dist_.vars() != dist_.space()->realization_vars())
    throw Error("domain", "action must be a joint over variables 1..n+1");
}

Action mix(const Rat& alpha, const Action& a, const Action& b) {
  if (alpha < 0 || alpha > 1) throw Error("domain", "mixture weight outside [0,1]");
  if (a.dist().space() != b.dist().space())
    throw Error("domain", "mixture across different variable spaces");
  std::map<Assignment, Rat> table = a.dist().table();
  for (auto& [key, p] : table) p *= alpha;
  for (const auto& [key, p] : b.dist().table()) table[key] += (Rat(1) - alpha) * p;
  return Action(Joint::raw(a.dist().space(), a.dist().vars(), std::move(table)));
}

namespace {

// Per-covariate marginal supports and the joint covariate support set.
std::vector<std::set<int>> covariate_marginal_supports(const Action& a) {
  const auto& space = *a.dist().space();
  std::vector<std::set<int>> sup(space.covariates());
  for (const auto& [key, p] : a.dist().table())
    for (int j = 0; j < space.covariates(); ++j) sup[j].insert(key[j]);
  return sup;
}

std::set<Assignment> joint_covariate_support(const Action& a) {
  const auto& space = *a.dist().space();
  std::set<Assignment> sup;
  for (const auto& [key, p] : a.dist().table())
    sup.insert(Assignment(key.begin(), key.begin() + space.covariates()));
  return sup;
}

}  // namespace

bool satisfies_strict_domain(const std::vector<Action>& actions) {
  auto product = covariate_marginal_supports(actions.front());
  for (const auto& a : actions)
    if (covariate_marginal_supports(a) != product) return false;
  size_t expected = 1;
  for (const auto& s : product) expected *= s.size();
  for (const auto& a : actions) {
    auto joint = joint_covariate_support(a);
    if (joint.size() != expected) return false;
  }
  return true;
}

Menu::Menu(std::vector<Action> actions, bool strict_domain)
    : actions_(std::move(actions)), strict_(strict_domain) {
  if (actions_.size() < 2) throw Error("domain", "a menu needs at least two actions");
  for (const auto& a : actions_)
    if (a.dist().space() != actions_.front().dist().space())
      throw Error("domain", "menu actions over different variable spaces");
  std::sort(actions_.begin(), actions_.end());
  for (size_t i = 1; i < actions_.size(); ++i)
    if (actions_[i - 1] == actions_[i])
      throw Error("duplicate-action", "menu actions must be distinct");
  if (strict_ && !satisfies_strict_domain(actions_))
    throw Error("domain", "menu violates the strict product-support condition");
}

int Menu::index_of(const Action& a) const {
  auto it = std::lower_bound(actions_.begin(), actions_.end(), a);
  if (it == actions_.end() || !(*it == a)) return -1;
  return static_cast<int>(it - actions_.begin());
}

void validate_choice_dist(const ChoiceDist& sigma, int menu_size, double tol) {
  if (static_cast<int>(sigma.p.size()) != menu_size)
    throw Error("domain", "choice distribution arity mismatch");
  double total = 0;
  for (double x : sigma.p) {
    if (x < 0) throw Error("domain", "negative choice probability");
    total += x;
  }
  if (std::abs(total - 1.0) > tol)
    throw Error("mass", "choice probabilities sum to " + std::to_string(total));
}

bool independent_within(const Menu& S, const std::vector<int>& I,
                        const std::vector<int>& J, double tol) {
  const auto& space = *S.space();
  auto in_range = [&](int v) { return v >= 1 && v <= space.consequence(); };
  for (int v : I)
    if (!in_range(v)) throw Error("domain", "index set outside {1..n+1}");
  for (int v : J)
    if (!in_range(v)) throw Error("domain", "index set outside {1..n+1}");
  if (I.empty() || J.empty()) throw Error("domain", "independence over empty index set");
  {
    std::set<int> overlap(I.begin(), I.end());
    for (int v : J)
      if (overlap.count(v)) throw Error("domain", "independence index sets overlap");
  }

  // Shared marginal on I across all actions.
  Joint ref = marginal(S.actions().front().dist(), I);
  for (const auto& a : S.actions()) {
    Joint m = marginal(a.dist(), I);
    std::set<Assignment> keys;
    for (const auto& [k, p] : ref.table()) keys.insert(k);
    for (const auto& [k, p] : m.table()) keys.insert(k);
    for (const auto& k : keys)
      if (std::abs(to_double(ref.prob(k) - m.prob(k))) > tol) return false;
  }

  // Product form within every action.
  std::vector<int> IJ = I;
  IJ.insert(IJ.end(), J.begin(), J.end());
  for (const auto& a : S.actions()) {
    Joint mi = marginal(a.dist(), I);
    Joint mj = marginal(a.dist(), J);
    Joint mij = marginal(a.dist(), IJ);
    // mij's variable order is sorted; build lookups by var.
    for (const auto& [ki, pi] : mi.table()) {
      for (const auto& [kj, pj] : mj.table()) {
        Assignment key(mij.vars().size());
        for (size_t t = 0; t < mij.vars().size(); ++t) {
          int v = mij.vars()[t];
          int ii = mi.index_of(v);
          key[t] = ii >= 0 ? ki[ii] : kj[mj.index_of(v)];
        }
        if (std::abs(to_double(mij.prob(key) - pi * pj)) > tol) return false;
      }
    }
    // Joint support points outside the product grid (cannot happen, since
    // support(mij) projects into support(mi) x support(mj)) are covered above.
  }
  return true;
}

Joint induced_dataset(const Menu& S, const ChoiceDist& sigma) {
  validate_choice_dist(sigma, S.size());
  std::vector<int> vars;
  vars.push_back(0);
  auto rv = S.space()->realization_vars();
  vars.insert(vars.end(), rv.begin(), rv.end());
  std::map<Assignment, Rat> table;
  for (int slot = 0; slot < S.size(); ++slot) {
    Rat w(sigma.p[slot]);
    if (w == 0) continue;
    for (const auto& [key, p] : S.actions()[slot].dist().table()) {
      Assignment full;
      full.reserve(key.size() + 1);
      full.push_back(slot);
      full.insert(full.end(), key.begin(), key.end());
      table[full] = w * p;
    }
  }
  return Joint::raw(S.space(), std::move(vars), std::move(table), S.size());
}

Menu perturb_menu(const Menu& S, const Rat& eps) {
  if (eps < 0 || eps >= 1) throw Error("domain", "perturbation weight outside [0,1)");
  if (eps == 0) {
    if (!S.strict_domain() && !satisfies_strict_domain(S.actions()))
      throw Error("domain-repair-failed",
                  "eps = 0 cannot repair a menu outside the strict domain");
    return Menu(S.actions(), true);
  }
  Action d(Joint::uniform(S.space(), S.space()->realization_vars()));
  std::vector<Action> out;
  out.reserve(S.actions().size());
  for (const auto& a : S.actions()) out.push_back(mix(Rat(1) - eps, a, d));
  return Menu(std::move(out), true);
}

}  // namespace subcausal::probspace
