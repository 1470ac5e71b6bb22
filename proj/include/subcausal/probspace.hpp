#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "subcausal/rational.hpp"

namespace subcausal::probspace {

// Variable indexing convention used throughout: index 0 is the action
// label, indices 1..n are covariates, index n+1 is the consequence.
// The action label space is abstract; its cardinality is fixed per menu,
// not in the VarSpace.
class VarSpace {
 public:
  // supports[i] is the declared support of variable i+1 (covariates first,
  // consequence last). The consequence support must be strictly increasing
  // with at least two points.
  VarSpace(int n_covariates, std::vector<std::vector<double>> supports);

  int covariates() const { return n_; }
  int consequence() const { return n_ + 1; }
  int var_count() const { return n_ + 2; }  // including the action label

  const std::vector<double>& support(int var) const;
  int cardinality(int var) const { return static_cast<int>(support(var).size()); }
  int low(int) const { return 0; }
  int high(int var) const { return cardinality(var) - 1; }

  // All variables 1..n+1 in order.
  std::vector<int> realization_vars() const;
  std::vector<int> covariate_vars() const;

 private:
  int n_;
  std::vector<std::vector<double>> supports_;
};

using VarSpacePtr = std::shared_ptr<const VarSpace>;

// Value indices aligned with a Joint's variable list. For variable 0 the
// value is an action slot, for the others an index into the declared support.
using Assignment = std::vector<int>;

// Finite-support distribution over a subset of the variables, stored
// sparsely. Entries are exact rationals; zero entries are dropped.
class Joint {
 public:
  Joint() = default;
  // Validates mass 1 (within 1e-12 on the double view; exact inputs are
  // exact). Entries must be in range; duplicates are an error.
  static Joint from_entries(VarSpacePtr space, std::vector<int> vars,
                            const std::vector<std::pair<Assignment, Rat>>& entries,
                            int action_card = 0);
  // Unnormalized construction for internal use (conditionals, slices).
  static Joint raw(VarSpacePtr space, std::vector<int> vars,
                   std::map<Assignment, Rat> table, int action_card = 0);

  static Joint uniform(VarSpacePtr space, const std::vector<int>& vars);

  const VarSpacePtr& space() const { return space_; }
  const std::vector<int>& vars() const { return vars_; }
  const std::map<Assignment, Rat>& table() const { return table_; }
  int action_card() const { return action_card_; }

  bool covers(int var) const;
  int index_of(int var) const;  // position of var in vars(); -1 if absent
  int cardinality(int var) const;

  Rat prob(const Assignment& a) const;
  Rat mass() const;

  bool operator==(const Joint& o) const {
    return vars_ == o.vars_ && table_ == o.table_;
  }
  bool operator<(const Joint& o) const {
    if (vars_ != o.vars_) return vars_ < o.vars_;
    return table_ < o.table_;
  }

 private:
  VarSpacePtr space_;
  std::vector<int> vars_;
  int action_card_ = 0;
  std::map<Assignment, Rat> table_;
};

// marg_J p. J must be a subset of p's variables.
Joint marginal(const Joint& p, const std::vector<int>& J);

// Bayes conditional of `target` given the partial assignment `given`
// ((var, value-index) pairs). Throws Error("undefined-conditional") when the
// conditioning event has zero probability.
Joint conditional(const Joint& p, const std::vector<int>& target,
                  const std::vector<std::pair<int, int>>& given);

// An action is a lottery over the realization variables 1..n+1.
class Action {
 public:
  explicit Action(Joint dist);
  const Joint& dist() const { return dist_; }
  bool operator==(const Action& o) const { return dist_ == o.dist_; }
  bool operator<(const Action& o) const { return dist_ < o.dist_; }

 private:
  Joint dist_;
};

// alpha a + (1-alpha) b, pointwise on tables.
Action mix(const Rat& alpha, const Action& a, const Action& b);

// A choice problem. Actions are kept in a canonical sorted order so that
// menus compare and hash stably. When `strict_domain` is set the menu must
// satisfy the product-support condition defining the domain S: every
// action's joint covariate support equals the common product of the
// per-covariate marginal supports.
class Menu {
 public:
  Menu(std::vector<Action> actions, bool strict_domain);

  const std::vector<Action>& actions() const { return actions_; }
  int size() const { return static_cast<int>(actions_.size()); }
  bool strict_domain() const { return strict_; }
  const VarSpacePtr& space() const { return actions_.front().dist().space(); }

  int index_of(const Action& a) const;  // -1 if absent

  bool operator==(const Menu& o) const { return actions_ == o.actions_; }
  bool operator<(const Menu& o) const { return actions_ < o.actions_; }

 private:
  std::vector<Action> actions_;
  bool strict_;
};

// Checks the strict-domain condition without constructing a Menu.
bool satisfies_strict_domain(const std::vector<Action>& actions);

// Probabilities over a menu's actions, aligned with the canonical order.
struct ChoiceDist {
  std::vector<double> p;
};

void validate_choice_dist(const ChoiceDist& sigma, int menu_size,
                          double tol = 1e-9);

// X_I independent of X_J within S, following the directional definition:
// marg_I is shared across all actions, and each action's (I,J) marginal has
// product form. I and J must be disjoint nonempty subsets of {1..n+1}.
bool independent_within(const Menu& S, const std::vector<int>& I,
                        const std::vector<int>& J, double tol = 1e-12);

// The dataset induced by behavior: rho^S(a, y) = sigma(a) a(y), a joint over
// {0, 1, ..., n+1} whose variable-0 cardinality is |S|.
Joint induced_dataset(const Menu& S, const ChoiceDist& sigma);

// Replaces every action c by (1-eps) c + eps d with d uniform over the full
// product support. The result is in the strict domain. eps = 0 is allowed
// only for menus that are already strict ("domain-repair-failed" otherwise).
Menu perturb_menu(const Menu& S, const Rat& eps);

}  // namespace subcausal::probspace
