#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subcausal/dag.hpp"
#include "subcausal/oracle.hpp"
#include "subcausal/probspace.hpp"
#include "subcausal/scr.hpp"

namespace subcausal::axioms {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct AxiomCheck {
  std::string axiom;
  Verdict verdict = Verdict::inconclusive;
  std::string detail;     // witness / measured quantities for failures
  double measured = 0.0;  // axiom-specific scalar
};

struct AxiomReport {
  std::vector<AxiomCheck> checks;
  double luce_sup = 0.0;
  bool all_passed() const {
    for (const auto& c : checks)
      if (c.verdict == Verdict::fail) return false;
    return true;
  }
};

// Whether every action pair of S satisfies the separator-chain factorization
// b(y_{U A*_i}) = b(y_{A*_1}) prod_i a(y_{A*_{i+1} \ A*_i} | y_{A*_i})
// at a-a.e. y. With the order ({n+1}) every menu is correctly perceived.
bool is_correctly_perceived(const probspace::Menu& S, const dag::SeparatorOrder& ord,
                            double tol = 1e-12, std::string* witness = nullptr);

// --- correctly perceived fixture machinery -------------------------------
//
// Fixtures are built from noisy-copy chains through one representative
// covariate per separator block, ending in a consequence kernel with two
// rows. All actions of a fixture share the chain transitions and the
// kernel, so the menus are correctly perceived by construction and their
// true consequence marginals are available in closed form.

struct ChainKernel {
  std::vector<Rat> row_high, row_low;  // over the consequence support
};

ChainKernel noisy_point_kernel(const probspace::VarSpace& space, int high_point,
                               int low_point, const Rat& eta,
                               const std::vector<int>& spread_points);

probspace::Action chain_action(const dag::SeparatorOrder& ord,
                               const probspace::VarSpacePtr& space, const Rat& alpha,
                               const Rat& eta, const ChainKernel& kernel);

// Exact consequence marginal of chain_action(..., alpha, ...), as a table
// over the consequence support.
std::vector<Rat> chain_consequence_marginal(const dag::SeparatorOrder& ord,
                                            const probspace::VarSpacePtr& space,
                                            const Rat& alpha, const Rat& eta,
                                            const ChainKernel& kernel);

// --- individual axiom checks ----------------------------------------------

AxiomCheck check_full_support(const reveal::BehaviorOracle& oracle,
                              const std::vector<probspace::Menu>& battery,
                              double tol = 1e-12);

// Measures sup rho(a,S)/rho(b,S) over the battery. With a known log bound
// (max u - min u for SCR oracles) the verdict asserts it; without one the
// check flags batteries whose running supremum keeps escalating.
AxiomCheck luce_ratio_bound(const reveal::BehaviorOracle& oracle,
                            const std::vector<probspace::Menu>& battery,
                            std::optional<double> log_bound = std::nullopt);

struct MenuPair {
  probspace::Menu menu;
  int a_slot, b_slot;
};

// I5: actions sharing the A*_1 marginal are chosen with equal probability.
AxiomCheck check_i5(const reveal::BehaviorOracle& oracle,
                    const std::vector<MenuPair>& pairs, double tol = 1e-9);

std::vector<MenuPair> make_i5_pairs(const dag::SeparatorOrder& ord,
                                    const probspace::VarSpacePtr& space);

// Luce's choice axiom given inferences, on a nested-menu scenario with a
// shared action pair. Menus whose separator-block conditionals neither match
// nor converge to the limit's are reported inconclusive (hypothesis filter).
struct LciScenario {
  std::vector<probspace::Menu> sequence;
  probspace::Menu limit;
  probspace::Action a, b;
};

AxiomCheck check_lci(const reveal::BehaviorOracle& oracle, const dag::SeparatorOrder& ord,
                     const LciScenario& scenario, double tol = 1e-9,
                     double noise = 1e-6);

LciScenario make_lci_padding_scenario(const dag::SeparatorOrder& ord,
                                      const probspace::VarSpacePtr& space);
LciScenario make_lci_mixture_scenario(const dag::SeparatorOrder& ord,
                                      const probspace::VarSpacePtr& space, int depth);

// Correctly perceived Logit-EU behavior: Independence (log-linearity in the
// mixture weight), Dominance (strict FOSD implies majority choice), and
// Continuity (finite Cauchy proxy along a consequence-marginal-converging
// sequence).
struct CpLogitFixtures {
  probspace::Menu alpha_menu, beta_menu;
  int alpha_mix_slot, alpha_ref_slot, beta_mix_slot, beta_ref_slot;
  double alpha, beta;
  probspace::Menu dom_menu;
  int dom_p_slot, dom_q_slot;
  std::vector<probspace::Menu> cont_sequence;
  std::vector<std::pair<int, int>> cont_slots;  // (p_m, q_m) slots per menu
};

CpLogitFixtures make_cp_logit_fixtures(const dag::SeparatorOrder& ord,
                                       const probspace::VarSpacePtr& space);

AxiomCheck check_cp_logit(const reveal::BehaviorOracle& oracle,
                          const dag::SeparatorOrder& ord,
                          const CpLogitFixtures& fixtures, double tol = 1e-9,
                          double cauchy_tol = 1e-4);

// --- utility recovery ------------------------------------------------------

struct RecoveredUtility {
  std::vector<int> grid;       // consequence support indices
  std::vector<double> value;   // normalized: value at grid.front() is 0
  double residual = 0.0;       // max abs equation residual of the LS fit
};

// Recovers u on the grid from correctly perceived chain menus: each menu's
// log Luce ratio equals the expected-utility gap of its known consequence
// marginals, giving a linear system solved by least squares.
RecoveredUtility recover_utility(const reveal::BehaviorOracle& oracle,
                                 const dag::SeparatorOrder& ord,
                                 const std::vector<int>& grid,
                                 const Rat& eta = Rat(1, 1000));

// --- the full suite ---------------------------------------------------------

struct SuiteConfig {
  int battery_size = 50;
  std::uint64_t seed = 0;
  std::optional<double> log_luce_bound;  // max u - min u when the oracle's u is known
};

// Random full-support action/menu generation used by the suite batteries.
probspace::Action random_action(const probspace::VarSpacePtr& space, std::uint64_t seed);
probspace::Menu random_menu(const probspace::VarSpacePtr& space, int size,
                            std::uint64_t seed);

AxiomReport run_axiom_suite(const reveal::BehaviorOracle& oracle,
                            const dag::SeparatorOrder& ord,
                            const SuiteConfig& config = {});

}  // namespace subcausal::axioms
