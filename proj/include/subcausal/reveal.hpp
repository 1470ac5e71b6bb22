#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "subcausal/dag.hpp"
#include "subcausal/oracle.hpp"
#include "subcausal/probspace.hpp"

namespace subcausal::reveal {

// One binary menu engineered so that a single choice probability settles a
// separation or an ordering question.
struct DiagnosticMenu {
  probspace::Menu menu;
  int a_slot;               // canonical index of the constructed action a
  int b_slot;
  std::vector<int> target;  // J for separation menus, the candidate for ordering
  Rat epsilon;              // residual mass parameter (separation menus)
};

struct RevealParams {
  double tol = 1e-6;        // |rho - 1/2| indifference tolerance
  Rat epsilon = Rat(1, 1000);
  int max_covariates = 16;  // subset enumeration guard
  // Check that every equilibrium of the simulator gives the same verdict.
  // Costs a full equilibrium enumeration per query.
  bool check_selection_independence = false;
  bool parallel = true;
  int threads = 0;
};

struct QueryRecord {
  std::string kind;   // "separation" or "ordering"
  std::vector<int> target;
  double prob_a = 0;  // observed rho(a, {a,b})
  bool verdict = false;
  std::string menu;
};

using Transcript = std::vector<QueryRecord>;

// The menu S_J from the finite-menus construction: a_J concentrates 1-eps on
// the all-high realization, b_J on (high on J, low elsewhere), each with the
// residual eps spread uniformly over its designated off points, so that X_J
// is independent of the rest within the menu and all other variables are
// almost perfectly correlated. J must be a proper subset of the covariates.
DiagnosticMenu separation_menu(const std::vector<int>& J,
                               const probspace::VarSpacePtr& space,
                               const Rat& eps);

// Whether J separates under the oracle. Sets containing n+1 separate by
// definition and cost no query.
bool separates(const BehaviorOracle& oracle, const std::vector<int>& J,
               const RevealParams& params = {}, Transcript* transcript = nullptr);

// All subset-minimal separating sets, by size-increasing enumeration with
// superset pruning. Needs at most 2^n - 1 separation queries.
std::vector<std::vector<int>> minimal_separators(const BehaviorOracle& oracle,
                                                 const RevealParams& params = {},
                                                 Transcript* transcript = nullptr);

// The ordering menu {a^pi, b^pi} testing whether `candidate` directly
// precedes `next` given the already-ordered suffix: a chain of noisy-copy
// variables through one representative per remaining separator, with the
// other maximal-intersection candidates' representatives tied to the
// candidate's distinguished member j* and to k in `next` by the (3/4, 1/4)
// rule, and k independent of the chain prefix.
DiagnosticMenu ordering_menu(const std::vector<int>& candidate,
                             const std::vector<int>& next,
                             const std::vector<std::vector<int>>& remaining,
                             const std::vector<std::vector<int>>& suffix,
                             const probspace::VarSpacePtr& space);

// Recursive ordering of the minimal separators, built backwards from
// {n+1}. Throws "no-scr" when {n+1} is not a minimal separator and
// "inconsistent-revealed-causes" when no or several candidates pass a stage.
dag::SeparatorOrder order_separators(const BehaviorOracle& oracle,
                                     const std::vector<std::vector<int>>& separators,
                                     const RevealParams& params = {},
                                     Transcript* transcript = nullptr);

// The always-present causal links R^rho implied by the order (A*_0 = {0}).
dag::EdgeSet revealed_causes(const dag::SeparatorOrder& ord);

struct IdentifyResult {
  dag::SeparatorOrder order;
  dag::EdgeSet causes;       // revealed causes
  dag::Dag revealed_dag;     // perfect revealed DAG
  Transcript transcript;
  IdentifyResult(dag::SeparatorOrder o, dag::EdgeSet c, dag::Dag d, Transcript t)
      : order(std::move(o)), causes(std::move(c)), revealed_dag(std::move(d)),
        transcript(std::move(t)) {}
};

// Full pipeline: minimal separators -> ordering -> revealed causes and the
// perfect revealed DAG.
IdentifyResult identify(const BehaviorOracle& oracle, const RevealParams& params = {});

struct CoarsenessResult {
  bool coarser = false;
  int menus_compared = 0;
  std::vector<int> rejected_menus;     // battery indices filtered out
  std::optional<int> offending_menu;   // first disagreement
  double max_gap = 0.0;
};

// Whether oracle2's choices match oracle1's on every battery menu within
// which each `irrelevant` variable is independent of all others. Menus
// violating that hypothesis are filtered out and reported.
CoarsenessResult coarser_than(const BehaviorOracle& oracle2,
                              const BehaviorOracle& oracle1,
                              const std::vector<int>& irrelevant,
                              const std::vector<probspace::Menu>& battery,
                              double tol = 1e-6);

}  // namespace subcausal::reveal
