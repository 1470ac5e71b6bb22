#pragma once

#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "subcausal/dag.hpp"
#include "subcausal/probspace.hpp"

namespace subcausal::scr {

// Utility over the consequence support points; strictly increasing.
struct Utility {
  std::vector<double> value;
};

void validate_utility(const Utility& u, const probspace::VarSpace& space);

// The (R, u) pair of a subjective causality representation. R must be
// uninformed and nontrivial over the space's nodes.
struct ScrModel {
  ScrModel(dag::Dag R, Utility u, probspace::VarSpacePtr space);
  dag::Dag R;
  Utility u;
  probspace::VarSpacePtr space;

  // Utility scaled by lambda >= 0 (lambda = 0 collapses to uniform choice).
  ScrModel scaled(double lambda) const;
};

// p_R(x) = prod_j p(x_j | x_{R(j)}). p must cover exactly R's nodes.
// Conditionals at zero-probability parent configurations contribute zero
// mass; if the result then fails to have mass 1 the dataset violates the
// domain condition and Error("mass") names the offending (j, x_{R(j)}).
probspace::Joint factorize(const probspace::Joint& p, const dag::Dag& R);

// marg_{n+1} of factorize(dataset, R) conditioned on action slot a.
probspace::Joint predict_consequence(const probspace::Joint& dataset,
                                     const dag::Dag& R, int action_slot);

// Dense double-precision evaluation of the SCR response map for a fixed
// menu: per call it forms the induced dataset at the given choice weights,
// estimates the DAG conditionals from it, and telescopes them into
// per-action perceived consequence distributions.
class MenuPredictor {
 public:
  MenuPredictor(const probspace::Menu& S, const ScrModel& model);

  int actions() const { return n_actions_; }
  int grid() const { return grid_; }

  struct Workspace {
    std::vector<double> cond, den, qa;
  };

  // Fills eu[a] with the perceived expected utility of each action at
  // choice weights sigma (all sigma[a] > 0). Thread-safe given distinct
  // workspaces.
  void expected_utilities(const std::vector<double>& sigma, Workspace& ws,
                          std::vector<double>* eu) const;

  // Perceived consequence distribution of one action slot.
  std::vector<double> consequence_dist(const std::vector<double>& sigma,
                                       int slot) const;

  static void softmax(const std::vector<double>& eu, std::vector<double>* out);

  void response(const std::vector<double>& sigma, Workspace& ws,
                std::vector<double>* out) const;

 private:
  int n_actions_, n_vars_, grid_;
  std::vector<int> card_, stride_;
  std::vector<double> atab_;  // [a * grid_ + cfg]
  std::vector<std::vector<std::pair<int, double>>> a_nonzero_;  // per action
  std::vector<double> util_;
  // Per realization variable j: conditional table indexed by (action block
  // if 0 is a parent) x packed covariate-parent config x value.
  struct Factor {
    bool has_action_parent;
    int pgrid, cardj, block;
    int cond_offset, den_offset;
    std::vector<int> idx, pidx;  // per cfg
  };
  std::vector<Factor> factors_;
  std::vector<int> cons_val_;
  int cond_size_ = 0, den_size_ = 0;
};

// The SCR Logit map Phi(sigma). sigma must have full support on S.
probspace::ChoiceDist logit_response(const probspace::Menu& S,
                                     const probspace::ChoiceDist& sigma,
                                     const ScrModel& model);

struct SolveParams {
  double tol = 1e-12;         // residual tolerance
  double damping = 0.5;       // sigma <- (1-d) sigma + d Phi(sigma)
  int grid = 10000;           // binary sign-scan resolution
  int multistart = 64;        // Latin hypercube starts (plus the uniform start)
  double merge_radius = 1e-6;
  int max_iterations = 200000;
  bool basins = true;         // attribute damped starts to equilibria
  std::uint64_t seed = 0;
  bool parallel = true;
  int threads = 0;            // 0 = OpenMP default
};

struct Equilibrium {
  probspace::ChoiceDist sigma;
  double residual = 0.0;
  // Logit of sigma[0] for binary menus; meaningful for roots whose distance
  // to {0,1} underflows in probability space.
  double logit = std::numeric_limits<double>::quiet_NaN();
  std::vector<int> basin_starts;  // damped starts that converged here (0 = uniform)
};

struct EquilibriumSet {
  std::vector<Equilibrium> all;
};

// All personal equilibria of (S, model). Binary menus are solved as a 1-D
// root problem: a sign scan over a 10^4 grid on sigma(a), extended in logit
// coordinates past the grid's edge cells so that roots exponentially close
// to {0,1} are still bracketed, then bisection. Larger menus use damped
// iteration from a Latin-hypercube multistart plus the uniform start, with
// the documented caveat of possibly missed equilibria.
EquilibriumSet solve_equilibria(const probspace::Menu& S, const ScrModel& model,
                                const SolveParams& params = {});

// The equilibrium selected by damped iteration from the uniform start.
// Deterministic: if the base damping oscillates, a fixed ladder of smaller
// damping factors is tried in order.
probspace::ChoiceDist canonical_choice(const probspace::Menu& S,
                                       const ScrModel& model,
                                       const SolveParams& params = {});

// Exogenous-dataset SCR: one closed-form Logit evaluation against q.
// q must give every action positive probability and satisfy the
// action-covariate product support condition.
probspace::ChoiceDist escr_choice(const probspace::Menu& S,
                                  const probspace::Joint& q,
                                  const ScrModel& model);

// Joint fixed point across a distribution over menus: every menu's Logit
// response is evaluated against the pooled dataset
// rho^mu(a, y) = sum_S mu(S) rho(a; mu, S) a(y). Returns the canonical
// (damped, uniform-start) per-menu choice distributions.
std::vector<probspace::ChoiceDist> solve_equilibria_over_menu_distribution(
    const std::vector<std::pair<double, probspace::Menu>>& mu,
    const ScrModel& model, const SolveParams& params = {});

// Equilibrium sets under utility lambda * u along an increasing schedule.
std::vector<EquilibriumSet> limit_equilibria(
    const probspace::Menu& S, const ScrModel& model,
    const std::vector<double>& lambdas = {1, 10, 100, 1000, 10000},
    const SolveParams& params = {});

// --- batch kernels (OpenMP, with serial references kept for testing) ---

// Evaluates the binary fixed-point gap g(w) = [EU(a) - EU(b)] - w at each
// logit value w, with sigma = (sigmoid(w), sigmoid(-w)).
void response_gap_grid(const MenuPredictor& pred, const std::vector<double>& ws_logit,
                       std::vector<double>* out, bool parallel = true,
                       int threads = 0);
void response_gap_grid_serial(const MenuPredictor& pred,
                              const std::vector<double>& ws_logit,
                              std::vector<double>* out);

struct StartResult {
  std::vector<double> sigma;
  double residual = 1.0;
  bool converged = false;
};

// Damped fixed-point iteration from each start.
void run_starts(const MenuPredictor& pred,
                const std::vector<std::vector<double>>& starts,
                const SolveParams& params, std::vector<StartResult>* out,
                bool parallel = true);
void run_starts_serial(const MenuPredictor& pred,
                       const std::vector<std::vector<double>>& starts,
                       const SolveParams& params, std::vector<StartResult>* out);

}  // namespace subcausal::scr
