#pragma once

#include <map>
#include <string>

#include "subcausal/dag.hpp"
#include "subcausal/probspace.hpp"
#include "subcausal/scr.hpp"

// The Alzheimer's-treatment running example: covariates P (plaque, index 1)
// and T (tangles, index 2), consequence H (health, index 3), all binary.
namespace subcausal::fixtures {

inline constexpr int P = 1, T = 2, H = 3;

probspace::VarSpacePtr running_space();

// The six candidate causal models over {0, P, T, H}.
std::map<std::string, dag::Dag> running_dags();

// Treatments with health 50/50: under iota plaque always builds up, under pi
// plaque and health move together, under nu they move oppositely. Tangles
// are independent coin flips throughout (they do not affect behavior under
// R_P and are left unspecified in the source example).
probspace::Action iota();
probspace::Action pi_treatment();
probspace::Action nu();

// SCR(R_P, u) with u = (0, u_high).
scr::ScrModel model_rp(double u_high = 6.0);
scr::ScrModel running_model(const std::string& dag_name, double u_high = 6.0);

// Menus of the regularity-violation example, perturbed into the strict
// domain with weight eps on the uniform lottery.
probspace::Menu regularity_pair(const Rat& eps);
probspace::Menu regularity_triple(const Rat& eps);

// The self-confirming example: b always yields (plaque, tangles, good
// health); a yields good health with probability q/2, no intervention
// otherwise. Utility (0, lambda) with DAG R_P.
probspace::Menu multiplicity_menu(const Rat& q, const Rat& eps);
scr::ScrModel multiplicity_model(double lambda);

// The canonical slot of (1-eps) original + eps uniform inside a perturbed
// menu; -1 when absent.
int perturbed_slot(const probspace::Menu& menu, const probspace::Action& original,
                   const Rat& eps);

}  // namespace subcausal::fixtures
