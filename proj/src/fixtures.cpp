#include "subcausal/fixtures.hpp"

namespace subcausal::fixtures {

using probspace::Action;
using probspace::Assignment;
using probspace::Joint;
using probspace::Menu;
using probspace::VarSpace;
using probspace::VarSpacePtr;

VarSpacePtr running_space() {
  static VarSpacePtr space =
      std::make_shared<const VarSpace>(2, std::vector<std::vector<double>>{
                                              {0, 1}, {0, 1}, {0, 1}});
  return space;
}

std::map<std::string, dag::Dag> running_dags() {
  std::map<std::string, dag::Dag> dags;
  dags.emplace("R_P", dag::Dag(4, {{0, P}, {P, H}}));
  dags.emplace("R_T", dag::Dag(4, {{0, T}, {T, P}, {T, H}}));
  dags.emplace("R_Both", dag::Dag(4, {{0, P}, {0, T}, {T, P}, {T, H}, {P, H}}));
  dags.emplace("R_Rat", dag::Dag(4, {{0, P}, {0, T}, {0, H}, {P, T}, {P, H}, {T, H}}));
  dags.emplace("R_PT", dag::Dag(4, {{0, P}, {P, T}, {T, H}}));
  dags.emplace("R_TP", dag::Dag(4, {{0, T}, {T, P}, {P, H}}));
  return dags;
}

namespace {

// Builds an action from (plaque, health) atoms, tangles an independent coin.
Action ph_action(std::initializer_list<std::pair<std::pair<int, int>, Rat>> atoms) {
  std::map<Assignment, Rat> table;
  for (const auto& [ph, prob] : atoms)
    for (int t : {0, 1})
      table[{ph.first, t, ph.second}] += prob / 2;
  return Action(Joint::raw(running_space(), {P, T, H}, std::move(table)));
}

}  // namespace

Action iota() {
  return ph_action({{{1, 1}, Rat(1, 2)}, {{1, 0}, Rat(1, 2)}});
}

Action pi_treatment() {
  return ph_action({{{0, 0}, Rat(1, 2)}, {{1, 1}, Rat(1, 2)}});
}

Action nu() {
  return ph_action({{{1, 0}, Rat(1, 2)}, {{0, 1}, Rat(1, 2)}});
}

scr::ScrModel model_rp(double u_high) {
  return scr::ScrModel(running_dags().at("R_P"), scr::Utility{{0.0, u_high}},
                       running_space());
}

scr::ScrModel running_model(const std::string& dag_name, double u_high) {
  return scr::ScrModel(running_dags().at(dag_name), scr::Utility{{0.0, u_high}},
                       running_space());
}

Menu regularity_pair(const Rat& eps) {
  return perturb_menu(Menu({iota(), pi_treatment()}, false), eps);
}

Menu regularity_triple(const Rat& eps) {
  return perturb_menu(Menu({iota(), nu(), pi_treatment()}, false), eps);
}

Menu multiplicity_menu(const Rat& q, const Rat& eps) {
  std::map<Assignment, Rat> ta, tb;
  ta[{0, 0, 1}] = q / 2;
  ta[{0, 0, 0}] = (Rat(1) - q) / 2;
  ta[{1, 1, 0}] = Rat(1, 2);
  tb[{1, 1, 1}] = Rat(1);
  Action a(Joint::raw(running_space(), {P, T, H}, std::move(ta)));
  Action b(Joint::raw(running_space(), {P, T, H}, std::move(tb)));
  return perturb_menu(Menu({a, b}, false), eps);
}

scr::ScrModel multiplicity_model(double lambda) {
  return scr::ScrModel(running_dags().at("R_P"), scr::Utility{{0.0, lambda}},
                       running_space());
}

int perturbed_slot(const Menu& menu, const Action& original, const Rat& eps) {
  Action d(Joint::uniform(menu.space(), menu.space()->realization_vars()));
  return menu.index_of(mix(Rat(1) - eps, original, d));
}

}  // namespace subcausal::fixtures
