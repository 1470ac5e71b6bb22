#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "subcausal/dag.hpp"
#include "subcausal/oracle.hpp"
#include "subcausal/probspace.hpp"
#include "subcausal/scr.hpp"

namespace subcausal::io {

// A sparse dataset row: action name, realization values, probability.
struct DatasetEntry {
  std::string action;
  std::vector<double> values;
  Rat p;
};

// Parsed model file: variable declarations, named DAGs, utility, named
// actions, named menus, and the optional exogenous dataset / menu weights.
struct ModelFile {
  probspace::VarSpacePtr space;
  std::vector<std::string> var_names;  // action label first, consequence last
  scr::Utility utility;
  std::map<std::string, dag::Dag> dags;
  std::map<std::string, probspace::Action> actions;
  std::map<std::string, std::vector<std::string>> menus;
  std::vector<DatasetEntry> dataset;               // optional; empty if absent
  std::map<std::string, Rat> menu_weights;         // optional menu distribution
};

ModelFile parse_model(const std::string& path);
ModelFile parse_model_text(const std::string& text);
std::string write_model_text(const ModelFile& model);

// Menu with its canonical-slot -> action-name mapping.
struct NamedMenu {
  probspace::Menu menu;
  std::vector<std::string> names;
};

// Builds a named menu, perturbing by eps > 0 when asked (names then refer to
// the perturbed actions).
NamedMenu build_menu(const ModelFile& model, const std::string& menu_name,
                     const Rat& eps = Rat(0));

// Exogenous dataset as a joint over {0..n+1} aligned with the menu's slots.
probspace::Joint build_dataset(const ModelFile& model, const NamedMenu& named);

// Recorded-behavior file: (menu, choice distribution) pairs over the
// model's variable space.
reveal::RecordedOracle load_behavior(const std::string& path,
                                     const probspace::VarSpacePtr& space);

}  // namespace subcausal::io
