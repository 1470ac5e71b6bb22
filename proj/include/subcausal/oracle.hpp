#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "subcausal/probspace.hpp"
#include "subcausal/scr.hpp"

namespace subcausal::reveal {

// The analyst's datum: a deterministic map from menus to choice
// distributions. Repeated queries on the same menu must return identical
// distributions.
class BehaviorOracle {
 public:
  virtual ~BehaviorOracle() = default;
  virtual probspace::ChoiceDist choose(const probspace::Menu& S) const = 0;
  // Every choice distribution the oracle considers possible on S. The
  // default wraps the single selection; simulator oracles return all
  // equilibria so that diagnostic verdicts can be checked for
  // selection-independence.
  virtual std::vector<probspace::ChoiceDist> choose_all(const probspace::Menu& S) const {
    return {choose(S)};
  }
  virtual bool reentrant() const { return false; }
  virtual probspace::VarSpacePtr space() const = 0;
};

// Simulates an SCR model. The canonical equilibrium selection is the one
// reached by damped iteration from the uniform start; this is a selection
// convention of the simulator, not a property of the model.
class SimulatorOracle : public BehaviorOracle {
 public:
  SimulatorOracle(scr::ScrModel model, scr::SolveParams params = {})
      : model_(std::move(model)), params_(params) {
    params_.basins = false;
  }

  probspace::ChoiceDist choose(const probspace::Menu& S) const override {
    return scr::canonical_choice(S, model_, params_);
  }
  std::vector<probspace::ChoiceDist> choose_all(const probspace::Menu& S) const override {
    std::vector<probspace::ChoiceDist> out;
    for (const auto& eq : scr::solve_equilibria(S, model_, params_).all)
      out.push_back(eq.sigma);
    return out;
  }
  bool reentrant() const override { return true; }
  probspace::VarSpacePtr space() const override { return model_.space; }
  const scr::ScrModel& model() const { return model_; }

 private:
  scr::ScrModel model_;
  scr::SolveParams params_;
};

// Externally recorded behavior keyed by canonicalized menus. A query for a
// menu that was never recorded raises "missing-data" describing the menu the
// experimenter would need to collect.
class RecordedOracle : public BehaviorOracle {
 public:
  RecordedOracle(probspace::VarSpacePtr space) : space_(std::move(space)) {}

  void record(const probspace::Menu& S, const probspace::ChoiceDist& sigma) {
    probspace::validate_choice_dist(sigma, S.size());
    data_[S] = sigma;
  }

  probspace::ChoiceDist choose(const probspace::Menu& S) const override;
  bool reentrant() const override { return true; }
  probspace::VarSpacePtr space() const override { return space_; }
  const std::map<probspace::Menu, probspace::ChoiceDist>& data() const { return data_; }

 private:
  probspace::VarSpacePtr space_;
  std::map<probspace::Menu, probspace::ChoiceDist> data_;
};

// Human-readable sketch of a menu, used by missing-data errors and the
// query transcript.
std::string describe_menu(const probspace::Menu& S);

}  // namespace subcausal::reveal
