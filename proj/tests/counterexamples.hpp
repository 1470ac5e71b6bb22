#pragma once

// Choice rules that are NOT subjective-causality representations, used to
// exercise the axiom harness's failure detection.

#include <algorithm>
#include <cmath>
#include <vector>

#include "subcausal/oracle.hpp"
#include "subcausal/probspace.hpp"

namespace testutil {

namespace ps = subcausal::probspace;

inline double true_expected_utility(const ps::Action& a,
                                    const std::vector<double>& u) {
  const auto& space = *a.dist().space();
  ps::Joint cons = marginal(a.dist(), {space.consequence()});
  double v = 0;
  for (const auto& [key, p] : cons.table()) v += u[key[0]] * subcausal::to_double(p);
  return v;
}

// Argmax of true expected utility with ties uniform: violates Full-support.
class HardMaxOracle : public subcausal::reveal::BehaviorOracle {
 public:
  HardMaxOracle(ps::VarSpacePtr space, std::vector<double> u)
      : space_(std::move(space)), u_(std::move(u)) {}
  ps::ChoiceDist choose(const ps::Menu& S) const override {
    std::vector<double> eu(S.size());
    for (int a = 0; a < S.size(); ++a) eu[a] = true_expected_utility(S.actions()[a], u_);
    double best = *std::max_element(eu.begin(), eu.end());
    ps::ChoiceDist out;
    out.p.assign(S.size(), 0.0);
    int ties = 0;
    for (int a = 0; a < S.size(); ++a)
      if (eu[a] >= best - 1e-12) ++ties;
    for (int a = 0; a < S.size(); ++a)
      if (eu[a] >= best - 1e-12) out.p[a] = 1.0 / ties;
    return out;
  }
  bool reentrant() const override { return true; }
  ps::VarSpacePtr space() const override { return space_; }

 private:
  ps::VarSpacePtr space_;
  std::vector<double> u_;
};

// Logit-EU with a menu-size-dependent temperature: violates LCI (padding a
// menu changes Luce ratios even though every inference is unchanged).
class MenuTemperatureOracle : public subcausal::reveal::BehaviorOracle {
 public:
  MenuTemperatureOracle(ps::VarSpacePtr space, std::vector<double> u)
      : space_(std::move(space)), u_(std::move(u)) {}
  ps::ChoiceDist choose(const ps::Menu& S) const override {
    double beta = static_cast<double>(S.size());
    std::vector<double> eu(S.size());
    for (int a = 0; a < S.size(); ++a)
      eu[a] = beta * true_expected_utility(S.actions()[a], u_);
    double m = *std::max_element(eu.begin(), eu.end());
    ps::ChoiceDist out;
    out.p.resize(S.size());
    double total = 0;
    for (int a = 0; a < S.size(); ++a) total += (out.p[a] = std::exp(eu[a] - m));
    for (auto& x : out.p) x /= total;
    return out;
  }
  bool reentrant() const override { return true; }
  ps::VarSpacePtr space() const override { return space_; }

 private:
  ps::VarSpacePtr space_;
  std::vector<double> u_;
};

// Plain Logit-EU (correct perception). Satisfies SCR with the trivial order
// ({n+1}); tested against a nontrivial imposed order it violates I5.
class LogitEuOracle : public subcausal::reveal::BehaviorOracle {
 public:
  LogitEuOracle(ps::VarSpacePtr space, std::vector<double> u)
      : space_(std::move(space)), u_(std::move(u)) {}
  ps::ChoiceDist choose(const ps::Menu& S) const override {
    std::vector<double> eu(S.size());
    for (int a = 0; a < S.size(); ++a) eu[a] = true_expected_utility(S.actions()[a], u_);
    double m = *std::max_element(eu.begin(), eu.end());
    ps::ChoiceDist out;
    out.p.resize(S.size());
    double total = 0;
    for (int a = 0; a < S.size(); ++a) total += (out.p[a] = std::exp(eu[a] - m));
    for (auto& x : out.p) x /= total;
    return out;
  }
  bool reentrant() const override { return true; }
  ps::VarSpacePtr space() const override { return space_; }

 private:
  ps::VarSpacePtr space_;
  std::vector<double> u_;
};

}  // namespace testutil
