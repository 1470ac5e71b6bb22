#include "subcausal/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace subcausal::io {

using nlohmann::json;
using probspace::Action;
using probspace::Assignment;
using probspace::Joint;
using probspace::Menu;
using probspace::VarSpace;
using probspace::VarSpacePtr;

namespace {

constexpr const char* kModelSchema = "subjective-causality-model/1";
constexpr const char* kBehaviorSchema = "subjective-causality-behavior/1";

Rat parse_prob(const json& j, const std::string& where) {
  try {
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    if (j.is_number_integer()) return Rat(j.get<long long>());
    if (j.is_number()) {
      // Go through the decimal literal so "0.25" stays exact.
      std::ostringstream os;
      os.precision(17);
      os << j.get<double>();
      return rat_from_string(os.str());
    }
  } catch (const Error&) {
  }
  throw Error("schema", where + ": expected a probability as string or number");
}

int match_support_value(const VarSpace& space, int var, double value,
                        const std::string& where) {
  const auto& sup = space.support(var);
  for (size_t i = 0; i < sup.size(); ++i)
    if (std::abs(sup[i] - value) <= 1e-9) return static_cast<int>(i);
  throw Error("schema", where + ": value " + std::to_string(value) +
                            " not in the declared support of variable " +
                            std::to_string(var));
}

Action parse_action(const json& j, const VarSpacePtr& space, const std::string& name) {
  if (!j.is_array()) throw Error("schema", "actions." + name + ": expected entry array");
  std::vector<std::pair<Assignment, Rat>> entries;
  const int nv = space->covariates() + 1;
  for (const auto& e : j) {
    if (!e.contains("x") || !e["x"].is_array() ||
        static_cast<int>(e["x"].size()) != nv)
      throw Error("schema", "actions." + name + ": entry needs x with n+1 values");
    Assignment a(nv);
    for (int t = 0; t < nv; ++t)
      a[t] = match_support_value(*space, t + 1, e["x"][t].get<double>(),
                                 "actions." + name);
    entries.emplace_back(a, parse_prob(e.at("p"), "actions." + name));
  }
  try {
    return Action(Joint::from_entries(space, space->realization_vars(), entries));
  } catch (const Error& err) {
    throw Error(err.kind(), "actions." + name + ": " + err.what());
  }
}

json action_to_json(const Action& a) {
  json out = json::array();
  const auto& space = *a.dist().space();
  for (const auto& [key, p] : a.dist().table()) {
    json e;
    e["x"] = json::array();
    for (size_t t = 0; t < key.size(); ++t)
      e["x"].push_back(space.support(static_cast<int>(t) + 1)[key[t]]);
    e["p"] = rat_to_string(p);
    out.push_back(e);
  }
  return out;
}

}  // namespace

ModelFile parse_model_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("parse", std::string("model file is not valid JSON: ") + e.what());
  }
  if (j.value("schema", "") != kModelSchema)
    throw Error("schema", "unsupported or missing schema (want " +
                              std::string(kModelSchema) + ")");

  ModelFile m;
  if (!j.contains("variables") || !j["variables"].is_array() || j["variables"].size() < 3)
    throw Error("schema", "variables: need an action, at least one covariate, and a consequence");
  std::vector<std::vector<double>> supports;
  const auto& vars = j["variables"];
  for (size_t i = 0; i < vars.size(); ++i) {
    const auto& v = vars[i];
    std::string role = v.value("role", "");
    m.var_names.push_back(v.value("name", "x" + std::to_string(i)));
    if (i == 0) {
      if (role != "action") throw Error("schema", "variables[0] must have role 'action'");
      continue;
    }
    bool last = i + 1 == vars.size();
    if (role != (last ? "consequence" : "covariate"))
      throw Error("schema", "variables[" + std::to_string(i) + "]: role must be '" +
                                (last ? "consequence" : "covariate") + "'");
    if (!v.contains("support") || !v["support"].is_array() || v["support"].empty())
      throw Error("schema", "variables[" + std::to_string(i) + "]: missing support");
    supports.push_back(v["support"].get<std::vector<double>>());
  }
  try {
    m.space = std::make_shared<const VarSpace>(static_cast<int>(supports.size()) - 1,
                                               supports);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("variables: ") + e.what());
  }

  if (!j.contains("utility") || !j["utility"].is_array())
    throw Error("schema", "utility: expected an array over the consequence support");
  for (const auto& u : j["utility"])
    m.utility.value.push_back(u.is_string() ? to_double(rat_from_string(u.get<std::string>()))
                                            : u.get<double>());
  try {
    scr::validate_utility(m.utility, *m.space);
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("utility: ") + e.what());
  }

  for (const auto& [name, edges] : j.value("dags", json::object()).items()) {
    dag::EdgeSet es;
    for (const auto& e : edges) {
      if (!e.is_array() || e.size() != 2)
        throw Error("schema", "dags." + name + ": edges are [from, to] pairs");
      es.insert({e[0].get<int>(), e[1].get<int>()});
    }
    try {
      m.dags.emplace(name, dag::Dag(m.space->var_count(), std::move(es)));
    } catch (const Error& e) {
      throw Error(e.kind(), "dags." + name + ": " + e.what());
    }
  }

  for (const auto& [name, arr] : j.value("actions", json::object()).items())
    m.actions.emplace(name, parse_action(arr, m.space, name));

  for (const auto& [name, arr] : j.value("menus", json::object()).items()) {
    std::vector<std::string> names;
    for (const auto& an : arr) {
      std::string s = an.get<std::string>();
      if (!m.actions.count(s))
        throw Error("schema", "menus." + name + ": unknown action '" + s + "'");
      names.push_back(s);
    }
    m.menus.emplace(name, std::move(names));
  }

  for (const auto& e : j.value("dataset", json::array())) {
    DatasetEntry d;
    d.action = e.at("action").get<std::string>();
    if (!m.actions.count(d.action))
      throw Error("schema", "dataset: unknown action '" + d.action + "'");
    d.values = e.at("x").get<std::vector<double>>();
    d.p = parse_prob(e.at("p"), "dataset");
    m.dataset.push_back(std::move(d));
  }

  for (const auto& [name, w] : j.value("menu_distribution", json::object()).items()) {
    if (!m.menus.count(name))
      throw Error("schema", "menu_distribution: unknown menu '" + name + "'");
    m.menu_weights.emplace(name, parse_prob(w, "menu_distribution." + name));
  }
  return m;
}

ModelFile parse_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model_text(ss.str());
}

std::string write_model_text(const ModelFile& model) {
  json j;
  j["schema"] = kModelSchema;
  j["variables"] = json::array();
  for (size_t i = 0; i < model.var_names.size(); ++i) {
    json v;
    v["name"] = model.var_names[i];
    if (i == 0) {
      v["role"] = "action";
    } else {
      bool last = i + 1 == model.var_names.size();
      v["role"] = last ? "consequence" : "covariate";
      v["support"] = model.space->support(static_cast<int>(i));
    }
    j["variables"].push_back(v);
  }
  j["utility"] = model.utility.value;
  j["dags"] = json::object();
  for (const auto& [name, d] : model.dags) {
    json edges = json::array();
    for (const auto& [a, b] : d.edges()) edges.push_back(json::array({a, b}));
    j["dags"][name] = edges;
  }
  j["actions"] = json::object();
  for (const auto& [name, a] : model.actions) j["actions"][name] = action_to_json(a);
  j["menus"] = json::object();
  for (const auto& [name, names] : model.menus) j["menus"][name] = names;
  if (!model.dataset.empty()) {
    j["dataset"] = json::array();
    for (const auto& d : model.dataset) {
      json e;
      e["action"] = d.action;
      e["x"] = d.values;
      e["p"] = rat_to_string(d.p);
      j["dataset"].push_back(e);
    }
  }
  if (!model.menu_weights.empty()) {
    j["menu_distribution"] = json::object();
    for (const auto& [name, w] : model.menu_weights)
      j["menu_distribution"][name] = rat_to_string(w);
  }
  return j.dump(2);
}

NamedMenu build_menu(const ModelFile& model, const std::string& menu_name, const Rat& eps) {
  auto it = model.menus.find(menu_name);
  if (it == model.menus.end())
    throw Error("schema", "unknown menu '" + menu_name + "'");
  std::vector<Action> actions;
  for (const auto& an : it->second) actions.push_back(model.actions.at(an));
  Menu menu = eps > 0 ? perturb_menu(Menu(actions, false), eps) : Menu(actions, true);

  NamedMenu named{menu, std::vector<std::string>(menu.size())};
  Action d(Joint::uniform(model.space, model.space->realization_vars()));
  for (size_t i = 0; i < it->second.size(); ++i) {
    Action placed = eps > 0 ? mix(Rat(1) - eps, actions[i], d) : actions[i];
    int slot = menu.index_of(placed);
    if (slot < 0) throw Error("internal", "menu canonicalization lost an action");
    named.names[slot] = it->second[i];
  }
  return named;
}

Joint build_dataset(const ModelFile& model, const NamedMenu& named) {
  if (model.dataset.empty()) throw Error("schema", "model file has no dataset section");
  std::map<std::string, int> slot;
  for (int s = 0; s < named.menu.size(); ++s) slot[named.names[s]] = s;
  std::vector<int> vars{0};
  auto rv = model.space->realization_vars();
  vars.insert(vars.end(), rv.begin(), rv.end());
  std::map<Assignment, Rat> table;
  for (const auto& d : model.dataset) {
    auto it = slot.find(d.action);
    if (it == slot.end())
      throw Error("schema", "dataset row for action '" + d.action +
                                "' outside the menu");
    if (static_cast<int>(d.values.size()) != model.space->covariates() + 1)
      throw Error("schema", "dataset row arity mismatch");
    Assignment a(vars.size());
    a[0] = it->second;
    for (size_t t = 0; t < d.values.size(); ++t)
      a[t + 1] = match_support_value(*model.space, static_cast<int>(t) + 1, d.values[t],
                                     "dataset");
    table[a] += d.p;
  }
  Joint q = Joint::raw(model.space, vars, std::move(table), named.menu.size());
  if (std::abs(to_double(q.mass()) - 1.0) > 1e-12)
    throw Error("mass", "dataset mass " + std::to_string(to_double(q.mass())) + " != 1");
  return q;
}

reveal::RecordedOracle load_behavior(const std::string& path, const VarSpacePtr& space) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open behavior file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("parse", std::string("behavior file is not valid JSON: ") + e.what());
  }
  if (j.value("schema", "") != kBehaviorSchema)
    throw Error("schema", "unsupported or missing schema (want " +
                              std::string(kBehaviorSchema) + ")");
  reveal::RecordedOracle oracle(space);
  int idx = 0;
  for (const auto& obs : j.value("observations", json::array())) {
    std::string where = "observations[" + std::to_string(idx++) + "]";
    std::vector<Action> actions;
    for (const auto& a : obs.at("menu"))
      actions.push_back(parse_action(a, space, where));
    std::vector<Rat> probs;
    for (const auto& p : obs.at("choice")) probs.push_back(parse_prob(p, where));
    if (probs.size() != actions.size())
      throw Error("schema", where + ": choice arity mismatch");
    Menu menu(actions, false);
    probspace::ChoiceDist sigma;
    sigma.p.resize(actions.size());
    for (size_t i = 0; i < actions.size(); ++i) {
      int slot = menu.index_of(actions[i]);
      sigma.p[slot] = to_double(probs[i]);
    }
    oracle.record(menu, sigma);
  }
  return oracle;
}

}  // namespace subcausal::io
