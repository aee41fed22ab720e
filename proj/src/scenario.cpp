#include "nettax/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace nettax {

namespace {

using Json = nlohmann::ordered_json;

void reject_unknown(const Json& obj, const std::string& section,
                    const std::set<std::string>& allowed) {
  if (!obj.is_object())
    throw ScenarioError("section '" + section + "' must be an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key))
      throw ScenarioError("unknown key '" + (section.empty() ? key : section + "." + key) + "'");
}

template <typename T>
void read(const Json& obj, const std::string& section, const char* key, T& out) {
  if (!obj.contains(key))
    return;
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    if (!obj.at(key).is_number_unsigned())
      throw ScenarioError("'" + section + "." + key + "' must be a non-negative integer");
  }
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ScenarioError("invalid value for '" + section + "." + key + "'");
  }
}

Json profile_to_json(const ClassProfile& p) {
  return Json{{"lambda", p.lambda},
              {"mean_duration", p.mean_duration},
              {"throughput", p.throughput},
              {"alpha", p.alpha}};
}

void profile_from_json(const Json& obj, const std::string& section, ClassProfile& p) {
  reject_unknown(obj, section, {"lambda", "mean_duration", "throughput", "alpha"});
  read(obj, section, "lambda", p.lambda);
  read(obj, section, "mean_duration", p.mean_duration);
  read(obj, section, "throughput", p.throughput);
  read(obj, section, "alpha", p.alpha);
}

} // namespace

bool Scenario::operator==(const Scenario& o) const {
  return sim == o.sim && sweep.loads == o.sweep.loads && sweep.ratio == o.sweep.ratio &&
         sweep.replications == o.sweep.replications &&
         sweep.policies == o.sweep.policies &&
         sweep.handover_settings == o.sweep.handover_settings &&
         sweep.threads == o.sweep.threads;
}

Scenario default_scenario() {
  Scenario s;
  for (int k = 1; k <= 19; ++k)
    s.sweep.loads.push_back(k / 20.0);
  s.sweep.ratio = 2.0 / 3.0;
  s.sweep.replications = 30;
  return s;
}

namespace {

Scenario parse_document(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(std::string("malformed scenario: ") + e.what());
  }
  reject_unknown(doc, "", {"network", "class_a", "class_b", "simulation", "sweep"});

  Scenario s = default_scenario();
  if (doc.contains("network")) {
    const Json& net = doc["network"];
    reject_unknown(net, "network", {"c1", "c2"});
    double c1 = s.sim.net.c1();
    double c2 = s.sim.net.c2();
    read(net, "network", "c1", c1);
    read(net, "network", "c2", c2);
    s.sim.net = NetworkPair(c1, c2);
  }
  if (doc.contains("class_a"))
    profile_from_json(doc["class_a"], "class_a", s.sim.class_a);
  if (doc.contains("class_b"))
    profile_from_json(doc["class_b"], "class_b", s.sim.class_b);
  if (doc.contains("simulation")) {
    const Json& sim = doc["simulation"];
    reject_unknown(sim, "simulation",
                   {"policy", "handovers", "horizon", "warmup", "seed",
                    "handover_hysteresis", "max_handover_rounds"});
    std::string policy = to_string(s.sim.policy);
    read(sim, "simulation", "policy", policy);
    s.sim.policy = parse_tax_policy(policy);
    read(sim, "simulation", "handovers", s.sim.handovers);
    read(sim, "simulation", "horizon", s.sim.horizon);
    s.sim.warmup = 0.2 * s.sim.horizon;
    read(sim, "simulation", "warmup", s.sim.warmup);
    read(sim, "simulation", "seed", s.sim.seed);
    read(sim, "simulation", "handover_hysteresis", s.sim.handover_hysteresis);
    read(sim, "simulation", "max_handover_rounds", s.sim.max_handover_rounds);
  }
  if (doc.contains("sweep")) {
    const Json& sw = doc["sweep"];
    reject_unknown(sw, "sweep",
                   {"loads", "ratio", "replications", "policies", "handovers", "threads"});
    read(sw, "sweep", "loads", s.sweep.loads);
    read(sw, "sweep", "ratio", s.sweep.ratio);
    read(sw, "sweep", "replications", s.sweep.replications);
    read(sw, "sweep", "threads", s.sweep.threads);
    if (sw.contains("policies")) {
      std::vector<std::string> names;
      read(sw, "sweep", "policies", names);
      s.sweep.policies.clear();
      for (const auto& n : names)
        s.sweep.policies.push_back(parse_tax_policy(n));
    }
    if (sw.contains("handovers")) {
      std::vector<bool> flags;
      read(sw, "sweep", "handovers", flags);
      s.sweep.handover_settings = flags;
    }
  }

  s.sim.validate();
  s.sweep.validate();
  return s;
}

} // namespace

Scenario parse_scenario(const std::string& text) {
  try {
    return parse_document(text);
  } catch (const ScenarioError&) {
    throw;
  } catch (const InvalidParameter& e) {
    throw ScenarioError(e.what());
  }
}

std::string render_scenario(const Scenario& s) {
  Json policies = Json::array();
  for (TaxPolicy p : s.sweep.policies)
    policies.push_back(to_string(p));
  Json handovers = Json::array();
  for (bool h : s.sweep.handover_settings)
    handovers.push_back(h);

  Json doc{
      {"network", {{"c1", s.sim.net.c1()}, {"c2", s.sim.net.c2()}}},
      {"class_a", profile_to_json(s.sim.class_a)},
      {"class_b", profile_to_json(s.sim.class_b)},
      {"simulation",
       {{"policy", to_string(s.sim.policy)},
        {"handovers", s.sim.handovers},
        {"horizon", s.sim.horizon},
        {"warmup", s.sim.warmup},
        {"seed", s.sim.seed},
        {"handover_hysteresis", s.sim.handover_hysteresis},
        {"max_handover_rounds", s.sim.max_handover_rounds}}},
      {"sweep",
       {{"loads", s.sweep.loads},
        {"ratio", s.sweep.ratio},
        {"replications", s.sweep.replications},
        {"policies", policies},
        {"handovers", handovers},
        {"threads", s.sweep.threads}}},
  };
  return doc.dump(2) + "\n";
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario_file(const std::filesystem::path& path, const Scenario& scenario) {
  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write scenario file " + path.string());
  out << render_scenario(scenario);
  if (!out)
    throw IoError("failed writing scenario file " + path.string());
}

} // namespace nettax
