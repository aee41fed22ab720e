#pragma once

// Scenario files: JSON documents with the sections "network", "class_a",
// "class_b", "simulation" and "sweep". Every section and key is optional and
// falls back to the base scenario (a missing warmup defaults to 20% of the
// horizon); unknown keys are rejected.

#include "nettax/simulator.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace nettax {

/// Malformed scenario text, unknown key or invalid value.
class ScenarioError : public InvalidParameter {
public:
  using InvalidParameter::InvalidParameter;
};

/// File could not be read or written.
class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Scenario {
  SimConfig sim;
  SweepSpec sweep;

  bool operator==(const Scenario& o) const;
};

/// Two-access-point base case: c = (4, 11) Mbit/s, audio class A
/// (0.064 Mbit/s, 4 min, 3/min, alpha 2) and video class B (0.184 Mbit/s,
/// 2.5 min, 4.5/min, alpha 1). Sweep loads 0.05..0.95 step 0.05,
/// lambda_A / lambda_B = 2/3, 30 replications.
Scenario default_scenario();

Scenario parse_scenario(const std::string& text);
std::string render_scenario(const Scenario& scenario);

Scenario load_scenario_file(const std::filesystem::path& path);
void save_scenario_file(const std::filesystem::path& path, const Scenario& scenario);

} // namespace nettax
