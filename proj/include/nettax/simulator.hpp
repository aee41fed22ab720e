#pragma once

// Continuous-time discrete-event simulation of atomic users of two classes
// selecting between the two networks under a tax policy.
//
// Time is in minutes. Each class arrives as a Poisson process, holds its
// connection for an exponential duration and carries a fixed throughput.
// At every event the state changes first (admission, blocking or departure),
// then the tax policy is re-evaluated on the new state and, when handovers
// are enabled, sessions best-respond to that tax until no switch improves
// their cost by more than the hysteresis.

#include "nettax/analytics.hpp"
#include "nettax/equilibrium.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nettax {

enum class TaxPolicy { None, Approx, Optimal };

std::string to_string(TaxPolicy policy);
/// Accepts "none", "approx", "optimal" (case-insensitive).
TaxPolicy parse_tax_policy(const std::string& text);

struct ClassProfile {
  double lambda = 0.0;        // arrivals per minute
  double mean_duration = 1.0; // 1/mu, minutes
  double throughput = 0.1;    // epsilon, Mbit/s per session
  double alpha = 1.0;         // tax sensitivity

  /// Mean carried load lambda * epsilon / mu.
  double offered_load() const noexcept { return lambda * mean_duration * throughput; }
  void validate(const char* name) const;

  bool operator==(const ClassProfile&) const = default;
};

struct SimConfig {
  NetworkPair net{4.0, 11.0};
  ClassProfile class_a{3.0, 4.0, 0.064, 2.0};
  ClassProfile class_b{4.5, 2.5, 0.184, 1.0};
  bool handovers = true;
  TaxPolicy policy = TaxPolicy::None;
  double horizon = 1000.0;
  double warmup = 200.0;
  std::uint64_t seed = 1;
  double handover_hysteresis = 1e-6;
  // 0 selects 100 x the current session count (at least 100)
  std::size_t max_handover_rounds = 0;
  // when false only the summary is produced
  bool record_samples = true;

  const ClassProfile& profile(NetClass cls) const {
    return cls == NetClass::A ? class_a : class_b;
  }
  Sensitivities sensitivities() const { return {class_a.alpha, class_b.alpha}; }
  /// Expected aggregate carried load without blocking.
  double offered_load() const noexcept {
    return class_a.offered_load() + class_b.offered_load();
  }
  void validate() const;

  bool operator==(const SimConfig&) const = default;
};

struct Session {
  std::uint64_t id = 0;
  NetClass cls = NetClass::A;
  int network = 2;
};

/// Active sessions ordered by id, with per-(network, class) counts. Carried
/// loads are always recomputed from the counts so they equal epsilon * n.
class SystemState {
public:
  SystemState(double throughput_a, double throughput_b);

  double clock() const noexcept { return clock_; }
  void set_clock(double t) noexcept { clock_ = t; }

  int count(int network, NetClass cls) const;
  int class_count(NetClass cls) const { return count(1, cls) + count(2, cls); }
  std::size_t session_count() const noexcept { return sessions_.size(); }
  double throughput(NetClass cls) const { return eps_[static_cast<int>(cls)]; }

  double carried(int network, NetClass cls) const;
  double carried(int network) const;
  double total_load() const { return carried(1) + carried(2); }
  /// Load `network` would carry with one more session of `cls`, evaluated
  /// exactly as carried() would evaluate it after the admission.
  double carried_with_one_more(int network, NetClass cls) const;
  FlowAssignment aggregates() const { return {carried(1), carried(2)}; }

  const std::vector<Session>& sessions() const noexcept { return sessions_; }

  /// Ids must be strictly increasing across admissions.
  void admit(std::uint64_t id, NetClass cls, int network);
  /// Removes the session and returns it; throws if unknown.
  Session remove(std::uint64_t id);
  /// Moves sessions()[index] to the other network.
  void switch_network(std::size_t index);

private:
  double eps_[2];
  std::array<std::array<int, 2>, 2> n_{};
  std::vector<Session> sessions_;
  double clock_ = 0.0;
};

/// Network-2 tax in force for `state` under the configured policy.
TaxVector current_tax(TaxPolicy policy, const SystemState& state,
                      const SimConfig& cfg);

/// Cheapest network for an arriving user of class `cls`, counting its own
/// flow at the destination; nullopt when neither network has room. Ties go
/// to network 2.
std::optional<int> choose_network(const SystemState& state, NetClass cls,
                                  const TaxVector& taxes, const SimConfig& cfg);

struct RelaxationResult {
  std::size_t switches = 0;
  std::size_t rounds = 0;
  bool converged = true;
};

/// True if some session could lower its cost by more than the hysteresis by
/// switching to the other network (which must admit it).
bool has_profitable_switch(const SystemState& state, const TaxVector& taxes,
                           const SimConfig& cfg);

/// Sequential best-response sweeps in ascending session id.
RelaxationResult handover_relaxation(SystemState& state, const TaxVector& taxes,
                                     const SimConfig& cfg);

enum class EventKind { ArrivalA, ArrivalB, DepartureA, DepartureB, BlockedA, BlockedB };

std::string to_string(EventKind kind);

struct TraceSample {
  double time = 0.0;
  double load = 0.0;
  double tau2 = 0.0;
  double cost = 0.0;
  double optimal_cost = 0.0;
  double poa = 1.0;
  std::array<int, 4> counts{};  // n1A, n1B, n2A, n2B
  EventKind event = EventKind::ArrivalA;
};

struct SimSummary {
  double mean_poa = 1.0;       // time average over [warmup, horizon]
  double blocking_rate = 0.0;  // pooled over both classes
  std::array<std::uint64_t, 2> arrivals{};  // after warmup, per class
  std::array<std::uint64_t, 2> blocked{};
  std::array<double, 2> mean_sessions{};    // time-averaged session counts
  double mean_load = 0.0;
  double taxed_fraction = 0.0;  // share of time with tau2 > 0
  std::uint64_t events = 0;
  std::uint64_t handovers = 0;
  std::uint64_t relaxation_warnings = 0;
  double tax_threshold = 0.0;
};

struct SimTrace {
  std::vector<TraceSample> samples;
  SimSummary summary;
  std::vector<std::string> warnings;  // first few non-fatal warnings
};

/// Seed of stream `index` derived from `seed` (splitmix64 of both).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Runs one trajectory. Identical configurations yield identical traces.
SimTrace run(const SimConfig& cfg);

struct SweepSpec {
  std::vector<double> loads;  // target offered load / (c1 + c2), in (0, 1)
  double ratio = 2.0 / 3.0;   // lambda_A / lambda_B
  std::size_t replications = 30;
  std::vector<TaxPolicy> policies{TaxPolicy::None, TaxPolicy::Approx, TaxPolicy::Optimal};
  std::vector<bool> handover_settings{true, false};
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct SweepPoint {
  double load = 0.0;
  TaxPolicy policy = TaxPolicy::None;
  bool handovers = true;
  double mean_poa = 0.0;
  double se_poa = 0.0;
  double blocking_rate = 0.0;  // mean of per-replication rates
  double se_blocking = 0.0;
  std::size_t replications = 0;
  std::vector<double> poa;       // per replication, index = replication
  std::vector<double> blocking;
};

/// Arrival rates scaled so the offered load is `load` * (c1 + c2) with
/// lambda_A / lambda_B = ratio.
SimConfig scaled_to_load(const SimConfig& base, double load, double ratio);

/// Runs every (load, policy, handover) cell with `replications` seeds.
/// Replication r uses derive_seed(base.seed, r) in every cell so that
/// policies are compared on common random numbers.
std::vector<SweepPoint> sweep_load(const SimConfig& base, const SweepSpec& spec);

/// Load at which `rates` (ordered by load) first reaches `level`, linearly
/// interpolated; nullopt if it never does.
std::optional<double> crossing_load(const std::vector<double>& loads,
                                    const std::vector<double>& rates, double level);

} // namespace nettax
