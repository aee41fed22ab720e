#include "nettax/simulator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <sstream>

namespace nettax {

namespace {

constexpr std::size_t kMaxStoredWarnings = 16;

int idx(NetClass cls) { return static_cast<int>(cls); }

double tax_on(const TaxVector& taxes, int network) {
  return network == 1 ? taxes.tau1 : taxes.tau2;
}

// Admission leaves a margin of kDefaultTol * c so that a load equal to the
// capacity in exact arithmetic is never admitted through rounding.
bool fits(const SystemState& state, int network, NetClass cls, const NetworkPair& net) {
  const double c = net.capacity(network);
  return state.carried_with_one_more(network, cls) < c - kDefaultTol * c;
}

EventKind arrival_event(NetClass cls) {
  return cls == NetClass::A ? EventKind::ArrivalA : EventKind::ArrivalB;
}
EventKind departure_event(NetClass cls) {
  return cls == NetClass::A ? EventKind::DepartureA : EventKind::DepartureB;
}
EventKind blocked_event(NetClass cls) {
  return cls == NetClass::A ? EventKind::BlockedA : EventKind::BlockedB;
}

struct Departure {
  double time;
  std::uint64_t id;
  bool operator>(const Departure& o) const {
    return time != o.time ? time > o.time : id > o.id;
  }
};

// Exponential draws from a dedicated engine; rate 0 never fires.
class ExpStream {
public:
  ExpStream(std::uint64_t seed, double rate) : engine_(seed), rate_(rate) {}
  double next() {
    if (!(rate_ > 0.0))
      return kInfinity;
    return std::exponential_distribution<double>(rate_)(engine_);
  }

private:
  std::mt19937_64 engine_;
  double rate_;
};

} // namespace

std::string to_string(TaxPolicy policy) {
  switch (policy) {
  case TaxPolicy::None:
    return "none";
  case TaxPolicy::Approx:
    return "approx";
  case TaxPolicy::Optimal:
    return "optimal";
  }
  return "unknown";
}

TaxPolicy parse_tax_policy(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "none")
    return TaxPolicy::None;
  if (lower == "approx")
    return TaxPolicy::Approx;
  if (lower == "optimal")
    return TaxPolicy::Optimal;
  throw InvalidParameter("unknown tax policy '" + text + "' (none|approx|optimal)");
}

void ClassProfile::validate(const char* name) const {
  auto fail = [&](const char* what) {
    throw InvalidParameter(std::string(name) + ": " + what);
  };
  if (!(std::isfinite(lambda) && lambda >= 0.0))
    fail("lambda must be finite and non-negative");
  if (!(std::isfinite(mean_duration) && mean_duration > 0.0))
    fail("mean duration must be positive");
  if (!(std::isfinite(throughput) && throughput > 0.0))
    fail("throughput must be positive");
  if (!(std::isfinite(alpha) && alpha > 0.0))
    fail("alpha must be positive");
}

void SimConfig::validate() const {
  class_a.validate("class_a");
  class_b.validate("class_b");
  if (!(class_a.alpha > class_b.alpha))
    throw InvalidParameter("requires alpha_A > alpha_B");
  if (!(std::isfinite(horizon) && std::isfinite(warmup)) || !(warmup >= 0.0) ||
      !(horizon > warmup))
    throw InvalidParameter("requires horizon > warmup >= 0");
  if (!(handover_hysteresis >= 0.0))
    throw InvalidParameter("handover hysteresis must be non-negative");
  for (const ClassProfile* p : {&class_a, &class_b})
    if (p->throughput >= net.c2())
      throw InvalidParameter("per-session throughput must fit in network 2");
}

SystemState::SystemState(double throughput_a, double throughput_b)
    : eps_{throughput_a, throughput_b} {}

int SystemState::count(int network, NetClass cls) const {
  if (network != 1 && network != 2)
    throw InvalidParameter("network id must be 1 or 2");
  return n_[network - 1][idx(cls)];
}

double SystemState::carried(int network, NetClass cls) const {
  return count(network, cls) * eps_[idx(cls)];
}

double SystemState::carried(int network) const {
  return carried(network, NetClass::A) + carried(network, NetClass::B);
}

double SystemState::carried_with_one_more(int network, NetClass cls) const {
  const int na = count(network, NetClass::A) + (cls == NetClass::A ? 1 : 0);
  const int nb = count(network, NetClass::B) + (cls == NetClass::B ? 1 : 0);
  return na * eps_[0] + nb * eps_[1];
}

void SystemState::admit(std::uint64_t id, NetClass cls, int network) {
  if (network != 1 && network != 2)
    throw InvalidParameter("network id must be 1 or 2");
  if (!sessions_.empty() && sessions_.back().id >= id)
    throw InvalidParameter("session ids must increase");
  sessions_.push_back({id, cls, network});
  ++n_[network - 1][idx(cls)];
}

Session SystemState::remove(std::uint64_t id) {
  auto it = std::lower_bound(sessions_.begin(), sessions_.end(), id,
                             [](const Session& s, std::uint64_t v) { return s.id < v; });
  if (it == sessions_.end() || it->id != id)
    throw InvalidParameter("unknown session id");
  const Session s = *it;
  sessions_.erase(it);
  --n_[s.network - 1][idx(s.cls)];
  return s;
}

void SystemState::switch_network(std::size_t index) {
  Session& s = sessions_.at(index);
  --n_[s.network - 1][idx(s.cls)];
  s.network = 3 - s.network;
  ++n_[s.network - 1][idx(s.cls)];
}

TaxVector current_tax(TaxPolicy policy, const SystemState& state,
                      const SimConfig& cfg) {
  if (policy == TaxPolicy::None)
    return {};
  const double load = state.total_load();
  const double class_b_load =
      policy == TaxPolicy::Optimal
          ? state.carried(1, NetClass::B) + state.carried(2, NetClass::B)
          : cfg.class_b.offered_load();
  const TaxBranch branch = tax_branch(cfg.net, load, class_b_load);
  return {0.0, tax_for_branch(cfg.net, load, cfg.sensitivities(), branch)};
}

std::optional<int> choose_network(const SystemState& state, NetClass cls,
                                  const TaxVector& taxes, const SimConfig& cfg) {
  const ClassProfile& prof = cfg.profile(cls);
  std::optional<int> best;
  double best_cost = kInfinity;
  for (int p : {2, 1}) {
    if (!fits(state, p, cls, cfg.net))
      continue;
    const double cost = delay(cfg.net.capacity(p), state.carried_with_one_more(p, cls)) +
                        prof.alpha * tax_on(taxes, p);
    // strict comparison keeps network 2 on ties
    if (!best || cost < best_cost) {
      best = p;
      best_cost = cost;
    }
  }
  return best;
}

namespace {

bool switch_pays(const SystemState& state, NetClass cls, int from,
                 const TaxVector& taxes, const SimConfig& cfg) {
  const ClassProfile& prof = cfg.profile(cls);
  const int to = 3 - from;
  if (!fits(state, to, cls, cfg.net))
    return false;
  const double stay = delay(cfg.net.capacity(from), state.carried(from)) +
                      prof.alpha * tax_on(taxes, from);
  const double move = delay(cfg.net.capacity(to), state.carried_with_one_more(to, cls)) +
                      prof.alpha * tax_on(taxes, to);
  return move < stay - cfg.handover_hysteresis;
}

} // namespace

bool has_profitable_switch(const SystemState& state, const TaxVector& taxes,
                           const SimConfig& cfg) {
  // Sessions sharing (class, network) face identical costs.
  for (int p = 1; p <= 2; ++p)
    for (NetClass cls : {NetClass::A, NetClass::B})
      if (state.count(p, cls) > 0 && switch_pays(state, cls, p, taxes, cfg))
        return true;
  return false;
}

RelaxationResult handover_relaxation(SystemState& state, const TaxVector& taxes,
                                     const SimConfig& cfg) {
  RelaxationResult result;
  const std::size_t cap =
      cfg.max_handover_rounds > 0
          ? cfg.max_handover_rounds
          : std::max<std::size_t>(100, 100 * state.session_count());
  while (has_profitable_switch(state, taxes, cfg)) {
    if (result.rounds >= cap) {
      result.converged = false;
      return result;
    }
    ++result.rounds;
    const auto& sessions = state.sessions();
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      const Session& s = sessions[i];
      if (switch_pays(state, s.cls, s.network, taxes, cfg)) {
        state.switch_network(i);
        ++result.switches;
      }
    }
  }
  return result;
}

std::string to_string(EventKind kind) {
  switch (kind) {
  case EventKind::ArrivalA:
    return "arrA";
  case EventKind::ArrivalB:
    return "arrB";
  case EventKind::DepartureA:
    return "depA";
  case EventKind::DepartureB:
    return "depB";
  case EventKind::BlockedA:
    return "blkA";
  case EventKind::BlockedB:
    return "blkB";
  }
  return "unknown";
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  auto splitmix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(seed) ^ (index + 0x632be59bd9b4e019ULL));
}

SimTrace run(const SimConfig& cfg) {
  cfg.validate();
  SimTrace trace;
  SimSummary& sum = trace.summary;
  sum.tax_threshold = cfg.net.tax_threshold();

  // Independent streams per purpose keep arrivals and durations aligned
  // across policies that share a seed.
  ExpStream inter_a(derive_seed(cfg.seed, 0), cfg.class_a.lambda);
  ExpStream inter_b(derive_seed(cfg.seed, 1), cfg.class_b.lambda);
  ExpStream hold_a(derive_seed(cfg.seed, 2), 1.0 / cfg.class_a.mean_duration);
  ExpStream hold_b(derive_seed(cfg.seed, 3), 1.0 / cfg.class_b.mean_duration);

  SystemState state(cfg.class_a.throughput, cfg.class_b.throughput);
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> departures;
  double next_arrival[2] = {inter_a.next(), inter_b.next()};
  std::uint64_t next_id = 0;

  TaxVector taxes = current_tax(cfg.policy, state, cfg);
  double poa = 1.0;
  double last_time = 0.0;
  const double window = cfg.horizon - cfg.warmup;
  double poa_area = 0.0;
  double load_area = 0.0;
  double taxed_area = 0.0;
  double session_area[2] = {0.0, 0.0};

  auto integrate_to = [&](double t) {
    const double from = std::max(last_time, cfg.warmup);
    const double to = std::min(t, cfg.horizon);
    if (to > from) {
      const double dt = to - from;
      poa_area += poa * dt;
      load_area += state.total_load() * dt;
      taxed_area += (taxes.tau2 > 0.0 ? dt : 0.0);
      session_area[0] += state.class_count(NetClass::A) * dt;
      session_area[1] += state.class_count(NetClass::B) * dt;
    }
    last_time = t;
  };

  auto warn = [&](const std::string& msg) {
    ++sum.relaxation_warnings;
    if (trace.warnings.size() < kMaxStoredWarnings)
      trace.warnings.push_back(msg);
  };

  for (;;) {
    const double t_dep = departures.empty() ? kInfinity : departures.top().time;
    const double t = std::min({next_arrival[0], next_arrival[1], t_dep});
    if (!(t <= cfg.horizon))
      break;
    integrate_to(t);
    state.set_clock(t);
    ++sum.events;

    EventKind event;
    if (t == t_dep && t_dep <= std::min(next_arrival[0], next_arrival[1])) {
      const Departure dep = departures.top();
      departures.pop();
      const Session gone = state.remove(dep.id);
      event = departure_event(gone.cls);
    } else {
      const NetClass cls = next_arrival[0] <= next_arrival[1] ? NetClass::A : NetClass::B;
      const int c = idx(cls);
      const double hold = (cls == NetClass::A ? hold_a : hold_b).next();
      next_arrival[c] = t + (cls == NetClass::A ? inter_a : inter_b).next();
      const bool counted = t >= cfg.warmup;
      if (counted)
        ++sum.arrivals[c];
      // taxes still reflect the pre-arrival state here
      const std::optional<int> choice = choose_network(state, cls, taxes, cfg);
      if (choice) {
        const std::uint64_t id = next_id++;
        state.admit(id, cls, *choice);
        departures.push({t + hold, id});
        event = arrival_event(cls);
      } else {
        if (counted)
          ++sum.blocked[c];
        event = blocked_event(cls);
      }
    }

    taxes = current_tax(cfg.policy, state, cfg);
    if (cfg.handovers) {
      const RelaxationResult relax = handover_relaxation(state, taxes, cfg);
      sum.handovers += relax.switches;
      if (!relax.converged) {
        std::ostringstream os;
        os << "handover relaxation hit its round cap at t=" << t;
        warn(os.str());
      }
    }

    const double load = state.total_load();
    const double cost = total_cost(cfg.net, state.aggregates());
    const double c_opt = load > 0.0 ? optimal_cost(cfg.net, load) : 0.0;
    poa = load > 0.0 ? cost / c_opt : 1.0;

    if (cfg.record_samples) {
      TraceSample s;
      s.time = t;
      s.load = load;
      s.tau2 = taxes.tau2;
      s.cost = cost;
      s.optimal_cost = c_opt;
      s.poa = poa;
      s.counts = {state.count(1, NetClass::A), state.count(1, NetClass::B),
                  state.count(2, NetClass::A), state.count(2, NetClass::B)};
      s.event = event;
      trace.samples.push_back(s);
    }
  }
  integrate_to(cfg.horizon);

  sum.mean_poa = poa_area / window;
  sum.mean_load = load_area / window;
  sum.taxed_fraction = taxed_area / window;
  sum.mean_sessions = {session_area[0] / window, session_area[1] / window};
  const std::uint64_t arrivals = sum.arrivals[0] + sum.arrivals[1];
  const std::uint64_t blocked = sum.blocked[0] + sum.blocked[1];
  sum.blocking_rate = arrivals > 0 ? static_cast<double>(blocked) / arrivals : 0.0;
  return trace;
}

} // namespace nettax
