#include "nettax/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace nettax {

namespace {

struct Cell {
  double load;
  TaxPolicy policy;
  bool handovers;
};

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2)
    return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v)
    ss += (x - m) * (x - m);
  return std::sqrt(ss / (v.size() - 1) / v.size());
}

} // namespace

void SweepSpec::validate() const {
  if (loads.empty())
    throw InvalidParameter("sweep needs at least one load");
  for (double l : loads)
    if (!(l > 0.0 && l < 1.0))
      throw InvalidParameter("sweep loads must lie in (0, 1)");
  if (!(std::isfinite(ratio) && ratio > 0.0))
    throw InvalidParameter("arrival-rate ratio must be positive");
  if (replications < 1)
    throw InvalidParameter("sweep needs at least one replication");
  if (policies.empty() || handover_settings.empty())
    throw InvalidParameter("sweep needs at least one policy and handover setting");
}

SimConfig scaled_to_load(const SimConfig& base, double load, double ratio) {
  if (!(std::isfinite(load) && load >= 0.0))
    throw InvalidParameter("target load must be non-negative");
  if (!(std::isfinite(ratio) && ratio > 0.0))
    throw InvalidParameter("arrival-rate ratio must be positive");
  // offered = lambda_B * (ratio * eps_A / mu_A + eps_B / mu_B)
  const double per_lambda_b =
      ratio * base.class_a.mean_duration * base.class_a.throughput +
      base.class_b.mean_duration * base.class_b.throughput;
  SimConfig cfg = base;
  cfg.class_b.lambda = load * base.net.total_capacity() / per_lambda_b;
  cfg.class_a.lambda = ratio * cfg.class_b.lambda;
  return cfg;
}

std::vector<SweepPoint> sweep_load(const SimConfig& base, const SweepSpec& spec) {
  base.validate();
  spec.validate();

  std::vector<Cell> cells;
  for (double load : spec.loads)
    for (bool ho : spec.handover_settings)
      for (TaxPolicy policy : spec.policies)
        cells.push_back({load, policy, ho});

  const std::size_t reps = spec.replications;
  std::vector<SweepPoint> out(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out[c].load = cells[c].load;
    out[c].policy = cells[c].policy;
    out[c].handovers = cells[c].handovers;
    out[c].replications = reps;
    out[c].poa.assign(reps, 0.0);
    out[c].blocking.assign(reps, 0.0);
  }

  // Each job writes only its own slot, so the result does not depend on
  // scheduling.
  const std::size_t jobs = cells.size() * reps;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t c = j / reps;
      const std::size_t r = j % reps;
      SimConfig cfg = scaled_to_load(base, cells[c].load, spec.ratio);
      cfg.policy = cells[c].policy;
      cfg.handovers = cells[c].handovers;
      cfg.seed = derive_seed(base.seed, r);
      cfg.record_samples = false;
      const SimSummary s = run(cfg).summary;
      out[c].poa[r] = s.mean_poa;
      out[c].blocking[r] = s.blocking_rate;
    }
  };

  unsigned threads = spec.threads > 0 ? spec.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::min<std::size_t>(jobs, 256)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i)
      pool.emplace_back(worker);
  }

  for (SweepPoint& p : out) {
    p.mean_poa = mean_of(p.poa);
    p.se_poa = standard_error(p.poa);
    p.blocking_rate = mean_of(p.blocking);
    p.se_blocking = standard_error(p.blocking);
  }
  return out;
}

std::optional<double> crossing_load(const std::vector<double>& loads,
                                    const std::vector<double>& rates, double level) {
  if (loads.size() != rates.size())
    throw InvalidParameter("loads and rates differ in length");
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (rates[i] < level)
      continue;
    if (i == 0 || rates[i] == rates[i - 1])
      return loads[i];
    const double w = (level - rates[i - 1]) / (rates[i] - rates[i - 1]);
    return loads[i - 1] + w * (loads[i] - loads[i - 1]);
  }
  return std::nullopt;
}

} // namespace nettax
