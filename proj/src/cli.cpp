#include "nettax/cli.hpp"

#include "nettax/analytics.hpp"
#include "nettax/csv.hpp"
#include "nettax/equilibrium.hpp"
#include "nettax/scenario.hpp"
#include "nettax/simulator.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

namespace nettax::cli {

namespace {

struct AnalyzeArgs {
  double c1 = 0.0;
  double c2 = 0.0;
  double demand = 0.0;
  std::vector<double> alphas;
  std::optional<double> d_b;
  std::string csv;
};

struct Fig2Args {
  double c1 = 4.0;
  double c2 = 11.0;
  double demand = 8.0;
  std::vector<double> alphas{2.0, 1.0};
  int grid = 101;
  std::string out = "-";
};

struct SimulateArgs {
  std::string scenario;
  std::string out = "trace.csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::string> policy;
  std::optional<std::string> handovers;
  std::optional<double> horizon;
};

struct SweepArgs {
  std::string scenario;
  std::string out = "sweep.csv";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replications;
  std::optional<double> ratio;
  std::optional<unsigned> threads;
};

struct InitArgs {
  std::string out = "scenario.json";
  bool force = false;
};

Sensitivities sensitivities_from(const std::vector<double>& alphas) {
  if (alphas.size() != 2)
    throw InvalidParameter("--alphas takes two values: alpha_A,alpha_B");
  return {alphas[0], alphas[1]};
}

// Opens `path` for writing, or returns nullptr for "-" (stdout).
std::unique_ptr<std::ofstream> open_output(const std::string& path) {
  if (path == "-")
    return nullptr;
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file)
    throw IoError("cannot write " + path);
  return file;
}

void finish_output(std::ofstream* file, const std::string& path) {
  if (file) {
    file->flush();
    if (!*file)
      throw IoError("failed writing " + path);
  }
}

std::string fmt(double v) { return format_number(v); }

int do_analyze(const AnalyzeArgs& a, std::ostream& out) {
  const NetworkPair net(a.c1, a.c2);
  const Sensitivities sens = sensitivities_from(a.alphas);
  net.require_admissible(a.demand);
  if (a.d_b && !(*a.d_b >= 0.0 && *a.d_b <= a.demand))
    throw InvalidParameter("--db must lie in [0, demand]");

  const double d = a.demand;
  const double threshold = net.tax_threshold();
  const FlowAssignment we = wardrop_no_tax(net, d);
  const FlowAssignment opt = optimal_assignment(net, d);
  const double c_we = total_cost(net, we);
  const double c_opt = optimal_cost(net, d);
  const double poa = d > 0.0 ? c_we / c_opt : 1.0;

  out << std::left;
  auto row = [&](const char* label) -> std::ostream& {
    return out << std::setw(20) << label;
  };
  row("network") << "c1=" << fmt(net.c1()) << " c2=" << fmt(net.c2()) << '\n';
  row("demand") << "D=" << fmt(d) << '\n';
  row("threshold") << fmt(threshold) << '\n';
  row("f_WE") << "f1=" << fmt(we.f1) << " f2=" << fmt(we.f2) << '\n';
  row("f_opt") << "f1=" << fmt(opt.f1) << " f2=" << fmt(opt.f2) << '\n';
  row("C_WE") << fmt(c_we) << '\n';
  row("C_opt") << fmt(c_opt) << '\n';
  row("PoA_no_tax") << fmt(poa) << '\n';

  std::optional<double> tau2;
  std::string branch_name;
  bool check_pass = true;
  if (d <= threshold) {
    tau2 = 0.0;
    branch_name = to_string(TaxBranch::None);
    row("tau2") << "0 (below threshold " << fmt(threshold) << ")\n";
  } else if (a.d_b) {
    const Demand dem(d - *a.d_b, *a.d_b);
    const PropositionCheck check = verify_optimal_tax(net, dem, sens, 1e-6);
    tau2 = check.taxes.tau2;
    branch_name = to_string(check.branch);
    check_pass = check.holds;
    row("tau2") << fmt(check.taxes.tau2) << " branch=" << branch_name << '\n';
    row("taxed equilibrium") << "f1=" << fmt(check.equilibrium.f1)
                             << " f2=" << fmt(check.equilibrium.f2)
                             << " residual=" << fmt(check.report.residual) << '\n';
    row("equilibrium=optimum") << "check " << (check.holds ? "PASS" : "FAIL") << '\n';
  } else {
    row("tau2") << "alpha_A branch " << fmt(tax_for_branch(net, d, sens, TaxBranch::AlphaA))
                << ", alpha_B branch " << fmt(tax_for_branch(net, d, sens, TaxBranch::AlphaB))
                << " (pass --db to select)\n";
  }

  if (!a.csv.empty()) {
    auto file = open_output(a.csv);
    std::ostream& os = file ? *file : out;
    os << "c1,c2,D,threshold,f1_we,f2_we,C_we,f1_opt,f2_opt,C_opt,poa_no_tax,tau2,branch\n"
       << fmt(net.c1()) << ',' << fmt(net.c2()) << ',' << fmt(d) << ',' << fmt(threshold)
       << ',' << fmt(we.f1) << ',' << fmt(we.f2) << ',' << fmt(c_we) << ','
       << fmt(opt.f1) << ',' << fmt(opt.f2) << ',' << fmt(c_opt) << ',' << fmt(poa) << ','
       << (tau2 ? fmt(*tau2) : std::string("nan")) << ','
       << (branch_name.empty() ? "unknown" : branch_name) << '\n';
    finish_output(file.get(), a.csv);
  }
  return check_pass ? kExitOk : kExitValidation;
}

int do_fig2(const Fig2Args& a, std::ostream& out) {
  const NetworkPair net(a.c1, a.c2);
  const Sensitivities sens = sensitivities_from(a.alphas);
  net.require_admissible(a.demand);
  if (a.grid < 2)
    throw InvalidParameter("--grid needs at least 2 points");

  auto file = open_output(a.out);
  std::ostream& os = file ? *file : out;
  os << "share_A,latency_A,latency_B,latency_no_tax\n";
  for (int k = 0; k < a.grid; ++k) {
    const double share = static_cast<double>(k) / (a.grid - 1);
    const ClassLatencies lat = class_latencies(net, a.demand, share, sens);
    os << fmt(share) << ',' << fmt(lat.latency_a) << ',' << fmt(lat.latency_b) << ','
       << fmt(lat.latency_no_tax) << '\n';
  }
  finish_output(file.get(), a.out);
  return kExitOk;
}

Scenario scenario_from(const std::string& path) {
  return path.empty() ? default_scenario() : load_scenario_file(path);
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  Scenario s = scenario_from(a.scenario);
  if (a.seed)
    s.sim.seed = *a.seed;
  if (a.policy)
    s.sim.policy = parse_tax_policy(*a.policy);
  if (a.handovers)
    s.sim.handovers = *a.handovers == "on";
  if (a.horizon) {
    s.sim.horizon = *a.horizon;
    s.sim.warmup = 0.2 * *a.horizon;
  }
  const SimTrace trace = run(s.sim);

  auto file = open_output(a.out);
  write_trace_csv(file ? *file : out, trace);
  finish_output(file.get(), a.out);

  const SimSummary& sum = trace.summary;
  out << "policy " << to_string(s.sim.policy) << ", handovers "
      << (s.sim.handovers ? "on" : "off") << ", seed " << s.sim.seed << '\n'
      << "offered load " << fmt(s.sim.offered_load()) << " Mbit/s, mean carried load "
      << fmt(sum.mean_load) << " Mbit/s\n"
      << "tax threshold " << fmt(sum.tax_threshold) << " Mbit/s\n"
      << "average PoA " << fmt(sum.mean_poa) << '\n'
      << "blocking rate " << fmt(sum.blocking_rate) << '\n';
  if (sum.relaxation_warnings > 0)
    out << "warning: handover relaxation hit its round cap " << sum.relaxation_warnings
        << " times\n";
  return kExitOk;
}

int do_sweep(const SweepArgs& a, std::ostream& out) {
  Scenario s = scenario_from(a.scenario);
  if (a.seed)
    s.sim.seed = *a.seed;
  if (a.replications)
    s.sweep.replications = *a.replications;
  if (a.ratio)
    s.sweep.ratio = *a.ratio;
  if (a.threads)
    s.sweep.threads = *a.threads;

  // The output location is checked before the (long) sweep starts.
  auto file = open_output(a.out);
  const std::vector<SweepPoint> points = sweep_load(s.sim, s.sweep);
  write_summary_csv(file ? *file : out, points);
  finish_output(file.get(), a.out);

  // Pool blocking over policies for each handover setting.
  for (bool ho : s.sweep.handover_settings) {
    std::map<double, std::pair<double, int>> pooled;
    for (const SweepPoint& p : points)
      if (p.handovers == ho) {
        pooled[p.load].first += p.blocking_rate;
        ++pooled[p.load].second;
      }
    std::vector<double> loads;
    std::vector<double> rates;
    for (const auto& [load, acc] : pooled) {
      loads.push_back(load);
      rates.push_back(acc.first / acc.second);
    }
    out << "handovers " << (ho ? "on" : "off") << ":";
    for (double level : {0.001, 0.01, 0.05}) {
      const std::optional<double> at = crossing_load(loads, rates, level);
      out << " blocking " << level << " at load "
          << (at ? fmt(*at) : std::string("not reached"));
      out << (level < 0.05 ? ";" : "\n");
    }
  }
  return kExitOk;
}

int do_init(const InitArgs& a, std::ostream& out) {
  const Scenario s = default_scenario();
  if (a.out == "-") {
    out << render_scenario(s);
    return kExitOk;
  }
  if (!a.force && std::filesystem::exists(a.out))
    throw IoError(a.out + " exists (use --force to overwrite)");
  save_scenario_file(a.out, s);
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria, optimal taxes and dynamic simulation for two-class "
               "network selection over two M/M/1 access networks",
               "nettax"};
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "closed-form equilibrium, optimum and tax");
  analyze->add_option("--c1", an.c1, "capacity of network 1 (Mbit/s)")->required();
  analyze->add_option("--c2", an.c2, "capacity of network 2 (Mbit/s)")->required();
  analyze->add_option("--demand", an.demand, "total demand D (Mbit/s)")->required();
  analyze->add_option("--alphas", an.alphas, "tax sensitivities alpha_A,alpha_B")
      ->delimiter(',')
      ->required();
  analyze->add_option("--db", an.d_b, "class-B demand; selects the tax branch");
  analyze->add_option("--csv", an.csv, "also write a one-row CSV here");

  Fig2Args f2;
  auto* fig2 = app.add_subcommand("fig2", "per-class latency versus class-A share");
  fig2->add_option("--c1", f2.c1, "capacity of network 1")->capture_default_str();
  fig2->add_option("--c2", f2.c2, "capacity of network 2")->capture_default_str();
  fig2->add_option("--demand", f2.demand, "total demand D")->capture_default_str();
  fig2->add_option("--alphas", f2.alphas, "alpha_A,alpha_B")->delimiter(',');
  fig2->add_option("--grid", f2.grid, "number of share_A points")->capture_default_str();
  fig2->add_option("--out", f2.out, "CSV path, - for stdout")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "one simulated trajectory");
  simulate->add_option("--scenario", sim.scenario, "scenario file (default: base scenario)");
  simulate->add_option("--out", sim.out, "trace CSV path, - for stdout")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "RNG seed");
  simulate->add_option("--policy", sim.policy, "none|approx|optimal");
  simulate->add_option("--handovers", sim.handovers, "on|off")
      ->check(CLI::IsMember({"on", "off"}));
  simulate->add_option("--horizon", sim.horizon, "simulated minutes (warmup 20%)");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "policy x handover x load replication matrix");
  sweep->add_option("--scenario", sw.scenario, "scenario file (default: base scenario)");
  sweep->add_option("--out", sw.out, "summary CSV path, - for stdout")->capture_default_str();
  sweep->add_option("--seed", sw.seed, "base RNG seed");
  sweep->add_option("--replications", sw.replications, "replications per cell");
  sweep->add_option("--ratio", sw.ratio, "lambda_A / lambda_B");
  sweep->add_option("--threads", sw.threads, "worker threads (0 = all cores)");

  InitArgs in;
  auto* init = app.add_subcommand("init", "write the base scenario file");
  init->add_option("--out", in.out, "scenario path, - for stdout")->capture_default_str();
  init->add_flag("--force", in.force, "overwrite an existing file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (analyze->parsed())
      return do_analyze(an, out);
    if (fig2->parsed())
      return do_fig2(f2, out);
    if (simulate->parsed())
      return do_simulate(sim, out);
    if (sweep->parsed())
      return do_sweep(sw, out);
    if (init->parsed())
      return do_init(in, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return kExitValidation;
}

} // namespace nettax::cli
