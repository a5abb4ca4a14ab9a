#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dirkit/scenario.hpp"

namespace {

using namespace dirkit;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot open for writing");
  out << content;
}

// "0:1=0.25,0:12=0.5" -> {P[0,{1}] -> 0.25, P[0,{1,2}] -> 0.5}
std::vector<std::pair<PacketId, double>> parse_rates(const std::string& spec) {
  std::vector<std::pair<PacketId, double>> rates;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string::npos) end = spec.size();
    const std::string item = spec.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;

    std::size_t colon = item.find(':');
    std::size_t eq = item.find('=');
    if (colon == std::string::npos || eq == std::string::npos || eq < colon)
      throw ValidationError("--rates: expected SOURCE:SINKS=RATE, got '" + item + "'");
    PacketId id;
    try {
      id.source = std::stoi(item.substr(0, colon));
    } catch (...) {
      throw ValidationError("--rates: bad source index in '" + item + "'");
    }
    for (std::size_t t = colon + 1; t < eq; ++t) {
      char c = item[t];
      if (c < '1' || c > '9')
        throw ValidationError("--rates: bad sink digit in '" + item + "'");
      id.sinks |= SinkMask{1} << (c - '1');
    }
    if (id.sinks == 0) throw ValidationError("--rates: empty sink set in '" + item + "'");
    double rate = 0.0;
    try {
      rate = std::stod(item.substr(eq + 1));
    } catch (...) {
      throw ValidationError("--rates: bad rate value in '" + item + "'");
    }
    rates.push_back({id, rate});
  }
  if (rates.empty()) throw ValidationError("--rates: no packets given");
  return rates;
}

std::vector<double> parse_doubles(const std::string& spec) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t end = spec.find(',', pos);
    if (end == std::string::npos) end = spec.size();
    const std::string item = spec.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (...) {
      throw ValidationError("--offsets: bad value '" + item + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "dirkit: minimum-cost transport of correlated sources over multi-sink networks\n"
      "(broadcast and dispersive-information-routing rate regions, exact Steiner\n"
      "costs, LP optimization, and power-binning simulation)"};
  app.require_subcommand(1);

  std::string scenario_path, mode_name = "dir-power", out_path, rates_spec, offsets_spec;
  bool no_helpers = false;
  double p1 = 0.1, p2 = 0.2, delta_value = 0.0;
  std::optional<double> delta;
  int blocklength = 12, grid = 200;
  long trials = 10000;
  std::uint64_t seed = 0;

  auto add_delta = [&](CLI::App* cmd) {
    cmd->add_option_function<double>(
        "--delta", [&](const double& v) { delta = v; },
        "side-rate excess over the conditional entropies (helper mode)");
  };

  CLI::App* cost = app.add_subcommand("cost", "minimum total communication cost");
  cost->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  cost->add_option("--mode", mode_name, "broadcast|dir-power|dir-thm1|helper");
  cost->add_flag("--no-helpers", no_helpers, "restrict packets to requested sinks (dir-thm1)");
  add_delta(cost);

  CLI::App* region = app.add_subcommand("region", "emit the rate-region constraints as CSV");
  region->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  region->add_option("--mode", mode_name, "broadcast|dir-power|dir-thm1|helper");
  region->add_option("--out", out_path, "output CSV path")->required();
  region->add_flag("--no-helpers", no_helpers, "restrict packets to requested sinks (dir-thm1)");
  add_delta(region);

  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo power-binning run");
  simulate->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--n", blocklength, "blocklength (at most 20)")->required();
  simulate->add_option("--rates", rates_spec, "packet rates, e.g. 0:1=0.3,0:12=0.25");
  simulate->add_option("--offsets", offsets_spec,
                       "sweep sum-rate offsets around H(X0|side) instead of fixed rates");
  simulate->add_option("--trials", trials, "Monte Carlo trials");
  simulate->add_option("--seed", seed, "RNG seed; every random choice derives from it");
  simulate->add_option("--out", out_path, "output CSV path");

  CLI::App* sweep = app.add_subcommand("helper-sweep",
                                       "grid-search the helper example's auxiliary channel");
  sweep->add_option("--p1", p1, "BSC crossover to sink 1's source")->required();
  sweep->add_option("--p2", p2, "BSC crossover to sink 2's source")->required();
  sweep->add_option("--delta", delta_value, "side-rate excess")->required();
  sweep->add_option("--grid", grid, "grid points per axis");
  sweep->add_option("--out", out_path, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cost->parsed()) {
      Scenario s = load_scenario(scenario_path);
      CostReport report = cmd_cost(s, parse_cost_mode(mode_name), no_helpers, delta);
      std::cout << report.render_text();
    } else if (region->parsed()) {
      Scenario s = load_scenario(scenario_path);
      RateRegion r = build_region(s, parse_cost_mode(mode_name), no_helpers, delta);
      write_file(out_path, region_to_csv(r));
      std::cout << "wrote " << r.constraints.size() << " constraints over " << r.vars.size()
                << " variables to " << out_path << "\n";
    } else if (simulate->parsed()) {
      Scenario s = load_scenario(scenario_path);
      if (blocklength < 1 || blocklength > kMaxBlocklength)
        throw ValidationError("--n: blocklength must be in [1," +
                              std::to_string(kMaxBlocklength) + "]");
      BinSimConfig cfg(binsim_model_from_scenario(s));
      cfg.blocklength = blocklength;
      cfg.trials = trials;
      cfg.seed = seed;
      if (!offsets_spec.empty()) {
        std::vector<SweepRow> rows = threshold_sweep(cfg, parse_doubles(offsets_spec));
        std::string csv = sweep_to_csv(rows);
        if (!out_path.empty()) write_file(out_path, csv);
        std::cout << csv;
      } else {
        if (rates_spec.empty())
          throw ValidationError("simulate: pass --rates or --offsets");
        cfg.rates = parse_rates(rates_spec);
        BinSimReport report = run_power_binning(cfg);
        std::cout << binsim_report_text(report);
        if (!out_path.empty()) write_file(out_path, binsim_report_to_csv(report));
      }
    } else if (sweep->parsed()) {
      HelperSweepResult result = helper_sweep(p1, p2, delta_value, grid);
      std::string csv = helper_sweep_to_csv(result);
      if (!out_path.empty()) write_file(out_path, csv);
      std::cout << "fine sink:   " << result.fine_sink << "\n"
                << "aux:         p02=" << result.aux.p02 << " p012=" << result.aux.p012 << "\n"
                << "R[0,{1,2}]:  " << result.rate_common << "\n"
                << "R[0,{" << result.fine_sink << "}]:    " << result.rate_fine << "\n"
                << "side rates:  " << result.rate_sink1 << ", " << result.rate_sink2 << "\n"
                << "cost:        " << result.cost << "\n";
    }
  } catch (const InfeasibleError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
