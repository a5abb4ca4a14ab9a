#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dirkit/binsim.hpp"
#include "dirkit/lp.hpp"
#include "dirkit/network.hpp"
#include "dirkit/region.hpp"

namespace dirkit {

/// Resource caps enforced at scenario load; region generation and
/// exhaustive decoding are exponential in these.
inline constexpr int kMaxSources = 4;
inline constexpr int kMaxSinks = 3;
inline constexpr int kMaxAlphabet = 4;
inline constexpr int kMaxBlocklength = 20;
inline constexpr std::size_t kMaxTableSize = std::size_t{1} << 20;

/// A fully validated problem instance: sources (+ optional auxiliaries)
/// with their joint pmf, the network, and the demand map.
struct Scenario {
  std::string name;
  JointPmf pmf;            // sources first, then any auxiliaries
  int num_sources = 0;
  int num_aux = 0;
  Network network;
  DemandMap demands;
  std::optional<double> helper_delta;  // mode hint for helper mode

  VarSubset source_vars() const;
  bool has_auxiliaries() const { return num_aux > 0; }
};

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text, const std::string& origin = "<string>");
std::string scenario_to_json_text(const Scenario& s);

enum class CostMode { Broadcast, DirPower, DirTheorem1, Helper };

std::string cost_mode_name(CostMode m);
CostMode parse_cost_mode(const std::string& name);

struct CostReport {
  CostMode mode = CostMode::Broadcast;
  double optimal_cost = 0.0;
  std::vector<std::pair<RateVar, double>> rates;           // optimal assignment
  std::vector<std::pair<RateVar, double>> objective;       // effective cost per variable
  std::vector<std::pair<std::string, double>> constants;   // symbolic rhs -> value
  RateRegion region;

  std::string render_text() const;
};

/// Builds the requested rate region for the scenario. `delta` overrides the
/// scenario's helper hint (helper mode only).
RateRegion build_region(const Scenario& s, CostMode mode, bool no_helpers = false,
                        std::optional<double> delta = std::nullopt);

/// Region generation + effective Steiner costs + LP, with the optimal
/// assignment re-checked against every constraint before returning.
/// Throws InfeasibleError if the LP has no feasible point.
CostReport cmd_cost(const Scenario& s, CostMode mode, bool no_helpers = false,
                    std::optional<double> delta = std::nullopt);

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV emission: one row per constraint; columns are the constraint id, one
/// column per cataloged variable, the sense, the rhs (12 significant
/// digits), and the symbolic rhs description.
std::string region_to_csv(const RateRegion& region);

/// Scenario -> simulator model (validates the supported shape).
BinSimModel binsim_model_from_scenario(const Scenario& s);

std::string binsim_report_to_csv(const BinSimReport& report);
std::string binsim_report_text(const BinSimReport& report);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

struct HelperSweepTable {
  HelperSweepResult best;
  std::string csv;  // per-point summary of the final grid pass
};

std::string helper_sweep_to_csv(const HelperSweepResult& r);

}  // namespace dirkit
