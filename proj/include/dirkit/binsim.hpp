#pragma once

#include <cstdint>
#include <vector>

#include "dirkit/demands.hpp"
#include "dirkit/prob.hpp"

namespace dirkit {

/// SplitMix64 finalizer; the sole mixing primitive behind every random
/// choice in the simulator.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based generator: stream = f(key, counter). Streams derived from
/// distinct keys are independent for simulation purposes.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}
  std::uint64_t next();
  double next_unit();  // in [0, 1)

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Deterministic bin assignment: uniform over [0, num_bins) as a function of
/// (seed, packet, sequence) only. Bins are never materialized.
std::uint64_t bin_index(std::uint64_t seed, const PacketId& packet,
                        std::uint64_t sequence, std::uint64_t num_bins);

/// Source model for the simulator: binary sources, source 0 is the one
/// being binned, every sink reconstructs it; side_vars[j-1] lists the pmf
/// positions of the sources delivered uncoded to sink j.
struct BinSimModel {
  JointPmf joint;
  std::vector<VarSubset> side_vars;

  int num_sinks() const { return static_cast<int>(side_vars.size()); }
  SinkMask all_sinks() const { return (SinkMask{1} << num_sinks()) - 1; }
};

/// X0 uniform, X1 = X0 thru BSC(p1) as side info at sink 1, X2 = X0 thru
/// BSC(p2) as side info at sink 2.
BinSimModel dsbs_star_model(double p1, double p2);

/// Single sink with one BSC(p1) side-information source.
BinSimModel dsbs_pair_model(double p1);

/// General model: every sink must request source 0; the other requested
/// sources arrive uncoded as side information.
BinSimModel binsim_model(const JointPmf& sources, const DemandMap& demands);

struct BinSimConfig {
  BinSimModel model;
  int blocklength = 8;  // n <= 20
  std::vector<std::pair<PacketId, double>> rates;  // bits/symbol; missing packets = 0
  long trials = 1000;
  std::uint64_t seed = 0;

  explicit BinSimConfig(BinSimModel m) : model(std::move(m)) {}
};

struct SinkError {
  long errors = 0;
  double rate = 0.0;
  double ci_halfwidth = 0.0;  // binomial 95%
};

struct BinSimReport {
  std::vector<SinkError> per_sink;
  double average = 0.0;        // (1/M) sum_j per-sink block error
  double average_ci = 0.0;     // 95% halfwidth of the per-trial averaged indicator
  long trials = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo run of the power-binning code: independent uniform bin
/// indices per (sequence, packet); each sink keeps the candidates matching
/// all received indices and picks the one maximizing joint likelihood with
/// its side information.
BinSimReport run_power_binning(const BinSimConfig& cfg);

struct SweepRow {
  double offset = 0.0;
  int blocklength = 0;
  double error = 0.0;
  double ci = 0.0;
};

/// Reruns the simulation with per-sink sum rates H(X0|side_j) + offset.
std::vector<SweepRow> threshold_sweep(const BinSimConfig& base,
                                      const std::vector<double>& offsets);

}  // namespace dirkit
