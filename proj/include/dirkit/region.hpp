#pragma once

#include <compare>
#include <string>
#include <vector>

#include "dirkit/demands.hpp"
#include "dirkit/prob.hpp"

namespace dirkit {

/// The rate variables appearing in the generated linear systems.
///   Broadcast  R_i        one stream per source, delivered to all of Pi_i
///   Packet     R_{i,K}    packet from source i to sink subset K
///   AuxPrime   R'_{i,K}   codebook size exponents (stage 1)
///   AuxDouble  R''_{i,K}  codeword bin rates (stage 2)
///   AuxTilde   Rt_{i,K}   source bin rates (stage 3), K subset of Pi_i
enum class RateKind { Broadcast, Packet, AuxPrime, AuxDouble, AuxTilde };

struct RateVar {
  RateKind kind = RateKind::Packet;
  int source = 0;
  SinkMask sinks = 0;  // unused for Broadcast

  auto operator<=>(const RateVar&) const = default;
  std::string name() const;  // "R[0,{1,2}]", "Rp[...]", "Rpp[...]", "Rt[...]", "R[0]"

  static RateVar broadcast(int i) { return {RateKind::Broadcast, i, 0}; }
  static RateVar packet(int i, SinkMask k) { return {RateKind::Packet, i, k}; }
  static RateVar prime(int i, SinkMask k) { return {RateKind::AuxPrime, i, k}; }
  static RateVar dbl(int i, SinkMask k) { return {RateKind::AuxDouble, i, k}; }
  static RateVar tilde(int i, SinkMask k) { return {RateKind::AuxTilde, i, k}; }
};

/// sum(coeff * var) >= rhs. All variables are implicitly >= 0.
struct LinearConstraint {
  std::vector<std::pair<RateVar, double>> terms;
  double rhs = 0.0;
  std::string label;  // symbolic description of the rhs, e.g. "H(X0|X1)"
};

enum class RegionKind { Broadcast, PowerBinning, Theorem1, Helper };

struct RateRegion {
  RegionKind provenance = RegionKind::PowerBinning;
  std::vector<RateVar> vars;  // catalog, sorted ascending
  std::vector<LinearConstraint> constraints;

  int index_of(const RateVar& v) const;  // -1 when not cataloged
  void validate() const;
};

/// A family of sink subsets. Closed families (K in F => every strict
/// superset of K within the ambient set is in F) index the codebook-rate
/// constraints of the general achievable region.
struct SubsetFamily {
  std::vector<SinkMask> members;  // sorted ascending by mask value

  bool contains(SinkMask k) const;
};

bool superset_closed(const SubsetFamily& family, SinkMask ambient);

/// All nonempty superset-closed families of nonempty subsets of `ambient`,
/// in a deterministic order (by family size, then lexicographic members).
std::vector<SubsetFamily> enumerate_qstar(SinkMask ambient);

/// Broadcast baseline (no helpers): one rate per source, per-sink
/// Slepian-Wolf style constraints.
RateRegion broadcast_region(const JointPmf& pmf, const DemandMap& demands);

/// Complete no-helpers packet-rate region: for each sink j and nonempty
/// S within Sigma_j, the packets from S reaching j carry at least
/// H({X}_S | {X}_{Sigma_j - S}).
RateRegion power_binning_region(const JointPmf& pmf, const DemandMap& demands);

/// Full achievable region for a user-supplied auxiliary joint pmf, in the
/// lifted (R, R', R'', Rt) coordinates. Auxiliaries absent from the pmf are
/// treated as constants. Requires the Markov factorization to hold.
RateRegion theorem1_region(const JointPmf& pmf, const DemandMap& demands,
                           bool no_helpers = false);

/// BSC parameters of the two-stage auxiliary chain: U_fine = X0 thru
/// BSC(p02), U_coarse = U_fine thru BSC(p012).
struct HelperAux {
  double p02 = 0.0;
  double p012 = 0.0;
};

/// The 5-variable joint pmf (X0, X1, X2, U2, U0) of the binary-symmetric
/// 2-sink 1-helper construction: X1/X2 are X0 through BSC(p1)/BSC(p2),
/// U2 = X0 through BSC(aux.p02), U0 = U2 through BSC(aux.p012), U1 constant.
JointPmf helper_joint_pmf(double p1, double p2, HelperAux aux, int fine_sink = 2);

/// Rate region of the 2-sink 1-helper problem for the fixed auxiliaries
/// above (sink 2 receives the refinement, as in the canonical construction):
///   R[0,{1,2}] >= I(X0;U0)       R[0,{1}] >= 0 (U1 constant)
///   R[0,{2}]   >= I(X0;U2|U0)    R[1,{1}] >= H(X1|U0)   R[2,{2}] >= H(X2|U0,U2)
RateRegion helper_region(double p1, double p2, HelperAux aux);

/// Same region with the refinement routed to the chosen sink instead.
RateRegion helper_region_oriented(double p1, double p2, HelperAux aux, int fine_sink);

/// Analytic optimum of the helper example at side-rate excess `delta`:
/// crossovers q_i solve hb(p_i * q_i cascade) = hb(p_i) + delta; the sink
/// with the smaller root needs the finer auxiliary and gets the refinement.
struct HelperExample {
  double p01 = 0.0;   // larger solved crossover (coarse, common description)
  double p02 = 0.0;   // smaller solved crossover (fine description)
  double p012 = 0.0;  // extra cascade noise; bsc_convolve(p02, p012) == p01
  int fine_sink = 2;  // original sink index receiving the refinement packet
  double rate_common = 0.0;  // 1 - hb(p01)
  double rate_fine = 0.0;    // hb(p01) - hb(p02)
  double rate_sink1 = 0.0;   // hb(p1) + delta
  double rate_sink2 = 0.0;   // hb(p2) + delta
};

HelperExample helper_example(double p1, double p2, double delta);

/// Grid search over the auxiliary chain parameters (both orientations)
/// minimizing the unit-weight helper-side cost subject to the two side-rate
/// caps hb(p_i) + delta. Refines locally around the best cell.
struct HelperSweepResult {
  HelperAux aux;
  int fine_sink = 2;
  double rate_common = 0.0;  // R[0,{1,2}]
  double rate_fine = 0.0;    // R[0,{fine_sink}]
  double rate_sink1 = 0.0, rate_sink2 = 0.0;
  double cost = 0.0;  // 3*rate_common + 2*rate_fine
};

HelperSweepResult helper_sweep(double p1, double p2, double delta, int grid_steps);

}  // namespace dirkit
