#pragma once

#include <compare>
#include <string>
#include <vector>

#include "dirkit/prob.hpp"

namespace dirkit {

/// Who wants what: sigma[j-1] is the set of sources sink j reconstructs,
/// pi[i] the (derived) set of sinks requesting source i.
struct DemandMap {
  int num_sources = 0;
  int num_sinks = 0;
  std::vector<SourceMask> sigma;  // indexed by sink j-1
  std::vector<SinkMask> pi;       // indexed by source i

  static DemandMap from_sigma(int num_sources, std::vector<SourceMask> sigma);

  SinkMask all_sinks() const {
    return num_sinks >= 32 ? ~SinkMask{0} : ((SinkMask{1} << num_sinks) - 1);
  }
  SourceMask requested_by(int sink) const {
    return sigma.at(static_cast<std::size_t>(sink - 1));
  }
  SinkMask requesting(int source) const { return pi.at(static_cast<std::size_t>(source)); }
};

/// Identifies the packet P_{i,K} from source i to the sink subset K.
struct PacketId {
  int source = 0;
  SinkMask sinks = 0;

  auto operator<=>(const PacketId&) const = default;
  std::string name() const;  // "P[0,{1,2}]"
};

/// Entrywise check of the coding-scheme Markov condition: for every sink j,
/// P({X}, {U}_{J(j)}) must factor as P({X}) prod_i P({U_i}_{J(j)} | X_i).
struct MarkovCheck {
  bool ok = true;
  double worst_abs_err = 0.0;
  int worst_sink = 0;            // 1-based, 0 if ok
  std::string worst_entry;       // rendered symbol assignment of the worst cell
  double lhs = 0.0, rhs = 0.0;   // values at the worst cell
  std::string summary() const;
};

MarkovCheck validate_markov(const JointPmf& pmf, const DemandMap& demands,
                            double tol = 1e-9);

}  // namespace dirkit
