#pragma once

#include <map>
#include <string>

#include "dirkit/region.hpp"

namespace dirkit {

/// Minimize objective . x over a RateRegion (all constraints >=, all
/// variables >= 0). Objective weights must be nonnegative and reference
/// only cataloged variables; unlisted variables get weight 0.
struct LinearProgram {
  RateRegion region;
  std::map<RateVar, double> objective;

  void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  std::map<RateVar, double> assignment;

  double at(const RateVar& v) const;
};

/// Two-phase dense simplex with Bland's anti-cycling rule. Deterministic
/// for a deterministic constraint order. Pivot tolerance 1e-9, feasibility
/// tolerance 1e-8; the optimal assignment is re-checked against every
/// constraint before returning.
LpSolution minimize(const LinearProgram& lp);

/// Brute-force test oracle: enumerates every basic point cut out by n of
/// the constraint/coordinate hyperplanes and returns the cheapest feasible
/// one. Capped at 8 variables / 40 constraints.
LpSolution vertex_oracle(const LinearProgram& lp);

}  // namespace dirkit
