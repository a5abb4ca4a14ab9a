// Acceptance suite: one pass/fail line per criterion. Exit code is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dirkit/binsim.hpp"
#include "dirkit/lp.hpp"
#include "dirkit/network.hpp"
#include "dirkit/prob.hpp"
#include "dirkit/region.hpp"
#include "dirkit/scenario.hpp"
#include "oracles.hpp"

using namespace dirkit;

namespace {

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

std::string fixture(const char* name) {
  return std::string(DIRKIT_SCENARIO_DIR) + "/" + name;
}

double lp_opt(const RateRegion& region, const std::map<RateVar, double>& objective) {
  LpSolution sol = minimize({region, objective});
  require(sol.status == LpStatus::Optimal, "LP not optimal");
  return sol.value;
}

// --- 1: broadcast-vs-DIR gap on the two-sink example ------------------------

void criterion1() {
  Scenario fig2 = load_scenario(fixture("fig2.json"));
  const double br = cmd_cost(fig2, CostMode::Broadcast).optimal_cost;
  const double dir = cmd_cost(fig2, CostMode::DirPower).optimal_cost;
  const double br_expected = 3.0 * hb(0.2);
  const double dir_expected = 3.0 * hb(0.1) + 2.0 * (hb(0.2) - hb(0.1));
  std::ostringstream msg;
  msg << "broadcast " << br << " vs " << br_expected << ", dir " << dir << " vs " << dir_expected;
  require(std::abs(br - br_expected) <= 1e-8, "broadcast optimum off closed form: " + msg.str());
  require(std::abs(dir - dir_expected) <= 1e-8, "dir optimum off closed form: " + msg.str());
  require(dir < br, "dir optimum not strictly below broadcast: " + msg.str());
}

// --- 2: side-information optimum lands exactly on P2 or P3 ------------------

void criterion2() {
  std::mt19937_64 rng(1002);
  std::uniform_real_distribution<double> punif(0.02, 0.48);
  int done = 0;
  while (done < 20) {
    const double p1 = punif(rng), p2 = punif(rng);
    const double h1 = hb(p1), h2 = hb(p2);
    if (std::abs(h1 - h2) < 1e-3) continue;
    ++done;

    JointPmf pmf = testkit::dsbs3_pmf(p1, p2);
    DemandMap demands = DemandMap::from_sigma(3, {0b011, 0b101});
    Network net = testkit::star_network(1.0, 1.0, 1.0, 0.0, 0.0);
    EffectiveCostTable costs = effective_costs(net, demands, true);

    LinearProgram lp;
    lp.region = power_binning_region(pmf, demands);
    for (const RateVar& v : lp.region.vars) lp.objective[v] = costs.at({v.source, v.sinks});
    LpSolution sol = minimize(lp);
    require(sol.status == LpStatus::Optimal, "side-info LP not optimal");

    const double r01 = sol.at(RateVar::packet(0, 0b01));
    const double r012 = sol.at(RateVar::packet(0, 0b11));
    const double r02 = sol.at(RateVar::packet(0, 0b10));
    double e;
    if (h1 < h2)  // P2 = {0, H(X0|X1), H(X0|X2)-H(X0|X1)}
      e = std::max({std::abs(r01), std::abs(r012 - h1), std::abs(r02 - (h2 - h1))});
    else  // P3 = {H(X0|X1)-H(X0|X2), H(X0|X2), 0}
      e = std::max({std::abs(r01 - (h1 - h2)), std::abs(r012 - h2), std::abs(r02)});
    std::ostringstream msg;
    msg << "p1=" << p1 << " p2=" << p2 << " argmin error " << e;
    require(e <= 1e-8, "optimum off the closed-form point: " + msg.str());
  }
}

// --- 3: Theorem-1 region with constant auxiliaries == power binning ---------

void criterion3() {
  std::mt19937_64 rng(1003);
  std::uniform_real_distribution<double> wunif(0.05, 2.0);
  for (int scen = 0; scen < 6; ++scen) {
    const int n_sources = 1 + static_cast<int>(rng() % 3);  // N <= 3
    const int n_sinks = 1 + static_cast<int>(rng() % 2);    // M <= 2
    JointPmf pmf = testkit::random_pmf(rng, n_sources, 2);
    DemandMap demands = testkit::random_demands(rng, n_sources, n_sinks);

    RateRegion t1 = theorem1_region(pmf, demands, false);
    RateRegion pb = power_binning_region(pmf, demands);
    for (int o = 0; o < 20; ++o) {
      std::map<RateVar, double> obj, pb_obj;
      for (const RateVar& v : t1.vars)
        if (v.kind == RateKind::Packet) {
          obj[v] = wunif(rng);
          if (pb.index_of(v) >= 0) pb_obj[v] = obj[v];
        }
      const double a = lp_opt(t1, obj);
      const double b = lp_opt(pb, pb_obj);
      std::ostringstream msg;
      msg << "scenario " << scen << " objective " << o << ": thm1 " << a << " vs pb " << b;
      require(std::abs(a - b) <= 1e-8, "optima differ: " + msg.str());
    }
  }
}

// --- 4: the binary-symmetric helper example ----------------------------------

void criterion4() {
  const double p1 = 0.1, p2 = 0.2, delta = 0.1;
  const double q1 = solve_crossover(p1, hb(p1) + delta);
  const double q2 = solve_crossover(p2, hb(p2) + delta);
  require(std::abs(hb(bsc_convolve(p1, q1)) - (hb(p1) + delta)) <= 1e-10,
          "crossover root 1 misses its target entropy");
  require(std::abs(hb(bsc_convolve(p2, q2)) - (hb(p2) + delta)) <= 1e-10,
          "crossover root 2 misses its target entropy");

  HelperExample ex = helper_example(p1, p2, delta);
  RateRegion region = helper_region_oriented(p1, p2, {ex.p02, ex.p012}, ex.fine_sink);
  std::map<RateVar, double> point = {
      {RateVar::packet(0, 0b11), 1.0 - hb(ex.p01)},
      {RateVar::packet(0, SinkMask{1} << (ex.fine_sink - 1)), hb(ex.p01) - hb(ex.p02)},
      {RateVar::packet(0, ex.fine_sink == 1 ? 0b10 : 0b01), 0.0},
      {RateVar::packet(1, 0b01), ex.rate_sink1},
      {RateVar::packet(2, 0b10), ex.rate_sink2}};
  for (const LinearConstraint& c : region.constraints) {
    double lhs = 0.0;
    for (const auto& [v, coeff] : c.terms) lhs += coeff * point.at(v);
    require(lhs >= c.rhs - 1e-9, "example point violates '" + c.label + "'");
    const bool is_common = c.terms.size() == 1 && c.terms[0].first == RateVar::packet(0, 0b11);
    const bool is_fine =
        c.terms.size() == 1 &&
        c.terms[0].first == RateVar::packet(0, SinkMask{1} << (ex.fine_sink - 1));
    if (is_common || is_fine)
      require(std::abs(lhs - c.rhs) <= 1e-9, "constraint '" + c.label + "' not tight");
  }

  // Strictly below broadcast for asymmetric sources (unit collector weights).
  const double side = ex.rate_sink1 + ex.rate_sink2;
  const double dir_cost = 3.0 * ex.rate_common + 2.0 * ex.rate_fine + side;
  const double br_cost = 3.0 * std::max(1.0 - hb(q1), 1.0 - hb(q2)) + side;
  std::ostringstream msg;
  msg << "dir " << dir_cost << " vs broadcast " << br_cost;
  require(dir_cost < br_cost - 1e-9, "helper cost not strictly below broadcast: " + msg.str());
}

// --- 5: simplex vs vertex enumeration ----------------------------------------

void criterion5() {
  std::mt19937_64 rng(1005);
  std::uniform_int_distribution<int> nv(1, 6), nc(1, 20);
  std::uniform_real_distribution<double> coeff(-1.0, 2.0), rhs(-1.0, 2.0), weight(0.0, 2.0);
  for (int t = 0; t < 100; ++t) {
    const int n = nv(rng), m = nc(rng);
    LinearProgram lp;
    for (int j = 0; j < n; ++j) lp.region.vars.push_back(RateVar::packet(0, SinkMask(j + 1)));
    std::sort(lp.region.vars.begin(), lp.region.vars.end());
    for (int r = 0; r < m; ++r) {
      LinearConstraint c;
      for (int j = 0; j < n; ++j) {
        double a = coeff(rng);
        if (std::abs(a) < 0.05) continue;
        c.terms.push_back({lp.region.vars[static_cast<std::size_t>(j)], a});
      }
      if (c.terms.empty()) c.terms.push_back({lp.region.vars[0], 1.0});
      c.rhs = rhs(rng);
      c.label = "c" + std::to_string(r);
      lp.region.constraints.push_back(std::move(c));
    }
    for (int j = 0; j < n; ++j)
      lp.objective[lp.region.vars[static_cast<std::size_t>(j)]] = weight(rng);

    LpSolution a = minimize(lp);
    LpSolution b = vertex_oracle(lp);
    std::ostringstream msg;
    msg << "lp " << t << " (" << n << " vars, " << m << " cons)";
    require(a.status == b.status, "status mismatch on " + msg.str());
    if (a.status == LpStatus::Optimal)
      require(std::abs(a.value - b.value) <= 1e-7,
              "value mismatch on " + msg.str() + ": " + std::to_string(a.value) + " vs " +
                  std::to_string(b.value));
  }
}

// --- 6: Steiner weights vs edge-subset enumeration ---------------------------

void criterion6() {
  std::mt19937_64 rng(1006);
  for (int t = 0; t < 25; ++t) {
    testkit::RandomGraph g = testkit::random_graph(rng, 8, 10, 3);
    Network net(g.nodes, g.edges);
    const SinkMask all = (SinkMask{1} << g.num_sinks) - 1;
    for (SinkMask k = 1; k <= all; ++k) {
      if (k & ~all) continue;
      const double fast = steiner_weight(net, 0, k);
      const double brute = testkit::brute_force_steiner(g, k);
      std::ostringstream msg;
      msg << "graph " << t << " terminals " << sink_set_name(k) << ": " << fast << " vs "
          << brute;
      require(fast == brute, "Steiner weight differs from enumeration: " + msg.str());
    }
  }
}

// --- 7: binning threshold regression (committed seed) ------------------------

void criterion7() {
  const std::uint64_t seed = 20260809;
  const double p1 = 0.1;

  auto run = [&](int n, double sum_rate) {
    BinSimConfig cfg(dsbs_pair_model(p1));
    cfg.blocklength = n;
    cfg.rates = {{{0, 0b1}, sum_rate}};
    cfg.trials = 10000;
    cfg.seed = seed;
    return run_power_binning(cfg).average;
  };

  const double above = hb(p1) + 0.15;
  const double e8 = run(8, above);
  const double e16 = run(16, above);
  std::ostringstream msg;
  msg << "above threshold: error(n=8)=" << e8 << ", error(n=16)=" << e16;
  require(e16 < e8, "no error decay with blocklength: " + msg.str());

  const double e16_below = run(16, hb(p1) - 0.15);
  require(e16_below > 0.4, "below-threshold error unexpectedly small: " +
                               std::to_string(e16_below));
}

// --- 8: entropy engine property suite ----------------------------------------

void criterion8() {
  std::mt19937_64 rng(1008);
  for (int t = 0; t < 200; ++t) {
    const int nvars = 2 + static_cast<int>(rng() % 3);  // up to 4
    JointPmf pmf = testkit::random_pmf(rng, nvars, 3);
    const VarSubset a{0}, b{1};

    const double chain =
        std::abs(pmf.entropy(VarSubset{0, 1}) - (pmf.entropy(a) + pmf.cond_entropy(b, a)));
    require(chain <= 1e-9, "chain rule violated by " + std::to_string(chain));
    require(pmf.cond_entropy(a, b) <= pmf.entropy(a) + 1e-12,
            "conditioning increased entropy");
    const double mi = pmf.mutual_info(a, b, {});
    require(mi >= 0.0, "negative mutual information");
    const double ident = std::abs(mi - (pmf.entropy(a) - pmf.cond_entropy(a, b)));
    require(ident <= 1e-9, "I != H(A) - H(A|B), off by " + std::to_string(ident));
  }
}

// --- 9: closed-family enumeration vs exhaustive filter ------------------------

void criterion9() {
  for (int m = 1; m <= 3; ++m) {
    const SinkMask ambient = (SinkMask{1} << m) - 1;
    auto fast = enumerate_qstar(ambient);
    auto brute = testkit::brute_force_qstar(ambient);
    require(fast.size() == brute.size(),
            "family count mismatch at M=" + std::to_string(m) + ": " +
                std::to_string(fast.size()) + " vs " + std::to_string(brute.size()));
    for (std::size_t t = 0; t < fast.size(); ++t)
      require(fast[t].members == brute[t].members,
              "family list mismatch at M=" + std::to_string(m));
  }
  require(enumerate_qstar(0b1).size() == 1, "M=1 count is not 1");
  require(enumerate_qstar(0b11).size() == 4, "M=2 count is not 4");
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "two-sink example: broadcast vs DIR closed forms", criterion1},
      {2, "side-info LP argmin lands on P2/P3", criterion2},
      {3, "theorem-1 region with constant auxiliaries == power binning", criterion3},
      {4, "binary-symmetric helper example", criterion4},
      {5, "simplex vs vertex-enumeration oracle", criterion5},
      {6, "Steiner weights vs subgraph enumeration", criterion6},
      {7, "binning threshold regression (fixed seed)", criterion7},
      {8, "entropy engine properties", criterion8},
      {9, "closed-family enumeration vs brute force", criterion9},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string status = "PASS", detail;
    try {
      c.run();
    } catch (const std::exception& e) {
      status = "FAIL";
      detail = e.what();
      ++failures;
    }
    auto seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
    std::printf("%s  %d  %-58s (%.2f s)%s%s\n", status.c_str(), c.id, c.name, seconds.count(),
                detail.empty() ? "" : "  -- ", detail.c_str());
    std::fflush(stdout);
  }
  if (failures == 0)
    std::printf("acceptance: all %zu criteria passed\n", criteria.size());
  else
    std::printf("acceptance: %d of %zu criteria FAILED\n", failures, criteria.size());
  return failures;
}
