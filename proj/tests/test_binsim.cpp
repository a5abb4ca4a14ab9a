#include <cmath>
#include <set>

#include "doctest.h"
#include "dirkit/binsim.hpp"
#include "dirkit/scenario.hpp"
#include "oracles.hpp"

using namespace dirkit;

TEST_SUITE_BEGIN("binsim");

TEST_CASE("identical configs give bit-identical reports") {
  BinSimConfig cfg(dsbs_star_model(0.1, 0.2));
  cfg.blocklength = 10;
  cfg.rates = {{{0, 0b11}, 0.55}, {{0, 0b01}, 0.1}, {{0, 0b10}, 0.3}};
  cfg.trials = 2000;
  cfg.seed = 42;
  BinSimReport a = run_power_binning(cfg);
  BinSimReport b = run_power_binning(cfg);
  REQUIRE(a.per_sink.size() == b.per_sink.size());
  for (std::size_t j = 0; j < a.per_sink.size(); ++j)
    CHECK(a.per_sink[j].errors == b.per_sink[j].errors);
  CHECK(binsim_report_to_csv(a) == binsim_report_to_csv(b));

  cfg.seed = 43;
  BinSimReport c = run_power_binning(cfg);
  bool all_equal = true;
  for (std::size_t j = 0; j < a.per_sink.size(); ++j)
    if (a.per_sink[j].errors != c.per_sink[j].errors) all_equal = false;
  CHECK_FALSE(all_equal);
}

TEST_CASE("bin assignment is marginally uniform (chi-square at 1%)") {
  const std::uint64_t bins = 64;
  const int draws = 100000;
  std::vector<long> counts(bins, 0);
  PacketId packet{0, 0b11};
  for (int s = 0; s < draws; ++s)
    ++counts[bin_index(977, packet, static_cast<std::uint64_t>(s), bins)];
  double expected = static_cast<double>(draws) / static_cast<double>(bins);
  double chi2 = 0.0;
  for (long c : counts) {
    double d = static_cast<double>(c) - expected;
    chi2 += d * d / expected;
  }
  // Wilson-Hilferty 99% quantile for k-1 dof.
  double k = static_cast<double>(bins - 1);
  double z = 2.3263478740408408;
  double crit = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3.0);
  CHECK(chi2 < crit);
  for (std::uint64_t s = 0; s < 1000; ++s) CHECK(bin_index(5, packet, s, 7) < 7);
}

TEST_CASE("very high rate decodes perfectly") {
  BinSimConfig cfg(dsbs_pair_model(0.1));
  cfg.blocklength = 10;
  cfg.rates = {{{0, 0b1}, 3.0}};  // far more bins than sequence pairs
  cfg.trials = 500;
  cfg.seed = 3;
  BinSimReport report = run_power_binning(cfg);
  CHECK(report.per_sink[0].errors == 0);
  CHECK(report.average == 0.0);
}

TEST_CASE("zero rate reduces to a maximum-likelihood guess") {
  BinSimConfig cfg(dsbs_pair_model(0.1));
  cfg.blocklength = 14;
  cfg.rates = {{{0, 0b1}, 0.0}};
  cfg.trials = 3000;
  cfg.seed = 5;
  BinSimReport report = run_power_binning(cfg);
  // The only candidate beating the truth is a sequence closer to the side
  // info; success requires zero channel flips: (1-p)^n.
  double success = std::pow(0.9, 14);
  CHECK(report.average > 0.5);
  CHECK(std::abs((1.0 - report.average) - success) < 0.05);
}

TEST_CASE("report shape invariants") {
  BinSimConfig cfg(dsbs_star_model(0.1, 0.2));
  cfg.blocklength = 8;
  cfg.rates = {{{0, 0b11}, 0.5}};
  cfg.trials = 400;
  cfg.seed = 11;
  BinSimReport report = run_power_binning(cfg);
  REQUIRE(report.per_sink.size() == 2);
  double mean = 0.0;
  for (const SinkError& e : report.per_sink) {
    CHECK(e.rate >= 0.0);
    CHECK(e.rate <= 1.0);
    CHECK(e.ci_halfwidth ==
          doctest::Approx(1.96 * std::sqrt(e.rate * (1.0 - e.rate) / 400.0)).epsilon(1e-12));
    mean += e.rate;
  }
  CHECK(report.average == doctest::Approx(mean / 2.0).epsilon(1e-12));

  // CI shrinks like 1/sqrt(trials).
  BinSimConfig big = cfg;
  big.trials = 6400;
  BinSimReport report16 = run_power_binning(big);
  CHECK(report16.per_sink[0].ci_halfwidth < report.per_sink[0].ci_halfwidth);
  CHECK(report16.average_ci < report.average_ci);
  double ratio = report16.per_sink[0].ci_halfwidth / report.per_sink[0].ci_halfwidth;
  CHECK(ratio > 0.1);
  CHECK(ratio < 0.5);
}

TEST_CASE("single trial is degenerate but valid") {
  BinSimConfig cfg(dsbs_pair_model(0.2));
  cfg.blocklength = 6;
  cfg.rates = {{{0, 0b1}, 0.9}};
  cfg.trials = 1;
  cfg.seed = 1;
  BinSimReport report = run_power_binning(cfg);
  CHECK((report.per_sink[0].rate == 0.0 || report.per_sink[0].rate == 1.0));
}

TEST_CASE("config validation") {
  BinSimConfig cfg(dsbs_pair_model(0.1));
  cfg.rates = {{{0, 0b1}, 0.5}};
  cfg.blocklength = 21;
  CHECK_THROWS_AS(run_power_binning(cfg), ValidationError);
  cfg.blocklength = 8;
  cfg.trials = 0;
  CHECK_THROWS_AS(run_power_binning(cfg), ValidationError);
  cfg.trials = 10;
  cfg.rates = {{{1, 0b1}, 0.5}};
  CHECK_THROWS_AS(run_power_binning(cfg), ValidationError);
  cfg.rates = {{{0, 0b1}, 0.5}, {{0, 0b1}, 0.25}};
  CHECK_THROWS_AS(run_power_binning(cfg), ValidationError);
  cfg.rates = {{{0, 0b1}, -0.5}};
  CHECK_THROWS_AS(run_power_binning(cfg), ValidationError);
}

TEST_CASE("threshold sweep") {
  BinSimConfig base(dsbs_pair_model(0.1));
  base.blocklength = 14;
  base.trials = 3000;
  base.seed = 17;

  SUBCASE("empty offset list gives an empty table") {
    CHECK(threshold_sweep(base, {}).empty());
  }
  SUBCASE("single offset gives one row") {
    auto rows = threshold_sweep(base, {0.1});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].offset == 0.1);
    CHECK(rows[0].blocklength == 14);
  }
  SUBCASE("positive offsets decode better than negative ones") {
    auto rows = threshold_sweep(base, {0.2, -0.2});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].error < rows[1].error);
  }
  SUBCASE("two-sink sweep splits the gap into a private packet") {
    BinSimConfig star(dsbs_star_model(0.1, 0.2));
    star.blocklength = 10;
    star.trials = 800;
    star.seed = 23;
    auto rows = threshold_sweep(star, {0.15});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].error >= 0.0);
    CHECK(rows[0].error <= 1.0);
  }
}

TEST_CASE("two-sink thresholds: committed regression fixture") {
  // Sum rates H(X0|X1)+0.15 and H(X0|X2)+0.15, split through the common
  // packet; longer blocks decode better, and both beat the starved run.
  auto run = [](int n, double slack) {
    BinSimConfig cfg(dsbs_star_model(0.1, 0.2));
    cfg.blocklength = n;
    cfg.rates = {{{0, 0b01}, 0.0},
                 {{0, 0b10}, hb(0.2) - hb(0.1)},
                 {{0, 0b11}, hb(0.1) + slack}};
    cfg.trials = 4000;
    cfg.seed = 20260809;
    return run_power_binning(cfg).average;
  };
  const double e8 = run(8, 0.15);
  const double e16 = run(16, 0.15);
  const double starved = run(16, -0.15);
  CHECK(e16 < e8);
  CHECK(e8 < starved);
  CHECK(e16 < starved);
}

TEST_CASE("fig2-style run stays under the regression bound") {
  BinSimConfig cfg(dsbs_star_model(0.1, 0.2));
  cfg.blocklength = 12;
  cfg.rates = {{{0, 0b11}, 0.62}, {{0, 0b01}, 0.0}, {{0, 0b10}, 0.25}};
  cfg.trials = 10000;
  cfg.seed = 7;
  BinSimReport report = run_power_binning(cfg);
  CHECK(report.average < 0.2);
}

TEST_CASE("general model construction from pmf and demands") {
  std::mt19937_64 rng(55);
  JointPmf pmf = testkit::random_pmf(rng, 2, 2);
  DemandMap demands = DemandMap::from_sigma(2, {0b11});
  BinSimModel model = binsim_model(pmf, demands);
  CHECK(model.num_sinks() == 1);
  CHECK(model.side_vars[0].indices == std::vector<int>{1});

  // Sinks not requesting the coded source are unsupported.
  DemandMap bad = DemandMap::from_sigma(2, {0b10});
  CHECK_THROWS_AS(binsim_model(pmf, bad), ValidationError);
}

TEST_SUITE_END();
