#include <cmath>
#include <random>

#include "doctest.h"
#include "dirkit/demands.hpp"
#include "dirkit/prob.hpp"
#include "dirkit/region.hpp"
#include "oracles.hpp"

using namespace dirkit;

namespace {

JointPmf fair_bits(int n) {
  std::vector<Variable> vars;
  for (int v = 0; v < n; ++v) vars.push_back({"B" + std::to_string(v), VarRole::Source, v, 0, 2});
  return JointPmf(std::move(vars), std::vector<double>(std::size_t{1} << n,
                                                       1.0 / static_cast<double>(1 << n)));
}

// X1 = X0 through BSC(p), X0 uniform.
JointPmf bsc_pair(double p) {
  std::vector<Variable> vars = {{"X0", VarRole::Source, 0, 0, 2},
                                {"X1", VarRole::Source, 1, 0, 2}};
  return JointPmf(std::move(vars),
                  {0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)});
}

// Y is a deterministic copy of X.
JointPmf copied_bit() {
  std::vector<Variable> vars = {{"X", VarRole::Source, 0, 0, 2},
                                {"Y", VarRole::Source, 1, 0, 2}};
  return JointPmf(std::move(vars), {0.5, 0.0, 0.0, 0.5});
}

}  // namespace

TEST_SUITE_BEGIN("probkit");

TEST_CASE("joint pmf invariants") {
  CHECK_THROWS_AS(JointPmf({{"X", VarRole::Source, 0, 0, 2}}, {0.5, 0.49}), ValidationError);
  CHECK_THROWS_AS(JointPmf({{"X", VarRole::Source, 0, 0, 2}}, {0.5, 0.5, 0.0}), ValidationError);
  CHECK_THROWS_AS(JointPmf({{"X", VarRole::Source, 0, 0, 2}}, {1.5, -0.5}), ValidationError);
  CHECK_THROWS_AS(JointPmf({{"X", VarRole::Source, 0, 0, 2}, {"X", VarRole::Source, 1, 0, 2}},
                           {0.25, 0.25, 0.25, 0.25}),
                  ValidationError);
  // duplicate auxiliary (i,K) label
  CHECK_THROWS_AS(JointPmf({{"U", VarRole::Auxiliary, 0, 1, 2}, {"V", VarRole::Auxiliary, 0, 1, 2}},
                           {0.25, 0.25, 0.25, 0.25}),
                  ValidationError);
}

TEST_CASE("marginalize") {
  JointPmf two = fair_bits(2);
  JointPmf one = two.marginalize(VarSubset{0});
  CHECK(one.table_size() == 2);
  CHECK(one.probs()[0] == doctest::Approx(0.5).epsilon(1e-12));

  JointPmf dsbs = bsc_pair(0.1);
  JointPmf x0 = dsbs.marginalize(VarSubset{0});
  CHECK(x0.probs()[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(x0.probs()[1] == doctest::Approx(0.5).epsilon(1e-12));

  JointPmf all = dsbs.marginalize(VarSubset{0, 1});
  for (std::size_t t = 0; t < 4; ++t) CHECK(all.probs()[t] == doctest::Approx(dsbs.probs()[t]));

  CHECK_THROWS_AS(dsbs.marginalize(VarSubset{}), ValidationError);
  CHECK_THROWS_AS(dsbs.marginalize(VarSubset{7}), ValidationError);

  // marginal of a product distribution is the kept factor
  JointPmf prod({{"A", VarRole::Source, 0, 0, 2}, {"B", VarRole::Source, 1, 0, 2}},
                {0.3 * 0.7, 0.3 * 0.3, 0.7 * 0.7, 0.7 * 0.3});
  JointPmf b = prod.marginalize(VarSubset{1});
  CHECK(b.probs()[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(b.probs()[1] == doctest::Approx(0.3).epsilon(1e-12));
  double total = 0.0;
  for (double p : b.probs()) total += p;
  CHECK(std::abs(total - 1.0) <= 1e-12);
}

TEST_CASE("conditional entropy") {
  JointPmf bit = fair_bits(1);
  CHECK(bit.cond_entropy(VarSubset{0}, {}) == doctest::Approx(1.0).epsilon(1e-12));

  JointPmf pair = bsc_pair(0.1);
  double direct = -0.1 * std::log2(0.1) - 0.9 * std::log2(0.9);
  CHECK(std::abs(pair.cond_entropy(VarSubset{0}, VarSubset{1}) - direct) < 1e-12);
  CHECK(std::abs(pair.cond_entropy(VarSubset{0}, VarSubset{1}) - 0.4690) < 1e-4);

  CHECK(copied_bit().cond_entropy(VarSubset{0}, VarSubset{1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(pair.cond_entropy(VarSubset{0}, VarSubset{0}), ValidationError);
  CHECK_THROWS_AS(pair.cond_entropy(VarSubset{}, VarSubset{0}), ValidationError);
}

TEST_CASE("mutual information") {
  CHECK(fair_bits(2).mutual_info(VarSubset{0}, VarSubset{1}, {}) ==
        doctest::Approx(0.0).epsilon(1e-12));

  JointPmf pair = bsc_pair(0.1);
  double expected = pair.cond_entropy(VarSubset{0}, {}) -
                    pair.cond_entropy(VarSubset{0}, VarSubset{1});
  CHECK(pair.mutual_info(VarSubset{0}, VarSubset{1}, {}) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(pair.mutual_info(VarSubset{0}, VarSubset{1}, {}) - 0.5310) < 1e-4);

  JointPmf copy = copied_bit();
  CHECK(copy.mutual_info(VarSubset{0}, VarSubset{1}, {}) ==
        doctest::Approx(copy.entropy(VarSubset{0})).epsilon(1e-12));
  CHECK_THROWS_AS(pair.mutual_info(VarSubset{0}, VarSubset{0}, {}), ValidationError);
}

TEST_CASE("binary entropy and cascades") {
  CHECK(hb(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(hb(0.0) == 0.0);
  CHECK(hb(1.0) == 0.0);
  CHECK(std::abs(hb(0.2) - 0.7219) < 1e-4);
  CHECK(std::abs(hb(0.3) - hb(0.7)) < 1e-15);
  CHECK_THROWS_AS(hb(-0.01), ValidationError);
  CHECK_THROWS_AS(hb(1.01), ValidationError);

  CHECK(bsc_convolve(0.37, 0.0) == doctest::Approx(0.37).epsilon(1e-15));
  CHECK(bsc_convolve(0.5, 0.123) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(bsc_convolve(0.1, 0.2) == doctest::Approx(0.26).epsilon(1e-15));
  CHECK(bsc_convolve(0.3, 0.4) == doctest::Approx(bsc_convolve(0.4, 0.3)).epsilon(1e-15));
  CHECK_THROWS_AS(bsc_convolve(1.2, 0.1), ValidationError);
}

TEST_CASE("solve_crossover") {
  CHECK(std::abs(solve_crossover(0.1, hb(0.1)) - 0.0) < 1e-9);
  // hb is flat at 1/2, so the root is pinned through the entropy value.
  double full = solve_crossover(0.1, 1.0);
  CHECK(std::abs(full - 0.5) < 1e-6);
  CHECK(std::abs(hb(bsc_convolve(0.1, full)) - 1.0) <= 1e-10);

  double x = solve_crossover(0.1, 0.5690);
  CHECK(std::abs(hb(bsc_convolve(0.1, x)) - 0.5690) <= 1e-10);
  double scan = testkit::grid_scan_crossover(0.1, 0.5690);
  CHECK(std::abs(x - scan) < 1e-6);

  CHECK_THROWS_AS(solve_crossover(0.1, hb(0.1) - 1e-3), ValidationError);
  CHECK_THROWS_AS(solve_crossover(0.1, 1.001), ValidationError);
}

TEST_CASE("solve_crossover inverts the cascade entropy exactly") {
  std::mt19937_64 rng(411);
  std::uniform_real_distribution<double> punif(0.01, 0.49);
  for (int t = 0; t < 50; ++t) {
    double p = punif(rng);
    std::uniform_real_distribution<double> tunif(hb(p), 1.0);
    double target = tunif(rng);
    double x = solve_crossover(p, target);
    CHECK(x >= 0.0);
    CHECK(x <= 0.5);
    CHECK(std::abs(hb(bsc_convolve(p, x)) - target) <= 1e-10);
  }
}

TEST_CASE("markov factorization check") {
  DemandMap demands = DemandMap::from_sigma(3, {0b010, 0b100});

  SUBCASE("constant auxiliaries always factor") {
    std::vector<Variable> vars = {{"X0", VarRole::Source, 0, 0, 2},
                                  {"X1", VarRole::Source, 1, 0, 2},
                                  {"X2", VarRole::Source, 2, 0, 2},
                                  {"U0", VarRole::Auxiliary, 0, 0b11, 1}};
    JointPmf pmf(std::move(vars), testkit::dsbs3_pmf(0.1, 0.2).probs());
    CHECK(validate_markov(pmf, demands).ok);
  }

  SUBCASE("BSC auxiliary of the observed source factors") {
    JointPmf pmf = helper_joint_pmf(0.1, 0.2, {0.15, 0.1}, 2);
    MarkovCheck check = validate_markov(pmf, demands);
    CHECK(check.ok);
    CHECK(check.worst_abs_err < 1e-12);
  }

  SUBCASE("auxiliary copying a different source violates the factorization") {
    // U labeled as source 0's auxiliary but deterministically equal to X1.
    std::vector<Variable> vars = {{"X0", VarRole::Source, 0, 0, 2},
                                  {"X1", VarRole::Source, 1, 0, 2},
                                  {"X2", VarRole::Source, 2, 0, 2},
                                  {"U", VarRole::Auxiliary, 0, 0b01, 2}};
    JointPmf base = testkit::dsbs3_pmf(0.1, 0.2);
    std::vector<double> probs(16, 0.0);
    for (int x0 = 0; x0 < 2; ++x0)
      for (int x1 = 0; x1 < 2; ++x1)
        for (int x2 = 0; x2 < 2; ++x2)
          probs[static_cast<std::size_t>(((x0 * 2 + x1) * 2 + x2) * 2 + x1)] =
              base.probs()[static_cast<std::size_t>(x0 * 4 + x1 * 2 + x2)];
    JointPmf pmf(std::move(vars), std::move(probs));
    MarkovCheck check = validate_markov(pmf, demands);
    CHECK_FALSE(check.ok);
    CHECK(check.worst_sink == 1);
    CHECK(check.worst_abs_err > 1e-3);
    CHECK(check.summary().find("violated") != std::string::npos);
  }

  SUBCASE("auxiliary without a valid origin is rejected") {
    std::vector<Variable> vars = {{"X0", VarRole::Source, 0, 0, 2},
                                  {"X1", VarRole::Source, 1, 0, 2},
                                  {"X2", VarRole::Source, 2, 0, 2},
                                  {"U", VarRole::Auxiliary, 7, 0b01, 1}};
    JointPmf pmf(std::move(vars), testkit::dsbs3_pmf(0.1, 0.2).probs());
    CHECK_THROWS_AS(validate_markov(pmf, demands), ValidationError);
  }
}

TEST_CASE("entropy identities on random pmfs") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 60; ++t) {
    JointPmf pmf = testkit::random_pmf(rng, 3, 3);
    const VarSubset a{0}, b{1}, c{2};

    // chain rule
    double lhs = pmf.entropy(VarSubset{0, 1});
    double rhs = pmf.entropy(a) + pmf.cond_entropy(b, a);
    CHECK(std::abs(lhs - rhs) < 1e-9);

    // conditioning reduces entropy
    CHECK(pmf.cond_entropy(a, b) <= pmf.entropy(a) + 1e-12);

    // nonnegativity and the mutual-information identity
    double mi = pmf.mutual_info(a, b, c);
    CHECK(mi >= 0.0);
    CHECK(std::abs(pmf.mutual_info(a, b, {}) -
                   (pmf.entropy(a) - pmf.cond_entropy(a, b))) < 1e-9);

    // computing on a marginal equals computing on the full table
    JointPmf marg = pmf.marginalize(VarSubset{0, 1});
    CHECK(std::abs(marg.cond_entropy(VarSubset{0}, VarSubset{1}) - pmf.cond_entropy(a, b)) <
          1e-9);
  }
}

TEST_SUITE_END();
