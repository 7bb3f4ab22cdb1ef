#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <random>
#include <string>

#include "rsmalink/channel.hpp"
#include "rsmalink/precoder.hpp"

using namespace rsmalink;

namespace {

SystemConfig make_config(int nt, int users, int groups, std::vector<int> map, double power,
                         double alpha) {
  SystemConfig cfg;
  cfg.nt = nt;
  cfg.num_users = users;
  cfg.num_groups = groups;
  cfg.group_map = std::move(map);
  cfg.power = PowerConstraintSet::sum_power(power, nt);
  cfg.csit_alpha = alpha;
  return cfg;
}

PrecoderSet random_set(int nt, int groups, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  PrecoderSet pre;
  pre.common.resize(nt);
  pre.privates.resize(nt, groups);
  pre.common_split.resize(groups);
  for (int i = 0; i < nt; ++i) pre.common(i) = cplx(g(rng), g(rng));
  for (int m = 0; m < groups; ++m) {
    for (int i = 0; i < nt; ++i) pre.privates(i, m) = cplx(g(rng), g(rng));
    pre.common_split(m) = std::abs(g(rng));
  }
  return pre;
}

std::string temp_path(const char* name) {
  return std::string("precoder_test_") + name + ".txt";
}

}  // namespace

TEST_CASE("common rate split water level") {
  rvec r(3);
  r << 1.0, 2.0, 4.0;

  SECTION("budget lifts the weakest groups to a common level") {
    rvec c = precoder_detail::waterfill_split(2.0, r);
    // level t solves (t-1) + (t-2) = 2 -> t = 2.5
    REQUIRE_THAT(c(0), Catch::Matchers::WithinAbs(1.5, 1e-12));
    REQUIRE_THAT(c(1), Catch::Matchers::WithinAbs(0.5, 1e-12));
    REQUIRE(c(2) == 0.0);
    REQUIRE_THAT(c.sum(), Catch::Matchers::WithinAbs(2.0, 1e-12));
  }

  SECTION("zero or negative budget yields zero split") {
    REQUIRE(precoder_detail::waterfill_split(0.0, r).isZero(0.0));
    REQUIRE(precoder_detail::waterfill_split(-1.0, r).isZero(0.0));
  }

  SECTION("large budget lifts every group") {
    rvec c = precoder_detail::waterfill_split(30.0, r);
    const double t = (30.0 + r.sum()) / 3.0;
    for (int m = 0; m < 3; ++m)
      REQUIRE_THAT(c(m) + r(m), Catch::Matchers::WithinAbs(t, 1e-10));
  }

  SECTION("max-min optimality against a dense grid of alternatives") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    rvec priv(4);
    priv << 0.3, 1.1, 0.9, 2.0;
    const double budget = 1.7;
    rvec best = precoder_detail::waterfill_split(budget, priv);
    const double star = (best + priv).minCoeff();
    for (int trial = 0; trial < 2000; ++trial) {
      rvec c(4);
      double s = 0.0;
      for (int m = 0; m < 4; ++m) s += (c(m) = u(rng));
      c *= budget / s;
      REQUIRE((c + priv).minCoeff() <= star + 1e-9);
    }
  }
}

TEST_CASE("precoder file round trip") {
  const std::string path = temp_path("roundtrip");
  PrecoderSet pre = random_set(4, 3, 1.37, 99);

  store_precoders(pre, path);
  PrecoderSet back = load_precoders(path);

  REQUIRE(back.nt() == 4);
  REQUIRE(back.num_groups() == 3);
  REQUIRE(back.common == pre.common);
  REQUIRE(back.privates == pre.privates);
  REQUIRE(back.common_split == pre.common_split);

  SECTION("loaded set drives rate evaluation unchanged") {
    SystemConfig cfg = make_config(4, 3, 3, {0, 1, 2}, 10.0, 0.8);
    cmat h = gen_rayleigh(4, 3, 5);
    RateReport a = evaluate_group_rates(h, pre, cfg);
    RateReport b = evaluate_group_rates(h, back, cfg);
    REQUIRE(a.group_rates == b.group_rates);
    REQUIRE(a.common_rate == b.common_rate);
  }

  std::remove(path.c_str());
}

TEST_CASE("precoder file validation") {
  SECTION("dimension mismatch against the configuration") {
    const std::string path = temp_path("dims");
    store_precoders(random_set(2, 2, 1.0, 1), path);
    REQUIRE_NOTHROW(load_precoders(path, 2, 2));
    REQUIRE_THROWS_AS(load_precoders(path, 2, 4), ConfigError);
    REQUIRE_THROWS_AS(load_precoders(path, 3, 2), ConfigError);
    std::remove(path.c_str());
  }

  SECTION("malformed header") {
    const std::string path = temp_path("badheader");
    {
      std::ofstream f(path);
      f << "not-a-precoder-file v1\n";
    }
    REQUIRE_THROWS_AS(load_precoders(path), ConfigError);
    std::remove(path.c_str());
  }

  SECTION("truncated payload") {
    const std::string path = temp_path("trunc");
    {
      std::ofstream f(path);
      f << "rsma-precoder-set v1\nnt 2\ngroups 1\nstrategy rsma\ncommon 1.0 0.0\n";
    }
    REQUIRE_THROWS_AS(load_precoders(path), ConfigError);
    std::remove(path.c_str());
  }

  SECTION("missing file") {
    REQUIRE_THROWS(load_precoders("does_not_exist_anywhere.txt"));
  }
}

TEST_CASE("average rates over sampled channels") {
  SystemConfig cfg = make_config(2, 3, 3, {0, 1, 2}, 1e4, 1.0);
  cmat hhat = gen_rayleigh(2, 3, 42);

  SECTION("zero precoders give zero rates") {
    PrecoderSet zero;
    zero.common = cvec::Zero(2);
    zero.privates = cmat::Zero(2, 3);
    zero.common_split = rvec::Zero(3);
    AverageRates ar = average_rates(zero, hhat, cfg, 50, 1);
    REQUIRE(ar.common_rate == 0.0);
    REQUIRE(ar.group_private.isZero(0.0));
    REQUIRE(ar.mmf() == 0.0);
  }

  SECTION("same seed, identical report") {
    PrecoderSet pre = random_set(2, 3, 8.0, 3);
    AverageRates a = average_rates(pre, hhat, cfg, 200, 77);
    AverageRates b = average_rates(pre, hhat, cfg, 200, 77);
    REQUIRE(a.common_rate == b.common_rate);
    REQUIRE(a.group_private == b.group_private);
    AverageRates c = average_rates(pre, hhat, cfg, 200, 78);
    REQUIRE(a.common_rate != c.common_rate);
  }

  SECTION("vanishing estimation error reproduces the instantaneous rates") {
    // alpha = 1 at P = 1e4 puts the error power at 1e-4
    PrecoderSet pre;
    pre.common.resize(2);
    pre.privates.resize(2, 3);
    pre.common_split = rvec::Zero(3);
    pre.common = hhat.rowwise().sum().normalized() * std::sqrt(2e3);
    for (int m = 0; m < 3; ++m)
      pre.privates.col(m) = hhat.col(m).normalized() * std::sqrt(2e3);
    RateReport inst = evaluate_group_rates(hhat, pre, cfg);
    AverageRates ar = average_rates(pre, hhat, cfg, 10000, 5);
    REQUIRE_THAT(ar.common_rate,
                 Catch::Matchers::WithinRel(inst.common_rate, 0.01));
    for (int m = 0; m < 3; ++m)
      REQUIRE_THAT(ar.group_private(m),
                   Catch::Matchers::WithinRel(inst.group_private_rates(m), 0.01));
  }

  SECTION("input validation") {
    PrecoderSet pre = random_set(2, 3, 1.0, 9);
    REQUIRE_THROWS_AS(average_rates(pre, hhat, cfg, 0, 1), ConfigError);
    REQUIRE_THROWS_AS(average_rates(pre, gen_rayleigh(2, 4, 1), cfg, 10, 1), ConfigError);
    REQUIRE_THROWS_AS(average_rates(random_set(3, 3, 1.0, 9), hhat, cfg, 10, 1),
                      std::invalid_argument);
  }
}

TEST_CASE("optimizer configuration validation") {
  OptimizerConfig opt;
  REQUIRE_NOTHROW(opt.validate());
  opt.num_sample_channels = 0;
  REQUIRE_THROWS_AS(opt.validate(), ConfigError);
  opt.num_sample_channels = 10;
  opt.max_iterations = 0;
  REQUIRE_THROWS_AS(opt.validate(), ConfigError);
  opt.max_iterations = 5;
  opt.convergence_epsilon = 0.0;
  REQUIRE_THROWS_AS(opt.validate(), ConfigError);
}

TEST_CASE("single user, single antenna optimum is full-power transmission") {
  // scalar channel: every power split across the two streams achieves the
  // same sum, so the only optimality condition is spending the full budget
  const double p_total = 1e10;
  SystemConfig cfg = make_config(1, 1, 1, {0}, p_total, 1.0);
  cmat hhat(1, 1);
  hhat(0, 0) = cplx(0.9, 0.3);

  OptimizerConfig opt;
  opt.num_sample_channels = 200;
  opt.max_iterations = 50;

  OptimizeResult res = optimize_mmf(hhat, cfg, opt, 11);

  REQUIRE_THAT(transmit_power(res.precoders),
               Catch::Matchers::WithinRel(p_total, 1e-6));
  const double capacity = std::log2(1.0 + p_total * std::norm(hhat(0, 0)));
  RateReport inst = evaluate_group_rates(hhat, res.precoders, cfg);
  REQUIRE_THAT(inst.min_group_rate(), Catch::Matchers::WithinRel(capacity, 1e-6));
  REQUIRE(res.converged);
  REQUIRE(check_power(res.precoders, cfg.power, 1e-6 * p_total).ok);
}

TEST_CASE("private-only strategy returns no common stream") {
  SystemConfig cfg = make_config(3, 4, 2, {0, 0, 1, 1}, db2lin(15.0), 0.7);
  cfg.strategy = Strategy::SDMA;
  cmat hhat = gen_rayleigh(3, 4, 8);

  OptimizerConfig opt;
  opt.num_sample_channels = 60;
  opt.max_iterations = 15;
  opt.strategy = Strategy::SDMA;

  OptimizeResult res = optimize_mmf(hhat, cfg, opt, 3);

  REQUIRE(res.precoders.common.isZero(0.0));
  REQUIRE(res.precoders.common_split.isZero(0.0));
  REQUIRE(res.rates.common_rate == 0.0);
  REQUIRE(res.rates.mmf() > 0.0);
  REQUIRE(check_power(res.precoders, cfg.power, 1e-6 * db2lin(15.0)).ok);
}

TEST_CASE("rate-splitting search contains the private-only point") {
  OptimizerConfig opt;
  opt.num_sample_channels = 80;
  opt.max_iterations = 25;

  for (std::uint64_t inst = 0; inst < 8; ++inst) {
    SystemConfig cfg = make_config(3, 4, 2, {0, 0, 1, 1}, db2lin(18.0), 0.7);
    cmat hhat = gen_rayleigh(3, 4, 1000 + inst);

    OptimizerConfig ro = opt;
    ro.strategy = Strategy::RSMA;
    OptimizerConfig so = opt;
    so.strategy = Strategy::SDMA;

    OptimizeResult rsma = optimize_mmf(hhat, cfg, ro, 50 + inst);
    OptimizeResult sdma = optimize_mmf(hhat, cfg, so, 50 + inst);

    INFO("instance " << inst);
    REQUIRE(rsma.rates.mmf() >= sdma.rates.mmf());
    const double p = db2lin(18.0);
    REQUIRE(check_power(rsma.precoders, cfg.power, 1e-6 * p).ok);
    REQUIRE(check_power(sdma.precoders, cfg.power, 1e-6 * p).ok);
    REQUIRE(rsma.rates.common_split.minCoeff() >= 0.0);
    REQUIRE(rsma.rates.common_split.sum() <= rsma.rates.common_rate + 1e-9);
  }
}

TEST_CASE("orthogonal users in separate groups") {
  SystemConfig cfg = make_config(2, 2, 2, {0, 1}, 100.0, 1.0);
  cmat hhat = cmat::Zero(2, 2);
  hhat(0, 0) = cplx(1.2, 0.0);
  hhat(1, 1) = cplx(0.0, 0.8);

  OptimizerConfig opt;
  opt.num_sample_channels = 100;
  opt.max_iterations = 40;

  OptimizerConfig so = opt;
  so.strategy = Strategy::SDMA;
  OptimizeResult rsma = optimize_mmf(hhat, cfg, opt, 21);
  OptimizeResult sdma = optimize_mmf(hhat, cfg, so, 21);

  REQUIRE(rsma.rates.mmf() >= sdma.rates.mmf());
  // each user can get about half the budget on a clean channel
  REQUIRE(sdma.rates.mmf() > std::log2(1.0 + 50.0 * 0.64) * 0.8);
}

TEST_CASE("objective trace never decreases") {
  SystemConfig cfg = make_config(3, 3, 3, {0, 1, 2}, db2lin(20.0), 0.8);
  cmat hhat = gen_rayleigh(3, 3, 17);

  OptimizerConfig opt;
  opt.num_sample_channels = 60;
  opt.max_iterations = 40;
  opt.initialization = Initialization::Random;

  OptimizeResult res = optimize_mmf(hhat, cfg, opt, 4);

  REQUIRE(res.objective_trace.size() >= 2);
  for (size_t i = 1; i < res.objective_trace.size(); ++i)
    REQUIRE(res.objective_trace[i] >= res.objective_trace[i - 1]);
  REQUIRE(res.objective_trace.back() > res.objective_trace.front());
}

TEST_CASE("iteration cap reported as non-convergence") {
  SystemConfig cfg = make_config(3, 3, 3, {0, 1, 2}, db2lin(20.0), 0.8);
  cmat hhat = gen_rayleigh(3, 3, 17);

  OptimizerConfig opt;
  opt.num_sample_channels = 40;
  opt.initialization = Initialization::Random;

  opt.max_iterations = 1;
  OptimizeResult capped = optimize_mmf(hhat, cfg, opt, 4);
  REQUIRE_FALSE(capped.converged);
  REQUIRE(check_power(capped.precoders, cfg.power, 1e-6 * db2lin(20.0)).ok);

  opt.max_iterations = 200;
  OptimizeResult full = optimize_mmf(hhat, cfg, opt, 4);
  REQUIRE(full.converged);
  REQUIRE(full.rates.mmf() >= capped.rates.mmf() - 1e-12);
}

TEST_CASE("per-antenna power constraints are honored") {
  SystemConfig cfg = make_config(3, 3, 3, {0, 1, 2}, 1.0, 0.8);
  cfg.power = PowerConstraintSet::per_antenna(db2lin(12.0) / 3.0, 3);
  cmat hhat = gen_rayleigh(3, 3, 23);

  OptimizerConfig opt;
  opt.num_sample_channels = 50;
  opt.max_iterations = 20;

  OptimizeResult res = optimize_mmf(hhat, cfg, opt, 6);
  PowerCheck pc = check_power(res.precoders, cfg.power, 1e-6 * db2lin(12.0) / 3.0);
  REQUIRE(pc.ok);
  REQUIRE(pc.slack.size() == 3);
  REQUIRE(res.rates.mmf() > 0.0);
}

TEST_CASE("bound curve over an ascending grid") {
  SystemConfig cfg = make_config(2, 2, 2, {0, 1}, 1.0, 0.6);
  cmat hhat = gen_rayleigh(2, 2, 31);

  OptimizerConfig opt;
  opt.num_sample_channels = 60;
  opt.max_iterations = 20;

  const std::vector<double> grid = {5.0, 15.0, 25.0};
  std::vector<CurvePoint> curve = shannon_curve(hhat, cfg, opt, grid, 13);

  REQUIRE(curve.size() == 3);
  for (size_t i = 0; i < curve.size(); ++i) {
    REQUIRE(curve[i].snr_db == grid[i]);
    REQUIRE(curve[i].rsma_mmf >= curve[i].sdma_mmf - 1e-12);
    if (i > 0) {
      REQUIRE(curve[i].rsma_mmf >= curve[i - 1].rsma_mmf - 0.05);
      REQUIRE(curve[i].sdma_mmf >= curve[i - 1].sdma_mmf - 0.05);
    }
  }
  REQUIRE(curve.back().rsma_mmf > curve.front().rsma_mmf);

  SECTION("grid validation") {
    REQUIRE_THROWS_AS(shannon_curve(hhat, cfg, opt, {}, 1), ConfigError);
    REQUIRE_THROWS_AS(shannon_curve(hhat, cfg, opt, {10.0, 10.0}, 1), ConfigError);
    REQUIRE_THROWS_AS(shannon_curve(hhat, cfg, opt, {20.0, 10.0}, 1), ConfigError);
  }
}
