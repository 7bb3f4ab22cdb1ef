#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rsmalink/sysmodel.hpp"

using namespace rsmalink;

namespace {

bool near(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

PrecoderSet zero_precoders(int nt, int m) {
  PrecoderSet p;
  p.common = cvec::Zero(nt);
  p.privates = cmat::Zero(nt, m);
  p.common_split = rvec::Zero(m);
  return p;
}

struct RandomInstance {
  SystemConfig cfg;
  cmat H;
  PrecoderSet pre;
};

RandomInstance random_instance(std::mt19937_64& rng, bool with_common = true) {
  std::uniform_int_distribution<int> nt_d(2, 4), m_d(1, 3), extra_d(0, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  RandomInstance ri;
  ri.cfg.nt = nt_d(rng);
  ri.cfg.num_groups = m_d(rng);
  ri.cfg.num_users = ri.cfg.num_groups + extra_d(rng);
  ri.cfg.group_map.resize(ri.cfg.num_users);
  for (int k = 0; k < ri.cfg.num_users; ++k)
    ri.cfg.group_map[k] = k < ri.cfg.num_groups
                              ? k
                              : std::uniform_int_distribution<int>(
                                    0, ri.cfg.num_groups - 1)(rng);
  ri.cfg.power = PowerConstraintSet::sum_power(10.0, ri.cfg.nt);
  ri.cfg.validate();

  auto randn_mat = [&](int r, int c) {
    cmat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = cplx(g(rng), g(rng));
    return m;
  };
  ri.H = randn_mat(ri.cfg.nt, ri.cfg.num_users);
  ri.pre.common = with_common ? cvec(randn_mat(ri.cfg.nt, 1)) : cvec(cvec::Zero(ri.cfg.nt));
  ri.pre.privates = randn_mat(ri.cfg.nt, ri.cfg.num_groups);
  ri.pre.common_split = rvec::Zero(ri.cfg.num_groups);
  return ri;
}

}  // namespace

TEST_CASE("superposed transmit signal") {
  SECTION("single active stream passes the precoder through") {
    PrecoderSet p = zero_precoders(3, 2);
    p.common(0) = 1.0;
    cvec s(3);
    s << cplx(1, 0), cplx(0, 0), cplx(0, 0);
    cvec x = superpose(p, s);
    REQUIRE(x(0) == cplx(1, 0));
    REQUIRE(x(1) == cplx(0, 0));
    REQUIRE(x(2) == cplx(0, 0));
  }
  SECTION("all-zero symbols give the zero vector") {
    std::mt19937_64 rng(7);
    RandomInstance ri = random_instance(rng);
    cvec s = cvec::Zero(ri.cfg.num_groups + 1);
    REQUIRE(superpose(ri.pre, s).norm() == 0.0);
  }
  SECTION("two antennas, one group, hand evaluation") {
    PrecoderSet p = zero_precoders(2, 1);
    p.common << 1.0, 0.0;
    p.privates.col(0) << 0.0, 1.0;
    cvec s(2);
    s << cplx(1, 0), cplx(0, 1);
    cvec x = superpose(p, s);
    REQUIRE(x(0) == cplx(1, 0));
    REQUIRE(x(1) == cplx(0, 1));
  }
  SECTION("symbol count must be one common plus M privates") {
    PrecoderSet p = zero_precoders(2, 2);
    cvec s = cvec::Zero(2);
    REQUIRE_THROWS_AS(superpose(p, s), std::invalid_argument);
  }
}

TEST_CASE("power constraint checking") {
  SECTION("zero precoders leave full slack") {
    PrecoderSet p = zero_precoders(4, 2);
    auto res = check_power(p, PowerConstraintSet::sum_power(3.5, 4));
    REQUIRE(res.ok);
    REQUIRE(res.slack.size() == 1);
    REQUIRE(res.slack[0] == 3.5);
  }
  SECTION("tight sum power has zero slack") {
    PrecoderSet p = zero_precoders(2, 1);
    p.common << 1.0, 0.0;
    p.privates.col(0) << 0.0, 1.0;
    auto res = check_power(p, PowerConstraintSet::sum_power(2.0, 2));
    REQUIRE(res.ok);
    REQUIRE(near(res.slack[0], 0.0));
  }
  SECTION("per-antenna limits catch both hot antennas") {
    PrecoderSet p = zero_precoders(2, 1);
    p.common << 1.0, 0.0;
    p.privates.col(0) << 0.0, 1.0;
    auto res = check_power(p, PowerConstraintSet::per_antenna(0.5, 2));
    REQUIRE_FALSE(res.ok);
    REQUIRE(res.slack.size() == 2);
    REQUIRE(near(res.slack[0], -0.5));
    REQUIRE(near(res.slack[1], -0.5));
  }
  SECTION("scaled_to keeps geometry and changes total") {
    auto cons = PowerConstraintSet::per_antenna(2.0, 3).scaled_to(12.0);
    REQUIRE(near(cons.total_budget(), 12.0));
    REQUIRE(near(cons.limits[0], 4.0));
  }
}

TEST_CASE("common-stream SINR") {
  SECTION("unit signal over unit noise") {
    PrecoderSet p = zero_precoders(1, 1);
    p.common << 1.0;
    cvec h(1);
    h << 1.0;
    REQUIRE(near(sinr_common(h, p, 0, 1.0), 1.0));
  }
  SECTION("no common precoder means zero SINR") {
    std::mt19937_64 rng(13);
    RandomInstance ri = random_instance(rng, false);
    REQUIRE(sinr_common(ri.H.col(0), ri.pre, ri.cfg.group_map[0], 1.0) == 0.0);
  }
  SECTION("signal 4 over own-group 1 plus other-group 1 plus noise 1") {
    PrecoderSet p = zero_precoders(3, 2);
    p.common << 2.0, 0.0, 0.0;
    p.privates.col(0) << 0.0, 1.0, 0.0;
    p.privates.col(1) << 0.0, 0.0, 1.0;
    cvec h(3);
    h << 1.0, 1.0, 1.0;
    REQUIRE(near(sinr_common(h, p, 0, 1.0), 4.0 / 3.0));
  }
}

TEST_CASE("private-stream SINR") {
  SECTION("single group sees no inter-group interference") {
    PrecoderSet p = zero_precoders(1, 1);
    p.privates.col(0) << std::sqrt(3.0);
    cvec h(1);
    h << 1.0;
    REQUIRE(near(sinr_private(h, p, 0, 1.0), 3.0));
  }
  SECTION("orthogonal own precoder gives zero") {
    PrecoderSet p = zero_precoders(2, 1);
    p.privates.col(0) << 0.0, 1.0;
    cvec h(2);
    h << 1.0, 0.0;
    REQUIRE(sinr_private(h, p, 0, 1.0) == 0.0);
  }
  SECTION("signal 2 over interference 1 plus noise 1") {
    PrecoderSet p = zero_precoders(3, 2);
    p.privates.col(0) << std::sqrt(2.0), 0.0, 0.0;
    p.privates.col(1) << 0.0, 1.0, 0.0;
    cvec h(3);
    h << 1.0, 1.0, 0.0;
    REQUIRE(near(sinr_private(h, p, 0, 1.0), 1.0));
  }
}

TEST_CASE("group rate evaluation") {
  SystemConfig cfg;
  cfg.nt = 2;
  cfg.num_users = 2;
  cfg.num_groups = 1;
  cfg.group_map = {0, 0};
  cfg.power = PowerConstraintSet::sum_power(10.0, 2);
  cfg.validate();

  SECTION("all-zero precoders give all-zero rates") {
    cmat H = cmat::Random(2, 2);
    RateReport r = evaluate_group_rates(H, zero_precoders(2, 1), cfg);
    REQUIRE(r.common_rate == 0.0);
    REQUIRE(r.group_rates(0) == 0.0);
    REQUIRE(r.split_feasible);
  }
  SECTION("group rate is the weakest member plus its split share") {
    // User SINRs 1 and 3 on the private stream; the min gives log2(2) = 1.
    PrecoderSet p = zero_precoders(2, 1);
    p.privates.col(0) << 1.0, 0.0;
    cmat H(2, 2);
    H.col(0) << 1.0, 0.0;
    H.col(1) << std::sqrt(3.0), 0.0;
    RateReport r = evaluate_group_rates(H, p, cfg);
    REQUIRE(near(r.private_rates_per_user(0), 1.0));
    REQUIRE(near(r.private_rates_per_user(1), 2.0));
    REQUIRE(near(r.group_private_rates(0), 1.0));
    REQUIRE(near(r.group_rates(0), 1.0));
  }
  SECTION("no common stream collapses to the private-only model") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
      RandomInstance ri = random_instance(rng, false);
      RateReport r = evaluate_group_rates(ri.H, ri.pre, ri.cfg);
      REQUIRE(r.common_rate == 0.0);
      for (int m = 0; m < ri.cfg.num_groups; ++m) {
        double lo = std::numeric_limits<double>::infinity();
        for (int k : ri.cfg.users_in_group(m))
          lo = std::min(lo, rate_bps(sinr_private(ri.H.col(k), ri.pre, m,
                                                  ri.cfg.noise_variance)));
        REQUIRE(r.group_rates(m) == lo);
      }
      REQUIRE(r.split_feasible);
    }
  }
  SECTION("a split exceeding the common rate is flagged, not clipped") {
    PrecoderSet p = zero_precoders(2, 1);
    p.privates.col(0) << 1.0, 0.0;
    p.common << 0.1, 0.0;
    p.common_split << 5.0;
    cmat H(2, 2);
    H.col(0) << 1.0, 0.0;
    H.col(1) << 1.0, 0.0;
    RateReport r = evaluate_group_rates(H, p, cfg);
    REQUIRE_FALSE(r.split_feasible);
    REQUIRE(near(r.group_rates(0), 5.0 + r.group_private_rates(0)));
  }
}

TEST_CASE("SINR and rate properties on random instances") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    RandomInstance ri = random_instance(rng);
    const double s2 = ri.cfg.noise_variance;
    for (int k = 0; k < ri.cfg.num_users; ++k) {
      const cvec h = ri.H.col(k);
      const int g = ri.cfg.group_map[k];

      // Independent recomputation from the definition.
      double sig_c = std::norm(h.dot(ri.pre.common));
      double own = std::norm(h.dot(ri.pre.privates.col(g)));
      double cross = 0.0;
      for (int j = 0; j < ri.cfg.num_groups; ++j)
        if (j != g) cross += std::norm(h.dot(ri.pre.privates.col(j)));

      double gc = sinr_common(h, ri.pre, g, s2);
      double gp = sinr_private(h, ri.pre, g, s2);
      REQUIRE(gc >= 0.0);
      REQUIRE(gp >= 0.0);
      REQUIRE(std::isfinite(gc));
      REQUIRE(std::isfinite(gp));
      REQUIRE(near(gc, sig_c / (own + cross + s2), 1e-12 * (1.0 + gc)));
      REQUIRE(near(gp, own / (cross + s2), 1e-12 * (1.0 + gp)));

      // Removing the common stream before decoding the private one can only
      // help: compare against the SINR with the common power still present.
      double gp_no_sic = own / (sig_c + cross + s2);
      REQUIRE(gp >= gp_no_sic);

      // Denominator bookkeeping between the two layers.
      double denom_c = own + cross + s2;
      double denom_p = cross + s2;
      REQUIRE(near(denom_c, denom_p + own, 1e-12 * denom_c));

      // h -> 2h, p -> p/2 leaves every inner product bit-identical.
      PrecoderSet half = ri.pre;
      half.common /= 2.0;
      half.privates /= 2.0;
      REQUIRE(sinr_common(2.0 * h, half, g, s2) == gc);
      REQUIRE(sinr_private(2.0 * h, half, g, s2) == gp);

      // General nonzero real scaling holds to rounding error.
      PrecoderSet sc = ri.pre;
      sc.common /= 1.7;
      sc.privates /= 1.7;
      REQUIRE(near(sinr_common(1.7 * h, sc, g, s2), gc, 1e-9 * (1.0 + gc)));
    }

    ri.pre.common_split = rvec::Constant(ri.cfg.num_groups, 0.05);
    RateReport r = evaluate_group_rates(ri.H, ri.pre, ri.cfg);
    REQUIRE(r.common_rate == r.common_rates_per_user.minCoeff());
    for (int m = 0; m < ri.cfg.num_groups; ++m) {
      double lo = std::numeric_limits<double>::infinity();
      for (int k : ri.cfg.users_in_group(m))
        lo = std::min(lo, r.private_rates_per_user(k));
      REQUIRE(r.group_private_rates(m) == lo);
      REQUIRE(near(r.group_rates(m), lo + 0.05));
      REQUIRE(r.group_rates(m) >= 0.0);
    }
  }
}

TEST_CASE("config validation") {
  SystemConfig cfg;
  cfg.nt = 2;
  cfg.num_users = 3;
  cfg.num_groups = 2;
  cfg.group_map = {0, 1, 0};
  cfg.power = PowerConstraintSet::sum_power(1.0, 2);
  REQUIRE_NOTHROW(cfg.validate());

  SECTION("empty group rejected") {
    cfg.group_map = {0, 0, 0};
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  }
  SECTION("group index out of range rejected") {
    cfg.group_map = {0, 1, 2};
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  }
  SECTION("alpha outside [0,1] rejected") {
    cfg.csit_alpha = 1.5;
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  }
  SECTION("map size must equal user count") {
    cfg.group_map = {0, 1};
    REQUIRE_THROWS_AS(cfg.validate(), ConfigError);
  }
}
