#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "common.hpp"

// Domain types and closed-form SINR/rate math for a multigroup multicast
// downlink with one rate-split common stream and M private streams.
//
// Conventions used everywhere:
//   - channels are N_t x K, column k is user k's channel h_k
//   - received symbol model: y_k = h_k^H x + n_k
//   - group indices are 0-based internally
//   - rates are bps/Hz, log base 2

namespace rsmalink {

enum class Strategy { RSMA, SDMA };

// Linear transmit power constraints p_c^H D_l p_c + sum_m p_m^H D_l p_m <= P_l
// with diagonal shaping D_l.  Sum power is the single constraint D = I;
// per-antenna is one constraint per antenna with a single unit diagonal entry.
struct PowerConstraintSet {
  enum class Kind { SumPower, PerAntenna };

  Kind kind = Kind::SumPower;
  std::vector<rvec> shaping;   // diagonals of D_l
  std::vector<double> limits;  // P_l

  static PowerConstraintSet sum_power(double total, int nt) {
    PowerConstraintSet s;
    s.kind = Kind::SumPower;
    s.shaping.push_back(rvec::Ones(nt));
    s.limits.push_back(total);
    return s;
  }

  static PowerConstraintSet per_antenna(double per_antenna_limit, int nt) {
    PowerConstraintSet s;
    s.kind = Kind::PerAntenna;
    for (int n = 0; n < nt; ++n) {
      rvec d = rvec::Zero(nt);
      d(n) = 1.0;
      s.shaping.push_back(d);
      s.limits.push_back(per_antenna_limit);
    }
    return s;
  }

  // Total budget across constraints; the scale that defines the SNR axis and
  // the CSIT error power P^{-alpha}.
  double total_budget() const {
    return std::accumulate(limits.begin(), limits.end(), 0.0);
  }

  // Same constraint geometry, new scale.  Keeps relative limits.
  PowerConstraintSet scaled_to(double new_total) const {
    PowerConstraintSet s = *this;
    double cur = total_budget();
    for (double& p : s.limits) p *= new_total / cur;
    return s;
  }
};

struct SystemConfig {
  int nt = 1;                  // transmit antennas
  int num_users = 1;           // K
  int num_groups = 1;          // M
  std::vector<int> group_map;  // user k -> group in [0, M)
  PowerConstraintSet power = PowerConstraintSet::sum_power(1.0, 1);
  double csit_alpha = 1.0;     // CSIT quality exponent, error power P^{-alpha}
  Strategy strategy = Strategy::RSMA;
  double noise_variance = 1.0;

  void validate() const {
    if (nt < 1 || num_users < 1 || num_groups < 1)
      throw ConfigError("system dimensions must be positive");
    if (num_groups > num_users)
      throw ConfigError("more groups than users leaves a group empty");
    if ((int)group_map.size() != num_users)
      throw ConfigError("group_map must assign every user");
    std::vector<int> count(num_groups, 0);
    for (int g : group_map) {
      if (g < 0 || g >= num_groups) throw ConfigError("group index out of range");
      ++count[g];
    }
    for (int c : count)
      if (c == 0) throw ConfigError("every group needs at least one user");
    if (csit_alpha < 0.0 || csit_alpha > 1.0)
      throw ConfigError("csit_alpha must lie in [0,1]");
    if (noise_variance <= 0.0) throw ConfigError("noise variance must be positive");
    for (int n = 0; n < (int)power.shaping.size(); ++n) {
      if (power.shaping[n].size() != nt)
        throw ConfigError("power shaping dimension does not match antennas");
      if (power.limits[n] <= 0.0) throw ConfigError("power limits must be positive");
    }
  }

  std::vector<int> users_in_group(int m) const {
    std::vector<int> users;
    for (int k = 0; k < num_users; ++k)
      if (group_map[k] == m) users.push_back(k);
    return users;
  }
};

// True channel, its estimate at the transmitter, and the estimation error.
// The decomposition is exact by construction: callers build the triple so
// that H == Hhat + Htilde element-wise in floating point.
struct ChannelRealization {
  cmat H;       // N_t x K, what the receivers actually see
  cmat Hhat;    // what the precoder design sees
  cmat Htilde;  // error H - Hhat
};

struct PrecoderSet {
  cvec common;         // p_c, zero vector under SDMA
  cmat privates;       // N_t x M, column m is p_m
  rvec common_split;   // C_m >= 0, all zero under SDMA

  int num_groups() const { return (int)privates.cols(); }
  int nt() const { return (int)privates.rows(); }
  bool is_common_active() const { return common.squaredNorm() > 0.0; }
};

struct PowerCheck {
  bool ok = true;
  std::vector<double> slack;  // P_l minus used power, per constraint
};

struct RateReport {
  rvec common_rates_per_user;  // R_{c,k}
  double common_rate = 0.0;    // R_c = min_k R_{c,k}
  rvec private_rates_per_user; // R_k
  rvec group_private_rates;    // r_m = min over group members of R_k
  rvec group_rates;            // r_{g,m} = C_m + r_m
  bool split_feasible = true;  // sum_m C_m <= R_c

  double min_group_rate() const { return group_rates.minCoeff(); }
};

// Average rates over the channel ensemble at one operating point.  These are
// the link-quality metrics the rate adaptation consumes: the ensemble-mean
// min-user common rate, the ensemble-mean per-group weakest private rate, and
// the common-rate split the precoder certified.
struct AverageRates {
  double common_rate = 0.0;  // mean over realizations of min_k R_{c,k}
  rvec group_private;        // mean over realizations of r_m
  rvec common_split;         // C_m

  double mmf() const { return (common_split + group_private).minCoeff(); }
};

inline void require_dims(const PrecoderSet& pre, int nt, int m) {
  if (pre.nt() != nt || pre.common.size() != nt)
    throw std::invalid_argument("precoder antenna dimension mismatch");
  if (pre.num_groups() != m || pre.common_split.size() != m)
    throw std::invalid_argument("precoder group count mismatch");
}

// x = p_c s_c + sum_m p_m s_m.  symbols = [s_c, s_1, ..., s_M].
inline cvec superpose(const PrecoderSet& pre, const cvec& symbols) {
  if (symbols.size() != pre.num_groups() + 1)
    throw std::invalid_argument("need one common plus M private symbols");
  cvec x = pre.common * symbols(0);
  x += pre.privates * symbols.tail(pre.num_groups());
  return x;
}

inline double transmit_power(const PrecoderSet& pre) {
  return pre.common.squaredNorm() + pre.privates.squaredNorm();
}

// Per-constraint used power under diagonal shaping: sum over streams of
// p^H D p = sum_i d_i |p_i|^2.
inline PowerCheck check_power(const PrecoderSet& pre,
                              const PowerConstraintSet& cons,
                              double tolerance = 0.0) {
  PowerCheck out;
  rvec row_power = pre.common.cwiseAbs2();
  row_power += pre.privates.cwiseAbs2().rowwise().sum();
  for (size_t l = 0; l < cons.shaping.size(); ++l) {
    double used = cons.shaping[l].dot(row_power);
    double slack = cons.limits[l] - used;
    out.slack.push_back(slack);
    if (slack < -tolerance) out.ok = false;
  }
  return out;
}

inline double sinr_common(const cvec& h, const PrecoderSet& pre, int group_of_k,
                          double noise_variance) {
  (void)group_of_k;  // every private stream interferes with the common one
  double num = std::norm(h.dot(pre.common));
  double denom = noise_variance;
  for (int j = 0; j < pre.num_groups(); ++j)
    denom += std::norm(h.dot(pre.privates.col(j)));
  return num / denom;
}

// Private-stream SINR after the common stream has been removed by SIC.
inline double sinr_private(const cvec& h, const PrecoderSet& pre, int group_of_k,
                           double noise_variance) {
  double num = 0.0;
  double denom = noise_variance;
  for (int j = 0; j < pre.num_groups(); ++j) {
    double p = std::norm(h.dot(pre.privates.col(j)));
    if (j == group_of_k)
      num = p;
    else
      denom += p;
  }
  return num / denom;
}

inline double rate_bps(double sinr) { return std::log2(1.0 + sinr); }

// Shannon rates of a precoder set on one channel: per-user rates for both
// stream layers, group minima, and the split-augmented group rates.
// An infeasible split (sum C_m > R_c) is reported through the flag rather
// than clipped; callers that certify precoders must reject such sets.
inline RateReport evaluate_group_rates(const cmat& H, const PrecoderSet& pre,
                                       const SystemConfig& cfg) {
  if (H.cols() != cfg.num_users || H.rows() != cfg.nt)
    throw std::invalid_argument("channel dimensions disagree with config");
  require_dims(pre, cfg.nt, cfg.num_groups);

  RateReport r;
  r.common_rates_per_user.resize(cfg.num_users);
  r.private_rates_per_user.resize(cfg.num_users);
  for (int k = 0; k < cfg.num_users; ++k) {
    const cvec h = H.col(k);
    int g = cfg.group_map[k];
    r.common_rates_per_user(k) = rate_bps(sinr_common(h, pre, g, cfg.noise_variance));
    r.private_rates_per_user(k) = rate_bps(sinr_private(h, pre, g, cfg.noise_variance));
  }
  r.common_rate = r.common_rates_per_user.minCoeff();

  r.group_private_rates = rvec::Constant(cfg.num_groups,
                                         std::numeric_limits<double>::infinity());
  for (int k = 0; k < cfg.num_users; ++k) {
    int g = cfg.group_map[k];
    r.group_private_rates(g) = std::min(r.group_private_rates(g),
                                        r.private_rates_per_user(k));
  }
  r.group_rates = pre.common_split + r.group_private_rates;
  r.split_feasible = pre.common_split.sum() <= r.common_rate + 1e-12;
  return r;
}

}  // namespace rsmalink
