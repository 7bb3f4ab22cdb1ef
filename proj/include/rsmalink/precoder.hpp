#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "channel.hpp"
#include "common.hpp"
#include "sysmodel.hpp"

// Max-min-fair precoder design over sampled imperfect-CSIT channels.
//
// The objective is min_m (C_m + r_bar_m), where r_bar_m averages the worst
// private rate inside group m over the sampled channels and the common-rate
// split C_m is budgeted by the averaged worst-case common rate.  Rates are
// nonconvex in the precoders, so the search alternates two moves:
//
//   1. a convex subproblem built from first-order expansions of the per-user
//      average rates about the current iterate, solved by a log-barrier
//      Newton method under the exact quadratic power constraints and a trust
//      region on the precoder displacement;
//   2. an acceptance test on the true sampled objective with step
//      backtracking and trust-region adaptation.
//
// Only improving steps are kept, so the recorded objective trace never
// decreases.  The split {C_m} is re-derived in closed form (water level over
// group deficits) after every accepted step and again for the final report.

namespace rsmalink {

enum class Initialization { MrtSvd, Random };

struct OptimizerConfig {
  int num_sample_channels = 1000;
  int max_iterations = 200;
  double convergence_epsilon = 1e-4;  // bps/Hz gain below which iteration stops
  Strategy strategy = Strategy::RSMA;
  Initialization initialization = Initialization::MrtSvd;

  void validate() const {
    if (num_sample_channels < 1) throw ConfigError("num_sample_channels must be >= 1");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (!(convergence_epsilon > 0.0)) throw ConfigError("convergence_epsilon must be > 0");
  }
};

struct OptimizeResult {
  PrecoderSet precoders;
  AverageRates rates;
  bool converged = false;               // false: stopped only by the iteration cap
  std::vector<double> objective_trace;  // start value plus one entry per accepted step
};

namespace precoder_detail {

// Split a nonnegative common-rate budget across groups to maximize
// min_m (C_m + r_m): lift the weakest groups to a shared water level t with
// sum_m max(0, t - r_m) = budget.
inline rvec waterfill_split(double budget, const rvec& r) {
  const int m = (int)r.size();
  if (!(budget > 0.0)) return rvec::Zero(m);
  double lo = r.minCoeff();
  double hi = lo + budget;
  for (int it = 0; it < 200; ++it) {
    const double t = 0.5 * (lo + hi);
    ((t - r.array()).max(0.0).sum() > budget ? hi : lo) = t;
  }
  rvec c = (0.5 * (lo + hi) - r.array()).max(0.0).matrix();
  // hand the bisection residual to the weakest group so the budget is spent
  // exactly (and never exceeded)
  int w = 0;
  (c + r).minCoeff(&w);
  c(w) += budget - c.sum();
  return c.cwiseMax(0.0);
}

inline std::vector<cmat> draw_samples(const cmat& hhat, const SystemConfig& cfg, int count,
                                      std::uint64_t seed) {
  const double err_var = std::pow(cfg.power.total_budget(), -cfg.csit_alpha);
  std::vector<cmat> out;
  out.reserve(count);
  for (int l = 0; l < count; ++l)
    out.push_back(hhat + gen_error_matrix((int)hhat.rows(), (int)hhat.cols(), err_var,
                                          derive_seed(seed, "csit-draw", l)));
  return out;
}

// Columns of w are the active streams: [p_c | p_1 .. p_M] with a common
// stream, [p_1 .. p_M] without one.
struct SampledStats {
  double objective = 0.0;
  double common_rate = 0.0;  // mean over samples of min_k R_{c,k}
  rvec group_private;        // mean over samples of min_{k in group m} R_k
  rvec split;                // water-filled C_m, zero without a common stream
};

inline SampledStats eval_sampled(const cmat& w, bool common, const std::vector<cmat>& samples,
                                 const SystemConfig& cfg) {
  const int m = cfg.num_groups;
  const int off = common ? 1 : 0;
  const double nv = cfg.noise_variance;
  const double inf = std::numeric_limits<double>::infinity();
  double rc_acc = 0.0;
  rvec rm_acc = rvec::Zero(m);
  for (const cmat& h : samples) {
    const cmat u = w.adjoint() * h;  // u(j, k) = p_j^H h_k
    double rc_min = inf;
    rvec rm = rvec::Constant(m, inf);
    for (int k = 0; k < cfg.num_users; ++k) {
      double priv = 0.0;
      for (int j = off; j < u.rows(); ++j) priv += std::norm(u(j, k));
      const double tp = priv + nv;
      const double own = std::norm(u(off + cfg.group_map[k], k));
      const double rk = std::log2(tp / (tp - own));
      rm(cfg.group_map[k]) = std::min(rm(cfg.group_map[k]), rk);
      if (common) rc_min = std::min(rc_min, std::log2((std::norm(u(0, k)) + tp) / tp));
    }
    if (common) rc_acc += rc_min;
    rm_acc += rm;
  }
  SampledStats st;
  st.group_private = rm_acc / (double)samples.size();
  if (common) {
    st.common_rate = rc_acc / (double)samples.size();
    st.split = waterfill_split(st.common_rate, st.group_private);
    st.objective = (st.split + st.group_private).minCoeff();
  } else {
    st.split = rvec::Zero(m);
    st.objective = st.group_private.minCoeff();
  }
  return st;
}

// Per-user average rates and their gradients with respect to the conjugate
// precoder coordinates; the real directional derivative along a displacement
// dp is 2 Re sum_ij conj(G(i,j)) dp(i,j).
struct LinearModel {
  rvec common_rate_per_user;
  rvec private_rate_per_user;
  std::vector<cmat> common_grad;
  std::vector<cmat> private_grad;
};

inline LinearModel linearize_sampled(const cmat& w, bool common, const std::vector<cmat>& samples,
                                     const SystemConfig& cfg) {
  const int kUsers = cfg.num_users;
  const int off = common ? 1 : 0;
  const double nv = cfg.noise_variance;
  const double inv_ln2 = 1.0 / std::log(2.0);
  LinearModel lm;
  lm.private_rate_per_user = rvec::Zero(kUsers);
  lm.private_grad.assign(kUsers, cmat::Zero(w.rows(), w.cols()));
  if (common) {
    lm.common_rate_per_user = rvec::Zero(kUsers);
    lm.common_grad.assign(kUsers, cmat::Zero(w.rows(), w.cols()));
  }
  for (const cmat& h : samples) {
    const cmat u = w.adjoint() * h;
    for (int k = 0; k < kUsers; ++k) {
      const auto hk = h.col(k);
      double priv = 0.0;
      for (int j = off; j < u.rows(); ++j) priv += std::norm(u(j, k));
      const double tp = priv + nv;
      const int ownj = off + cfg.group_map[k];
      const double intf = tp - std::norm(u(ownj, k));
      lm.private_rate_per_user(k) += std::log2(tp / intf);
      // d |h^H p_j|^2 / d conj(p_j) = h (h^H p_j) = h conj(u_j)
      for (int j = off; j < u.rows(); ++j) {
        const double f = j == ownj ? inv_ln2 / tp : inv_ln2 * (1.0 / tp - 1.0 / intf);
        lm.private_grad[k].col(j) += (f * std::conj(u(j, k))) * hk;
      }
      if (common) {
        const double tc = std::norm(u(0, k)) + tp;
        lm.common_rate_per_user(k) += std::log2(tc / tp);
        lm.common_grad[k].col(0) += (inv_ln2 / tc * std::conj(u(0, k))) * hk;
        const double f = inv_ln2 * (1.0 / tc - 1.0 / tp);
        for (int j = 1; j < u.rows(); ++j)
          lm.common_grad[k].col(j) += (f * std::conj(u(j, k))) * hk;
      }
    }
  }
  const double inv = 1.0 / (double)samples.size();
  lm.private_rate_per_user *= inv;
  for (auto& g : lm.private_grad) g *= inv;
  if (common) {
    lm.common_rate_per_user *= inv;
    for (auto& g : lm.common_grad) g *= inv;
  }
  return lm;
}

// One convex constraint x' diag(quad) x + lin . x + off <= 0; quad is empty
// for affine constraints.
struct Constraint {
  rvec quad;
  rvec lin;
  double off = 0.0;

  double value(const rvec& x) const {
    double v = lin.dot(x) + off;
    if (quad.size()) v += x.cwiseProduct(quad).dot(x);
    return v;
  }
};

// Real coordinates: stream j, antenna i occupies slots 2(j nt + i) and
// 2(j nt + i) + 1 for the real and imaginary parts of the displacement, then
// the split variables (when a common stream exists), then the epigraph t.
inline void add_rate_coeffs(rvec& lin, const cmat& g, double sign) {
  const int nt = (int)g.rows();
  for (int j = 0; j < g.cols(); ++j)
    for (int i = 0; i < nt; ++i) {
      lin(2 * (j * nt + i)) += sign * 2.0 * g(i, j).real();
      lin(2 * (j * nt + i) + 1) += sign * 2.0 * g(i, j).imag();
    }
}

// Maximize t subject to the linearized rate constraints, the exact power
// constraints, C >= 0, and a trust region, via a log-barrier Newton method.
// Returns false when no strictly interior start exists (degenerate iterate).
inline bool solve_subproblem(const cmat& w0, bool common, const LinearModel& lm,
                             const SystemConfig& cfg, const rvec& split0, double radius,
                             cmat* step) {
  const int nt = (int)w0.rows();
  const int streams = (int)w0.cols();
  const int m = cfg.num_groups;
  const int ndp = 2 * nt * streams;
  const int n = ndp + (common ? m : 0) + 1;
  const int ti = n - 1;
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<Constraint> cons;
  if (common) {
    // split budget per user: sum_m C_m <= linearized average common rate
    for (int k = 0; k < cfg.num_users; ++k) {
      Constraint c;
      c.lin = rvec::Zero(n);
      for (int j = 0; j < m; ++j) c.lin(ndp + j) = 1.0;
      add_rate_coeffs(c.lin, lm.common_grad[k], -1.0);
      c.off = -lm.common_rate_per_user(k);
      cons.push_back(std::move(c));
    }
    for (int j = 0; j < m; ++j) {
      Constraint c;
      c.lin = rvec::Zero(n);
      c.lin(ndp + j) = -1.0;
      cons.push_back(std::move(c));
    }
  }
  // epigraph: t <= C_m + linearized average private rate of each group member
  for (int k = 0; k < cfg.num_users; ++k) {
    Constraint c;
    c.lin = rvec::Zero(n);
    c.lin(ti) = 1.0;
    if (common) c.lin(ndp + cfg.group_map[k]) = -1.0;
    add_rate_coeffs(c.lin, lm.private_grad[k], -1.0);
    c.off = -lm.private_rate_per_user(k);
    cons.push_back(std::move(c));
  }
  // transmit power, exact quadratics, one per shaping diagonal
  for (size_t l = 0; l < cfg.power.shaping.size(); ++l) {
    Constraint c;
    c.quad = rvec::Zero(n);
    c.lin = rvec::Zero(n);
    double used = 0.0;
    for (int j = 0; j < streams; ++j)
      for (int i = 0; i < nt; ++i) {
        const double d = cfg.power.shaping[l](i);
        c.quad(2 * (j * nt + i)) = d;
        c.quad(2 * (j * nt + i) + 1) = d;
        c.lin(2 * (j * nt + i)) = 2.0 * d * w0(i, j).real();
        c.lin(2 * (j * nt + i) + 1) = 2.0 * d * w0(i, j).imag();
        used += d * std::norm(w0(i, j));
      }
    c.off = used - cfg.power.limits[l];
    cons.push_back(std::move(c));
  }
  {
    Constraint c;
    c.quad = rvec::Zero(n);
    c.lin = rvec::Zero(n);
    c.quad.head(ndp).setOnes();
    c.off = -radius * radius;
    cons.push_back(std::move(c));
  }

  // strictly interior start: pull the precoders slightly toward the origin
  // (opens the power slacks without leaving the trust region), seed the split
  // well inside its budget, put t just under the weakest rate bound
  rvec x = rvec::Zero(n);
  const double wnorm = w0.norm();
  const double pull = std::min(1e-6, wnorm > 0.0 ? 0.25 * radius / wnorm : 1e-6);
  for (int j = 0; j < streams; ++j)
    for (int i = 0; i < nt; ++i) {
      x(2 * (j * nt + i)) = -pull * w0(i, j).real();
      x(2 * (j * nt + i) + 1) = -pull * w0(i, j).imag();
    }
  if (common) {
    const double budget = lm.common_rate_per_user.minCoeff();
    if (!(budget > 0.0)) return false;
    for (int j = 0; j < m; ++j) x(ndp + j) = std::max(split0(j), 1e-9 * budget + 1e-300);
    const double cap = 0.9 * budget;
    const double s = x.segment(ndp, m).sum();
    if (s > cap) x.segment(ndp, m) *= cap / s;
  }
  double tcap = inf;
  for (const Constraint& c : cons)
    if (c.lin(ti) != 0.0) tcap = std::min(tcap, -c.value(x));
  x(ti) = tcap - 1e-3 * (1.0 + std::abs(tcap));
  for (const Constraint& c : cons)
    if (!(c.value(x) < 0.0)) return false;

  const auto barrier = [&](const rvec& y, double muinv) {
    double f = -muinv * y(ti);
    for (const Constraint& c : cons) {
      const double s = -c.value(y);
      if (!(s > 0.0)) return inf;
      f -= std::log(s);
    }
    return f;
  };

  rvec grad(n), cg(n);
  Eigen::MatrixXd hess(n, n);
  for (double muinv = 1.0; muinv < 2e8; muinv *= 10.0) {
    for (int nit = 0; nit < 50; ++nit) {
      grad.setZero();
      hess.setZero();
      grad(ti) = -muinv;
      for (const Constraint& c : cons) {
        const double s = -c.value(x);
        cg = c.lin;
        if (c.quad.size()) {
          cg += 2.0 * c.quad.cwiseProduct(x);
          hess.diagonal() += (2.0 / s) * c.quad;
        }
        grad += cg / s;
        hess.noalias() += (cg / s) * (cg / s).transpose();
      }
      hess.diagonal().array() += 1e-12 * (1.0 + hess.diagonal().maxCoeff());
      const rvec dx = Eigen::LDLT<Eigen::MatrixXd>(hess).solve(-grad);
      const double dec = -grad.dot(dx);
      if (!(dec > 1e-10)) break;
      const double f0 = barrier(x, muinv);
      double ssz = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 60; ++bt) {
        const rvec y = x + ssz * dx;
        if (barrier(y, muinv) <= f0 - 0.25 * ssz * dec) {
          x = y;
          moved = true;
          break;
        }
        ssz *= 0.5;
      }
      if (!moved) break;
    }
  }

  step->resize(nt, streams);
  for (int j = 0; j < streams; ++j)
    for (int i = 0; i < nt; ++i)
      (*step)(i, j) = cplx(x(2 * (j * nt + i)), x(2 * (j * nt + i) + 1));
  return step->allFinite();
}

// Largest uniform scale keeping w inside every power limit with the given
// relative margin; infinity when w spends no power at all.
inline double feasibility_scale(const cmat& w, const PowerConstraintSet& pc, double margin) {
  const rvec row_power = w.cwiseAbs2().rowwise().sum();
  double f = std::numeric_limits<double>::infinity();
  for (size_t l = 0; l < pc.shaping.size(); ++l) {
    const double used = pc.shaping[l].dot(row_power);
    if (used > 0.0) f = std::min(f, std::sqrt(pc.limits[l] * (1.0 - margin) / used));
  }
  return f;
}

inline cmat init_precoders(const cmat& hhat, const SystemConfig& cfg, bool common,
                           Initialization kind, std::uint64_t seed) {
  const int m = cfg.num_groups;
  const int off = common ? 1 : 0;
  cmat w(cfg.nt, m + off);
  if (kind == Initialization::Random) {
    std::mt19937_64 rng(derive_seed(seed, "init", 0));
    for (int j = 0; j < w.cols(); ++j)
      for (int i = 0; i < cfg.nt; ++i) w(i, j) = detail::randcn(rng, 1.0);
  } else {
    // beamform along the dominant left singular direction of each group's
    // member columns; the common stream along that of the whole estimate;
    // power split half common, half equally across groups
    const double priv_w = std::sqrt((common ? 0.5 : 1.0) / m);
    for (int g = 0; g < m; ++g) {
      const std::vector<int> members = cfg.users_in_group(g);
      cmat hg(cfg.nt, (int)members.size());
      for (size_t i = 0; i < members.size(); ++i) hg.col(i) = hhat.col(members[i]);
      Eigen::JacobiSVD<cmat> svd(hg, Eigen::ComputeThinU);
      w.col(off + g) = svd.matrixU().col(0) * priv_w;
    }
    if (common) {
      Eigen::JacobiSVD<cmat> svd(hhat, Eigen::ComputeThinU);
      w.col(0) = svd.matrixU().col(0) * std::sqrt(0.5);
    }
  }
  const double f = feasibility_scale(w, cfg.power, 1e-9);
  return std::isfinite(f) ? cmat(w * f) : w;
}

struct StrategyRun {
  cmat w;
  bool common = false;
  std::vector<double> trace;
  bool converged = false;
};

inline StrategyRun optimize_strategy(const cmat& hhat, const SystemConfig& cfg,
                                     const OptimizerConfig& opt, std::uint64_t seed, bool common,
                                     const cmat* warm) {
  const std::vector<cmat> samples =
      draw_samples(hhat, cfg, opt.num_sample_channels, derive_seed(seed, "design", 0));
  cmat w;
  if (warm) {
    w = *warm;
    const double f = feasibility_scale(w, cfg.power, 1e-9);
    if (std::isfinite(f)) w *= f;
  } else {
    w = init_precoders(hhat, cfg, common, opt.initialization, seed);
  }
  SampledStats cur = eval_sampled(w, common, samples, cfg);
  StrategyRun run;
  run.common = common;
  run.trace.push_back(cur.objective);
  const double dmax = std::sqrt(cfg.power.total_budget());
  double radius = 0.25 * dmax;
  for (int it = 0; it < opt.max_iterations; ++it) {
    const LinearModel lm = linearize_sampled(w, common, samples, cfg);
    bool accepted = false;
    double accepted_beta = 0.0;
    SampledStats next;
    cmat wn;
    for (int shrink = 0; shrink < 14 && !accepted; ++shrink) {
      cmat step;
      if (solve_subproblem(w, common, lm, cfg, cur.split, radius, &step)) {
        // take the best fraction of the proposed displacement; every
        // fraction stays feasible because the constraints are convex
        for (double beta : {1.0, 0.5, 0.25, 0.1}) {
          const cmat cand = w + beta * step;
          const SampledStats st = eval_sampled(cand, common, samples, cfg);
          if (st.objective > cur.objective &&
              (!accepted || st.objective > next.objective)) {
            accepted = true;
            accepted_beta = beta;
            next = st;
            wn = cand;
          }
        }
      }
      if (!accepted) {
        radius *= 0.2;
        if (radius < 1e-8 * dmax) break;
      }
    }
    if (!accepted) {
      run.converged = true;
      break;
    }
    const double gain = next.objective - cur.objective;
    w.swap(wn);
    cur = next;
    run.trace.push_back(cur.objective);
    // widen the region only when the full step won; tighten toward the
    // scale where progress actually happened on fractional acceptance
    if (accepted_beta == 1.0)
      radius = std::min(radius * 1.6, dmax);
    else if (accepted_beta < 0.25)
      radius *= 0.5;
    if (gain < opt.convergence_epsilon) {
      run.converged = true;
      break;
    }
  }
  run.w = w;
  return run;
}

}  // namespace precoder_detail

// Monte-Carlo average rates of a fixed precoder set: sample H = Hhat + error,
// average the per-realization worst-case common rate and per-group worst
// private rates.  The split is taken from the set unchanged.
inline AverageRates average_rates(const PrecoderSet& pre, const cmat& hhat,
                                  const SystemConfig& cfg, int num_samples, std::uint64_t seed) {
  cfg.validate();
  require_dims(pre, cfg.nt, cfg.num_groups);
  if (hhat.rows() != cfg.nt || hhat.cols() != cfg.num_users)
    throw ConfigError("channel estimate dimensions do not match the configuration");
  if (num_samples < 1) throw ConfigError("num_samples must be >= 1");
  const std::vector<cmat> samples = precoder_detail::draw_samples(hhat, cfg, num_samples, seed);
  cmat w(cfg.nt, cfg.num_groups + 1);
  w.col(0) = pre.common;
  w.rightCols(cfg.num_groups) = pre.privates;
  const auto st = precoder_detail::eval_sampled(w, true, samples, cfg);
  AverageRates ar;
  ar.common_rate = st.common_rate;
  ar.group_private = st.group_private;
  ar.common_split = pre.common_split;
  return ar;
}

// Max-min-fair precoder optimization for the configured strategy.  The
// search with a common stream also runs the private-only search and keeps
// whichever reports the better objective, so its result never falls below
// the private-only one on the same instance and seed.
inline OptimizeResult optimize_mmf(const cmat& hhat, const SystemConfig& cfg,
                                   const OptimizerConfig& opt, std::uint64_t seed) {
  cfg.validate();
  opt.validate();
  if (hhat.rows() != cfg.nt || hhat.cols() != cfg.num_users)
    throw ConfigError("channel estimate dimensions do not match the configuration");

  const auto finish = [&](const precoder_detail::StrategyRun& run) {
    OptimizeResult r;
    r.precoders.common = run.common ? cvec(run.w.col(0)) : cvec(cvec::Zero(cfg.nt));
    r.precoders.privates = run.w.rightCols(cfg.num_groups);
    r.precoders.common_split = rvec::Zero(cfg.num_groups);
    AverageRates ar = average_rates(r.precoders, hhat, cfg, opt.num_sample_channels,
                                    derive_seed(seed, "report", 0));
    // re-derive the split on the reported averages so that sum_m C_m stays
    // within the reported common rate
    if (r.precoders.is_common_active()) {
      const rvec split = precoder_detail::waterfill_split(ar.common_rate, ar.group_private);
      r.precoders.common_split = split;
      ar.common_split = split;
    }
    r.rates = ar;
    r.converged = run.converged;
    r.objective_trace = run.trace;
    return r;
  };

  if (opt.strategy == Strategy::SDMA)
    return finish(precoder_detail::optimize_strategy(hhat, cfg, opt, seed, false, nullptr));
  OptimizeResult with_common =
      finish(precoder_detail::optimize_strategy(hhat, cfg, opt, seed, true, nullptr));
  OptimizeResult private_only =
      finish(precoder_detail::optimize_strategy(hhat, cfg, opt, seed, false, nullptr));
  return with_common.rates.mmf() >= private_only.rates.mmf() ? with_common : private_only;
}

struct CurvePoint {
  double snr_db = 0.0;
  double rsma_mmf = 0.0;
  double sdma_mmf = 0.0;
};

// Shannon-bound curve: per SNR point, optimize both strategies with the power
// budget set to snr * noise_variance (sum transmit power over the noise
// floor) and report the max-min-fair objectives.  Each point warm-starts from
// the previous solution rescaled to the new budget.
inline std::vector<CurvePoint> shannon_curve(const cmat& hhat, const SystemConfig& cfg,
                                             const OptimizerConfig& opt,
                                             const std::vector<double>& snr_grid_db,
                                             std::uint64_t seed) {
  cfg.validate();
  opt.validate();
  if (snr_grid_db.empty()) throw ConfigError("snr grid must be nonempty");
  for (size_t i = 1; i < snr_grid_db.size(); ++i)
    if (!(snr_grid_db[i] > snr_grid_db[i - 1])) throw ConfigError("snr grid must be ascending");

  std::vector<CurvePoint> out;
  out.reserve(snr_grid_db.size());
  cmat warm_r, warm_s;
  double prev_p = 0.0;
  for (size_t i = 0; i < snr_grid_db.size(); ++i) {
    SystemConfig c = cfg;
    const double p = db2lin(snr_grid_db[i]) * cfg.noise_variance;
    c.power = cfg.power.scaled_to(p);
    if (i > 0) {
      const double g = std::sqrt(p / prev_p);
      warm_r *= g;
      warm_s *= g;
    }
    const auto run_r = precoder_detail::optimize_strategy(hhat, c, opt, seed, true,
                                                          i > 0 ? &warm_r : nullptr);
    const auto run_s = precoder_detail::optimize_strategy(hhat, c, opt, seed, false,
                                                          i > 0 ? &warm_s : nullptr);
    const std::vector<cmat> fresh = precoder_detail::draw_samples(
        hhat, c, opt.num_sample_channels, derive_seed(seed, "report", 0));
    const auto rep_r = precoder_detail::eval_sampled(run_r.w, true, fresh, c);
    const auto rep_s = precoder_detail::eval_sampled(run_s.w, false, fresh, c);
    CurvePoint pt;
    pt.snr_db = snr_grid_db[i];
    pt.sdma_mmf = rep_s.objective;
    pt.rsma_mmf = std::max(rep_r.objective, rep_s.objective);
    out.push_back(pt);
    warm_r = run_r.w;
    warm_s = run_s.w;
    prev_p = p;
  }
  return out;
}

// Precoder file, self-describing text:
//
//   rsma-precoder-set v1
//   nt <N_t>
//   groups <M>
//   strategy <rsma|sdma>
//   common <re im> * N_t
//   private <m> <re im> * N_t     (one line per group)
//   split <C_m> * M
//
// All values at full double precision; the round trip is bit exact.
inline void store_precoders(const PrecoderSet& pre, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const int nt = pre.nt();
  const int m = pre.num_groups();
  char buf[40];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, " %.17g", v);
    f << buf;
  };
  f << "rsma-precoder-set v1\n";
  f << "nt " << nt << "\n";
  f << "groups " << m << "\n";
  f << "strategy " << (pre.is_common_active() ? "rsma" : "sdma") << "\n";
  f << "common";
  for (int i = 0; i < nt; ++i) {
    put(pre.common(i).real());
    put(pre.common(i).imag());
  }
  f << "\n";
  for (int j = 0; j < m; ++j) {
    f << "private " << j;
    for (int i = 0; i < nt; ++i) {
      put(pre.privates(i, j).real());
      put(pre.privates(i, j).imag());
    }
    f << "\n";
  }
  f << "split";
  for (int j = 0; j < m; ++j) put(pre.common_split(j));
  f << "\n";
  if (!f) throw std::runtime_error("write failed: " + path);
}

inline PrecoderSet load_precoders(const std::string& path, int expect_nt = -1,
                                  int expect_groups = -1) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open: " + path);
  const auto fail = [&](const std::string& why) {
    throw ConfigError("precoder file " + path + ": " + why);
  };
  const auto expect = [&](const char* word) {
    std::string tok;
    if (!(f >> tok) || tok != word) fail(std::string("expected '") + word + "'");
  };
  expect("rsma-precoder-set");
  expect("v1");
  int nt = 0, m = 0;
  std::string strat;
  expect("nt");
  f >> nt;
  expect("groups");
  f >> m;
  expect("strategy");
  f >> strat;
  if (!f || nt < 1 || m < 1) fail("bad dimensions");
  if (strat != "rsma" && strat != "sdma") fail("unknown strategy '" + strat + "'");
  if (expect_nt >= 0 && nt != expect_nt)
    fail("holds " + std::to_string(nt) + " antennas, configuration wants " +
         std::to_string(expect_nt));
  if (expect_groups >= 0 && m != expect_groups)
    fail("holds " + std::to_string(m) + " groups, configuration wants " +
         std::to_string(expect_groups));
  PrecoderSet pre;
  pre.common.resize(nt);
  pre.privates.resize(nt, m);
  pre.common_split.resize(m);
  const auto num = [&]() {
    double v = 0.0;
    if (!(f >> v)) fail("truncated or non-numeric value");
    return v;
  };
  expect("common");
  for (int i = 0; i < nt; ++i) {
    const double re = num(), im = num();
    pre.common(i) = cplx(re, im);
  }
  for (int j = 0; j < m; ++j) {
    expect("private");
    int idx = -1;
    f >> idx;
    if (!f || idx != j) fail("private vectors out of order");
    for (int i = 0; i < nt; ++i) {
      const double re = num(), im = num();
      pre.privates(i, j) = cplx(re, im);
    }
  }
  expect("split");
  for (int j = 0; j < m; ++j) pre.common_split(j) = num();
  return pre;
}

}  // namespace rsmalink
