#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rsmalink/amc.hpp"
#include "rsmalink/channel.hpp"
#include "rsmalink/common.hpp"
#include "rsmalink/phy.hpp"
#include "rsmalink/precoder.hpp"
#include "rsmalink/sysmodel.hpp"

namespace rsmalink {

enum class OperatingAxis { SnrDb, PerAntennaPowerDbw };
enum class ChannelKind { Rayleigh, Satellite };

struct ChannelConfig {
  ChannelKind kind = ChannelKind::Rayleigh;
  SatelliteParams satellite;  // used only when kind == Satellite
};

struct CampaignConfig {
  SystemConfig system;      // power field fixes the constraint geometry; the
                            // operating point rescales its total per point
  ChannelConfig channel;
  AmcConfig amc;            // symbols_per_frame is overridden by S below
  OptimizerConfig optimizer;

  int num_realizations = 100;             // L_mc
  int channel_uses_per_realization = 256; // S
  std::vector<double> operating_points;   // dB values on the chosen axis
  OperatingAxis axis = OperatingAxis::SnrDb;
  std::uint64_t master_seed = 1;

  int list_size = 8;  // SCL decoder list size for every stream

  // One estimate per operating point is the default; the flag redraws the
  // estimate (and re-optimizes) per realization as a sensitivity check.
  bool redraw_estimate = false;

  bool calibrate_backoff = false;
  bool calibrate_per_class = false;  // full common x private grid when set
  std::vector<double> backoff_grid_db = {0.0, 0.5, 1.0, 1.5, 2.0,
                                         2.5, 3.0, 3.5, 4.0};
  double target_bler = 0.1;

  // Nonempty: load this precoder set per point (rescaled to the point's
  // budget) instead of running the optimizer.
  std::string precoder_load_path;

  void validate() const {
    system.validate();
    amc.validate();
    optimizer.validate();
    if (num_realizations < 1) throw ConfigError("need at least one realization");
    if (channel_uses_per_realization < 1)
      throw ConfigError("need at least one channel use per realization");
    if (operating_points.empty()) throw ConfigError("operating point grid is empty");
    if (list_size < 1) throw ConfigError("list size must be positive");
    if (target_bler <= 0.0 || target_bler > 1.0)
      throw ConfigError("target BLER must lie in (0,1]");
    if (calibrate_backoff && backoff_grid_db.empty())
      throw ConfigError("backoff grid is empty");
    for (double b : backoff_grid_db)
      if (b < 0.0) throw ConfigError("backoff cannot be negative");
    if (channel.kind == ChannelKind::Satellite) {
      if (channel.satellite.num_beams != system.nt ||
          channel.satellite.num_users() != system.num_users)
        throw ConfigError("satellite geometry disagrees with system dimensions");
    }
  }
};

// Raw log of one realization; everything downstream (throughput, BLER) is a
// pure recount of these.
struct RealizationRecord {
  std::vector<int> bits;                 // exactly recovered info bits per user
  std::vector<std::uint8_t> common_ok;   // decoded common matches; 1 when the
                                         // user has no common portion assigned
  std::vector<std::uint8_t> private_ok;  // own-group private matches; 1 when
                                         // that stream carries no data
  std::vector<std::uint8_t> block_error; // any stream the user needed failed
  int channel_uses = 0;                  // S for this realization
};

// MMF throughput over a batch of realizations: weakest user's recovered bits
// per channel use.
inline double mmf_throughput(const std::vector<RealizationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no realizations to aggregate");
  const int k = (int)records.front().bits.size();
  long long uses = 0;
  std::vector<long long> bits(k, 0);
  for (const RealizationRecord& r : records) {
    uses += r.channel_uses;
    for (int u = 0; u < k; ++u) bits[u] += r.bits[u];
  }
  long long worst = *std::min_element(bits.begin(), bits.end());
  return (double)worst / (double)uses;
}

inline std::vector<double> bler_per_user(const std::vector<RealizationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no realizations to aggregate");
  const int k = (int)records.front().bits.size();
  std::vector<double> bler(k, 0.0);
  for (const RealizationRecord& r : records)
    for (int u = 0; u < k; ++u) bler[u] += r.block_error[u] ? 1.0 : 0.0;
  for (double& b : bler) b /= (double)records.size();
  return bler;
}

namespace sim_detail {

inline std::vector<std::uint8_t> random_bits(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> bits(n);
  for (int i = 0; i < n; ++i) bits[i] = (std::uint8_t)(rng() & 1u);
  return bits;
}

inline bool carries_data(const StreamMcs& s) { return s.enabled && s.payload > 0; }

inline StreamPhyConfig build_phy(const StreamMcs& s, int list_size,
                                 std::uint64_t interleave_seed) {
  // BEC-proxy construction with the erasure rate matched to the code rate.
  const double eps = std::clamp(1.0 - s.code_rate, 0.05, 0.95);
  const int crc = s.k_total - s.payload;
  StreamPhyConfig phy{make_qam(s.order),
                      make_polar_code(s.block_len, s.payload, crc, eps, list_size),
                      interleave_seed};
  phy.validate();
  return phy;
}

}  // namespace sim_detail

// Everything one operating point needs to run realizations: precoders as
// designed, the effective on-air set (streams without data are silenced, so
// receivers and rates stay matched to what is actually transmitted), and the
// per-stream coded-modulation chains.
struct LinkSetup {
  SystemConfig cfg;        // at the point's power scale
  cmat hhat;
  PrecoderSet design;      // optimizer output, defines the Shannon-side rates
  PrecoderSet effective;   // disabled-stream columns zeroed
  McsAssignment mcs;
  StreamPhyConfig common_phy;
  std::vector<StreamPhyConfig> private_phy;  // indexed by group
  double error_var = 0.0;  // CSIT error power at this operating point
  int channel_uses = 0;    // S
};

inline LinkSetup make_link_setup(const SystemConfig& cfg, const cmat& hhat,
                                 const PrecoderSet& pre, const McsAssignment& mcs,
                                 int channel_uses, int list_size,
                                 std::uint64_t master_seed) {
  require_dims(pre, cfg.nt, cfg.num_groups);
  if (hhat.rows() != cfg.nt || hhat.cols() != cfg.num_users)
    throw std::invalid_argument("channel estimate dimensions disagree with config");
  if ((int)mcs.privates.size() != cfg.num_groups ||
      (int)mcs.common_payload_share.size() != cfg.num_groups)
    throw std::invalid_argument("MCS group count disagrees with config");

  LinkSetup link;
  link.cfg = cfg;
  link.hhat = hhat;
  link.design = pre;
  link.effective = pre;
  link.mcs = mcs;
  link.channel_uses = channel_uses;
  link.error_var = std::pow(cfg.power.total_budget(), -cfg.csit_alpha);

  auto check_frame = [channel_uses](const StreamMcs& s, const char* what) {
    if (s.block_len != channel_uses * s.bits_per_symbol)
      throw std::invalid_argument(std::string(what) +
                                  " block does not span the realization frame");
  };

  if (sim_detail::carries_data(mcs.common)) {
    check_frame(mcs.common, "common");
    link.common_phy = sim_detail::build_phy(mcs.common, list_size,
                                            derive_seed(master_seed, "ilv", 0));
  } else {
    link.effective.common.setZero();
  }
  link.private_phy.resize(cfg.num_groups);
  for (int m = 0; m < cfg.num_groups; ++m) {
    if (sim_detail::carries_data(mcs.privates[m])) {
      check_frame(mcs.privates[m], "private");
      link.private_phy[m] = sim_detail::build_phy(
          mcs.privates[m], list_size, derive_seed(master_seed, "ilv", 1 + m));
    } else {
      link.effective.privates.col(m).setZero();
    }
  }
  return link;
}

namespace sim_detail {

// Common-only receive path for users whose own private stream is silent.
inline SicResult receive_common_only(const cvec& y, const cvec& h,
                                     const PrecoderSet& pre, double noise_variance,
                                     const StreamPhyConfig& common_cfg) {
  SicResult res;
  res.residual = y;
  double total_private = 0.0;
  for (int j = 0; j < pre.num_groups(); ++j)
    total_private += std::norm(h.dot(pre.privates.col(j)));
  cplx hpc = h.dot(pre.common);
  cplx g = equalize_common(h, pre, noise_variance);
  double nu = std::norm(g) * (total_private + noise_variance);
  cvec eq = g * y;
  auto llrs = demodulate_llr(eq, common_cfg.mod, g * hpc, nu);
  auto dec = polar_decode(deinterleave(llrs, common_cfg.interleave_seed),
                          common_cfg.code);
  res.common_message = dec.message;
  res.common_crc = dec.crc_pass;
  res.residual -= hpc * transmit_stream(dec.message, common_cfg);
  return res;
}

}  // namespace sim_detail

// One Monte-Carlo realization: draw the true channel around the estimate,
// send one frame of every data-bearing stream, and run each user's receiver.
// Bits are credited only for streams whose CRC passes and whose decoded
// message equals the transmitted one.  Fully determined by (link, master
// seed, realization index); the backoff search relies on that to reuse the
// same realizations it calibrated on.
inline RealizationRecord run_realization(int realization, const LinkSetup& link,
                                         std::uint64_t master_seed) {
  const SystemConfig& cfg = link.cfg;
  const int s = link.channel_uses;
  const std::uint64_t l = (std::uint64_t)realization;
  const std::uint64_t msg_base = derive_seed(master_seed, "mc-msg", l);
  const std::uint64_t noise_base = derive_seed(master_seed, "mc-noise", l);

  const cmat h = link.hhat + gen_error_matrix(cfg.nt, cfg.num_users, link.error_var,
                                              derive_seed(master_seed, "mc-err", l));

  const bool common_data = sim_detail::carries_data(link.mcs.common);
  std::vector<std::uint8_t> common_msg;
  cmat x = cmat::Zero(cfg.nt, s);
  if (common_data) {
    common_msg = sim_detail::random_bits(link.mcs.common.payload,
                                         derive_seed(msg_base, "stream", 0));
    x += link.effective.common * transmit_stream(common_msg, link.common_phy).transpose();
  }
  std::vector<std::vector<std::uint8_t>> private_msg(cfg.num_groups);
  for (int m = 0; m < cfg.num_groups; ++m) {
    if (!sim_detail::carries_data(link.mcs.privates[m])) continue;
    private_msg[m] = sim_detail::random_bits(link.mcs.privates[m].payload,
                                             derive_seed(msg_base, "stream", 1 + m));
    x += link.effective.privates.col(m) *
         transmit_stream(private_msg[m], link.private_phy[m]).transpose();
  }

  RealizationRecord rec;
  rec.channel_uses = s;
  rec.bits.assign(cfg.num_users, 0);
  rec.common_ok.assign(cfg.num_users, 1);
  rec.private_ok.assign(cfg.num_users, 1);
  rec.block_error.assign(cfg.num_users, 0);

  for (int k = 0; k < cfg.num_users; ++k) {
    const int g = cfg.group_map[k];
    const bool private_data = sim_detail::carries_data(link.mcs.privates[g]);
    const bool needs_common = common_data && link.mcs.common_payload_share[g] > 0;
    if (!private_data && !common_data) continue;

    const cvec hk = h.col(k);
    cvec y = (hk.adjoint() * x).transpose();
    y = awgn(y, cfg.noise_variance, derive_seed(noise_base, "user", (std::uint64_t)k));

    SicResult res;
    if (private_data) {
      res = sic_receive(y, hk, link.effective, g, cfg.noise_variance,
                        common_data ? link.common_phy : link.private_phy[g],
                        link.private_phy[g]);
    } else {
      res = sim_detail::receive_common_only(y, hk, link.effective,
                                            cfg.noise_variance, link.common_phy);
    }

    if (common_data) {
      const bool ok = res.common_crc && res.common_message == common_msg;
      if (ok) rec.bits[k] += link.mcs.common_payload_share[g];
      if (link.mcs.common_payload_share[g] > 0) rec.common_ok[k] = ok ? 1 : 0;
    }
    if (private_data) {
      const bool ok = res.private_crc && res.private_message == private_msg[g];
      if (ok) rec.bits[k] += link.mcs.privates[g].payload;
      rec.private_ok[k] = ok ? 1 : 0;
    }
    rec.block_error[k] =
        (needs_common && !rec.common_ok[k]) || (private_data && !rec.private_ok[k])
            ? 1
            : 0;
  }
  return rec;
}

struct PointResult {
  double point_db = 0.0;     // grid value on the campaign axis
  double total_power = 0.0;  // linear total transmit budget
  bool valid = false;
  std::string failure;       // nonempty when !valid
  bool optimizer_converged = false;

  PrecoderSet precoders;
  AverageRates rates;        // Shannon-side ARs the MCS was chosen from
  McsAssignment mcs;
  double backoff_common_db = 0.0;
  double backoff_private_db = 0.0;
  bool backoff_target_met = false;

  std::vector<RealizationRecord> records;
  std::vector<long long> bits_total;  // per user, over all realizations
  std::vector<double> bler;
  double measured_mmf = 0.0;          // recovered-bits throughput, worst user
  double shannon_bound = 0.0;         // AR-based MMF value
  double assigned_mmf = 0.0;          // min over users of assigned bits per use
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<PointResult> points;
};

namespace sim_detail {

inline double assigned_mmf_rate(const McsAssignment& mcs, const SystemConfig& cfg,
                                int channel_uses) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cfg.num_users; ++k) {
    const int g = cfg.group_map[k];
    const double bits = (double)mcs.common_payload_share[g] +
                        (double)(mcs.privates[g].enabled ? mcs.privates[g].payload : 0);
    worst = std::min(worst, bits / (double)channel_uses);
  }
  return worst;
}

struct CandidateRun {
  BackoffCandidate stats;
  McsAssignment mcs;
  std::vector<RealizationRecord> records;
  size_t mode = 0;
};

}  // namespace sim_detail

// Full campaign: per operating point, design (or load) precoders on the
// estimate, pick the MCS, optionally calibrate the backoff on the very
// realizations that will be reported, and aggregate.  A point whose design
// step throws is kept in the output, marked invalid.  Points are mutually
// independent (every seed derives from the master and the realization
// index, never from the point index), so extra workers change nothing but
// wall time; results land in operating-point order either way.
inline CampaignResult run_campaign(const CampaignConfig& cc, int workers = 1) {
  cc.validate();
  CampaignResult out;
  out.config = cc;

  const std::uint64_t seed = cc.master_seed;
  OptimizerConfig opt = cc.optimizer;
  opt.strategy = cc.system.strategy;
  AmcConfig amc = cc.amc;
  amc.symbols_per_frame = cc.channel_uses_per_realization;
  const std::uint64_t design_seed = derive_seed(seed, "precoder", 0);

  auto draw_estimate = [&cc, seed](std::uint64_t index) {
    const std::uint64_t s = derive_seed(seed, "channel", index);
    return cc.channel.kind == ChannelKind::Rayleigh
               ? gen_rayleigh(cc.system.nt, cc.system.num_users, s)
               : gen_satellite_channel(cc.channel.satellite, s);
  };
  const cmat hhat0 = draw_estimate(0);

  PrecoderSet loaded;
  const bool use_loaded = !cc.precoder_load_path.empty();
  if (use_loaded)
    loaded = load_precoders(cc.precoder_load_path, cc.system.nt, cc.system.num_groups);

  auto compute_point = [&](size_t i) {
    PointResult pt;
    pt.point_db = cc.operating_points[i];
    pt.total_power = cc.axis == OperatingAxis::SnrDb
                         ? db2lin(pt.point_db) * cc.system.noise_variance
                         : db2lin(pt.point_db) * cc.system.nt;

    try {
      SystemConfig cfg = cc.system;
      cfg.power = cc.system.power.scaled_to(pt.total_power);

      // Design-side model for this point: precoders plus the ARs that drive
      // the MCS choice.  In redraw mode realization 0 plays that role.
      auto design_on = [&](const cmat& hh, Strategy strat) {
        if (use_loaded) {
          PrecoderSet pre = loaded;
          const int m = cfg.num_groups;
          cmat w(cfg.nt, m + 1);
          w.col(0) = pre.common;
          w.rightCols(m) = pre.privates;
          const double scale = precoder_detail::feasibility_scale(w, cfg.power, 1e-9);
          if (std::isfinite(scale)) w *= scale;
          pre.common = w.col(0);
          pre.privates = w.rightCols(m);
          OptimizeResult r;
          r.precoders = pre;
          r.rates = average_rates(pre, hh, cfg, opt.num_sample_channels,
                                  derive_seed(design_seed, "report", 0));
          r.rates.common_split = precoder_detail::waterfill_split(
              r.rates.common_rate, r.rates.group_private);
          r.precoders.common_split = r.rates.common_split;
          r.converged = true;
          return r;
        }
        OptimizerConfig o = opt;
        o.strategy = strat;
        return optimize_mmf(hh, cfg, o, design_seed);
      };

      // In redraw mode each realization gets its own estimate and precoder;
      // the MCS stays the one chosen at realization 0 (link adaptation works
      // per operating point, not per channel draw).  Designs are computed
      // once so the backoff search only rebuilds the coded chains.
      std::vector<cmat> estimates{hhat0};
      if (cc.redraw_estimate)
        for (int l = 1; l < cc.num_realizations; ++l)
          estimates.push_back(draw_estimate((std::uint64_t)l));

      // An RSMA system can always fall back to plain private multicast, so
      // the candidate menu carries both its own design and the private-only
      // one; the measured search then never does worse than that fallback.
      std::vector<Strategy> menu{cc.system.strategy};
      if (cc.system.strategy == Strategy::RSMA && !use_loaded)
        menu.push_back(Strategy::SDMA);

      std::vector<std::vector<OptimizeResult>> designs(menu.size());
      for (size_t mode = 0; mode < menu.size(); ++mode)
        for (const cmat& hh : estimates)
          designs[mode].push_back(design_on(hh, menu[mode]));

      pt.rates = designs[0][0].rates;
      pt.optimizer_converged = designs[0][0].converged;

      auto run_candidate = [&](size_t mode, double back_c, double back_p) {
        sim_detail::CandidateRun run;
        run.mode = mode;
        AmcConfig a = amc;
        a.backoff_common_db = back_c;
        a.backoff_private_db = back_p;
        run.mcs = assign_mcs(designs[mode][0].rates, a);
        run.records.reserve(cc.num_realizations);
        std::vector<LinkSetup> links;
        for (size_t l = 0; l < estimates.size(); ++l)
          links.push_back(make_link_setup(cfg, estimates[l],
                                          designs[mode][l].precoders, run.mcs,
                                          cc.channel_uses_per_realization,
                                          cc.list_size, seed));
        for (int l = 0; l < cc.num_realizations; ++l)
          run.records.push_back(
              run_realization(l, links[cc.redraw_estimate ? l : 0], seed));
        run.stats.common_db = back_c;
        run.stats.private_db = back_p;
        run.stats.mmf_throughput = mmf_throughput(run.records);
        const std::vector<double> bler = bler_per_user(run.records);
        run.stats.worst_bler = *std::max_element(bler.begin(), bler.end());
        return run;
      };

      std::vector<sim_detail::CandidateRun> runs;
      for (size_t mode = 0; mode < menu.size(); ++mode) {
        if (!cc.calibrate_backoff) {
          runs.push_back(
              run_candidate(mode, amc.backoff_common_db, amc.backoff_private_db));
          continue;
        }
        for (double bc : cc.backoff_grid_db) {
          if (cc.calibrate_per_class) {
            for (double bp : cc.backoff_grid_db)
              runs.push_back(run_candidate(mode, bc, bp));
          } else {
            runs.push_back(run_candidate(mode, bc, bc));
          }
        }
      }

      std::vector<BackoffCandidate> grid;
      grid.reserve(runs.size());
      for (const sim_detail::CandidateRun& r : runs) grid.push_back(r.stats);
      const BackoffChoice choice = pick_backoff(grid, cc.target_bler);
      // pick_backoff keeps the first best candidate, so the first stats
      // match identifies it even when two modes tie.
      size_t chosen = 0;
      for (size_t r = 0; r < runs.size(); ++r) {
        const BackoffCandidate& c = grid[r];
        if (c.common_db == choice.chosen.common_db &&
            c.private_db == choice.chosen.private_db &&
            c.mmf_throughput == choice.chosen.mmf_throughput &&
            c.worst_bler == choice.chosen.worst_bler) {
          chosen = r;
          break;
        }
      }

      pt.precoders = designs[runs[chosen].mode][0].precoders;
      pt.mcs = runs[chosen].mcs;
      pt.backoff_common_db = choice.chosen.common_db;
      pt.backoff_private_db = choice.chosen.private_db;
      pt.backoff_target_met = choice.target_met;
      pt.records = std::move(runs[chosen].records);

      pt.bits_total.assign(cfg.num_users, 0);
      for (const RealizationRecord& r : pt.records)
        for (int k = 0; k < cfg.num_users; ++k) pt.bits_total[k] += r.bits[k];
      pt.bler = bler_per_user(pt.records);
      pt.measured_mmf = mmf_throughput(pt.records);
      pt.assigned_mmf = sim_detail::assigned_mmf_rate(pt.mcs, cfg,
                                                      cc.channel_uses_per_realization);
      double bound = 0.0;
      for (const OptimizeResult& d : designs[0]) bound += d.rates.mmf();
      pt.shannon_bound = bound / (double)designs[0].size();
      pt.valid = true;
    } catch (const std::exception& e) {
      pt.valid = false;
      pt.failure = e.what();
    }
    return pt;
  };

  const size_t n = cc.operating_points.size();
  out.points.resize(n);
  const size_t pool = std::min<size_t>(workers < 1 ? 1 : (size_t)workers, n);
  if (pool <= 1) {
    for (size_t i = 0; i < n; ++i) out.points[i] = compute_point(i);
  } else {
    std::atomic<size_t> next{0};
    auto drain = [&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        out.points[i] = compute_point(i);
    };
    std::vector<std::thread> crew;
    crew.reserve(pool);
    for (size_t t = 0; t < pool; ++t) crew.emplace_back(drain);
    for (std::thread& t : crew) t.join();
  }
  return out;
}

inline std::string format_mcs(const McsAssignment& mcs) {
  char buf[64];
  std::string s = "c:";
  if (sim_detail::carries_data(mcs.common)) {
    std::snprintf(buf, sizeof buf, "%dqam@%.4f", mcs.common.order,
                  mcs.common.code_rate);
    s += buf;
  } else {
    s += "off";
  }
  for (size_t m = 0; m < mcs.privates.size(); ++m) {
    std::snprintf(buf, sizeof buf, "|p%zu:", m);
    s += buf;
    if (sim_detail::carries_data(mcs.privates[m])) {
      std::snprintf(buf, sizeof buf, "%dqam@%.4f", mcs.privates[m].order,
                    mcs.privates[m].code_rate);
      s += buf;
    } else {
      s += "off";
    }
  }
  return s;
}

// CSV emission is split so one file can carry several campaigns (same
// scenario under different strategies) beneath a single header.  Numeric
// columns are %.17g so a parse round-trips every value exactly; invalid
// points carry nan metrics.
inline void write_campaign_header(std::ostream& os, OperatingAxis axis,
                                  int num_users) {
  os << "scenario_id,strategy,"
     << (axis == OperatingAxis::SnrDb ? "snr_db" : "power_dbw")
     << ",mmf_throughput,shannon_bound";
  for (int u = 1; u <= num_users; ++u) os << ",bler_user_" << u;
  os << ",mcs,backoff_common_db,backoff_private_db,seed\n";
}

inline void write_campaign_rows(std::ostream& os, const CampaignResult& res,
                                std::string_view scenario_id) {
  const int k = res.config.system.num_users;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };

  const char* strat = res.config.system.strategy == Strategy::RSMA ? "rsma" : "sdma";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const PointResult& pt : res.points) {
    os << scenario_id << ',' << strat << ',' << num(pt.point_db) << ','
       << num(pt.valid ? pt.measured_mmf : nan) << ','
       << num(pt.valid ? pt.shannon_bound : nan);
    for (int u = 0; u < k; ++u)
      os << ',' << num(pt.valid ? pt.bler[u] : nan);
    os << ',' << (pt.valid ? format_mcs(pt.mcs) : std::string("invalid")) << ','
       << num(pt.backoff_common_db) << ',' << num(pt.backoff_private_db) << ','
       << res.config.master_seed << '\n';
  }
}

inline void write_campaign_csv(std::ostream& os, const CampaignResult& res,
                               std::string_view scenario_id) {
  write_campaign_header(os, res.config.axis, res.config.system.num_users);
  write_campaign_rows(os, res, scenario_id);
}

}  // namespace rsmalink
