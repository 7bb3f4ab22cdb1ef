// Pushes one frame through the full coded chain for a single user: rate
// adaptation, polar coding, QAM, superposition of all streams on the channel,
// then successive interference cancellation at the receiver.
//
//   ./decode_one_frame [snr_db]

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "rsmalink/amc.hpp"
#include "rsmalink/channel.hpp"
#include "rsmalink/phy.hpp"
#include "rsmalink/precoder.hpp"

using namespace rsmalink;

int main(int argc, char** argv) {
  const double snr_db = argc > 1 ? std::atof(argv[1]) : 25.0;

  SystemConfig cfg;
  cfg.nt = 4;
  cfg.num_users = 4;
  cfg.num_groups = 2;
  cfg.group_map = {0, 0, 1, 1};
  cfg.power = PowerConstraintSet::sum_power(db2lin(snr_db), cfg.nt);
  cfg.csit_alpha = 0.8;

  OptimizerConfig opt;
  opt.num_sample_channels = 80;
  opt.max_iterations = 40;

  const cmat hhat = gen_rayleigh(cfg.nt, cfg.num_users, 3);
  const OptimizeResult design = optimize_mmf(hhat, cfg, opt, 1);

  // one MCS per stream from the designed rates
  AmcConfig amc;
  amc.symbols_per_frame = 256;
  amc.backoff_common_db = 1.0;
  amc.backoff_private_db = 1.0;
  const McsAssignment mcs = assign_mcs(design.rates, amc);
  if (!mcs.common.enabled || !mcs.privates[0].enabled) {
    std::printf("link adaptation idled a stream at %.1f dB; try a higher SNR\n",
                snr_db);
    return 0;
  }

  // PHY per stream: alphabet and polar code sized by the MCS, erasure design
  // rate matched to the code rate
  std::mt19937_64 rng(7);
  auto stream_phy = [&](const StreamMcs& s) {
    const double eps = std::clamp(1.0 - s.code_rate, 0.05, 0.95);
    return StreamPhyConfig{make_qam(s.order),
                           make_polar_code(s.block_len, s.payload,
                                           s.k_total - s.payload, eps, 8),
                           rng()};
  };
  const StreamPhyConfig common_phy = stream_phy(mcs.common);
  std::vector<StreamPhyConfig> private_phy;
  for (const StreamMcs& s : mcs.privates) private_phy.push_back(stream_phy(s));

  // superpose every stream over S channel uses
  const int s_uses = amc.symbols_per_frame;
  std::vector<std::vector<std::uint8_t>> payloads;
  cmat x = cmat::Zero(cfg.nt, s_uses);
  auto push_stream = [&](const StreamPhyConfig& phy, const cvec& p) {
    std::vector<std::uint8_t> msg(phy.code.num_info);
    for (auto& b : msg) b = rng() & 1u;
    x += p * transmit_stream(msg, phy).transpose();
    payloads.push_back(std::move(msg));
  };
  push_stream(common_phy, design.precoders.common);
  for (int m = 0; m < cfg.num_groups; ++m)
    push_stream(private_phy[m], design.precoders.privates.col(m));

  // receive at user 0 over a true channel drawn around the estimate
  const double err_var = std::pow(cfg.power.total_budget(), -cfg.csit_alpha);
  const cmat h_true =
      hhat + gen_error_matrix(cfg.nt, cfg.num_users, err_var, 99);
  const cvec h0 = h_true.col(0);
  std::normal_distribution<double> gauss(0.0, std::sqrt(cfg.noise_variance / 2.0));
  cvec y(s_uses);
  for (int t = 0; t < s_uses; ++t)
    y(t) = h0.dot(x.col(t)) + cplx(gauss(rng), gauss(rng));

  const SicResult rx = sic_receive(y, h0, design.precoders, cfg.group_map[0],
                                   cfg.noise_variance, common_phy, private_phy[0]);

  std::printf("common stream:  %4d bits, crc %s, payload %s\n",
              mcs.common.payload, rx.common_crc ? "ok" : "bad",
              rx.common_message == payloads[0] ? "recovered" : "lost");
  std::printf("private stream: %4d bits, crc %s, payload %s\n",
              mcs.privates[0].payload, rx.private_crc ? "ok" : "bad",
              rx.private_message == payloads[1] ? "recovered" : "lost");
  return 0;
}
