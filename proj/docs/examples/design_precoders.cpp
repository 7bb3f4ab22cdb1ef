// Designs max-min-fair precoders for one channel estimate and compares the
// rate-splitting solution with the private-only baseline.
//
//   ./design_precoders [snr_db]

#include <cstdio>
#include <cstdlib>

#include "rsmalink/channel.hpp"
#include "rsmalink/precoder.hpp"

using namespace rsmalink;

int main(int argc, char** argv) {
  const double snr_db = argc > 1 ? std::atof(argv[1]) : 20.0;

  SystemConfig cfg;
  cfg.nt = 4;
  cfg.num_users = 6;
  cfg.num_groups = 3;
  cfg.group_map = {0, 0, 1, 1, 2, 2};
  cfg.power = PowerConstraintSet::sum_power(db2lin(snr_db), cfg.nt);
  cfg.noise_variance = 1.0;
  cfg.csit_alpha = 0.8;

  OptimizerConfig opt;
  opt.num_sample_channels = 100;
  opt.max_iterations = 50;

  const cmat hhat = gen_rayleigh(cfg.nt, cfg.num_users, 42);

  for (Strategy s : {Strategy::RSMA, Strategy::SDMA}) {
    opt.strategy = s;
    const OptimizeResult res = optimize_mmf(hhat, cfg, opt, 1);
    const PowerCheck pc = check_power(res.precoders, cfg.power, 1e-9);

    std::printf("%s: mmf %.4f bit/use, common rate %.4f, %s, budget %s\n",
                s == Strategy::RSMA ? "rate-splitting" : "private-only",
                res.rates.mmf(), res.rates.common_rate,
                res.converged ? "converged" : "iteration-capped",
                pc.ok ? "respected" : "violated");
    for (int m = 0; m < cfg.num_groups; ++m)
      std::printf("  group %d: private %.4f + common share %.4f = %.4f\n", m,
                  res.rates.group_private(m), res.rates.common_split(m),
                  res.rates.group_private(m) + res.rates.common_split(m));
  }
  return 0;
}
