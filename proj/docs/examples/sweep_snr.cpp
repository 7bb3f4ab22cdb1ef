// Runs a reduced-scale throughput sweep programmatically and prints the
// campaign CSV to stdout.  The CLI front end drives the same entry point;
// this shows the library call for embedding in other harnesses.
//
//   ./sweep_snr > sweep.csv

#include <iostream>

#include "rsmalink/sim.hpp"

using namespace rsmalink;

int main() {
  CampaignConfig cc;
  cc.system.nt = 4;
  cc.system.num_users = 4;
  cc.system.num_groups = 2;
  cc.system.group_map = {0, 0, 1, 1};
  cc.system.power = PowerConstraintSet::sum_power(1.0, 4);
  cc.system.csit_alpha = 0.8;
  cc.system.strategy = Strategy::RSMA;

  cc.optimizer.num_sample_channels = 60;
  cc.optimizer.max_iterations = 25;

  cc.num_realizations = 10;
  cc.channel_uses_per_realization = 128;
  cc.operating_points = {10, 20, 30};
  cc.master_seed = 5;
  cc.calibrate_backoff = true;

  const CampaignResult res = run_campaign(cc);
  write_campaign_csv(std::cout, res, "sweep");

  for (const PointResult& pt : res.points)
    std::cerr << pt.point_db << " dB: mmf " << pt.measured_mmf << " bit/use, bound "
              << pt.shannon_bound << ", backoff " << pt.backoff_common_db << "/"
              << pt.backoff_private_db << " dB\n";
  return 0;
}
