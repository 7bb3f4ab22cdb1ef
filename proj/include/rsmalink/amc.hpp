#pragma once

#include <cmath>
#include <vector>

#include "common.hpp"
#include "sysmodel.hpp"

// Rate adaptation: average rates in, modulation order / block length / code
// rate per stream out.  Selection is the smallest alphabet whose bit width
// covers min(AR/beta, m'), the block is S symbols of that alphabet, and the
// code rate is the ceiling-rounded fraction that carries the AR.

namespace rsmalink {

struct AmcConfig {
  std::vector<int> alphabets = {4, 16, 64, 256};
  double beta = 0.9;       // maximum code rate
  int max_order_log = 8;   // m': caps the required bit width
  int symbols_per_frame = 256;  // S
  double backoff_common_db = 0.0;
  double backoff_private_db = 0.0;
  int crc_len = 16;        // outer code overhead, deducted from the payload

  void validate() const {
    if (beta <= 0.0 || beta > 1.0) throw ConfigError("beta must be in (0,1]");
    if (symbols_per_frame < 1) throw ConfigError("need at least one symbol");
    if (alphabets.empty()) throw ConfigError("alphabet set is empty");
    if (backoff_common_db < 0.0 || backoff_private_db < 0.0)
      throw ConfigError("backoff cannot be negative");
  }
};

struct StreamMcs {
  bool enabled = false;  // false: stream carries no data at this point
  int order = 4;
  int bits_per_symbol = 2;
  int block_len = 0;     // N = S * log2(order)
  double code_rate = 0.0;
  int k_total = 0;       // r * N, integer by construction
  int payload = 0;       // k_total minus CRC, the actual message bits
};

struct McsAssignment {
  StreamMcs common;
  std::vector<StreamMcs> privates;
  std::vector<int> common_payload_share;  // per group, sums to common.payload
};

inline int bits_of_order(int order) {
  int m = 0;
  while ((1 << m) < order) ++m;
  return m;
}

// Smallest alphabet whose bit width reaches min(AR/beta, m').  Nonpositive
// rates disable the stream (lowest order, zero rate).
inline std::pair<int, bool> select_modulation(double avg_rate, const AmcConfig& amc) {
  if (avg_rate <= 0.0) return {amc.alphabets.front(), false};
  double required = std::min(avg_rate / amc.beta, (double)amc.max_order_log);
  for (int order : amc.alphabets)
    if (bits_of_order(order) >= required) return {order, true};
  return {amc.alphabets.back(), true};
}

// N = S*m and r = ceil(N * min(AR/m, beta)) / N.
inline std::pair<int, double> code_params(double avg_rate, int order, int symbols,
                                          double beta) {
  int m = bits_of_order(order);
  int n = symbols * m;
  double frac = std::min(avg_rate / m, beta);
  double r = std::ceil(n * frac) / n;
  return {n, r};
}

namespace amc_detail {

inline StreamMcs build_stream(double avg_rate, const AmcConfig& amc) {
  StreamMcs s;
  auto [order, live] = select_modulation(avg_rate, amc);
  s.order = order;
  s.bits_per_symbol = bits_of_order(order);
  auto [n, r] = code_params(std::max(avg_rate, 0.0), order, amc.symbols_per_frame,
                            amc.beta);
  s.block_len = n;
  if (!live) return s;  // disabled: zero rate, zero payload
  s.code_rate = r;
  s.k_total = (int)std::llround(r * n);
  s.payload = s.k_total - amc.crc_len;
  if (s.payload <= 0) {
    // not even the CRC fits: nothing to transmit
    s.payload = 0;
    s.k_total = 0;
    s.code_rate = 0.0;
    return s;
  }
  s.enabled = true;
  return s;
}

}  // namespace amc_detail

// Back-off de-rates the average rates multiplicatively (dB mapped to a rate
// scale factor) before the selection rules run.  The common payload is split
// across groups proportionally to the certified C_m, floor-rounded with the
// remainder credited to group 0.
inline McsAssignment assign_mcs(const AverageRates& rates, const AmcConfig& amc) {
  amc.validate();
  McsAssignment out;
  const double scale_c = std::pow(10.0, -amc.backoff_common_db / 10.0);
  const double scale_p = std::pow(10.0, -amc.backoff_private_db / 10.0);

  out.common = amc_detail::build_stream(rates.common_rate * scale_c, amc);
  const int m = (int)rates.group_private.size();
  for (int g = 0; g < m; ++g)
    out.privates.push_back(
        amc_detail::build_stream(rates.group_private(g) * scale_p, amc));

  out.common_payload_share.assign(m, 0);
  double split_sum = rates.common_split.sum();
  if (out.common.enabled && split_sum > 0.0) {
    int assigned = 0;
    for (int g = 1; g < m; ++g) {
      int share = (int)std::floor(out.common.payload * rates.common_split(g) /
                                  split_sum);
      out.common_payload_share[g] = share;
      assigned += share;
    }
    out.common_payload_share[0] = out.common.payload - assigned;
  } else if (out.common.enabled) {
    out.common_payload_share[0] = out.common.payload;
  }
  return out;
}

// Calibration outcome for one backoff grid point.
struct BackoffCandidate {
  double common_db = 0.0;
  double private_db = 0.0;
  double mmf_throughput = 0.0;
  double worst_bler = 1.0;
};

struct BackoffChoice {
  BackoffCandidate chosen;
  bool target_met = false;
};

// Picks the candidate maximizing MMF throughput among those meeting the BLER
// target; if none qualifies, falls back to the largest total backoff and
// flags the violation.
inline BackoffChoice pick_backoff(const std::vector<BackoffCandidate>& grid,
                                  double target_bler) {
  if (grid.empty()) throw ConfigError("backoff grid is empty");
  BackoffChoice out;
  for (const BackoffCandidate& c : grid) {
    if (c.worst_bler <= target_bler &&
        (!out.target_met || c.mmf_throughput > out.chosen.mmf_throughput)) {
      out.chosen = c;
      out.target_met = true;
    }
  }
  if (!out.target_met) {
    out.chosen = grid.front();
    for (const BackoffCandidate& c : grid)
      if (c.common_db + c.private_db >
          out.chosen.common_db + out.chosen.private_db)
        out.chosen = c;
  }
  return out;
}

}  // namespace rsmalink
