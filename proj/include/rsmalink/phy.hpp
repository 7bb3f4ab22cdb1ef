#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "common.hpp"
#include "polar.hpp"
#include "sysmodel.hpp"

// Symbol-level receive chain: Gray QAM with exact soft demodulation, MMSE
// equalizers for the two stream layers, seed-derived interleaving, and the
// SIC receiver that decodes the common stream, reconstructs it, subtracts,
// and then decodes the private stream.

namespace rsmalink {

// Square QAM, unit average energy, reflected-Gray labeling per axis.  A label
// is the integer formed by the m bits MSB-first; the first m/2 bits select
// the in-phase level, the last m/2 the quadrature level.  Per axis, the bits
// are a Gray code g whose binary value b picks amplitude L - 1 - 2b with
// L = 2^(m/2) levels, so 4-QAM maps bits 00 to (+1+j)/sqrt(2).
struct ModulationScheme {
  int order = 4;             // 4, 16, 64, 256
  int bits_per_symbol = 2;   // log2(order)
  double axis_scale = 1.0;   // 1/sqrt(norm)
  std::vector<cplx> points;  // indexed by label
  std::vector<double> axis_levels;  // scaled amplitudes indexed by axis gray code
};

namespace phy_detail {

inline int gray_to_binary(int g) {
  int b = 0;
  for (; g; g >>= 1) b ^= g;
  return b;
}

}  // namespace phy_detail

inline ModulationScheme make_qam(int order) {
  if (order != 4 && order != 16 && order != 64 && order != 256)
    throw ConfigError("alphabet must be 4/16/64/256-QAM");
  ModulationScheme s;
  s.order = order;
  s.bits_per_symbol = 0;
  while ((1 << s.bits_per_symbol) < order) ++s.bits_per_symbol;
  const int half = s.bits_per_symbol / 2;
  const int levels = 1 << half;
  // E|s|^2 = 2/L * sum of odd squares = 2(L^2-1)/3 per complex symbol
  const double norm = 2.0 * (levels * levels - 1) / 3.0;
  s.axis_scale = 1.0 / std::sqrt(norm);
  s.axis_levels.resize(levels);
  for (int g = 0; g < levels; ++g)
    s.axis_levels[g] =
        (levels - 1 - 2 * phy_detail::gray_to_binary(g)) * s.axis_scale;
  s.points.resize(order);
  for (int label = 0; label < order; ++label) {
    int gi = label >> half;
    int gq = label & (levels - 1);
    s.points[label] = cplx(s.axis_levels[gi], s.axis_levels[gq]);
  }
  return s;
}

inline cvec modulate(const std::vector<std::uint8_t>& bits,
                     const ModulationScheme& mod) {
  const int m = mod.bits_per_symbol;
  if (bits.size() % m != 0)
    throw std::invalid_argument("bit count not divisible by bits per symbol");
  cvec out(bits.size() / m);
  for (int sidx = 0; sidx < out.size(); ++sidx) {
    int label = 0;
    for (int b = 0; b < m; ++b) label = (label << 1) | bits[sidx * m + b];
    out(sidx) = mod.points[label];
  }
  return out;
}

// Exact per-bit LLRs (positive means bit 0) for y = gain * s + eta with
// eta ~ CN(0, noise_var).  The Gray labeling is separable, so each axis is an
// independent 1D log-sum-exp over its levels; a complex gain only rotates the
// observation.  Matches the full 2^m-term sum to rounding error.
inline std::vector<double> demodulate_llr(const cvec& symbols,
                                          const ModulationScheme& mod, cplx gain,
                                          double noise_var) {
  const int m = mod.bits_per_symbol;
  const int half = m / 2;
  const int levels = 1 << half;
  const double nu = std::max(noise_var, 1e-30);
  const double amag = std::abs(gain);
  std::vector<double> llrs(symbols.size() * m);

  // metric per axis level; bit b of the axis gray index splits the set
  std::vector<double> metric(levels);
  for (int sidx = 0; sidx < symbols.size(); ++sidx) {
    cplx z = amag > 0 ? cplx(symbols(sidx) * std::conj(gain) / amag) : cplx(0, 0);
    for (int axis = 0; axis < 2; ++axis) {
      double obs = axis == 0 ? z.real() : z.imag();
      for (int g = 0; g < levels; ++g) {
        double d = obs - amag * mod.axis_levels[g];
        metric[g] = -d * d / nu;
      }
      for (int b = 0; b < half; ++b) {
        double m0 = -std::numeric_limits<double>::infinity();
        double m1 = m0;
        for (int g = 0; g < levels; ++g) {
          // bit b of this axis, MSB-first within the axis group
          bool one = (g >> (half - 1 - b)) & 1;
          double& acc = one ? m1 : m0;
          double hi = std::max(acc, metric[g]), lo = std::min(acc, metric[g]);
          acc = std::isinf(lo) ? hi : hi + std::log1p(std::exp(lo - hi));
        }
        double llr = m0 - m1;
        llrs[sidx * m + axis * half + b] =
            std::clamp(llr, -kLlrSaturation, kLlrSaturation);
      }
    }
  }
  return llrs;
}

// MMSE equalizer for the common stream: all streams count as interference.
inline cplx equalize_common(const cvec& h, const PrecoderSet& pre,
                            double noise_variance) {
  cplx hpc = h.dot(pre.common);  // h^H p_c
  double denom = std::norm(hpc) + noise_variance;
  for (int j = 0; j < pre.num_groups(); ++j)
    denom += std::norm(h.dot(pre.privates.col(j)));
  return std::conj(hpc) / denom;
}

// MMSE equalizer for the private stream, assuming the common stream was
// removed: denominator keeps every private stream plus noise.
inline cplx equalize_private(const cvec& h, const PrecoderSet& pre, int group_of_k,
                             double noise_variance) {
  double denom = noise_variance;
  for (int j = 0; j < pre.num_groups(); ++j)
    denom += std::norm(h.dot(pre.privates.col(j)));
  return std::conj(h.dot(pre.privates.col(group_of_k))) / denom;
}

// Seed-derived pseudo-random interleaver; same seed, same permutation.
inline std::vector<int> interleave_permutation(int n, std::uint64_t seed) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

template <class T>
std::vector<T> interleave(const std::vector<T>& x, std::uint64_t seed) {
  auto perm = interleave_permutation((int)x.size(), seed);
  std::vector<T> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[i] = x[perm[i]];
  return out;
}

template <class T>
std::vector<T> deinterleave(const std::vector<T>& x, std::uint64_t seed) {
  auto perm = interleave_permutation((int)x.size(), seed);
  std::vector<T> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) out[perm[i]] = x[i];
  return out;
}

// Everything one stream needs through the symbol chain.
struct StreamPhyConfig {
  ModulationScheme mod;
  PolarCodeConfig code;
  std::uint64_t interleave_seed = 0;

  int symbols_per_frame() const { return code.block_len / mod.bits_per_symbol; }

  void validate() const {
    if (code.block_len % mod.bits_per_symbol != 0)
      throw ConfigError("code block must fill an integer number of symbols");
  }
};

inline cvec transmit_stream(const std::vector<std::uint8_t>& msg,
                            const StreamPhyConfig& cfg) {
  auto cw = polar_encode(msg, cfg.code);
  return modulate(interleave(cw, cfg.interleave_seed), cfg.mod);
}

struct SicResult {
  std::vector<std::uint8_t> common_message;
  bool common_crc = true;  // vacuously true when the common stage is skipped
  std::vector<std::uint8_t> private_message;
  bool private_crc = false;
  cvec residual;  // received vector after common-stream subtraction
};

// Full SIC receiver for one user over S channel uses of the scalar channel
// y[t] = h^H x[t] + n[t].  Decodes the common stream, reconstructs its
// modulated frame from the decoded bits (right or wrong), subtracts, then
// decodes the private stream.  Effective post-equalizer channel per stream:
// yhat = (g h^H p) s + eta, var(eta) = |g|^2 (interference + noise).
inline SicResult sic_receive(const cvec& y, const cvec& h, const PrecoderSet& pre,
                             int group_of_k, double noise_variance,
                             const StreamPhyConfig& common_cfg,
                             const StreamPhyConfig& private_cfg) {
  SicResult res;
  double total_private = 0.0;
  for (int j = 0; j < pre.num_groups(); ++j)
    total_private += std::norm(h.dot(pre.privates.col(j)));

  res.residual = y;
  if (pre.is_common_active()) {
    cplx hpc = h.dot(pre.common);
    cplx g = equalize_common(h, pre, noise_variance);
    cplx gain = g * hpc;
    double nu = std::norm(g) * (total_private + noise_variance);
    cvec eq = g * y;
    auto llrs = demodulate_llr(eq, common_cfg.mod, gain, nu);
    auto dec = polar_decode(deinterleave(llrs, common_cfg.interleave_seed),
                            common_cfg.code);
    res.common_message = dec.message;
    res.common_crc = dec.crc_pass;
    // reconstruct from the decision, even a wrong one: that is what a real
    // receiver would subtract
    cvec sc = transmit_stream(dec.message, common_cfg);
    res.residual -= hpc * sc;
  }

  int own = group_of_k;
  cplx hpm = h.dot(pre.privates.col(own));
  cplx g = equalize_private(h, pre, own, noise_variance);
  cplx gain = g * hpm;
  double nu = std::norm(g) * (total_private - std::norm(hpm) + noise_variance);
  cvec eq = g * res.residual;
  auto llrs = demodulate_llr(eq, private_cfg.mod, gain, nu);
  auto dec = polar_decode(deinterleave(llrs, private_cfg.interleave_seed),
                          private_cfg.code);
  res.private_message = dec.message;
  res.private_crc = dec.crc_pass;
  return res;
}

}  // namespace rsmalink
