#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "common.hpp"

// CRC-aided polar coding: Bhattacharyya construction, butterfly encoder,
// shortening rate match, successive-cancellation list decoder.
//
// Domains.  The generator is G_N = B_N F^{x n} (bit reversal times the
// Kronecker kernel power).  Internally everything runs in the transform
// domain: v = B_N u, codeword x = v F^{x n} computed by in-place butterflies.
// The public info_set is expressed in the u domain, so published index sets
// match the u G_N description; the bit-reversal lives only in the index maps
// computed at construction time.
//
// LLR convention: positive means bit 0 is more likely.

namespace rsmalink {

struct DecodeResult {
  std::vector<std::uint8_t> message;
  bool crc_pass = false;
};

namespace polar_detail {

inline int bitrev(int x, int nbits) {
  int r = 0;
  for (int b = 0; b < nbits; ++b) r |= ((x >> b) & 1) << (nbits - 1 - b);
  return r;
}

inline int log2_exact(int n) {
  int l = 0;
  while ((1 << l) < n) ++l;
  if ((1 << l) != n) throw std::invalid_argument("length must be a power of two");
  return l;
}

// min-sum check-node update; matches the decoder's f exactly so that
// construction, reference decoding and list decoding agree on conventions.
inline double fmin(double a, double b) {
  double s = (a < 0) != (b < 0) ? -1.0 : 1.0;
  return s * std::min(std::abs(a), std::abs(b));
}

inline double gstep(double a, double b, std::uint8_t u) { return u ? b - a : b + a; }

}  // namespace polar_detail

// x <- x F^{x n} over GF(2).  Self-inverse.
inline void polar_transform(std::vector<std::uint8_t>& x) {
  const int n = (int)x.size();
  polar_detail::log2_exact(n);
  for (int half = 1; half < n; half <<= 1)
    for (int i = 0; i < n; i += 2 * half)
      for (int j = i; j < i + half; ++j) x[j] ^= x[j + half];
}

// Remainder of bits(x) * x^crc_len modulo the generator (implicit
// augmentation), MSB-first, init 0, no final xor: the value crc_attach
// appends.  crc16 0x1021 and crc8 0x07 are the XMODEM / SMBus generators.
inline std::uint32_t crc_remainder(const std::vector<std::uint8_t>& bits,
                                   std::uint32_t poly, int crc_len) {
  const std::uint32_t mask = crc_len >= 32 ? 0xffffffffu : ((1u << crc_len) - 1);
  const std::uint32_t top = 1u << (crc_len - 1);
  std::uint32_t reg = 0;
  for (std::uint8_t b : bits) {
    bool fb = ((reg & top) != 0) != (b != 0);
    reg = (reg << 1) & mask;
    if (fb) reg ^= poly & mask;
  }
  return reg;
}

inline std::vector<std::uint8_t> crc_attach(const std::vector<std::uint8_t>& msg,
                                            std::uint32_t poly, int crc_len) {
  std::uint32_t rem = crc_remainder(msg, poly, crc_len);
  std::vector<std::uint8_t> out = msg;
  for (int b = crc_len - 1; b >= 0; --b) out.push_back((rem >> b) & 1);
  return out;
}

inline bool crc_check(const std::vector<std::uint8_t>& bits_with_crc,
                      std::uint32_t poly, int crc_len) {
  return crc_remainder(bits_with_crc, poly, crc_len) == 0;
}

// Bhattacharyya parameters of the synthetic bit channels, in transform-domain
// order (the order the successive decoder visits).  z0 holds one erasure
// probability per codeword position, which lets shortened positions enter as
// perfectly known (z = 0).  BEC-exact steps: worse = a + b - ab, better = ab.
inline std::vector<double> bhattacharyya(std::vector<double> z0) {
  const int n = (int)z0.size();
  polar_detail::log2_exact(n);
  std::vector<double> z(std::move(z0)), nxt(n);
  for (int half = n / 2; half >= 1; half /= 2) {
    // one tree level: blocks of size 2*half combine pairwise
    for (int blk = 0; blk < n; blk += 2 * half)
      for (int i = 0; i < half; ++i) {
        double a = z[blk + i], b = z[blk + i + half];
        nxt[blk + i] = a + b - a * b;
        nxt[blk + i + half] = a * b;
      }
    std::swap(z, nxt);
  }
  return z;
}

// Info set (u domain, sorted) for a possibly shortened code: the k most
// reliable positions among those not structurally frozen by shortening.
// Shortening keeps the first block_len codeword bits; since F^{x n} is lower
// triangular, freezing transform positions >= block_len forces the dropped
// tail to zero.
inline std::vector<int> construct_info_set(int mother_n, int k, double design_erasure,
                                           int block_len) {
  const int nb = polar_detail::log2_exact(mother_n);
  if (block_len <= mother_n / 2 && block_len != mother_n)
    throw std::invalid_argument("shortening beyond half the mother code");
  if (block_len > mother_n) throw std::invalid_argument("block exceeds mother code");
  if (k < 0 || k > block_len) throw std::invalid_argument("info bits exceed block");
  std::vector<double> z0(mother_n);
  for (int i = 0; i < mother_n; ++i)
    z0[i] = i < block_len ? design_erasure : 0.0;
  std::vector<double> z = bhattacharyya(std::move(z0));

  std::vector<int> order(mother_n);
  for (int i = 0; i < mother_n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return z[a] < z[b]; });
  std::vector<int> info;
  for (int i : order) {
    if ((int)info.size() == k) break;
    if (i >= block_len) continue;  // structurally frozen by shortening
    info.push_back(polar_detail::bitrev(i, nb));
  }
  std::sort(info.begin(), info.end());
  return info;
}

inline std::vector<int> construct_info_set(int mother_n, int k, double design_erasure) {
  return construct_info_set(mother_n, k, design_erasure, mother_n);
}

struct PolarCodeConfig {
  int mother_n = 0;    // N, power of two
  int block_len = 0;   // transmitted bits, mother_n/2 < block_len <= mother_n
  int num_info = 0;    // message bits (CRC not included)
  int crc_len = 16;
  std::uint32_t crc_poly = 0x1021;
  int list_size = 8;
  std::vector<int> info_set;  // u domain, sorted, size num_info + crc_len
  // Derived placement: transform-domain position of the j-th info-set entry
  // and the frozen mask in transform order.
  std::vector<int> info_v;
  std::vector<std::uint8_t> frozen_v;

  void finalize() {
    const int nb = polar_detail::log2_exact(mother_n);
    if ((int)info_set.size() != num_info + crc_len)
      throw ConfigError("info set size must be num_info + crc_len");
    info_v.clear();
    frozen_v.assign(mother_n, 1);
    for (int a : info_set) {
      if (a < 0 || a >= mother_n) throw ConfigError("info index out of range");
      int v = polar_detail::bitrev(a, nb);
      info_v.push_back(v);
      frozen_v[v] = 0;
    }
  }
};

// Maps a per-bit SNR proxy to the erasure probability used by the
// construction.  Monotone, clamped away from 0 and 1.
inline double erasure_from_snr(double snr_linear) {
  double e = std::exp(-std::max(snr_linear, 0.0));
  return std::clamp(e, 1e-9, 1.0 - 1e-9);
}

inline PolarCodeConfig make_polar_code(int block_len, int num_info, int crc_len,
                                       double design_erasure, int list_size = 8,
                                       std::uint32_t crc_poly = 0x1021) {
  if (block_len < 2) throw ConfigError("block too short");
  if (num_info + crc_len > block_len)
    throw ConfigError("payload plus crc exceeds block length");
  if (num_info < 1) throw ConfigError("need at least one message bit");
  PolarCodeConfig c;
  c.mother_n = 2;
  while (c.mother_n < block_len) c.mother_n <<= 1;
  c.block_len = block_len;
  c.num_info = num_info;
  c.crc_len = crc_len;
  c.crc_poly = crc_poly;
  c.list_size = list_size;
  c.info_set = construct_info_set(c.mother_n, num_info + crc_len, design_erasure,
                                  block_len);
  c.finalize();
  return c;
}

inline std::vector<std::uint8_t> polar_encode(const std::vector<std::uint8_t>& msg,
                                              const PolarCodeConfig& cfg) {
  if ((int)msg.size() != cfg.num_info)
    throw std::invalid_argument("message length must equal num_info");
  std::vector<std::uint8_t> payload =
      cfg.crc_len > 0 ? crc_attach(msg, cfg.crc_poly, cfg.crc_len) : msg;
  std::vector<std::uint8_t> v(cfg.mother_n, 0);
  for (size_t j = 0; j < payload.size(); ++j) v[cfg.info_v[j]] = payload[j];
  polar_transform(v);
  v.resize(cfg.block_len);  // shortened tail is identically zero
  return v;
}

namespace polar_detail {

// One list-decoder path.  Arrays are shared between forked paths and cloned
// only when written (lazy copy keeps the decoder O(L N log N)).
struct Path {
  double pm = 0.0;
  // llr[level]: 2^(n-level) values; bits[level]: two phases of re-encoded
  // child codewords, laid out [phase * size + i].
  std::vector<std::shared_ptr<std::vector<double>>> llr;
  std::vector<std::shared_ptr<std::vector<std::uint8_t>>> bits;
};

template <class T>
inline std::vector<T>& writable(std::shared_ptr<std::vector<T>>& p) {
  if (p.use_count() > 1) p = std::make_shared<std::vector<T>>(*p);
  return *p;
}

inline void calc_llr(Path& path, int n, int level, int phase) {
  if (level == 0) return;
  if ((phase & 1) == 0) calc_llr(path, n, level - 1, phase >> 1);
  const int sz = 1 << (n - level);
  const std::vector<double>& up = *path.llr[level - 1];
  std::vector<double>& out = writable(path.llr[level]);
  if ((phase & 1) == 0) {
    for (int i = 0; i < sz; ++i) out[i] = fmin(up[i], up[i + sz]);
  } else {
    const std::vector<std::uint8_t>& dec = *path.bits[level];
    for (int i = 0; i < sz; ++i) out[i] = gstep(up[i], up[i + sz], dec[i]);
  }
}

inline void update_bits(Path& path, int n, int level, int phase) {
  const int sz = 1 << (n - level);
  const int parent_phase = phase >> 1;
  const std::vector<std::uint8_t>& cur = *path.bits[level];
  std::vector<std::uint8_t>& par = writable(path.bits[level - 1]);
  const int base = (parent_phase & 1) * 2 * sz;
  for (int i = 0; i < sz; ++i) {
    par[base + i] = cur[i] ^ cur[sz + i];
    par[base + sz + i] = cur[sz + i];
  }
  if ((parent_phase & 1) && level > 1) update_bits(path, n, level - 1, parent_phase);
}

}  // namespace polar_detail

// CRC-aided successive-cancellation list decode.  Input: block_len channel
// LLRs; shortened positions are re-inserted as known zeros (saturated finite
// LLR, so later sums stay NaN-free).  Returns the best CRC-passing path, or
// the most likely path with crc_pass = false; with crc_len = 0 there is no
// outer code and the most likely path is returned as passing.
inline DecodeResult polar_decode(const std::vector<double>& channel_llrs,
                                 const PolarCodeConfig& cfg) {
  using namespace polar_detail;
  if ((int)channel_llrs.size() != cfg.block_len)
    throw std::invalid_argument("LLR count must equal block length");
  const int n = log2_exact(cfg.mother_n);
  const int nbits = cfg.mother_n;
  const int L = std::max(1, cfg.list_size);

  auto root = std::make_shared<std::vector<double>>(nbits);
  for (int i = 0; i < nbits; ++i)
    (*root)[i] = i < cfg.block_len ? channel_llrs[i] : kLlrSaturation;

  std::vector<Path> paths(1);
  paths[0].llr.resize(n + 1);
  paths[0].bits.resize(n + 1);
  paths[0].llr[0] = root;
  for (int lv = 1; lv <= n; ++lv)
    paths[0].llr[lv] = std::make_shared<std::vector<double>>(1 << (n - lv));
  for (int lv = 0; lv <= n; ++lv)
    paths[0].bits[lv] =
        std::make_shared<std::vector<std::uint8_t>>(2 * (1 << (n - lv)));

  struct Cand {
    int parent;
    std::uint8_t bit;
    double pm;
  };

  for (int phase = 0; phase < nbits; ++phase) {
    for (Path& p : paths) calc_llr(p, n, n, phase);

    if (cfg.frozen_v[phase]) {
      for (Path& p : paths) {
        double l = (*p.llr[n])[0];
        if (l < 0) p.pm += -l;
        writable(p.bits[n])[phase & 1] = 0;
      }
    } else {
      std::vector<Cand> cand;
      cand.reserve(2 * paths.size());
      for (int i = 0; i < (int)paths.size(); ++i) {
        double l = (*paths[i].llr[n])[0];
        cand.push_back({i, 0, paths[i].pm + (l < 0 ? -l : 0.0)});
        cand.push_back({i, 1, paths[i].pm + (l > 0 ? l : 0.0)});
      }
      if ((int)cand.size() > L) {
        std::stable_sort(cand.begin(), cand.end(),
                         [](const Cand& a, const Cand& b) { return a.pm < b.pm; });
        cand.resize(L);
      }
      std::vector<Path> next;
      next.reserve(cand.size());
      for (const Cand& c : cand) {
        next.push_back(paths[c.parent]);  // shares arrays until written
        next.back().pm = c.pm;
        writable(next.back().bits[n])[phase & 1] = c.bit;
      }
      paths = std::move(next);
    }

    if (phase & 1)
      for (Path& p : paths) update_bits(p, n, n, phase);
  }

  std::vector<int> order((int)paths.size());
  for (int i = 0; i < (int)order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return paths[a].pm < paths[b].pm; });

  auto extract = [&](const Path& p) {
    // bits[0] phase 0 holds the full re-encoded codeword; the transform is
    // self-inverse, so one more pass recovers the transform-domain decisions.
    std::vector<std::uint8_t> cw(p.bits[0]->begin(), p.bits[0]->begin() + nbits);
    polar_transform(cw);
    std::vector<std::uint8_t> payload(cfg.info_v.size());
    for (size_t j = 0; j < cfg.info_v.size(); ++j) payload[j] = cw[cfg.info_v[j]];
    return payload;
  };

  DecodeResult res;
  for (int idx : order) {
    std::vector<std::uint8_t> payload = extract(paths[idx]);
    if (cfg.crc_len == 0 || crc_check(payload, cfg.crc_poly, cfg.crc_len)) {
      payload.resize(cfg.num_info);
      res.message = std::move(payload);
      res.crc_pass = true;
      return res;
    }
  }
  std::vector<std::uint8_t> payload = extract(paths[order[0]]);
  payload.resize(cfg.num_info);
  res.message = std::move(payload);
  res.crc_pass = false;
  return res;
}

}  // namespace rsmalink
