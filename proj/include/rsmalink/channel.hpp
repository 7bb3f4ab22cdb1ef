#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "common.hpp"
#include "sysmodel.hpp"

// Channel generators.  Everything here is a pure function of (parameters,
// seed): same inputs, same matrix, so Monte-Carlo campaigns can be sharded
// and merged without changing results.

namespace rsmalink {

namespace detail {

// CN(0, var) draw.  Real and imaginary parts each N(0, var/2).
inline cplx randcn(std::mt19937_64& rng, double var) {
  std::normal_distribution<double> g(0.0, std::sqrt(var / 2.0));
  double re = g(rng);
  double im = g(rng);
  return {re, im};
}

}  // namespace detail

// i.i.d. Rayleigh fading: entries CN(0,1).
inline cmat gen_rayleigh(int nt, int num_users, std::uint64_t seed) {
  if (nt < 1 || num_users < 1)
    throw std::invalid_argument("channel dimensions must be positive");
  std::mt19937_64 rng(seed);
  cmat h(nt, num_users);
  for (int k = 0; k < num_users; ++k)
    for (int n = 0; n < nt; ++n) h(n, k) = detail::randcn(rng, 1.0);
  return h;
}

// One CSIT-error draw: i.i.d. CN(0, var) entries.
inline cmat gen_error_matrix(int nt, int num_users, double var, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  cmat e(nt, num_users);
  for (int k = 0; k < num_users; ++k)
    for (int n = 0; n < nt; ++n) e(n, k) = detail::randcn(rng, var);
  return e;
}

// Imperfect CSIT: error entries i.i.d. CN(0, P^-alpha), estimate = true minus
// error.  The error is drawn once per realization (block static).  The
// returned true channel is re-formed as estimate + error so the decomposition
// holds bit-exactly in floating point; the adjustment is below one ulp of the
// error draw and leaves the distribution untouched.
inline ChannelRealization apply_csit_error(const cmat& h, double alpha, double power,
                                           std::uint64_t seed) {
  if (power <= 0.0) throw std::invalid_argument("power must be positive");
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha outside [0,1]");
  const double err_var = std::pow(power, -alpha);
  std::mt19937_64 rng(seed);
  ChannelRealization cr;
  cr.Htilde.resize(h.rows(), h.cols());
  for (int k = 0; k < h.cols(); ++k)
    for (int n = 0; n < h.rows(); ++n) cr.Htilde(n, k) = detail::randcn(rng, err_var);
  cr.Hhat = h - cr.Htilde;
  cr.H = cr.Hhat + cr.Htilde;
  return cr;
}

// Multibeam GEO satellite, single feed per beam, standard link model:
//
//   h_{n,k} = sqrt(G_rx * G_n(theta_{n,k}) / L_k) * xi_k * e^{j phi_k}
//
//   G_n(theta) = G_max * (J1(u)/(2u) + 36 J3(u)/u^3)^2,
//                u = 2.07123 sin(theta)/sin(theta_3dB)
//   L_k        = (4 pi d_k / lambda)^2 * kappa * T * B   (noise folded in)
//   xi_k       = 10^(-xi_dB/20), ln(xi_dB) ~ N(rain_mu, rain_sigma^2)
//   phi_k      ~ U[0, 2pi), common across beams (co-located feeds)
//
// Beams sit on a hexagonal grid (center plus rings) with spacing sqrt(3) r_b,
// r_b = altitude * tan(theta_3dB); each beam serves users_per_beam users drawn
// uniformly in its footprint disk.  With normalize_boresight the matrix is
// divided by the boresight link amplitude (user under the beam center, no
// rain), which makes entries order one so that sigma_e^2 = P^-alpha and unit
// noise keep their meaning; the absolute link budget then only shifts the
// power axis.
struct SatelliteParams {
  int num_beams = 7;
  int users_per_beam = 2;
  double g_max_dbi = 46.2;
  double g_rx_dbi = 39.7;
  double theta_3db_deg = 0.4;
  double altitude_km = 35786.0;
  double carrier_ghz = 20.0;
  double noise_temp_k = 517.0;
  double bandwidth_mhz = 500.0;
  double rain_mu = -2.6;     // of ln(attenuation in dB)
  double rain_sigma = 1.63;
  bool normalize_boresight = true;
  // Optional fixed user positions (km, ground plane, satellite above origin).
  // Empty: positions are drawn per seed, users_per_beam in each footprint.
  std::vector<std::pair<double, double>> user_positions_km;

  int num_users() const { return num_beams * users_per_beam; }
  double beam_radius_km() const {
    return altitude_km * std::tan(theta_3db_deg * M_PI / 180.0);
  }

  // Hexagonal layout: center beam, then rings of 6r beams at radius
  // r * sqrt(3) * r_b.
  std::vector<std::pair<double, double>> beam_centers_km() const {
    std::vector<std::pair<double, double>> c;
    c.emplace_back(0.0, 0.0);
    double spacing = std::sqrt(3.0) * beam_radius_km();
    for (int ring = 1; (int)c.size() < num_beams; ++ring) {
      for (int i = 0; i < 6 * ring && (int)c.size() < num_beams; ++i) {
        // walk the hexagon ring corner to corner
        double corner = M_PI / 3.0 * (i / ring);
        double next = M_PI / 3.0 * (i / ring + 1);
        double t = (double)(i % ring) / ring;
        double x = ring * spacing *
                   ((1 - t) * std::cos(corner) + t * std::cos(next));
        double y = ring * spacing *
                   ((1 - t) * std::sin(corner) + t * std::sin(next));
        c.emplace_back(x, y);
      }
    }
    return c;
  }
};

namespace detail {

// Normalized radiation pattern, equals 1 at boresight.
inline double beam_pattern(double theta_rad, double theta_3db_rad) {
  double u = 2.07123 * std::sin(theta_rad) / std::sin(theta_3db_rad);
  if (u < 1e-8) return 1.0;  // J1(u)/(2u) -> 1/4, 36 J3(u)/u^3 -> 3/4
  double a = std::cyl_bessel_j(1.0, u) / (2.0 * u);
  double b = 36.0 * std::cyl_bessel_j(3.0, u) / (u * u * u);
  double amp = a + b;
  return amp * amp;
}

}  // namespace detail

inline cmat gen_satellite_channel(const SatelliteParams& sp, std::uint64_t seed) {
  if (sp.num_beams < 1 || sp.users_per_beam < 1)
    throw std::invalid_argument("satellite geometry must be nonempty");
  const int nt = sp.num_beams;
  const int num_users = sp.num_users();
  const auto centers = sp.beam_centers_km();
  const double r_b = sp.beam_radius_km();
  const double theta3 = sp.theta_3db_deg * M_PI / 180.0;
  const double g_max = db2lin(sp.g_max_dbi);
  const double g_rx = db2lin(sp.g_rx_dbi);
  const double lambda_km = 299792.458 / (sp.carrier_ghz * 1e9) * 1e3;
  const double kappa = 1.380649e-23;
  const double noise_w = kappa * sp.noise_temp_k * sp.bandwidth_mhz * 1e6;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Draw order is fixed: all positions, then per-user rain, then phase.
  std::vector<std::pair<double, double>> pos = sp.user_positions_km;
  if (pos.empty()) {
    for (int b = 0; b < nt; ++b)
      for (int u = 0; u < sp.users_per_beam; ++u) {
        double rad = r_b * std::sqrt(unit(rng));
        double ang = 2.0 * M_PI * unit(rng);
        pos.emplace_back(centers[b].first + rad * std::cos(ang),
                         centers[b].second + rad * std::sin(ang));
      }
  } else {
    if ((int)pos.size() != num_users)
      throw std::invalid_argument("need one position per user");
    for (auto& p : pos) {
      bool inside = false;
      for (auto& c : centers) {
        double dx = p.first - c.first, dy = p.second - c.second;
        inside |= dx * dx + dy * dy <= r_b * r_b * (1.0 + 1e-12);
      }
      if (!inside) throw std::invalid_argument("user outside every beam footprint");
    }
  }

  std::normal_distribution<double> rain_ln(sp.rain_mu, sp.rain_sigma);
  std::vector<double> rain_amp(num_users);
  for (int k = 0; k < num_users; ++k) {
    double xi_db = std::exp(rain_ln(rng));
    rain_amp[k] = std::pow(10.0, -xi_db / 20.0);
  }
  std::vector<double> phase(num_users);
  for (int k = 0; k < num_users; ++k) phase[k] = 2.0 * M_PI * unit(rng);

  const double d0_km = sp.altitude_km;
  auto link_amp = [&](double gain, double dist_km) {
    double fsl = 4.0 * M_PI * dist_km / lambda_km;
    return std::sqrt(g_rx * gain) / (fsl * std::sqrt(noise_w));
  };
  const double boresight = link_amp(g_max, d0_km);

  cmat h(nt, num_users);
  for (int k = 0; k < num_users; ++k) {
    double dist = std::sqrt(d0_km * d0_km + pos[k].first * pos[k].first +
                            pos[k].second * pos[k].second);
    cplx rot = std::polar(1.0, phase[k]);
    for (int n = 0; n < nt; ++n) {
      // Angle at the satellite between beam-n boresight and the user.
      double bx = centers[n].first, by = centers[n].second;
      double dot = bx * pos[k].first + by * pos[k].second + d0_km * d0_km;
      double nb = std::sqrt(bx * bx + by * by + d0_km * d0_km);
      double cosang = std::min(1.0, dot / (nb * dist));
      double theta = std::acos(cosang);
      double amp = link_amp(g_max * detail::beam_pattern(theta, theta3), dist);
      h(n, k) = amp * rain_amp[k] * rot;
    }
  }
  if (sp.normalize_boresight) h /= boresight;
  return h;
}

inline cvec awgn(const cvec& signal, double noise_variance, std::uint64_t seed) {
  if (noise_variance < 0.0) throw std::invalid_argument("negative noise variance");
  if (noise_variance == 0.0) return signal;
  std::mt19937_64 rng(seed);
  cvec out = signal;
  for (int i = 0; i < out.size(); ++i) out(i) += detail::randcn(rng, noise_variance);
  return out;
}

}  // namespace rsmalink
