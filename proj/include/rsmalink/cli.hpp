#pragma once

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rsmalink/sim.hpp"

namespace rsmalink {

// A named, fully specified campaign.  The catalog below covers the stock
// sweeps; a config file can start from one of these and override fields.
struct ScenarioPreset {
  std::string name;
  std::string summary;
  CampaignConfig config;
};

namespace cli_detail {

// Optimizer effort for the stock presets.  Heavier sampling sharpens the
// designs but the campaign cost grows linearly with it.
constexpr int kPresetSampleChannels = 300;
constexpr int kPresetMaxIterations = 100;

inline CampaignConfig cellular_preset(int nt, double alpha) {
  CampaignConfig cc;
  cc.system.nt = nt;
  cc.system.num_users = 6;
  cc.system.num_groups = 3;
  cc.system.group_map = {0, 0, 1, 1, 2, 2};
  cc.system.power = PowerConstraintSet::sum_power(1.0, nt);
  cc.system.csit_alpha = alpha;
  cc.system.noise_variance = 1.0;
  cc.system.strategy = Strategy::RSMA;
  cc.channel.kind = ChannelKind::Rayleigh;
  cc.optimizer.num_sample_channels = kPresetSampleChannels;
  cc.optimizer.max_iterations = kPresetMaxIterations;
  cc.num_realizations = 100;
  cc.channel_uses_per_realization = 256;
  cc.operating_points = {5, 10, 15, 20, 25, 30, 35};
  cc.axis = OperatingAxis::SnrDb;
  cc.master_seed = 1;
  cc.calibrate_backoff = true;
  return cc;
}

inline CampaignConfig satellite_preset() {
  CampaignConfig cc;
  SatelliteParams sat;  // stock GEO multibeam geometry
  cc.system.nt = sat.num_beams;
  cc.system.num_users = sat.num_users();
  cc.system.num_groups = sat.num_beams;
  cc.system.group_map.resize(sat.num_users());
  for (int k = 0; k < sat.num_users(); ++k)
    cc.system.group_map[k] = k / sat.users_per_beam;
  cc.system.power = PowerConstraintSet::per_antenna(1.0, sat.num_beams);
  cc.system.csit_alpha = 0.8;
  cc.system.noise_variance = 1.0;
  cc.system.strategy = Strategy::RSMA;
  cc.channel.kind = ChannelKind::Satellite;
  cc.channel.satellite = sat;
  cc.optimizer.num_sample_channels = kPresetSampleChannels;
  cc.optimizer.max_iterations = kPresetMaxIterations;
  cc.num_realizations = 100;
  cc.channel_uses_per_realization = 256;
  cc.operating_points = {0, 5, 10, 15, 20, 25, 30};
  cc.axis = OperatingAxis::PerAntennaPowerDbw;
  cc.master_seed = 1;
  cc.calibrate_backoff = true;
  return cc;
}

}  // namespace cli_detail

inline const std::vector<ScenarioPreset>& preset_catalog() {
  static const std::vector<ScenarioPreset> all = [] {
    std::vector<ScenarioPreset> v;
    v.push_back({"fig2", "underloaded cellular, 6 antennas, csit alpha 0.8",
                 cli_detail::cellular_preset(6, 0.8)});
    v.push_back({"fig3", "underloaded cellular, 6 antennas, csit alpha 0.6",
                 cli_detail::cellular_preset(6, 0.6)});
    v.push_back({"fig4", "overloaded cellular, 4 antennas, csit alpha 0.8",
                 cli_detail::cellular_preset(4, 0.8)});
    v.push_back({"fig5", "overloaded cellular, 4 antennas, csit alpha 0.6",
                 cli_detail::cellular_preset(4, 0.6)});
    v.push_back({"fig6", "GEO multibeam satellite, 7 beams, 14 users",
                 cli_detail::satellite_preset()});
    return v;
  }();
  return all;
}

inline const ScenarioPreset* find_preset(const std::string& name) {
  for (const ScenarioPreset& p : preset_catalog())
    if (p.name == name) return &p;
  return nullptr;
}

inline std::string preset_names() {
  std::string s;
  for (const ScenarioPreset& p : preset_catalog()) {
    if (!s.empty()) s += ", ";
    s += p.name;
  }
  return s;
}

namespace cli_detail {

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace((unsigned char)s[b])) ++b;
  while (e > b && std::isspace((unsigned char)s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

inline double parse_double(const std::string& v, const std::string& key) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError("bad number for " + key + ": '" + v + "'");
  return out;
}

inline long long parse_ll(const std::string& v, const std::string& key) {
  long long out = 0;
  const char* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError("bad integer for " + key + ": '" + v + "'");
  return out;
}

inline int parse_int(const std::string& v, const std::string& key) {
  return (int)parse_ll(v, key);
}

inline std::uint64_t parse_u64(const std::string& v, const std::string& key) {
  std::uint64_t out = 0;
  const char* end = v.data() + v.size();
  const auto r = std::from_chars(v.data(), end, out);
  if (r.ec != std::errc() || r.ptr != end)
    throw ConfigError("bad unsigned integer for " + key + ": '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("bad boolean for " + key + ": '" + v + "'");
}

inline std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    const size_t pos = v.find(sep, start);
    parts.push_back(trim(std::string_view(v).substr(
        start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::vector<double> parse_double_list(const std::string& v,
                                             const std::string& key) {
  std::vector<double> out;
  for (const std::string& p : split(v, ',')) {
    if (p.empty()) throw ConfigError("empty element in list for " + key);
    out.push_back(parse_double(p, key));
  }
  return out;
}

inline std::vector<int> parse_int_list(const std::string& v,
                                       const std::string& key) {
  std::vector<int> out;
  for (const std::string& p : split(v, ',')) {
    if (p.empty()) throw ConfigError("empty element in list for " + key);
    out.push_back(parse_int(p, key));
  }
  return out;
}

// "x:y" pairs, comma separated, used for fixed satellite user positions.
inline std::vector<std::pair<double, double>> parse_position_list(
    const std::string& v, const std::string& key) {
  std::vector<std::pair<double, double>> out;
  for (const std::string& p : split(v, ',')) {
    const size_t colon = p.find(':');
    if (colon == std::string::npos)
      throw ConfigError("expected x:y pair for " + key + ", got '" + p + "'");
    out.emplace_back(parse_double(trim(std::string_view(p).substr(0, colon)), key),
                     parse_double(trim(std::string_view(p).substr(colon + 1)), key));
  }
  return out;
}

// Campaign under construction from a preset and/or a config file.  The power
// constraint is staged because its geometry needs the antenna count, which a
// later line may still change.
struct FileConfig {
  CampaignConfig cc;
  std::string scenario_id;
  bool strategy_set = false;
  Strategy strategy = Strategy::RSMA;
  int power_kind = 0;  // 0 unset, 1 sum, 2 per antenna
  bool power_value_set = false;
  double power_value = 0.0;
};

inline FileConfig from_preset(const ScenarioPreset& p) {
  FileConfig fc;
  fc.cc = p.config;
  fc.scenario_id = p.name;
  return fc;
}

inline void set_key(FileConfig& fc, const std::string& key,
                    const std::string& val) {
  CampaignConfig& cc = fc.cc;
  SatelliteParams& sat = cc.channel.satellite;

  if (key == "scenario_id") {
    fc.scenario_id = val;
  } else if (key == "system.nt") {
    cc.system.nt = parse_int(val, key);
  } else if (key == "system.num_users") {
    cc.system.num_users = parse_int(val, key);
  } else if (key == "system.num_groups") {
    cc.system.num_groups = parse_int(val, key);
  } else if (key == "system.group_map") {
    cc.system.group_map = parse_int_list(val, key);
  } else if (key == "system.csit_alpha") {
    cc.system.csit_alpha = parse_double(val, key);
  } else if (key == "system.noise_variance") {
    cc.system.noise_variance = parse_double(val, key);
  } else if (key == "system.strategy") {
    if (val == "rsma") fc.strategy = Strategy::RSMA;
    else if (val == "sdma") fc.strategy = Strategy::SDMA;
    else throw ConfigError("system.strategy must be rsma or sdma, got '" + val + "'");
    fc.strategy_set = true;
  } else if (key == "system.power.kind") {
    if (val == "sum") fc.power_kind = 1;
    else if (val == "per_antenna") fc.power_kind = 2;
    else throw ConfigError("system.power.kind must be sum or per_antenna, got '" + val + "'");
  } else if (key == "system.power.value") {
    fc.power_value = parse_double(val, key);
    fc.power_value_set = true;
  } else if (key == "channel.kind") {
    if (val == "rayleigh") cc.channel.kind = ChannelKind::Rayleigh;
    else if (val == "satellite") cc.channel.kind = ChannelKind::Satellite;
    else throw ConfigError("channel.kind must be rayleigh or satellite, got '" + val + "'");
  } else if (key == "channel.satellite.num_beams") {
    sat.num_beams = parse_int(val, key);
  } else if (key == "channel.satellite.users_per_beam") {
    sat.users_per_beam = parse_int(val, key);
  } else if (key == "channel.satellite.g_max_dbi") {
    sat.g_max_dbi = parse_double(val, key);
  } else if (key == "channel.satellite.g_rx_dbi") {
    sat.g_rx_dbi = parse_double(val, key);
  } else if (key == "channel.satellite.theta_3db_deg") {
    sat.theta_3db_deg = parse_double(val, key);
  } else if (key == "channel.satellite.altitude_km") {
    sat.altitude_km = parse_double(val, key);
  } else if (key == "channel.satellite.carrier_ghz") {
    sat.carrier_ghz = parse_double(val, key);
  } else if (key == "channel.satellite.noise_temp_k") {
    sat.noise_temp_k = parse_double(val, key);
  } else if (key == "channel.satellite.bandwidth_mhz") {
    sat.bandwidth_mhz = parse_double(val, key);
  } else if (key == "channel.satellite.rain_mu") {
    sat.rain_mu = parse_double(val, key);
  } else if (key == "channel.satellite.rain_sigma") {
    sat.rain_sigma = parse_double(val, key);
  } else if (key == "channel.satellite.normalize_boresight") {
    sat.normalize_boresight = parse_bool(val, key);
  } else if (key == "channel.satellite.user_positions_km") {
    sat.user_positions_km = parse_position_list(val, key);
  } else if (key == "amc.alphabets") {
    cc.amc.alphabets = parse_int_list(val, key);
  } else if (key == "amc.beta") {
    cc.amc.beta = parse_double(val, key);
  } else if (key == "amc.max_order_log") {
    cc.amc.max_order_log = parse_int(val, key);
  } else if (key == "amc.backoff_common_db") {
    cc.amc.backoff_common_db = parse_double(val, key);
  } else if (key == "amc.backoff_private_db") {
    cc.amc.backoff_private_db = parse_double(val, key);
  } else if (key == "amc.crc_len") {
    cc.amc.crc_len = parse_int(val, key);
  } else if (key == "amc.symbols_per_frame") {
    throw ConfigError("amc.symbols_per_frame is derived from sim.channel_uses");
  } else if (key == "optimizer.num_sample_channels") {
    cc.optimizer.num_sample_channels = parse_int(val, key);
  } else if (key == "optimizer.max_iterations") {
    cc.optimizer.max_iterations = parse_int(val, key);
  } else if (key == "optimizer.convergence_epsilon") {
    cc.optimizer.convergence_epsilon = parse_double(val, key);
  } else if (key == "optimizer.initialization") {
    if (val == "mrt_svd") cc.optimizer.initialization = Initialization::MrtSvd;
    else if (val == "random") cc.optimizer.initialization = Initialization::Random;
    else throw ConfigError("optimizer.initialization must be mrt_svd or random, got '" + val + "'");
  } else if (key == "sim.num_realizations") {
    cc.num_realizations = parse_int(val, key);
  } else if (key == "sim.channel_uses") {
    cc.channel_uses_per_realization = parse_int(val, key);
  } else if (key == "sim.operating_points") {
    cc.operating_points = parse_double_list(val, key);
  } else if (key == "sim.axis") {
    if (val == "snr_db") cc.axis = OperatingAxis::SnrDb;
    else if (val == "power_dbw") cc.axis = OperatingAxis::PerAntennaPowerDbw;
    else throw ConfigError("sim.axis must be snr_db or power_dbw, got '" + val + "'");
  } else if (key == "sim.master_seed") {
    cc.master_seed = parse_u64(val, key);
  } else if (key == "sim.list_size") {
    cc.list_size = parse_int(val, key);
  } else if (key == "sim.redraw_estimate") {
    cc.redraw_estimate = parse_bool(val, key);
  } else if (key == "sim.calibrate_backoff") {
    cc.calibrate_backoff = parse_bool(val, key);
  } else if (key == "sim.calibrate_per_class") {
    cc.calibrate_per_class = parse_bool(val, key);
  } else if (key == "sim.backoff_grid_db") {
    cc.backoff_grid_db = parse_double_list(val, key);
  } else if (key == "sim.target_bler") {
    cc.target_bler = parse_double(val, key);
  } else if (key == "sim.precoders") {
    cc.precoder_load_path = val;
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

inline void apply_config_file(FileConfig& fc, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  bool any = false;
  while (std::getline(f, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto where = [&] { return path + ":" + std::to_string(lineno); };
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(where() + ": expected 'key = value'");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string val = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError(where() + ": empty key");
    try {
      if (key == "preset") {
        // The preset replaces everything, so it only makes sense up front.
        if (any)
          throw ConfigError("preset must be the first setting in the file");
        const ScenarioPreset* p = find_preset(val);
        if (!p)
          throw ConfigError("unknown preset '" + val +
                            "'; valid presets: " + preset_names());
        const std::string keep_id = fc.scenario_id;
        fc = from_preset(*p);
        if (!keep_id.empty()) fc.scenario_id = keep_id;
      } else {
        set_key(fc, key, val);
      }
    } catch (const ConfigError& e) {
      throw ConfigError(where() + ": " + e.what());
    }
    any = true;
  }
}

inline void finalize_power(FileConfig& fc) {
  if (fc.power_kind == 0 && !fc.power_value_set) return;
  if (fc.power_kind == 0 || !fc.power_value_set)
    throw ConfigError(
        "system.power.kind and system.power.value must be given together");
  fc.cc.system.power =
      fc.power_kind == 1
          ? PowerConstraintSet::sum_power(fc.power_value, fc.cc.system.nt)
          : PowerConstraintSet::per_antenna(fc.power_value, fc.cc.system.nt);
}

inline std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string fmt_coord(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace cli_detail

// Static summary plot: measured throughput (solid, markers) and the Shannon
// bound (dashed) against the operating axis, one color per strategy.
// Invalid points are left out of the curves.
inline void write_scenario_svg(std::ostream& os,
                               const std::vector<CampaignResult>& runs,
                               std::string_view title) {
  using cli_detail::fmt_coord;
  using cli_detail::fmt_g;

  const double width = 640, height = 480;
  const double ml = 70, mr = 24, mt = 42, mb = 58;

  double xmin = 0, xmax = 0, ymax = 0;
  bool have_x = false;
  for (const CampaignResult& r : runs)
    for (const PointResult& pt : r.points) {
      if (!have_x) {
        xmin = xmax = pt.point_db;
        have_x = true;
      } else {
        xmin = std::min(xmin, pt.point_db);
        xmax = std::max(xmax, pt.point_db);
      }
      if (pt.valid)
        ymax = std::max({ymax, pt.measured_mmf, pt.shannon_bound});
    }
  if (!have_x) xmin = 0, xmax = 1;
  if (xmax == xmin) xmin -= 1, xmax += 1;
  if (ymax <= 0) ymax = 1;
  ymax *= 1.08;

  const auto sx = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  const auto sy = [&](double y) {
    return height - mb - y / ymax * (height - mt - mb);
  };

  const char* axis_label = "SNR [dB]";
  if (!runs.empty() && runs[0].config.axis == OperatingAxis::PerAntennaPowerDbw)
    axis_label = "Per-antenna power [dBW]";

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
     << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
     << height << "\">\n";
  os << "<rect width=\"" << width << "\" height=\"" << height
     << "\" fill=\"#ffffff\"/>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" font-family=\"sans-serif\""
     << " font-size=\"16\" text-anchor=\"middle\" fill=\"#222\">" << title
     << "</text>\n";

  // Horizontal gridlines on a 1-2-5 step.
  double step = ymax / 5;
  {
    const double mag = std::pow(10.0, std::floor(std::log10(step)));
    const double r = step / mag;
    step = (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
  }
  for (double y = 0; y <= ymax + 1e-12; y += step) {
    os << "<line x1=\"" << fmt_coord(ml) << "\" y1=\"" << fmt_coord(sy(y))
       << "\" x2=\"" << fmt_coord(width - mr) << "\" y2=\"" << fmt_coord(sy(y))
       << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt_coord(ml - 8) << "\" y=\"" << fmt_coord(sy(y) + 4)
       << "\" font-family=\"sans-serif\" font-size=\"11\""
       << " text-anchor=\"end\" fill=\"#444\">" << fmt_g(y) << "</text>\n";
  }

  // One x tick per operating point, thinned when the grid is dense.
  std::vector<double> xs;
  if (!runs.empty())
    for (const PointResult& pt : runs[0].points) xs.push_back(pt.point_db);
  const size_t stride = xs.size() > 9 ? (xs.size() + 8) / 9 : 1;
  for (size_t i = 0; i < xs.size(); i += stride) {
    const double x = sx(xs[i]);
    os << "<line x1=\"" << fmt_coord(x) << "\" y1=\"" << fmt_coord(height - mb)
       << "\" x2=\"" << fmt_coord(x) << "\" y2=\""
       << fmt_coord(height - mb + 5) << "\" stroke=\"#444444\""
       << " stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt_coord(x) << "\" y=\""
       << fmt_coord(height - mb + 19) << "\" font-family=\"sans-serif\""
       << " font-size=\"11\" text-anchor=\"middle\" fill=\"#444\">"
       << fmt_g(xs[i]) << "</text>\n";
  }

  // Axes.
  os << "<line x1=\"" << fmt_coord(ml) << "\" y1=\"" << fmt_coord(mt)
     << "\" x2=\"" << fmt_coord(ml) << "\" y2=\"" << fmt_coord(height - mb)
     << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << fmt_coord(ml) << "\" y1=\"" << fmt_coord(height - mb)
     << "\" x2=\"" << fmt_coord(width - mr) << "\" y2=\""
     << fmt_coord(height - mb) << "\" stroke=\"#333333\""
     << " stroke-width=\"1\"/>\n";
  os << "<text x=\"" << fmt_coord(ml + (width - ml - mr) / 2) << "\" y=\""
     << fmt_coord(height - 14) << "\" font-family=\"sans-serif\""
     << " font-size=\"13\" text-anchor=\"middle\" fill=\"#222\">" << axis_label
     << "</text>\n";
  os << "<text x=\"18\" y=\"" << fmt_coord(mt + (height - mt - mb) / 2)
     << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\""
     << " fill=\"#222\" transform=\"rotate(-90 18 "
     << fmt_coord(mt + (height - mt - mb) / 2)
     << ")\">MMF throughput [bit/channel use]</text>\n";

  const auto color_of = [](Strategy s) {
    return s == Strategy::RSMA ? "#1669c1" : "#c62828";
  };
  const auto name_of = [](Strategy s) {
    return s == Strategy::RSMA ? "RSMA" : "SDMA";
  };

  for (const CampaignResult& r : runs) {
    const char* color = color_of(r.config.system.strategy);
    std::string measured, bound;
    for (const PointResult& pt : r.points) {
      if (!pt.valid) continue;
      measured += fmt_coord(sx(pt.point_db)) + "," +
                  fmt_coord(sy(pt.measured_mmf)) + " ";
      bound += fmt_coord(sx(pt.point_db)) + "," +
               fmt_coord(sy(pt.shannon_bound)) + " ";
    }
    os << "<polyline points=\"" << bound << "\" fill=\"none\" stroke=\""
       << color << "\" stroke-width=\"1.6\" stroke-dasharray=\"6,4\"/>\n";
    os << "<polyline points=\"" << measured << "\" fill=\"none\" stroke=\""
       << color << "\" stroke-width=\"2\"/>\n";
    for (const PointResult& pt : r.points) {
      if (!pt.valid) continue;
      os << "<circle cx=\"" << fmt_coord(sx(pt.point_db)) << "\" cy=\""
         << fmt_coord(sy(pt.measured_mmf)) << "\" r=\"3\" fill=\"" << color
         << "\"/>\n";
    }
  }

  // Legend, top left inside the frame.
  double ly = mt + 16;
  for (const CampaignResult& r : runs) {
    const char* color = color_of(r.config.system.strategy);
    const char* name = name_of(r.config.system.strategy);
    os << "<line x1=\"" << fmt_coord(ml + 12) << "\" y1=\"" << fmt_coord(ly)
       << "\" x2=\"" << fmt_coord(ml + 40) << "\" y2=\"" << fmt_coord(ly)
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt_coord(ml + 46) << "\" y=\"" << fmt_coord(ly + 4)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">"
       << name << " throughput</text>\n";
    ly += 17;
    os << "<line x1=\"" << fmt_coord(ml + 12) << "\" y1=\"" << fmt_coord(ly)
       << "\" x2=\"" << fmt_coord(ml + 40) << "\" y2=\"" << fmt_coord(ly)
       << "\" stroke=\"" << color << "\" stroke-width=\"1.6\""
       << " stroke-dasharray=\"6,4\"/>\n";
    os << "<text x=\"" << fmt_coord(ml + 46) << "\" y=\"" << fmt_coord(ly + 4)
       << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">"
       << name << " Shannon bound</text>\n";
    ly += 17;
  }

  os << "</svg>\n";
}

// Command-line front end.  Exit codes: 0 success, 2 configuration problem
// (unknown scenario, bad flag, config parse failure), 3 runtime failure
// (unwritable output, campaign blowup).  Worker count comes from the
// RSMA_LLS_WORKERS environment variable; the default is one.
inline int cli_main(int argc, const char* const* argv) {
  namespace fs = std::filesystem;

  CLI::App app{"Link-level simulator for multigroup multicast downlink"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand(
      "run", "Run a campaign from a preset or a config file. Presets: " +
                 preset_names());

  std::string target, scenario, config_path_flag, strategy = "both";
  std::string snr_grid, precoders, out_dir = "results";
  int mc = 0, frame_len = 0;
  std::uint64_t seed = 0;
  double backoff = 0.0;
  bool calibrate = false;

  run->add_option("target", target, "Preset name or config file path");
  CLI::Option* opt_scenario =
      run->add_option("--scenario", scenario, "Preset name");
  run->add_option("--config", config_path_flag,
                  "Config file applied on top of the preset, if any");
  run->add_option("--strategy", strategy, "rsma, sdma or both")
      ->check(CLI::IsMember({"rsma", "sdma", "both"}));
  run->add_option("--snr-grid", snr_grid,
                  "Comma separated operating points, replaces the preset grid");
  run->add_option("--mc", mc, "Monte-Carlo realizations per point")
      ->check(CLI::PositiveNumber);
  run->add_option("--frame-len", frame_len, "Channel uses per realization")
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Master seed");
  CLI::Option* opt_backoff = run->add_option(
      "--backoff", backoff,
      "Fixed backoff in dB for both stream classes, disables calibration");
  CLI::Option* opt_calibrate = run->add_flag(
      "--calibrate-backoff", calibrate,
      "Pick the backoff per point by measured throughput under the BLER target");
  run->add_option("--precoders", precoders,
                  "Load precoders from a file instead of optimizing");
  run->add_option("--out", out_dir, "Output directory (default: results)");
  opt_backoff->excludes(opt_calibrate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    // Resolve the campaign: preset, then config file, then flag overrides.
    cli_detail::FileConfig fc;
    bool have_base = false;

    if (!target.empty() && !opt_scenario->empty()) {
      std::fprintf(stderr,
                   "give the scenario either positionally or via --scenario, "
                   "not both\n");
      return 2;
    }
    std::string config_path = config_path_flag;
    if (!target.empty()) {
      if (const ScenarioPreset* p = find_preset(target)) {
        fc = cli_detail::from_preset(*p);
        have_base = true;
      } else if (fs::exists(target)) {
        config_path = target;
        if (!config_path_flag.empty()) {
          std::fprintf(stderr, "two config files given: '%s' and '%s'\n",
                       target.c_str(), config_path_flag.c_str());
          return 2;
        }
      } else {
        std::fprintf(stderr,
                     "unknown scenario '%s' (and no such config file); valid "
                     "presets: %s\n",
                     target.c_str(), preset_names().c_str());
        return 2;
      }
    }
    if (!opt_scenario->empty()) {
      const ScenarioPreset* p = find_preset(scenario);
      if (!p) {
        std::fprintf(stderr, "unknown scenario '%s'; valid presets: %s\n",
                     scenario.c_str(), preset_names().c_str());
        return 2;
      }
      fc = cli_detail::from_preset(*p);
      have_base = true;
    }
    if (!config_path.empty()) {
      cli_detail::apply_config_file(fc, config_path);
      if (fc.scenario_id.empty())
        fc.scenario_id = fs::path(config_path).stem().string();
      have_base = true;
    }
    if (!have_base) {
      std::fprintf(stderr,
                   "no scenario given; pass a preset name or a config file. "
                   "Valid presets: %s\n",
                   preset_names().c_str());
      return 2;
    }
    cli_detail::finalize_power(fc);

    CampaignConfig cc = fc.cc;
    if (run->count("--snr-grid"))
      cc.operating_points = cli_detail::parse_double_list(snr_grid, "--snr-grid");
    if (run->count("--mc")) cc.num_realizations = mc;
    if (run->count("--frame-len")) cc.channel_uses_per_realization = frame_len;
    if (run->count("--seed")) cc.master_seed = seed;
    if (run->count("--backoff")) {
      cc.amc.backoff_common_db = backoff;
      cc.amc.backoff_private_db = backoff;
      cc.calibrate_backoff = false;
    }
    if (calibrate) cc.calibrate_backoff = true;
    if (run->count("--precoders")) cc.precoder_load_path = precoders;

    std::string strat = strategy;
    if (!run->count("--strategy") && fc.strategy_set)
      strat = fc.strategy == Strategy::RSMA ? "rsma" : "sdma";

    std::vector<Strategy> strategies;
    if (strat == "rsma") strategies = {Strategy::RSMA};
    else if (strat == "sdma") strategies = {Strategy::SDMA};
    else strategies = {Strategy::RSMA, Strategy::SDMA};

    int workers = 1;
    if (const char* w = std::getenv("RSMA_LLS_WORKERS")) {
      char* end = nullptr;
      const long v = std::strtol(w, &end, 10);
      if (end && *end == '\0' && v > 0) workers = (int)v;
    }

    std::vector<CampaignResult> results;
    for (Strategy s : strategies) {
      CampaignConfig c = cc;
      c.system.strategy = s;
      results.push_back(run_campaign(c, workers));
      const CampaignResult& r = results.back();
      double lo = 0, hi = 0;
      bool any = false;
      int bad = 0;
      for (const PointResult& pt : r.points) {
        if (!pt.valid) {
          ++bad;
          continue;
        }
        lo = any ? std::min(lo, pt.measured_mmf) : pt.measured_mmf;
        hi = any ? std::max(hi, pt.measured_mmf) : pt.measured_mmf;
        any = true;
      }
      std::printf("%s %s: %zu points, throughput %s .. %s bit/use%s\n",
                  fc.scenario_id.c_str(),
                  s == Strategy::RSMA ? "rsma" : "sdma", r.points.size(),
                  any ? cli_detail::fmt_g(lo).c_str() : "n/a",
                  any ? cli_detail::fmt_g(hi).c_str() : "n/a",
                  bad ? (" (" + std::to_string(bad) + " invalid)").c_str() : "");
      std::fflush(stdout);
    }

    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
      throw std::runtime_error("cannot create output directory '" + out_dir +
                               "': " + ec.message());

    const fs::path csv_path = dir / (fc.scenario_id + ".csv");
    {
      std::ofstream f(csv_path);
      if (!f)
        throw std::runtime_error("cannot write " + csv_path.string());
      write_campaign_header(f, cc.axis, cc.system.num_users);
      for (const CampaignResult& r : results)
        write_campaign_rows(f, r, fc.scenario_id);
      if (!f) throw std::runtime_error("write failed: " + csv_path.string());
    }
    const fs::path svg_path = dir / (fc.scenario_id + ".svg");
    {
      std::ofstream f(svg_path);
      if (!f)
        throw std::runtime_error("cannot write " + svg_path.string());
      write_scenario_svg(f, results, fc.scenario_id);
      if (!f) throw std::runtime_error("write failed: " + svg_path.string());
    }
    std::printf("wrote %s\n", csv_path.string().c_str());
    std::printf("wrote %s\n", svg_path.string().c_str());
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}

}  // namespace rsmalink
