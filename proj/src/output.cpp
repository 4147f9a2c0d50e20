// Copyright 2026 The tdmpo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tdmpo/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

namespace tdmpo {

namespace {

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

nlohmann::json number_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_timeseries_csv(const std::string& path, const TimeSeries& series) {
  auto out = open_or_throw(path);
  out << "t [1/J],eta_tot [1],max_bond [1]\n";
  for (const auto& r : series.rows) {
    out << format_double(r.t) << ',' << format_double(r.eta_tot) << ',' << r.max_bond << '\n';
  }
}

void write_timing_csv(const std::string& path, const TimeSeries& series) {
  auto out = open_or_throw(path);
  out << "t [1/J],wall_ms [ms]\n";
  for (const auto& r : series.rows) out << format_double(r.t) << ',' << format_double(r.wall_ms) << '\n';
}

void write_deps_csv(const std::string& path, const DepsTable& table) {
  auto out = open_or_throw(path);
  out << "D [1],t_star [1/J],status\n";
  for (const auto& row : table.rows) {
    out << row.d << ',';
    if (row.t_star) out << format_double(*row.t_star);
    out << ',' << (!row.error.empty() ? "error" : (row.t_star ? "crossed" : "not_reached")) << '\n';
  }
}

void write_histogram_csv(const std::string& path, const SpacingHistogram& hist) {
  auto out = open_or_throw(path);
  out << "s [1],density [1]\n";
  for (std::size_t b = 0; b < hist.densities.size(); ++b) {
    const double center = 0.5 * (hist.edges[b] + hist.edges[b + 1]);
    out << format_double(center) << ',' << format_double(hist.densities[b]) << '\n';
  }
}

void write_spacings_csv(const std::string& path, const std::vector<double>& samples) {
  auto out = open_or_throw(path);
  out << "s [1]\n";
  for (double s : samples) out << format_double(s) << '\n';
}

void write_fidelity_csv(const std::string& path, const FidelityReport& report) {
  auto out = open_or_throw(path);
  out << "D [1],t [1/J],eta_tot [1],infidelity [1]\n";
  for (const auto& s : report.samples) {
    out << s.d << ',' << format_double(s.t) << ',' << format_double(s.eta_tot) << ','
        << format_double(s.infidelity) << '\n';
  }
}

nlohmann::json to_json(const RunConfig& config) {
  return {
      {"n", config.model.n},
      {"hx", config.model.hx},
      {"hz", config.model.hz},
      {"initial", describe(config.initial)},
      {"dt", config.dt},
      {"t_max", config.t_max},
      {"d_max", config.d_max},
      {"eps", config.eps},
      {"renormalize", config.renormalize},
      {"stop_factor", config.stop_factor},
      {"splitting", splitting_conventions()},
  };
}

nlohmann::json to_json(const FitReport& report) {
  nlohmann::json fits = nlohmann::json::array();
  for (const auto& f : report.fits) {
    fits.push_back({{"model", to_string(f.model)},
                    {"intercept", number_or_null(f.intercept)},
                    {"slope", number_or_null(f.slope)},
                    {"slope_stderr", number_or_null(f.slope_stderr)},
                    {"log_residual", number_or_null(f.residual)}});
  }
  nlohmann::json j = {{"preferred", to_string(report.preferred)},
                      {"points", report.points},
                      {"h_q", number_or_null(report.h_q)},
                      {"h_q_stderr", number_or_null(report.h_q_stderr)},
                      {"fits", fits}};
  j["saturation_level"] = report.saturation_level ? nlohmann::json(*report.saturation_level) : nullptr;
  return j;
}

nlohmann::json to_json(const DepsTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : table.rows) {
    nlohmann::json row = {{"D", r.d}};
    row["t_star"] = r.t_star ? nlohmann::json(*r.t_star) : nullptr;
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(row);
  }
  return {{"eps", table.eps}, {"rows", rows}, {"inversions", table.inversions}};
}

nlohmann::json to_json(const LsdReport& report) {
  return {{"verdict", report.verdict},
          {"ks_wigner", report.ks_wigner},
          {"ks_poisson", report.ks_poisson},
          {"samples", report.samples},
          {"fraction_below_0.25", report.fraction_below_quarter}};
}

nlohmann::json to_json(const FidelityReport& report) {
  nlohmann::json per_d = nlohmann::json::object();
  for (const auto& [d, c] : report.c_per_d) per_d[std::to_string(d)] = number_or_null(c);
  return {{"c_pooled", number_or_null(report.c_pooled)},
          {"pooled_points", report.pooled_points},
          {"c_per_D", per_d}};
}

void write_json(const std::string& path, const nlohmann::json& value) {
  auto out = open_or_throw(path);
  out << value.dump(2) << '\n';
}

}  // namespace tdmpo
