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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tdmpo/harness.hpp"

namespace tdmpo {

namespace {

struct Line {
  double a = 0.0;
  double b = 0.0;
  double b_stderr = 0.0;
};

// Ordinary least squares y = a + b x.
Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const auto m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  Line line;
  line.b = sxx > 0.0 ? sxy / sxx : 0.0;
  line.a = my - line.b * mx;
  if (x.size() > 2 && sxx > 0.0) {
    double rss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - line.a - line.b * x[i];
      rss += r * r;
    }
    line.b_stderr = std::sqrt(rss / (m - 2.0) / sxx);
  }
  return line;
}

// Model predictions at or below this floor are treated as this floor on the
// log scale, which penalizes fits that predict non-positive D.
constexpr double kPredictionFloor = 1e-3;

double log_residual(const std::vector<GrowthPoint>& pts, auto&& predict) {
  double rss = 0.0;
  for (const auto& p : pts) {
    const double r = std::log(p.d) - std::log(std::max(predict(p.t), kPredictionFloor));
    rss += r * r;
  }
  return rss;
}

}  // namespace

std::string to_string(GrowthModel m) {
  switch (m) {
    case GrowthModel::Linear: return "linear";
    case GrowthModel::Quadratic: return "quadratic";
    case GrowthModel::Exponential: return "exponential";
    case GrowthModel::Saturating: return "saturating";
  }
  return "unknown";
}

const ModelFit* FitReport::fit(GrowthModel m) const {
  for (const auto& f : fits) {
    if (f.model == m) return &f;
  }
  return nullptr;
}

FitReport fit_growth(const std::vector<GrowthPoint>& points) {
  if (points.size() < 5) {
    std::ostringstream os;
    os << "fit_growth: need at least 5 points, got " << points.size();
    throw PreconditionError(os.str());
  }
  for (const auto& p : points) {
    if (!(p.d > 0.0) || !std::isfinite(p.t)) throw PreconditionError("fit_growth: points need D > 0 and finite t");
  }
  FitReport report;
  report.points = static_cast<Index>(points.size());

  const auto [dmin, dmax] = std::minmax_element(points.begin(), points.end(),
                                                [](const auto& x, const auto& y) { return x.d < y.d; });
  const auto [tmin, tmax] = std::minmax_element(points.begin(), points.end(),
                                                [](const auto& x, const auto& y) { return x.t < y.t; });
  if (dmin->d == dmax->d || tmin->t == tmax->t) {
    ModelFit flat{GrowthModel::Saturating, dmax->d, 0.0, 0.0, 0.0};
    report.fits.push_back(flat);
    report.preferred = GrowthModel::Saturating;
    report.saturation_level = dmax->d;
    return report;
  }

  std::vector<double> t, t2, d, logd;
  for (const auto& p : points) {
    t.push_back(p.t);
    t2.push_back(p.t * p.t);
    d.push_back(p.d);
    logd.push_back(std::log(p.d));
  }

  const Line lin = fit_line(t, d);
  report.fits.push_back({GrowthModel::Linear, lin.a, lin.b, lin.b_stderr,
                         log_residual(points, [&](double x) { return lin.a + lin.b * x; })});
  const Line quad = fit_line(t2, d);
  report.fits.push_back({GrowthModel::Quadratic, quad.a, quad.b, quad.b_stderr,
                         log_residual(points, [&](double x) { return quad.a + quad.b * x * x; })});
  const Line expo = fit_line(t, logd);
  report.fits.push_back({GrowthModel::Exponential, expo.a, expo.b, expo.b_stderr,
                         log_residual(points, [&](double x) { return std::exp(expo.a + expo.b * x); })});
  double mean_log = 0.0;
  for (double v : logd) mean_log += v;
  mean_log /= static_cast<double>(logd.size());
  const double level = std::exp(mean_log);
  report.fits.push_back({GrowthModel::Saturating, level, 0.0, 0.0,
                         log_residual(points, [&](double) { return level; })});

  report.h_q = expo.b;
  report.h_q_stderr = expo.b_stderr;
  const auto best = std::min_element(report.fits.begin(), report.fits.end(),
                                     [](const auto& x, const auto& y) { return x.residual < y.residual; });
  report.preferred = best->model;
  if (report.preferred == GrowthModel::Saturating) report.saturation_level = level;
  return report;
}

FitReport fit_growth(const DepsTable& table) {
  std::vector<GrowthPoint> pts;
  std::optional<Index> unreached;
  for (const auto& row : table.rows) {
    if (!row.error.empty()) continue;
    if (row.t_star) {
      pts.push_back({*row.t_star, static_cast<double>(row.d)});
    } else if (!unreached) {
      unreached = row.d;
    }
  }
  if (pts.size() < 5 && unreached) {
    FitReport report;
    report.points = static_cast<Index>(pts.size());
    report.preferred = GrowthModel::Saturating;
    report.saturation_level = static_cast<double>(*unreached);
    report.fits.push_back({GrowthModel::Saturating, static_cast<double>(*unreached), 0.0, 0.0, 0.0});
    return report;
  }
  auto report = fit_growth(pts);
  if (unreached && !report.saturation_level) report.saturation_level = static_cast<double>(*unreached);
  return report;
}

}  // namespace tdmpo
