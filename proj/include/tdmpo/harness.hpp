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

// Experiment drivers: truncated MPO evolution with accumulated truncation
// error, crossing times t*(D) over a bond-dimension grid, growth-law fits,
// thermal quenches and the fidelity-versus-truncation benchmark.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tdmpo/mpo.hpp"
#include "tdmpo/spin_model.hpp"

namespace tdmpo {

struct PauliStringInit {
  std::map<Index, Pauli> letters;
};

struct ExtensiveInit {
  std::vector<LocalPattern> patterns;
};

/// exp(-beta H0) / norm, prepared in imaginary time. dbeta <= 0 selects
/// default_dbeta(beta).
struct ThermalInit {
  double beta = 0.0;
  double h0x = 0.0;
  double h0z = 1.0;
  double dbeta = 0.0;
};

using InitialCondition = std::variant<PauliStringInit, ExtensiveInit, ThermalInit>;

std::string describe(const InitialCondition& init);

/// Operator grammar for configs:
///   identity
///   local:<letters>[@site]  consecutive string, default ending at site n/2
///   sum:<letters>[+<letters>...]  translation-invariant sums
///   ham:<hx>,<hz>           the model Hamiltonian H(hx, hz) itself
/// Errors are reported against the field "config.op".
InitialCondition parse_operator(const std::string& text, Index n);

struct RunConfig {
  ModelParams model;
  InitialCondition initial = PauliStringInit{};
  double dt = 0.01;
  double t_max = 5.0;
  Index d_max = 16;
  double eps = 1e-4;
  bool renormalize = false;
  /// Stop once eta_tot exceeds stop_factor * eps; <= 0 disables.
  double stop_factor = 10.0;
  /// Written if the run runs out of memory.
  std::string checkpoint_path;

  void validate() const;
};

/// Default operator and thermal tolerances.
inline constexpr double kOperatorEps = 1e-4;
inline constexpr double kThermalEps = 1e-6;
inline constexpr double kDefaultDt = 0.01;

struct TimeSeriesRow {
  double t = 0.0;
  double eta_tot = 0.0;
  Index max_bond = 1;
  double wall_ms = 0.0;
};

struct TimeSeries {
  RunConfig config;
  std::vector<TimeSeriesRow> rows;
  bool stopped_early = false;
  double thermal_eta = 0.0;  // imaginary-time truncation, thermal runs only
};

/// Builds the t = 0 operator (runs thermal_prepare for thermal descriptors).
Mpo initial_operator(const InitialCondition& init, Index n, Index d_max,
                     double* thermal_eta = nullptr);

/// Stateful real- or imaginary-time stepper around one Mpo.
class Evolution {
 public:
  Evolution(Mpo initial, const ModelParams& model, double dt, GateOptions options,
            TimeKind kind = TimeKind::Real);

  /// One symmetric Trotter step; returns its truncation error.
  double step();
  double time() const { return static_cast<double>(steps_) * dt_; }
  Index steps() const { return steps_; }
  double eta_tot() const { return eta_tot_; }
  const Mpo& state() const { return mpo_; }
  Mpo& state() { return mpo_; }

 private:
  Mpo mpo_;
  TrotterScheme scheme_;
  double dt_;
  GateOptions options_;
  Index steps_ = 0;
  double eta_tot_ = 0.0;
};

/// Evolves the configured operator until t_max (or early stop), recording
/// eta_tot after every step. Row 0 is t = 0.
TimeSeries run_evolution(const RunConfig& config);

/// First t at which eta_tot exceeds eps, linearly interpolated.
std::optional<double> crossing_time(const TimeSeries& series, double eps);

struct DepsRow {
  Index d = 0;
  std::optional<double> t_star;  // nullopt: not reached within t_max
  std::string error;             // non-empty if the run failed
};

struct DepsTable {
  std::vector<DepsRow> rows;
  double eps = 0.0;
  /// Grid values whose t* is smaller than that of a smaller D.
  std::vector<Index> inversions;
};

/// Worker count: TDMPO_WORKERS if set, otherwise hardware concurrency.
int default_workers();

/// One run per grid value (independent, run in parallel); results are
/// independent of the worker count.
DepsTable deps_profile(const RunConfig& base, const std::vector<Index>& grid,
                       std::vector<TimeSeries>* series = nullptr, int workers = 0);

/// D_eps(t): smallest grid D whose crossing time exceeds t (nullopt if none).
std::optional<Index> deps_at(const DepsTable& table, double t);

enum class GrowthModel { Linear, Quadratic, Exponential, Saturating };
std::string to_string(GrowthModel m);

struct ModelFit {
  GrowthModel model = GrowthModel::Linear;
  double intercept = 0.0;  // a
  double slope = 0.0;      // b, or h_q for the exponential model
  double slope_stderr = 0.0;
  double residual = 0.0;  // sum of squared log-residuals
};

struct FitReport {
  std::vector<ModelFit> fits;
  GrowthModel preferred = GrowthModel::Saturating;
  double h_q = 0.0;
  double h_q_stderr = 0.0;
  std::optional<double> saturation_level;
  Index points = 0;

  const ModelFit* fit(GrowthModel m) const;
};

struct GrowthPoint {
  double t = 0.0;
  double d = 0.0;
};

/// Least-squares fits of D(t): linear a + b t, quadratic a + b t^2,
/// exponential exp(a + h t), constant. Residuals are compared on log D.
FitReport fit_growth(const std::vector<GrowthPoint>& points);
FitReport fit_growth(const DepsTable& table);

struct ThermalState {
  Mpo rho;           // unit norm: hs_inner(rho, rho) = 1
  double eta = 0.0;  // accumulated imaginary-time truncation
  double log_scale = 0.0;  // log of the discarded normalization factor
  Index steps = 0;
  double dbeta = 0.0;
};

double default_dbeta(double beta);

/// Imaginary-time evolution of the identity superket under h0 for beta/dbeta
/// steps with renormalization; the result is proportional to exp(-beta h0).
ThermalState thermal_prepare(const ModelParams& h0, double beta, double dbeta, Index d_max);

struct ThermalQuenchConfig {
  double beta = 0.01;
  ModelParams h1;
  double h0x = 0.0;
  double h0z = 1.0;
  double eps = kThermalEps;
  double dt = kDefaultDt;
  double t_max = 6.0;
};

DepsTable thermal_quench(const ThermalQuenchConfig& config, const std::vector<Index>& grid,
                         std::vector<TimeSeries>* series = nullptr, int workers = 0);

enum class FidelityReference { ExactExponential, TrotterCircuit };

struct FidelityBenchmarkConfig {
  ModelParams model;
  InitialCondition initial = PauliStringInit{};
  std::vector<Index> grid{10, 20, 30, 40};
  double dt = kDefaultDt;
  double t_max = 10.0;
  double sample_interval = 0.1;
  double window_lo = 1e-6;  // regression window on 1 - F
  double window_hi = 1e-1;
  FidelityReference reference = FidelityReference::ExactExponential;
};

struct FidelitySample {
  Index d = 0;
  double t = 0.0;
  double eta_tot = 0.0;
  double infidelity = 0.0;
};

struct FidelityReport {
  std::vector<FidelitySample> samples;
  std::map<Index, double> c_per_d;  // NaN if no points fell in the window
  double c_pooled = 0.0;
  Index pooled_points = 0;
};

/// Side-by-side MPO and dense evolution; per D, c is the geometric mean of
/// (1 - F) / (eta_tot / dt) over samples with window_lo < 1 - F < window_hi.
FidelityReport fidelity_benchmark(const FidelityBenchmarkConfig& config);

}  // namespace tdmpo
