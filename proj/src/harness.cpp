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

#include "tdmpo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <new>
#include <sstream>
#include <thread>

#include "tdmpo/exact.hpp"

namespace tdmpo {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

std::string describe(const InitialCondition& init) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const PauliStringInit& p) {
                   os << "pauli:";
                   if (p.letters.empty()) os << "identity";
                   bool first = true;
                   for (const auto& [site, letter] : p.letters) {
                     os << (first ? "" : ",") << pauli_char(letter) << "@" << site;
                     first = false;
                   }
                 },
                 [&](const ExtensiveInit& e) {
                   os << "extensive:";
                   bool first = true;
                   for (const auto& pat : e.patterns) {
                     os << (first ? "" : "+") << pat.coefficient << "*";
                     for (const auto& [off, letter] : pat.factors) os << pauli_char(letter);
                     first = false;
                   }
                 },
                 [&](const ThermalInit& t) {
                   os << "thermal(beta=" << t.beta << ",h0x=" << t.h0x << ",h0z=" << t.h0z
                      << ",dbeta=" << (t.dbeta > 0.0 ? t.dbeta : default_dbeta(t.beta)) << ")";
                 }},
             init);
  return os.str();
}

void RunConfig::validate() const {
  model.validate();
  auto fail = [](const std::string& field, const std::string& why) {
    throw PreconditionError("config." + field + ": " + why);
  };
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt", "must be > 0");
  if (!(eps > 0.0) || !std::isfinite(eps)) fail("eps", "must be > 0");
  if (d_max < 2) fail("dmax", "must be >= 2");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) fail("tmax", "must be >= 0");
  if (const auto* p = std::get_if<PauliStringInit>(&initial)) {
    for (const auto& [site, letter] : p->letters) {
      if (site < 0 || site >= model.n) fail("op", "site " + std::to_string(site) + " outside the chain");
    }
  }
  if (const auto* t = std::get_if<ThermalInit>(&initial)) {
    if (!(t->beta >= 0.0) || !std::isfinite(t->beta)) fail("beta", "must be >= 0");
    if (t->dbeta < 0.0) fail("dbeta", "must be >= 0");
  }
}

Mpo initial_operator(const InitialCondition& init, Index n, Index d_max, double* thermal_eta) {
  return std::visit(Overloaded{
                        [&](const PauliStringInit& p) { return mpo_pauli_string(n, p.letters); },
                        [&](const ExtensiveInit& e) { return mpo_extensive(n, e.patterns); },
                        [&](const ThermalInit& t) {
                          auto state = thermal_prepare({n, t.h0x, t.h0z}, t.beta,
                                                       t.dbeta > 0.0 ? t.dbeta : default_dbeta(t.beta),
                                                       d_max);
                          if (thermal_eta) *thermal_eta = state.eta;
                          return std::move(state.rho);
                        }},
                    init);
}

// ---------------------------------------------------------------------------

Evolution::Evolution(Mpo initial, const ModelParams& model, double dt, GateOptions options,
                     TimeKind kind)
    : mpo_(std::move(initial)), scheme_(trotter_step(model, dt, kind)), dt_(dt), options_(options) {
  if (mpo_.size() != model.n) throw PreconditionError("Evolution: operator and model sizes differ");
}

double Evolution::step() {
  double eta = 0.0;
  for (const auto& layer : scheme_.layers) eta += apply_layer(mpo_, layer, options_);
  eta_tot_ += eta;
  ++steps_;
  return eta;
}

TimeSeries run_evolution(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  TimeSeries series;
  series.config = config;

  std::optional<Evolution> evo;
  try {
    evo.emplace(initial_operator(config.initial, config.model.n, config.d_max, &series.thermal_eta),
                config.model, config.dt, GateOptions{config.d_max, config.renormalize});
    series.rows.push_back({0.0, 0.0, evo->state().max_bond(), elapsed_ms(start)});
    const auto steps = static_cast<Index>(std::llround(config.t_max / config.dt));
    for (Index s = 0; s < steps; ++s) {
      evo->step();
      series.rows.push_back({evo->time(), evo->eta_tot(), evo->state().max_bond(), elapsed_ms(start)});
      if (config.stop_factor > 0.0 && evo->eta_tot() > config.stop_factor * config.eps) {
        series.stopped_early = true;
        break;
      }
    }
  } catch (const std::bad_alloc&) {
    std::ostringstream os;
    os << "run_evolution: out of memory at t = " << (evo ? evo->time() : 0.0)
       << " (d_max = " << config.d_max << ")";
    if (evo && !config.checkpoint_path.empty()) {
      try {
        save_snapshot(evo->state(), config.checkpoint_path);
        os << "; checkpoint written to " << config.checkpoint_path;
      } catch (const std::exception& e) {
        os << "; checkpoint failed: " << e.what();
      }
    }
    throw std::runtime_error(os.str());
  }
  return series;
}

std::optional<double> crossing_time(const TimeSeries& series, double eps) {
  for (std::size_t k = 0; k < series.rows.size(); ++k) {
    const auto& row = series.rows[k];
    if (row.eta_tot <= eps) continue;
    if (k == 0) return row.t;
    const auto& prev = series.rows[k - 1];
    const double frac = (eps - prev.eta_tot) / (row.eta_tot - prev.eta_tot);
    return prev.t + frac * (row.t - prev.t);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

int default_workers() {
  if (const char* env = std::getenv("TDMPO_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

DepsTable deps_profile(const RunConfig& base, const std::vector<Index>& grid,
                       std::vector<TimeSeries>* series, int workers) {
  base.validate();
  if (grid.empty()) throw PreconditionError("deps_profile: empty D grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw PreconditionError("deps_profile: D grid must be strictly ascending");
  }
  if (grid.front() < 2) throw PreconditionError("deps_profile: D grid values must be >= 2");

  DepsTable table;
  table.eps = base.eps;
  table.rows.resize(grid.size());
  std::vector<TimeSeries> runs(grid.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      RunConfig cfg = base;
      cfg.d_max = grid[i];
      DepsRow row;
      row.d = grid[i];
      try {
        runs[i] = run_evolution(cfg);
        row.t_star = crossing_time(runs[i], base.eps);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      table.rows[i] = std::move(row);
    }
  };
  const int count = std::clamp(workers > 0 ? workers : default_workers(), 1, static_cast<int>(grid.size()));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  double best = -std::numeric_limits<double>::infinity();
  for (const auto& row : table.rows) {
    if (!row.error.empty()) continue;
    const double t = row.t_star.value_or(std::numeric_limits<double>::infinity());
    if (t < best) table.inversions.push_back(row.d);
    best = std::max(best, t);
  }
  if (series) *series = std::move(runs);
  return table;
}

std::optional<Index> deps_at(const DepsTable& table, double t) {
  for (const auto& row : table.rows) {
    if (!row.error.empty()) continue;
    if (!row.t_star || *row.t_star > t) return row.d;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

double default_dbeta(double beta) {
  if (!(beta > 0.0)) return 1e-3;
  const double steps = std::clamp(std::floor(beta / 1e-3), 1.0, 10.0);
  return beta / steps;
}

ThermalState thermal_prepare(const ModelParams& h0, double beta, double dbeta, Index d_max) {
  h0.validate();
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw PreconditionError("thermal_prepare: beta must be >= 0");
  if (d_max < 1) throw PreconditionError("thermal_prepare: d_max must be >= 1");
  ThermalState out{mpo_identity(h0.n)};
  if (beta == 0.0) return out;
  if (!(dbeta > 0.0)) throw PreconditionError("thermal_prepare: dbeta must be > 0");
  const double ratio = beta / dbeta;
  const auto steps = static_cast<Index>(std::llround(ratio));
  if (steps < 1 || std::abs(ratio - static_cast<double>(steps)) > 1e-9 * std::max(1.0, ratio)) {
    throw PreconditionError("thermal_prepare: dbeta must divide beta");
  }
  Evolution evo(mpo_identity(h0.n), h0, dbeta, GateOptions{d_max, true}, TimeKind::Imaginary);
  for (Index s = 0; s < steps; ++s) evo.step();

  out.rho = evo.state();
  out.eta = evo.eta_tot();
  out.steps = steps;
  out.dbeta = dbeta;
  out.log_scale = out.rho.log_norm();
  out.rho.set_log_norm(0.0);
  out.rho.set_log_norm(-0.5 * std::log(hs_norm2(out.rho)));
  return out;
}

DepsTable thermal_quench(const ThermalQuenchConfig& config, const std::vector<Index>& grid,
                         std::vector<TimeSeries>* series, int workers) {
  RunConfig base;
  base.model = config.h1;
  base.initial = ThermalInit{config.beta, config.h0x, config.h0z, 0.0};
  base.dt = config.dt;
  base.t_max = config.t_max;
  base.eps = config.eps;
  base.d_max = grid.empty() ? 2 : grid.front();
  return deps_profile(base, grid, series, workers);
}

// ---------------------------------------------------------------------------

FidelityReport fidelity_benchmark(const FidelityBenchmarkConfig& config) {
  config.model.validate();
  if (std::holds_alternative<ThermalInit>(config.initial)) {
    throw PreconditionError("fidelity_benchmark: operator initial conditions only");
  }
  if (config.grid.empty()) throw PreconditionError("fidelity_benchmark: empty D grid");
  if (!(config.dt > 0.0) || !(config.sample_interval > 0.0)) {
    throw PreconditionError("fidelity_benchmark: dt and sample_interval must be > 0");
  }
  const Index n = config.model.n;
  if (n > 10) throw CapacityError("fidelity_benchmark: dense oracle limited to n <= 10");

  const Mpo initial = initial_operator(config.initial, n, config.grid.front());
  const Matrix<cplx> o0 = mpo_to_dense(initial);

  std::optional<ExactEvolver> exact;
  std::optional<DenseTrotterCircuit> circuit;
  Matrix<cplx> o0_eig;
  Matrix<cplx> o_circuit;
  if (config.reference == FidelityReference::ExactExponential) {
    exact.emplace(dense_hamiltonian<cplx>(config.model));
    o0_eig = exact->to_eigenbasis(o0);
  } else {
    circuit.emplace(config.model, config.dt);
    o_circuit = o0;
  }

  std::vector<Evolution> runs;
  std::vector<bool> active(config.grid.size(), true);
  for (Index d : config.grid) {
    if (d < 1) throw PreconditionError("fidelity_benchmark: D must be >= 1");
    runs.emplace_back(initial, config.model, config.dt, GateOptions{d, false});
  }

  FidelityReport report;
  const auto every = std::max<Index>(1, static_cast<Index>(std::llround(config.sample_interval / config.dt)));
  const auto steps = static_cast<Index>(std::llround(config.t_max / config.dt));
  for (Index s = 1; s <= steps; ++s) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (active[i]) runs[i].step();
    }
    if (circuit) circuit->step(o_circuit);
    if (s % every != 0) continue;

    const double t = static_cast<double>(s) * config.dt;
    const Matrix<cplx> reference =
        exact ? exact->from_eigenbasis(exact->evolve_eigenbasis(o0_eig, t)) : o_circuit;
    const Eigen::VectorXd ref_coeffs = pauli_from_dense(reference).real();
    bool any = false;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!active[i]) continue;
      const double inf = 1.0 - fidelity(pauli_coefficients(runs[i].state()), ref_coeffs);
      report.samples.push_back({config.grid[i], t, runs[i].eta_tot(), inf});
      if (inf > config.window_hi) active[i] = false;
      any = any || active[i];
    }
    if (!any) break;
  }

  double pooled_log = 0.0;
  for (Index d : config.grid) {
    double acc = 0.0;
    Index count = 0;
    for (const auto& smp : report.samples) {
      if (smp.d != d || !(smp.infidelity > config.window_lo) || !(smp.infidelity < config.window_hi) ||
          !(smp.eta_tot > 0.0)) {
        continue;
      }
      const double lc = std::log(smp.infidelity) - std::log(smp.eta_tot / config.dt);
      acc += lc;
      pooled_log += lc;
      ++count;
    }
    report.c_per_d[d] = count ? std::exp(acc / static_cast<double>(count)) : std::nan("");
    report.pooled_points += count;
  }
  report.c_pooled = report.pooled_points
                        ? std::exp(pooled_log / static_cast<double>(report.pooled_points))
                        : std::nan("");
  return report;
}

}  // namespace tdmpo
