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

#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "tdmpo/exact.hpp"
#include "tdmpo/harness.hpp"
#include "tdmpo/output.hpp"
#include "tdmpo/spectral.hpp"

namespace fs = std::filesystem;

namespace tdmpo::cli {

namespace {

struct Flags {
  std::string out = "tdmpo-out";
  std::optional<Index> n;
  std::optional<double> hx, hz, dt, eps, tmax, beta, h0x, h0z, dbeta;
  std::optional<Index> dmax;
  std::optional<std::string> op;
  std::vector<Index> grid;
  std::vector<double> window;
  std::vector<double> fit_window;
  int degree = 9;
  Index bins = 40;
  double sample_interval = 0.1;
  std::string reference = "exact";
  bool renormalize = false;
  int workers = 0;
};

// Fully resolved settings for one invocation.
struct Job {
  std::string command;
  fs::path out;
  RunConfig run;  // model, operator and evolution parameters
  std::vector<Index> grid;
  double beta = 0.0, h0x = 0.0, h0z = 1.0, dbeta = 0.0;
  double window_lo = -9.0, window_hi = 9.0;
  int degree = 9;
  Index bins = 40;
  double sample_interval = 0.1;
  double fit_lo = 1e-6, fit_hi = 1e-1;
  FidelityReference reference = FidelityReference::ExactExponential;
  int workers = 1;
};

[[noreturn]] void config_error(const std::string& field, const std::string& why) {
  throw PreconditionError("config." + field + ": " + why);
}

std::vector<Index> default_operator_grid() {
  std::vector<Index> g;
  for (Index d = 4; d <= 64; d += 4) g.push_back(d);
  return g;
}

Job resolve(const std::string& command, const Flags& f) {
  Job job;
  job.command = command;
  job.out = f.out;
  job.workers = f.workers > 0 ? f.workers : default_workers();
  if (f.out.empty()) config_error("out", "must not be empty");

  const Index n_default = command == "lsd" ? 12 : command == "thermal" ? 16 : command == "fidelity" ? 10 : 14;
  job.run.model = {f.n.value_or(n_default), f.hx.value_or(1.0), f.hz.value_or(1.0)};
  job.run.dt = f.dt.value_or(kDefaultDt);
  job.run.eps = f.eps.value_or(command == "thermal" ? kThermalEps : kOperatorEps);
  job.run.d_max = f.dmax.value_or(16);
  job.run.t_max = f.tmax.value_or(command == "fidelity" ? 10.0 : command == "evolve" ? 5.0 : 6.0);
  job.run.renormalize = f.renormalize;

  if (command == "lsd") {
    job.run.model.validate();
    if (job.run.model.n < 4 || job.run.model.n > kMaxDenseHamiltonianSites) {
      config_error("n", "lsd needs 4 <= n <= " + std::to_string(kMaxDenseHamiltonianSites));
    }
    if (!f.window.empty()) {
      if (f.window.size() != 2 || !(f.window[0] < f.window[1])) config_error("window", "needs lo < hi");
      job.window_lo = f.window[0];
      job.window_hi = f.window[1];
    }
    if (f.degree < 1) config_error("degree", "must be >= 1");
    if (f.bins < 1) config_error("bins", "must be >= 1");
    job.degree = f.degree;
    job.bins = f.bins;
    return job;
  }

  if (command == "thermal") {
    if (f.op) config_error("op", "thermal runs start from exp(-beta H0); use --beta, --h0x, --h0z");
    job.beta = f.beta.value_or(0.01);
    job.h0x = f.h0x.value_or(0.0);
    job.h0z = f.h0z.value_or(1.0);
    job.dbeta = f.dbeta.value_or(0.0);
    job.run.initial = ThermalInit{job.beta, job.h0x, job.h0z, job.dbeta};
    if (job.beta > 0.0) {
      const double step = job.dbeta > 0.0 ? job.dbeta : default_dbeta(job.beta);
      const double ratio = job.beta / step;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        config_error("dbeta", "must divide beta");
      }
    }
  } else {
    job.run.model.validate();
    job.run.initial = parse_operator(f.op.value_or("local:y"), job.run.model.n);
  }

  if (command == "fidelity") {
    if (job.run.model.n > 10) config_error("n", "fidelity needs n <= 10 for the dense reference");
    job.grid = f.grid.empty() ? std::vector<Index>{10, 20, 30, 40} : f.grid;
    if (!f.fit_window.empty()) {
      if (f.fit_window.size() != 2 || !(0.0 < f.fit_window[0] && f.fit_window[0] < f.fit_window[1])) {
        config_error("fit-window", "needs 0 < lo < hi");
      }
      job.fit_lo = f.fit_window[0];
      job.fit_hi = f.fit_window[1];
    }
    if (!(f.sample_interval > 0.0)) config_error("sample-interval", "must be > 0");
    job.sample_interval = f.sample_interval;
    if (f.reference == "exact") {
      job.reference = FidelityReference::ExactExponential;
    } else if (f.reference == "trotter") {
      job.reference = FidelityReference::TrotterCircuit;
    } else {
      config_error("reference", "must be 'exact' or 'trotter'");
    }
  } else if (command == "deps" || command == "thermal") {
    job.grid = f.grid.empty() ? default_operator_grid() : f.grid;
  }

  for (std::size_t i = 0; i < job.grid.size(); ++i) {
    if (job.grid[i] < 2) config_error("grid", "values must be >= 2");
    if (i > 0 && job.grid[i] <= job.grid[i - 1]) config_error("grid", "must be strictly ascending");
  }
  if (command != "evolve" && job.grid.empty()) config_error("grid", "must not be empty");
  if (command != "evolve") job.run.d_max = job.grid.front();
  job.run.validate();
  return job;
}

// ---------------------------------------------------------------------------

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class OutputSet {
 public:
  explicit OutputSet(fs::path root) : root_(std::move(root)) {}

  std::string path(const std::string& name) {
    const fs::path p = root_ / name;
    fs::create_directories(p.parent_path());
    return p.string();
  }
  void add(const std::string& name, bool is_volatile = false) { files_.push_back({name, is_volatile}); }

  void write_text(const std::string& name, const std::string& text) {
    std::ofstream out(path(name), std::ios::binary);
    out << text;
    add(name);
  }

  void write_manifest() {
    std::sort(files_.begin(), files_.end());
    nlohmann::json list = nlohmann::json::array();
    for (const auto& [name, is_volatile] : files_) {
      const fs::path p = root_ / name;
      nlohmann::json entry = {{"path", name}};
      if (is_volatile) {
        entry["fnv1a64"] = nullptr;
        entry["volatile"] = true;
      } else {
        entry["bytes"] = fs::file_size(p);
        entry["fnv1a64"] = file_checksum(p.string());
      }
      list.push_back(entry);
    }
    write_json((root_ / "manifest.json").string(), {{"files", list}});
  }

 private:
  fs::path root_;
  std::vector<std::pair<std::string, bool>> files_;
};

// gnuplot scripts; CSVs are read with their header row as column titles.
constexpr const char* kPlotPreamble =
    "set datafile separator ','\n"
    "set key autotitle columnhead\n"
    "set terminal pngcairo size 800,600\n";

void emit_metadata(OutputSet& out, const Job& job, nlohmann::json extra) {
  nlohmann::json meta = {{"command", job.command},
                         {"timestamp_utc", utc_timestamp()},
                         {"workers", job.workers},
                         {"config", to_json(job.run)}};
  for (auto& [k, v] : extra.items()) meta[k] = v;
  write_json(out.path("metadata.json"), meta);
  out.add("metadata.json", true);
}

// ---------------------------------------------------------------------------

void run_lsd(const Job& job, OutputSet& out) {
  const auto h = dense_hamiltonian<double>(job.run.model);
  const auto spectrum = parity_sectors(h, job.run.model.n);
  UnfoldOptions opts;
  opts.window_min = job.window_lo;
  opts.window_max = job.window_hi;
  opts.degree = job.degree;
  const auto spacings = unfold_spacings(spectrum, opts);
  const auto hist = spacing_histogram(spacings, job.bins);
  const auto report = lsd_compare(spacings);

  write_histogram_csv(out.path("lsd_histogram.csv"), hist);
  out.add("lsd_histogram.csv");
  write_spacings_csv(out.path("lsd_spacings.csv"), spacings);
  out.add("lsd_spacings.csv");
  auto verdict = to_json(report);
  verdict["window"] = {job.window_lo, job.window_hi};
  verdict["degree"] = job.degree;
  write_json(out.path("lsd_verdict.json"), verdict);
  out.add("lsd_verdict.json");

  std::ostringstream gp;
  gp << kPlotPreamble << "set output 'lsd.png'\n"
     << "set xlabel 's'\nset ylabel 'p(s)'\nset xrange [0:4]\n"
     << "plot 'lsd_histogram.csv' using 1:2 with boxes title 'unfolded spacings', \\\n"
     << "     (pi*x/2)*exp(-pi*x*x/4) title 'Wigner', exp(-x) title 'Poisson'\n";
  out.write_text("lsd.gp", gp.str());
  emit_metadata(out, job, {{"window", {job.window_lo, job.window_hi}}, {"degree", job.degree}, {"bins", job.bins}});
  std::cout << "verdict: " << report.verdict << " (KS wigner " << report.ks_wigner << ", poisson "
            << report.ks_poisson << ")\n";
}

void write_run(OutputSet& out, const std::string& stem, const TimeSeries& series) {
  write_timeseries_csv(out.path(stem + ".csv"), series);
  out.add(stem + ".csv");
  write_timing_csv(out.path(stem + ".timing.csv"), series);
  out.add(stem + ".timing.csv", true);
}

void run_evolve(const Job& job, OutputSet& out) {
  const auto series = run_evolution(job.run);
  write_run(out, "run", series);
  std::ostringstream gp;
  gp << kPlotPreamble << "set output 'run.png'\nset logscale y\n"
     << "set xlabel 't'\nset ylabel 'eta_tot'\n"
     << "plot 'run.csv' using 1:2 with lines, " << format_double(job.run.eps) << " title 'eps'\n";
  out.write_text("run.gp", gp.str());
  const auto t_star = crossing_time(series, job.run.eps);
  emit_metadata(out, job, {{"stopped_early", series.stopped_early},
                           {"t_star", t_star ? nlohmann::json(*t_star) : nlohmann::json(nullptr)}});
  std::cout << "eta_tot(" << series.rows.back().t << ") = " << series.rows.back().eta_tot << "\n";
}

// Returns the number of failed grid points.
std::size_t run_sweep(const Job& job, OutputSet& out, const DepsTable& table,
                      const std::vector<TimeSeries>& series, const std::string& stem) {
  write_deps_csv(out.path(stem + ".csv"), table);
  out.add(stem + ".csv");
  std::size_t failures = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!table.rows[i].error.empty()) {
      ++failures;
      continue;
    }
    write_run(out, "runs/D" + std::to_string(table.rows[i].d), series[i]);
  }

  nlohmann::json fit_json;
  std::string fit_line;
  try {
    const auto fit = fit_growth(table);
    fit_json = to_json(fit);
    if (const auto* e = fit.fit(GrowthModel::Exponential)) {
      fit_line = ", exp(" + format_double(e->intercept) + " + " + format_double(e->slope) +
                 "*x) title 'exponential fit'";
    }
    std::cout << "preferred: " << to_string(fit.preferred) << ", h_q = " << fit.h_q << " +- " << fit.h_q_stderr
              << "\n";
  } catch (const PreconditionError& e) {
    fit_json = {{"error", e.what()}};
    std::cout << "fit skipped: " << e.what() << "\n";
  }
  fit_json["table"] = to_json(table);
  write_json(out.path(stem + "_fit.json"), fit_json);
  out.add(stem + "_fit.json");

  std::ostringstream gp;
  gp << kPlotPreamble << "set output '" << stem << ".png'\nset logscale y\n"
     << "set xlabel 't'\nset ylabel 'D_eps(t)'\n"
     << "plot '" << stem << ".csv' using 2:1 with linespoints" << fit_line << "\n";
  out.write_text(stem + ".gp", gp.str());
  (void)job;
  return failures;
}

std::size_t run_deps(const Job& job, OutputSet& out) {
  std::vector<TimeSeries> series;
  const auto table = deps_profile(job.run, job.grid, &series, job.workers);
  const auto failures = run_sweep(job, out, table, series, "deps");
  emit_metadata(out, job, {{"grid", job.grid}});
  return failures;
}

std::size_t run_thermal(const Job& job, OutputSet& out) {
  ThermalQuenchConfig cfg;
  cfg.beta = job.beta;
  cfg.h1 = job.run.model;
  cfg.h0x = job.h0x;
  cfg.h0z = job.h0z;
  cfg.eps = job.run.eps;
  cfg.dt = job.run.dt;
  cfg.t_max = job.run.t_max;
  std::vector<TimeSeries> series;
  const auto table = thermal_quench(cfg, job.grid, &series, job.workers);
  const auto failures = run_sweep(job, out, table, series, "thermal");
  nlohmann::json prep = nlohmann::json::array();
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (table.rows[i].error.empty()) prep.push_back({{"D", table.rows[i].d}, {"eta", series[i].thermal_eta}});
  }
  emit_metadata(out, job, {{"grid", job.grid}, {"imaginary_time_eta", prep}});
  return failures;
}

void run_fidelity(const Job& job, OutputSet& out) {
  FidelityBenchmarkConfig cfg;
  cfg.model = job.run.model;
  cfg.initial = job.run.initial;
  cfg.grid = job.grid;
  cfg.dt = job.run.dt;
  cfg.t_max = job.run.t_max;
  cfg.sample_interval = job.sample_interval;
  cfg.window_lo = job.fit_lo;
  cfg.window_hi = job.fit_hi;
  cfg.reference = job.reference;
  const auto report = fidelity_benchmark(cfg);
  write_fidelity_csv(out.path("fidelity.csv"), report);
  out.add("fidelity.csv");
  write_json(out.path("fidelity_c.json"), to_json(report));
  out.add("fidelity_c.json");

  std::ostringstream gp;
  gp << kPlotPreamble << "set output 'fidelity.png'\nset logscale y\n"
     << "set xlabel 't'\nset ylabel '1 - F'\n"
     << "c = " << format_double(report.c_pooled) << "\n"
     << "dt = " << format_double(job.run.dt) << "\n"
     << "plot for [D in '";
  for (std::size_t i = 0; i < job.grid.size(); ++i) gp << (i ? " " : "") << job.grid[i];
  gp << "'] 'fidelity.csv' using ($1 == D ? $2 : NaN):4 with lines title 'D = '.D, \\\n"
     << "     for [D in '";
  for (std::size_t i = 0; i < job.grid.size(); ++i) gp << (i ? " " : "") << job.grid[i];
  gp << "'] 'fidelity.csv' using ($1 == D ? $2 : NaN):(c*$3/dt) with points notitle\n";
  out.write_text("fidelity.gp", gp.str());
  emit_metadata(out, job,
                {{"grid", job.grid},
                 {"reference", job.reference == FidelityReference::ExactExponential ? "exact" : "trotter"},
                 {"fit_window", {job.fit_lo, job.fit_hi}}});
  std::cout << "c (pooled) = " << report.c_pooled << " from " << report.pooled_points << " points\n";
}

}  // namespace

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in) {
    in.read(buf, sizeof(buf));
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Truncated operator evolution of Ising chains with bond-dimension tracking"};
  app.set_config("--config", "", "key = value config file (command-line flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  Flags f;
  app.add_option("--out", f.out, "Output directory");
  app.add_option("--n", f.n, "Chain length");
  app.add_option("--hx", f.hx, "Transverse field of the evolving Hamiltonian");
  app.add_option("--hz", f.hz, "Longitudinal field of the evolving Hamiltonian");
  app.add_option("--dt", f.dt, "Trotter step");
  app.add_option("--eps", f.eps, "Truncation tolerance");
  app.add_option("--dmax", f.dmax, "Bond dimension (evolve)");
  app.add_option("--tmax", f.tmax, "Final time");
  app.add_option("--beta", f.beta, "Inverse temperature (thermal)");
  app.add_option("--h0x", f.h0x, "Initial Hamiltonian transverse field (thermal)");
  app.add_option("--h0z", f.h0z, "Initial Hamiltonian longitudinal field (thermal)");
  app.add_option("--dbeta", f.dbeta, "Imaginary-time step (thermal; default derived from beta)");
  app.add_option("--op", f.op, "identity | local:<letters>[@site] | sum:<letters>[+...] | ham:<hx>,<hz>");
  app.add_option("--grid", f.grid, "Ascending bond-dimension grid")->delimiter(',');
  app.add_option("--window", f.window, "Energy window lo hi (lsd)")->expected(2);
  app.add_option("--fit-window", f.fit_window, "1 - F regression window lo hi (fidelity)")->expected(2);
  app.add_option("--degree", f.degree, "Unfolding polynomial degree (lsd)");
  app.add_option("--bins", f.bins, "Histogram bins (lsd)");
  app.add_option("--sample-interval", f.sample_interval, "Fidelity sampling interval");
  app.add_option("--reference", f.reference, "Fidelity reference: exact | trotter");
  app.add_flag("--renormalize", f.renormalize, "Renormalize after every truncation");
  app.add_option("--workers", f.workers, "Parallel runs (default: TDMPO_WORKERS or hardware threads)");

  for (const char* name : {"lsd", "evolve", "deps", "thermal", "fidelity"}) app.add_subcommand(name);

  std::vector<char*> argv;
  for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
  Job job;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    job = resolve(app.get_subcommands().front()->get_name(), f);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  OutputSet out(job.out);
  try {
    fs::create_directories(job.out);
    std::size_t failures = 0;
    if (job.command == "lsd") {
      run_lsd(job, out);
    } else if (job.command == "evolve") {
      run_evolve(job, out);
    } else if (job.command == "deps") {
      failures = run_deps(job, out);
    } else if (job.command == "thermal") {
      failures = run_thermal(job, out);
    } else {
      run_fidelity(job, out);
    }
    if (failures > 0) throw std::runtime_error(std::to_string(failures) + " grid run(s) failed; see the sweep JSON");
    out.write_manifest();
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << job.command << ": " << e.what() << "\n";
    try {
      write_json(out.path("error.json"), {{"command", job.command}, {"error", e.what()}});
      out.add("error.json");
      out.write_manifest();
    } catch (...) {
    }
    return kExitRuntime;
  }
}

}  // namespace tdmpo::cli
