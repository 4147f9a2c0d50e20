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

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "tdmpo/exact.hpp"
#include "tdmpo/harness.hpp"

namespace tdmpo {
namespace {

RunConfig small_run(Index n, InitialCondition init, Index d_max, double t_max) {
  RunConfig cfg;
  cfg.model = chaotic_model(n);
  cfg.initial = std::move(init);
  cfg.d_max = d_max;
  cfg.t_max = t_max;
  return cfg;
}

TEST(RunEvolution, IdentityNeverTruncates) {
  const auto series = run_evolution(small_run(8, PauliStringInit{}, 2, 1.0));
  ASSERT_EQ(series.rows.size(), 101u);
  for (const auto& row : series.rows) {
    EXPECT_EQ(row.eta_tot, 0.0);
    EXPECT_EQ(row.max_bond, 1);
  }
  EXPECT_FALSE(crossing_time(series, 1e-12).has_value());
}

TEST(RunEvolution, SeriesInvariants) {
  const auto series = run_evolution(small_run(8, parse_operator("local:y", 8), 4, 2.0));
  ASSERT_FALSE(series.rows.empty());
  EXPECT_EQ(series.rows.front().t, 0.0);
  EXPECT_EQ(series.rows.front().eta_tot, 0.0);
  for (std::size_t k = 1; k < series.rows.size(); ++k) {
    const auto& prev = series.rows[k - 1];
    const auto& row = series.rows[k];
    EXPECT_NEAR(row.t - prev.t, 0.01, 1e-12);
    EXPECT_GE(row.eta_tot, prev.eta_tot);
    EXPECT_LE(row.max_bond, 4);
    EXPECT_GE(row.wall_ms, prev.wall_ms);
  }
}

TEST(RunEvolution, StopsEarlyPastTheTolerance) {
  auto cfg = small_run(8, parse_operator("local:y", 8), 2, 10.0);
  cfg.stop_factor = 10.0;
  const auto series = run_evolution(cfg);
  EXPECT_TRUE(series.stopped_early);
  EXPECT_GT(series.rows.back().eta_tot, 10.0 * cfg.eps);
  EXPECT_LT(series.rows.back().t, 10.0);
  EXPECT_LE(series.rows[series.rows.size() - 2].eta_tot, 10.0 * cfg.eps);
}

TEST(RunEvolution, ConservedMagnetizationStaysExact) {
  // Z on one site commutes with the hx = 0 model up to a bond-dimension-4 light cone.
  RunConfig cfg = small_run(8, parse_operator("local:z", 8), 4, 3.0);
  cfg.model = integrable_model(8);
  const auto series = run_evolution(cfg);
  EXPECT_LT(series.rows.back().eta_tot, 1e-20);
}

TEST(RunEvolution, GeneratorIsStationary) {
  RunConfig cfg = small_run(6, parse_operator("ham:1,1", 6), 64, 1.0);
  const Mpo h0 = initial_operator(cfg.initial, 6, 64);
  Evolution evo(h0, cfg.model, cfg.dt, GateOptions{64, false});
  for (int s = 0; s < 100; ++s) evo.step();
  const double overlap = hs_inner(evo.state(), h0) / hs_norm2(h0);
  EXPECT_NEAR(overlap, 1.0, 1e-4);
  EXPECT_LT(evo.eta_tot(), 1e-20);
}

TEST(CrossingTime, InterpolatesLinearly) {
  TimeSeries s;
  s.rows = {{0.0, 0.0, 1, 0.0}, {1.0, 0.5e-4, 1, 0.0}, {2.0, 1.5e-4, 1, 0.0}};
  ASSERT_TRUE(crossing_time(s, 1e-4).has_value());
  EXPECT_NEAR(*crossing_time(s, 1e-4), 1.5, 1e-12);
  EXPECT_FALSE(crossing_time(s, 2e-4).has_value());
  EXPECT_NEAR(*crossing_time(s, 0.5e-4), 1.0, 1e-12);
}

TEST(DepsProfile, MonotoneAndWorkerIndependent) {
  RunConfig cfg = small_run(8, parse_operator("local:y", 8), 2, 3.0);
  const std::vector<Index> grid{2, 4, 6, 8};
  std::vector<TimeSeries> one_series, three_series;
  const auto one = deps_profile(cfg, grid, &one_series, 1);
  const auto three = deps_profile(cfg, grid, &three_series, 3);
  ASSERT_EQ(one.rows.size(), 4u);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(one.rows[i].d, grid[i]);
    EXPECT_EQ(one.rows[i].t_star, three.rows[i].t_star);
    ASSERT_EQ(one_series[i].rows.size(), three_series[i].rows.size());
    for (std::size_t k = 0; k < one_series[i].rows.size(); ++k) {
      EXPECT_EQ(one_series[i].rows[k].eta_tot, three_series[i].rows[k].eta_tot);
    }
  }
  EXPECT_TRUE(one.inversions.empty());
  ASSERT_TRUE(one.rows[0].t_star.has_value());
  ASSERT_TRUE(one.rows[1].t_star.has_value());
  EXPECT_LT(*one.rows[0].t_star, *one.rows[1].t_star);

  std::optional<Index> prev;
  for (double t = 0.0; t <= 3.0; t += 0.1) {
    const auto d = deps_at(one, t);
    if (prev && d) {
      EXPECT_GE(*d, *prev);
    }
    if (prev && !d) break;
    prev = d;
  }
  EXPECT_EQ(deps_at(one, 0.0), std::optional<Index>(2));
}

TEST(DepsProfile, RejectsBadGrid) {
  RunConfig cfg = small_run(6, PauliStringInit{}, 2, 0.1);
  EXPECT_THROW(deps_profile(cfg, {}), PreconditionError);
  EXPECT_THROW(deps_profile(cfg, {4, 4}), PreconditionError);
  EXPECT_THROW(deps_profile(cfg, {8, 4}), PreconditionError);
  EXPECT_THROW(deps_profile(cfg, {1, 4}), PreconditionError);
}

TEST(DepsAt, SkipsErrorsAndUnreachedRows) {
  DepsTable table;
  table.rows = {{2, 0.5, ""}, {4, std::nullopt, "boom"}, {6, 1.5, ""}, {8, std::nullopt, ""}};
  EXPECT_EQ(deps_at(table, 0.2), std::optional<Index>(2));
  EXPECT_EQ(deps_at(table, 1.0), std::optional<Index>(6));
  EXPECT_EQ(deps_at(table, 100.0), std::optional<Index>(8));
  table.rows.pop_back();
  EXPECT_FALSE(deps_at(table, 100.0).has_value());
}

std::vector<GrowthPoint> sample(auto&& f) {
  std::vector<GrowthPoint> pts;
  for (int i = 0; i < 12; ++i) {
    const double t = 0.5 + 0.25 * i;
    pts.push_back({t, f(t)});
  }
  return pts;
}

TEST(FitGrowth, RecoversExponentialRate) {
  const auto report = fit_growth(sample([](double t) { return 3.0 * std::exp(1.1 * t); }));
  EXPECT_EQ(report.preferred, GrowthModel::Exponential);
  EXPECT_NEAR(report.h_q, 1.10, 0.01);
  EXPECT_LT(report.h_q_stderr, 1e-10);
  EXPECT_EQ(report.fits.size(), 4u);
  EXPECT_FALSE(report.saturation_level.has_value());
}

TEST(FitGrowth, PrefersPolynomialLaws) {
  EXPECT_EQ(fit_growth(sample([](double t) { return 2.0 + 5.0 * t; })).preferred, GrowthModel::Linear);
  EXPECT_EQ(fit_growth(sample([](double t) { return 1.0 + 4.0 * t * t; })).preferred, GrowthModel::Quadratic);
  const auto lin = fit_growth(sample([](double t) { return 2.0 + 5.0 * t; }));
  EXPECT_NEAR(lin.fit(GrowthModel::Linear)->slope, 5.0, 1e-10);
  EXPECT_NEAR(lin.fit(GrowthModel::Linear)->intercept, 2.0, 1e-10);
}

TEST(FitGrowth, ConstantIsSaturating) {
  const auto report = fit_growth(sample([](double) { return 7.0; }));
  EXPECT_EQ(report.preferred, GrowthModel::Saturating);
  ASSERT_TRUE(report.saturation_level.has_value());
  EXPECT_EQ(*report.saturation_level, 7.0);
}

TEST(FitGrowth, Preconditions) {
  EXPECT_THROW(fit_growth(std::vector<GrowthPoint>(4, {1.0, 2.0})), PreconditionError);
  auto pts = sample([](double t) { return t; });
  pts[3].d = 0.0;
  EXPECT_THROW(fit_growth(pts), PreconditionError);
}

TEST(FitGrowth, TableWithUnreachedRows) {
  DepsTable table;
  table.rows = {{4, 0.3, ""}, {8, 0.9, ""}, {12, std::nullopt, ""}};
  const auto short_report = fit_growth(table);
  EXPECT_EQ(short_report.preferred, GrowthModel::Saturating);
  EXPECT_EQ(short_report.saturation_level, std::optional<double>(12.0));
  EXPECT_EQ(short_report.points, 2);

  table.rows = {{4, 0.1, ""}, {8, 0.7, ""}, {12, 1.05, ""}, {16, 1.3, ""}, {20, 1.5, ""}, {24, std::nullopt, ""}};
  const auto report = fit_growth(table);
  EXPECT_EQ(report.points, 5);
  EXPECT_EQ(report.saturation_level, std::optional<double>(24.0));
}

TEST(ThermalPrepare, ZeroBetaIsIdentity) {
  const auto state = thermal_prepare({6, 0.0, 1.0}, 0.0, 1e-3, 4);
  EXPECT_EQ(state.steps, 0);
  EXPECT_EQ(state.eta, 0.0);
  EXPECT_LT((mpo_to_dense(state.rho) - Matrix<cplx>::Identity(64, 64)).norm(), 1e-14);
}

TEST(ThermalPrepare, MatchesBoltzmannOperator) {
  const ModelParams h0{6, 0.0, 1.0};
  const double beta = 0.01;
  const auto state = thermal_prepare(h0, beta, default_dbeta(beta), 64);
  EXPECT_EQ(state.steps, 10);
  EXPECT_NEAR(hs_norm2(state.rho), 1.0, 1e-12);
  const Matrix<cplx> exact = expm_hermitian(dense_hamiltonian<cplx>(h0), cplx(-beta, 0.0));
  const Matrix<cplx> got = mpo_to_dense(state.rho);
  // Both normalized to unit 2^-n tr(A^2).
  const Matrix<cplx> want = exact * (8.0 / exact.norm());
  EXPECT_LT((got - want).norm() / want.norm(), 1e-5);
  EXPECT_THROW(thermal_prepare(h0, 0.01, 0.003, 8), PreconditionError);
  EXPECT_THROW(thermal_prepare(h0, -1.0, 0.001, 8), PreconditionError);
}

TEST(DefaultDbeta, StepCountRule) {
  EXPECT_DOUBLE_EQ(default_dbeta(0.01), 0.001);
  EXPECT_DOUBLE_EQ(default_dbeta(0.05), 0.005);
  EXPECT_DOUBLE_EQ(default_dbeta(0.0005), 0.0005);
  EXPECT_DOUBLE_EQ(default_dbeta(0.0), 1e-3);
}

TEST(FidelityBenchmark, ExactBondDimensionTracksCircuit) {
  FidelityBenchmarkConfig cfg;
  cfg.model = chaotic_model(4);
  cfg.initial = parse_operator("local:y", 4);
  cfg.grid = {256};
  cfg.t_max = 1.0;
  cfg.reference = FidelityReference::TrotterCircuit;
  const auto report = fidelity_benchmark(cfg);
  ASSERT_EQ(report.samples.size(), 10u);
  for (const auto& s : report.samples) {
    EXPECT_LT(s.infidelity, 1e-8);
    EXPECT_LT(s.eta_tot, 1e-20);
  }
}

TEST(FidelityBenchmark, Preconditions) {
  FidelityBenchmarkConfig cfg;
  cfg.model = chaotic_model(12);
  EXPECT_THROW(fidelity_benchmark(cfg), CapacityError);
  cfg.model = chaotic_model(4);
  cfg.initial = ThermalInit{};
  EXPECT_THROW(fidelity_benchmark(cfg), PreconditionError);
}

TEST(RunConfig, ValidationNamesTheField) {
  auto message = [](RunConfig cfg) {
    try {
      cfg.validate();
    } catch (const PreconditionError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  RunConfig cfg = small_run(6, PauliStringInit{}, 4, 1.0);
  EXPECT_EQ(message(cfg), "");
  auto bad = cfg;
  bad.dt = 0.0;
  EXPECT_EQ(message(bad).rfind("config.dt:", 0), 0u);
  bad = cfg;
  bad.eps = -1.0;
  EXPECT_EQ(message(bad).rfind("config.eps:", 0), 0u);
  bad = cfg;
  bad.d_max = 1;
  EXPECT_EQ(message(bad).rfind("config.dmax:", 0), 0u);
  bad = cfg;
  bad.initial = PauliStringInit{{{9, Pauli::X}}};
  EXPECT_EQ(message(bad).rfind("config.op:", 0), 0u);
  bad = cfg;
  bad.initial = ThermalInit{-0.1};
  EXPECT_EQ(message(bad).rfind("config.beta:", 0), 0u);
}

TEST(ParseOperator, Grammar) {
  const auto id = parse_operator("identity", 8);
  ASSERT_TRUE(std::holds_alternative<PauliStringInit>(id));
  EXPECT_TRUE(std::get<PauliStringInit>(id).letters.empty());

  const auto y = std::get<PauliStringInit>(parse_operator("local:y", 14));
  EXPECT_EQ(y.letters, (std::map<Index, Pauli>{{7, Pauli::Y}}));
  const auto zz = std::get<PauliStringInit>(parse_operator("local:zz", 14));
  EXPECT_EQ(zz.letters, (std::map<Index, Pauli>{{6, Pauli::Z}, {7, Pauli::Z}}));
  const auto at = std::get<PauliStringInit>(parse_operator("local:XY@0", 4));
  EXPECT_EQ(at.letters, (std::map<Index, Pauli>{{0, Pauli::X}, {1, Pauli::Y}}));

  const auto sum = std::get<ExtensiveInit>(parse_operator("sum:x+zz", 6));
  ASSERT_EQ(sum.patterns.size(), 2u);
  EXPECT_EQ(sum.patterns[1].factors.size(), 2u);

  const auto ham = std::get<ExtensiveInit>(parse_operator("ham:1,0.5", 6));
  ASSERT_EQ(ham.patterns.size(), 3u);
  EXPECT_EQ(ham.patterns[2].coefficient, 0.5);
  EXPECT_EQ(ham.patterns[0].factors.size(), 2u);
  EXPECT_EQ(std::get<ExtensiveInit>(parse_operator("ham:0,1", 6)).patterns.size(), 2u);
}

TEST(ParseOperator, Errors) {
  for (const char* text : {"", "y", "local:", "local:q", "local:y@9", "local:yy@3", "sum:xyz", "ham:1",
                           "ham:a,1", "blob:x"}) {
    try {
      parse_operator(text, 4);
      ADD_FAILURE() << "accepted '" << text << "'";
    } catch (const PreconditionError& e) {
      EXPECT_EQ(std::string(e.what()).rfind("config.op:", 0), 0u) << e.what();
    }
  }
}

TEST(Describe, NamesTheOperator) {
  EXPECT_EQ(describe(parse_operator("local:y", 4)), "pauli:y@2");
  EXPECT_EQ(describe(PauliStringInit{}), "pauli:identity");
  EXPECT_EQ(describe(ThermalInit{0.01, 0.0, 1.0, 0.0}), "thermal(beta=0.01,h0x=0,h0z=1,dbeta=0.001)");
}

}  // namespace
}  // namespace tdmpo
