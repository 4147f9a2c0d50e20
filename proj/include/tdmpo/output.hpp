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

// CSV / JSON emission. Data files are deterministic: numbers use the
// shortest round-trip representation and no wall-clock values appear
// outside the timing CSV and metadata JSON.

#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "tdmpo/harness.hpp"
#include "tdmpo/spectral.hpp"

namespace tdmpo {

std::string format_double(double v);

/// t [1/J], eta_tot [1], max_bond [1]
void write_timeseries_csv(const std::string& path, const TimeSeries& series);
/// t [1/J], wall_ms [ms]
void write_timing_csv(const std::string& path, const TimeSeries& series);
/// D [1], t_star [1/J] (empty if not reached), status
void write_deps_csv(const std::string& path, const DepsTable& table);
/// s [1], density [1]
void write_histogram_csv(const std::string& path, const SpacingHistogram& hist);
/// s [1]
void write_spacings_csv(const std::string& path, const std::vector<double>& samples);
/// D [1], t [1/J], eta_tot [1], infidelity [1]
void write_fidelity_csv(const std::string& path, const FidelityReport& report);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const FitReport& report);
nlohmann::json to_json(const DepsTable& table);
nlohmann::json to_json(const LsdReport& report);
nlohmann::json to_json(const FidelityReport& report);

void write_json(const std::string& path, const nlohmann::json& value);

}  // namespace tdmpo
