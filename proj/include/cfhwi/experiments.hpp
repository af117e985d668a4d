// cfhwi: cell-free massive MIMO uplink with transceiver hardware impairments
// Copyright (C) 2026 The cfhwi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cfhwi/closed_form.hpp"
#include "cfhwi/result_table.hpp"
#include "cfhwi/scenario.hpp"

namespace cfhwi {

inline constexpr std::string_view kVersion = "1.0.0";

enum class ExperimentId {
    kSeVsM,
    kScalingLaw,
    kSeCdf,
    kEeVsM,
    kValidate,
};

ExperimentId parse_experiment(std::string_view name);
std::string_view to_string(ExperimentId id);

/// Reference parameters of each experiment; a scenario file is applied on top.
Scenario default_scenario(ExperimentId id);

/// Everything a run depends on. Two runs with equal specs produce identical tables
/// regardless of the worker count.
struct ExperimentSpec {
    ExperimentId id = ExperimentId::kSeVsM;
    Scenario scenario;
    std::size_t trials = 10000;  // Monte Carlo trials per geometry sample (0 disables MC where optional)
    int geometries = 100;
    unsigned workers = 0;
};

/// Spec with the experiment's default scenario, trial and geometry counts.
ExperimentSpec default_spec(ExperimentId id);

/// Average per-UE SE against M for each (kappa_t, kappa_r) pair, closed form and simulated.
/// Columns: M, kappa_t, kappa_r, mean_se_closed, mean_se_mc, ci_low, ci_high, rel_diff.
ResultTable run_se_vs_m(const ExperimentSpec& spec);

/// Average per-UE SE on nested geometries with kappa = kappa0 / M^z, plus the large-M limit.
/// Columns: geometry (-1 = average over geometries), z_t, z_r, M, kappa_t, kappa_r, mean_se,
/// limit_se_printed, limit_se_aggregate.
ResultTable run_scaling_law(const ExperimentSpec& spec);

/// Per-UE closed-form SE samples for each hardware pair.
/// Columns: kappa_t, kappa_r, geometry, ue, se.
ResultTable run_se_cdf(const ExperimentSpec& spec);

/// EE against M for each P_m value.
/// Columns: p_m, M, ee, sum_rate, total_power, is_argmax.
ResultTable run_ee_vs_m(const ExperimentSpec& spec);

/// One small configuration of the closed-form/oracle validation grid.
struct ValidationCase {
    int aps = 1;
    int ues = 1;
    int tau = 1;
    double kappa_t = 1.0;
    double kappa_r = 1.0;
    bool shared_pilot = false;
};

/// M in {1, 2, 3, 10} x kappa in {1, 0.9, 0.5} x pilot layouts
/// {K=1 tau=1, K=2 tau=2 orthogonal, K=2 tau=1 shared, K=2 tau=2 shared}.
std::vector<ValidationCase> default_validation_grid();

/// Deterministic fading for a validation case: beta = 10^u, u uniform in [-1, 1].
UplinkSetup validation_setup(const ValidationCase& vc, std::uint64_t seed);

struct ValidateOptions {
    std::vector<ValidationCase> grid = default_validation_grid();
    double z_threshold = 3.0;
    /// Test fixture: multiply one closed-form moment by `corrupt_factor` before comparing.
    std::optional<Moment> corrupt;
    double corrupt_factor = 1.25;
};

/// Closed-form moment vs Monte Carlo estimate for every case, UE and moment.
/// Columns: case, M, K, tau, kappa_t, kappa_r, shared, ue, moment, closed_form, monte_carlo,
/// std_error, z, pass, closed_form_printed, z_printed.
ResultTable run_validate(const ExperimentSpec& spec, const ValidateOptions& options = {});

/// True when every row of a validate table passed.
bool validation_passed(const ResultTable& table);

ResultTable run_experiment(const ExperimentSpec& spec);

}  // namespace cfhwi
