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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cfhwi/closed_form.hpp"
#include "cfhwi/energy.hpp"
#include "cfhwi/estimator.hpp"
#include "cfhwi/system_model.hpp"

namespace cfhwi {

/// Whether UE drops change between geometry samples of one figure point.
enum class UePlacement {
    kRedraw,  // new UE positions for every geometry sample
    kFixed,   // one UE drop shared by all samples; only APs and shadowing change
};

/// A complete, seedable description of one simulated deployment plus the knobs the
/// experiments sweep. Defaults follow the reference parameter set (1 km square,
/// alpha 3.5, 8 dB shadowing, 9 dB noise figure, 20 MHz, 100 mW, gamma = 1).
struct Scenario {
    double side_length_km = 1.0;
    int aps = 100;
    int ues = 10;
    int tau = 10;
    double alpha = 3.5;
    double sigma_sh_db = 8.0;
    double noise_figure_db = 9.0;
    double bandwidth_hz = 20e6;
    double rho_u_w = 0.1;
    double rho_p_w = 0.1;
    std::vector<double> gamma{1.0};  // one value broadcasts to every UE
    double kappa_t = 1.0;
    double kappa_r = 1.0;
    double distance_floor_km = 0.01;
    std::uint64_t master_seed = 1;
    PilotMode pilot_mode = PilotMode::kOrthogonal;
    UePlacement ue_placement = UePlacement::kRedraw;

    double p_k_w = 0.6;
    double p_m_w = 0.0125;
    double p_bm_w = 0.1;
    std::vector<int> m_grid;
    int geometry_samples = 100;

    // Experiment sweeps; empty means "use the experiment's default".
    std::vector<std::pair<double, double>> kappa_pairs;  // (kappa_t, kappa_r)
    std::vector<std::pair<double, double>> z_pairs;      // (z_t, z_r)
    double kappa_t0 = 0.95;
    double kappa_r0 = 0.95;
    std::vector<double> p_m_list;

    [[nodiscard]] PowerConfig power() const;
    [[nodiscard]] HardwareProfile hardware() const;
    [[nodiscard]] PathLoss path_loss() const;
    [[nodiscard]] PowerModel power_model() const;

    /// Throws ConfigError on any out-of-range field.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

/// Parses `key = value` lines; '#' starts a comment. Lists are comma separated and
/// pairs are written `a:b`. Unknown keys are rejected. Keys not present keep their
/// value from `base`.
Scenario parse_scenario(std::string_view text, const Scenario& base = {});
Scenario load_scenario(const std::filesystem::path& path, const Scenario& base = {});

/// Canonical text form; parse_scenario(to_text(s)) == s.
std::string to_text(const Scenario& scenario);

/// Hex digest of the canonical text.
std::string scenario_hash(const Scenario& scenario);

/// Seed of geometry sample `sample` under the scenario's master seed.
std::uint64_t geometry_seed(const Scenario& scenario, std::uint64_t sample);

/// Geometry for sample `sample` with `m_count` APs. APs are nested across m_count for a
/// fixed sample.
NetworkGeometry scenario_geometry(const Scenario& scenario, int m_count, std::uint64_t sample);

/// Fading, pilots, and estimator for one geometry sample, with hardware `hw`.
UplinkSetup build_setup(const Scenario& scenario, const LargeScaleFading& fading, std::uint64_t sample,
                        const HardwareProfile& hw);
UplinkSetup build_setup(const Scenario& scenario, int m_count, std::uint64_t sample, const HardwareProfile& hw);

LargeScaleFading scenario_fading(const Scenario& scenario, int m_count, std::uint64_t sample);

}  // namespace cfhwi
