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
#include <vector>

#include "cfhwi/closed_form.hpp"

namespace cfhwi {

struct Scenario;

/// Per-unit power consumption (W) and bandwidth (Hz). Every AP, backhaul link and
/// UE draws the same power.
struct PowerModel {
    double p_k = 0.6;
    double p_m = 0.0125;
    double p_bm = 0.1;
    double bandwidth = 20e6;

    void validate() const;
};

struct EEReport {
    double ee = 0.0;           // bit/J
    double sum_rate = 0.0;     // bit/s
    double total_power = 0.0;  // W
    int m_count = 0;
};

/// K P_k + M (P_m + P_bm).
double total_power(int m_count, int k_count, const PowerModel& model);

EEReport energy_efficiency(const SEReport& rates, double bandwidth, int m_count, int k_count,
                           const PowerModel& model);

enum class RateSource {
    kClosedForm,
    kMonteCarlo,
};

struct SweepOptions {
    int geometry_samples = 100;
    RateSource source = RateSource::kClosedForm;
    std::size_t mc_trials = 10000;  // per geometry sample, only for kMonteCarlo
    unsigned workers = 0;
};

struct EESweep {
    std::vector<EEReport> curve;  // one entry per grid point, rates averaged over samples
    int argmax_m = 0;             // ties go to the smaller M
};

/// EE over an increasing AP-count grid using the scenario's hardware, pilots and
/// geometry samples. Geometry sample s is nested across grid points.
EESweep sweep_optimal_m(const std::vector<int>& m_grid, const Scenario& scenario, const PowerModel& model,
                        const SweepOptions& options = {});

}  // namespace cfhwi
