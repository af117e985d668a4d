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

#include "cfhwi/energy.hpp"

#include <string>

#include "cfhwi/errors.hpp"
#include "cfhwi/monte_carlo.hpp"
#include "cfhwi/parallel.hpp"
#include "cfhwi/scenario.hpp"

namespace cfhwi {

void PowerModel::validate() const {
    if (!(p_k >= 0.0) || !(p_m >= 0.0) || !(p_bm >= 0.0)) throw ConfigError("power consumption values must be >= 0");
    if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
}

double total_power(int m_count, int k_count, const PowerModel& model) {
    if (m_count < 1 || k_count < 1) throw ConfigError("need at least one AP and one UE");
    return k_count * model.p_k + m_count * (model.p_m + model.p_bm);
}

EEReport energy_efficiency(const SEReport& rates, double bandwidth, int m_count, int k_count,
                           const PowerModel& model) {
    if (rates.rates.size() != k_count) throw ConfigError("rate vector does not match the number of UEs");
    EEReport out;
    out.m_count = m_count;
    out.sum_rate = rates.sum() * bandwidth;
    out.total_power = total_power(m_count, k_count, model);
    out.ee = out.sum_rate / out.total_power;
    return out;
}

EESweep sweep_optimal_m(const std::vector<int>& m_grid, const Scenario& scenario, const PowerModel& model,
                        const SweepOptions& options) {
    if (m_grid.empty()) throw ConfigError("AP-count grid is empty");
    for (std::size_t i = 0; i < m_grid.size(); ++i) {
        if (m_grid[i] < 1) throw ConfigError("AP counts must be positive");
        if (i > 0 && m_grid[i] <= m_grid[i - 1]) throw ConfigError("AP-count grid must be strictly increasing");
    }
    if (options.geometry_samples < 1) throw ConfigError("need at least one geometry sample");
    model.validate();

    const auto samples = static_cast<std::size_t>(options.geometry_samples);
    const int k_count = scenario.ues;
    const HardwareProfile hw = scenario.hardware();

    // One slot per (grid point, sample); reduced in index order afterwards.
    std::vector<SEReport> slots(m_grid.size() * samples);
    const unsigned outer_workers = options.source == RateSource::kClosedForm ? options.workers : 1;
    parallel_for(slots.size(), outer_workers, [&](std::size_t i) {
        const int m_count = m_grid[i / samples];
        const std::size_t sample = i % samples;
        const UplinkSetup setup = build_setup(scenario, m_count, sample, hw);
        if (options.source == RateSource::kClosedForm) {
            slots[i] = compute_se(setup);
            return;
        }
        MonteCarloOptions mc;
        mc.trials = options.mc_trials;
        mc.seed = geometry_seed(scenario, sample);
        mc.workers = options.workers;
        const auto estimates = empirical_se(setup, mc);
        SEReport report;
        report.rates.resize(k_count);
        for (int k = 0; k < k_count; ++k) report.rates(k) = estimates[static_cast<std::size_t>(k)].rate;
        slots[i] = std::move(report);
    });

    EESweep out;
    double best = -1.0;
    for (std::size_t g = 0; g < m_grid.size(); ++g) {
        CompensatedSum sum;
        for (std::size_t s = 0; s < samples; ++s) sum.add(slots[g * samples + s].sum());
        SEReport mean;
        mean.rates = Eigen::VectorXd::Constant(k_count, sum.value() / static_cast<double>(samples) / k_count);
        EEReport r = energy_efficiency(mean, model.bandwidth, m_grid[g], k_count, model);
        if (r.ee > best) {
            best = r.ee;
            out.argmax_m = m_grid[g];
        }
        out.curve.push_back(r);
    }
    return out;
}

}  // namespace cfhwi
