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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfhwi/closed_form.hpp"
#include "cfhwi/estimator.hpp"
#include "cfhwi/random.hpp"
#include "cfhwi/system_model.hpp"

namespace cfhwi {

enum class SymbolAlphabet {
    kGaussian,     // q ~ CN(0, 1)
    kUnitModulus,  // q = exp(j theta), theta uniform
};

struct PilotPhase {
    Eigen::MatrixXcd received;  // tau x M, column m is y_pm
    Eigen::MatrixXcd g_hat;     // M x K LMMSE estimates
};

/// One uplink data sample with every impairment source kept separately.
struct UplinkData {
    Eigen::VectorXcd y;              // M received samples
    Eigen::VectorXcd ue_distortion;  // K transmitter distortion draws eta_kt
    Eigen::VectorXcd ap_distortion;  // M receiver distortion draws eta_mr
    Eigen::VectorXcd noise;          // M noise samples w_um
};

/// Per-trial split of the combined signal r = g_hat^H y into its named parts.
struct Decomposition {
    Eigen::MatrixXcd cross_gain;         // K x K, (k, k') = sum_m g_hat_mk^* g_mk'
    Eigen::VectorXcd signal;             // (DS_k + BU_k) q_k
    Eigen::MatrixXcd user_interference;  // (k, k') = UI_kk' q_k', zero diagonal
    Eigen::MatrixXcd ue_distortion;      // (k, k') = HI_t,kk'
    Eigen::VectorXcd ap_distortion;      // HI_r for each k
    Eigen::VectorXcd noise;              // NI_k

    [[nodiscard]] Eigen::VectorXcd total() const;
};

struct TrialOutputs {
    ChannelRealization channel;
    Eigen::MatrixXcd g_hat;
    Eigen::VectorXcd symbols;
    Eigen::VectorXcd r;
    Decomposition parts;
};

/// Fresh transmitter distortion per pilot symbol and UE, fresh receiver distortion per
/// symbol and AP (conditioned on the channels), then g_hat_mk = c_mk phi_k^H y_pm.
PilotPhase simulate_pilot_phase(const ChannelRealization& channel, const UplinkSetup& setup, Engine& distortion_rng,
                                Engine& noise_rng);

UplinkData simulate_uplink_data(const ChannelRealization& channel, const PowerConfig& power, const HardwareProfile& hw,
                                const Eigen::VectorXcd& symbols, Engine& distortion_rng, Engine& noise_rng);

/// r_k = sum_m conj(g_hat_mk) y_m.
Eigen::VectorXcd mr_combine(const Eigen::MatrixXcd& g_hat, const Eigen::VectorXcd& y);

Decomposition decompose(const ChannelRealization& channel, const Eigen::MatrixXcd& g_hat, const UplinkData& data,
                        const Eigen::VectorXcd& symbols, const PowerConfig& power, const HardwareProfile& hw);

Eigen::VectorXcd draw_symbols(int k_count, SymbolAlphabet alphabet, Engine& rng);

/// A full coherence interval. Randomness derives from (seed, source, trial) only.
TrialOutputs run_trial(const UplinkSetup& setup, std::uint64_t seed, std::uint64_t trial,
                       SymbolAlphabet alphabet = SymbolAlphabet::kGaussian);

struct MomentEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;

    /// (mean - expected) / std_error; zero when both agree exactly with no spread.
    [[nodiscard]] double z_score(double expected) const;
};

/// Sample mean and std / sqrt(n) of `values`. Needs at least two values.
MomentEstimate estimate_mean(const std::vector<double>& values);

struct MonteCarloOptions {
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;  // 0: hardware concurrency
    SymbolAlphabet alphabet = SymbolAlphabet::kGaussian;
};

inline constexpr std::size_t kMinimumMomentTrials = 1000;

struct AppendixMomentEstimates {
    std::vector<std::array<MomentEstimate, kMomentCount>> per_ue;
    std::vector<MomentEstimate> impairment_total;  // per-UE sum of the five non-signal moments
    std::size_t trials = 0;
    bool underpowered = false;  // fewer than kMinimumMomentTrials
    std::string warning;
    double max_decomposition_error = 0.0;  // worst relative mismatch of the six-part split

    [[nodiscard]] const MomentEstimate& get(int ue, Moment m) const {
        return per_ue.at(static_cast<std::size_t>(ue))[static_cast<std::size_t>(m)];
    }
};

/// Monte Carlo estimates of every decomposition moment, conditioned on `setup`.
/// The desired-signal term uses the sample mean of sum_m g_hat^* g over all trials.
AppendixMomentEstimates estimate_appendix_moments(const UplinkSetup& setup, const MonteCarloOptions& options);

struct RateEstimate {
    double rate = 0.0;  // bits/s/Hz
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Use-and-then-forget rate from estimated moments with a 95% delta-method interval.
std::vector<RateEstimate> uatf_rates(const AppendixMomentEstimates& moments);

std::vector<RateEstimate> empirical_se(const UplinkSetup& setup, const MonteCarloOptions& options);

}  // namespace cfhwi
