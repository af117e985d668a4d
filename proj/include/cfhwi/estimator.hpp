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
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cfhwi/system_model.hpp"

namespace cfhwi {

enum class PilotMode {
    kOrthogonal,        // UE k gets basis column k; needs tau >= K
    kRandomAssignment,  // balanced random reuse of the tau basis columns
};

PilotMode parse_pilot_mode(std::string_view name);
std::string_view to_string(PilotMode mode);

/// Unit-norm pilot sequences (columns of a tau x tau DFT basis) and the UE -> column map.
class PilotBook {
public:
    PilotBook(int tau, std::vector<int> assignment);

    [[nodiscard]] int tau() const noexcept { return tau_; }
    [[nodiscard]] int ue_count() const noexcept { return static_cast<int>(assignment_.size()); }
    [[nodiscard]] const std::vector<int>& assignment() const noexcept { return assignment_; }
    /// tau x K matrix whose k-th column is the pilot of UE k.
    [[nodiscard]] const Eigen::MatrixXcd& sequences() const noexcept { return sequences_; }

private:
    int tau_;
    std::vector<int> assignment_;
    Eigen::MatrixXcd sequences_;
};

/// K x K matrix of |phi_k^H phi_k'|^2.
struct PilotGram {
    Eigen::MatrixXd cross;

    [[nodiscard]] double operator()(int k, int kp) const { return cross(k, kp); }
};

/// Per-(AP, UE) LMMSE scalar c_mk and estimate variance lambda_mk = E|g_hat_mk|^2.
struct EstimatorCoefficients {
    Eigen::MatrixXd c;
    Eigen::MatrixXd lambda;
};

/// Random assignment shuffles the basis columns and the UEs, then deals columns
/// round-robin, so every column is used floor(K/tau) or ceil(K/tau) times.
PilotBook build_pilot_book(int tau, int k_count, PilotMode mode, std::uint64_t seed);

PilotGram pilot_gram(const PilotBook& book);

EstimatorCoefficients compute_coefficients(const LargeScaleFading& fading, const PilotGram& gram,
                                           const PowerConfig& power, const HardwareProfile& hw, int tau);

/// Everything that stays fixed while channels are redrawn: the conditioning set for
/// both the closed-form bound and the Monte Carlo oracle.
struct UplinkSetup {
    LargeScaleFading fading;
    PilotBook book;
    PilotGram gram;
    PowerConfig power;
    HardwareProfile hw;
    EstimatorCoefficients coeffs;

    [[nodiscard]] int ap_count() const noexcept { return fading.ap_count(); }
    [[nodiscard]] int ue_count() const noexcept { return fading.ue_count(); }
    [[nodiscard]] int tau() const noexcept { return book.tau(); }
};

/// Validates dimensions and derives the Gram matrix and LMMSE coefficients.
UplinkSetup make_uplink_setup(LargeScaleFading fading, PilotBook book, PowerConfig power, HardwareProfile hw);

}  // namespace cfhwi
