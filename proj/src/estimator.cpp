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

#include "cfhwi/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <utility>

#include "cfhwi/errors.hpp"

namespace cfhwi {

PilotMode parse_pilot_mode(std::string_view name) {
    if (name == "orthogonal") return PilotMode::kOrthogonal;
    if (name == "random-assignment" || name == "random") return PilotMode::kRandomAssignment;
    throw ConfigError("unknown pilot mode '" + std::string(name) + "'");
}

std::string_view to_string(PilotMode mode) {
    return mode == PilotMode::kOrthogonal ? "orthogonal" : "random-assignment";
}

PilotBook::PilotBook(int tau, std::vector<int> assignment) : tau_(tau), assignment_(std::move(assignment)) {
    if (tau_ < 1) throw ConfigError("pilot length must be at least 1");
    if (assignment_.empty()) throw ConfigError("pilot book needs at least one UE");

    const double scale = 1.0 / std::sqrt(static_cast<double>(tau_));
    sequences_.resize(tau_, ue_count());
    for (int k = 0; k < ue_count(); ++k) {
        const int col = assignment_[k];
        if (col < 0 || col >= tau_) throw ConfigError("pilot index out of range for UE " + std::to_string(k));
        for (int i = 0; i < tau_; ++i) {
            const double phase = -2.0 * std::numbers::pi * static_cast<double>(i) * col / tau_;
            sequences_(i, k) = std::polar(scale, phase);
        }
    }
}

PilotBook build_pilot_book(int tau, int k_count, PilotMode mode, std::uint64_t seed) {
    if (tau < 1) throw ConfigError("pilot length must be at least 1");
    if (k_count < 1) throw ConfigError("need at least one UE");

    std::vector<int> assignment(static_cast<std::size_t>(k_count));
    if (mode == PilotMode::kOrthogonal) {
        if (tau < k_count) {
            throw ConfigError("orthogonal pilots need tau >= K (tau = " + std::to_string(tau) +
                              ", K = " + std::to_string(k_count) + ")");
        }
        std::iota(assignment.begin(), assignment.end(), 0);
        return {tau, std::move(assignment)};
    }

    Engine rng = make_engine(seed, Stream::kPilotAssignment);
    std::vector<int> columns(static_cast<std::size_t>(tau));
    std::iota(columns.begin(), columns.end(), 0);
    std::shuffle(columns.begin(), columns.end(), rng);
    std::vector<int> order(static_cast<std::size_t>(k_count));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    for (int i = 0; i < k_count; ++i) {
        assignment[order[i]] = columns[i % tau];
    }
    return {tau, std::move(assignment)};
}

PilotGram pilot_gram(const PilotBook& book) {
    const Eigen::MatrixXcd inner = book.sequences().adjoint() * book.sequences();
    PilotGram gram{inner.cwiseAbs2()};
    // DFT columns are orthonormal up to rounding; snap the residue so shared and
    // distinct pilots give exactly 1 and 0.
    for (double& v : gram.cross.reshaped()) {
        if (std::abs(v) < 1e-12) v = 0.0;
        if (std::abs(v - 1.0) < 1e-12) v = 1.0;
    }
    return gram;
}

EstimatorCoefficients compute_coefficients(const LargeScaleFading& fading, const PilotGram& gram,
                                           const PowerConfig& power, const HardwareProfile& hw, int tau) {
    const int k_count = fading.ue_count();
    if (gram.cross.rows() != k_count || gram.cross.cols() != k_count) {
        throw ConfigError("pilot Gram matrix does not match the number of UEs");
    }
    if (tau < 1) throw ConfigError("pilot length must be at least 1");

    const double krkt = hw.kappa_r() * hw.kappa_t();
    const double gain = std::sqrt(tau * power.rho_p * krkt);
    const Eigen::MatrixXd& beta = fading.beta();

    // weights(k', k) = kr kt tau |phi_k^H phi_k'|^2 + (1 - kr kt)
    const Eigen::MatrixXd weights = (krkt * tau) * gram.cross.array() + (1.0 - krkt);
    const Eigen::MatrixXd received = (power.rho_p * (beta * weights)).array() + power.sigma2;

    EstimatorCoefficients out;
    out.c = (gain * beta.array() / received.array()).matrix();
    // lambda = beta * (tau rho_p kr kt beta / received); the ratio is at most 1 analytically.
    const Eigen::ArrayXXd share = ((tau * power.rho_p * krkt) * beta.array() / received.array()).min(1.0);
    out.lambda = (beta.array() * share).matrix();
    return out;
}

UplinkSetup make_uplink_setup(LargeScaleFading fading, PilotBook book, PowerConfig power, HardwareProfile hw) {
    if (book.ue_count() != fading.ue_count()) {
        throw ConfigError("pilot book covers " + std::to_string(book.ue_count()) + " UEs, fading has " +
                          std::to_string(fading.ue_count()));
    }
    power.validate(fading.ue_count());
    PilotGram gram = pilot_gram(book);
    EstimatorCoefficients coeffs = compute_coefficients(fading, gram, power, hw, book.tau());
    return {std::move(fading), std::move(book), std::move(gram), std::move(power), hw, std::move(coeffs)};
}

}  // namespace cfhwi
