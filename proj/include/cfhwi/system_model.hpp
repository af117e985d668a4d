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

#include <Eigen/Dense>

#include "cfhwi/random.hpp"

namespace cfhwi {

inline constexpr double kBoltzmann = 1.381e-23;       // J/K
inline constexpr double kReferenceTemperature = 290;  // K

/// Planar position in km.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

double distance_km(const Point& a, const Point& b);

/// AP and UE positions inside a [0, side]^2 square.
class NetworkGeometry {
public:
    NetworkGeometry(std::vector<Point> aps, std::vector<Point> ues, double side_km);

    [[nodiscard]] const std::vector<Point>& aps() const noexcept { return aps_; }
    [[nodiscard]] const std::vector<Point>& ues() const noexcept { return ues_; }
    [[nodiscard]] double side_km() const noexcept { return side_km_; }
    [[nodiscard]] int ap_count() const noexcept { return static_cast<int>(aps_.size()); }
    [[nodiscard]] int ue_count() const noexcept { return static_cast<int>(ues_.size()); }

    /// Geometry restricted to the first `m_count` APs (same UEs).
    [[nodiscard]] NetworkGeometry with_first_aps(int m_count) const;

private:
    std::vector<Point> aps_;
    std::vector<Point> ues_;
    double side_km_;
};

/// M x K matrix of channel variances. Every entry is positive and finite.
class LargeScaleFading {
public:
    explicit LargeScaleFading(Eigen::MatrixXd beta);

    [[nodiscard]] const Eigen::MatrixXd& beta() const noexcept { return beta_; }
    [[nodiscard]] double operator()(int m, int k) const { return beta_(m, k); }
    [[nodiscard]] int ap_count() const noexcept { return static_cast<int>(beta_.rows()); }
    [[nodiscard]] int ue_count() const noexcept { return static_cast<int>(beta_.cols()); }

    [[nodiscard]] LargeScaleFading with_first_aps(int m_count) const;

private:
    Eigen::MatrixXd beta_;
};

/// Transmitter (UE) and receiver (AP) hardware quality factors, both in [0, 1].
class HardwareProfile {
public:
    HardwareProfile() = default;
    HardwareProfile(double kappa_t, double kappa_r);

    [[nodiscard]] double kappa_t() const noexcept { return kappa_t_; }
    [[nodiscard]] double kappa_r() const noexcept { return kappa_r_; }
    [[nodiscard]] bool ideal() const noexcept { return kappa_t_ == 1.0 && kappa_r_ == 1.0; }

    static HardwareProfile perfect() { return {}; }

private:
    double kappa_t_ = 1.0;
    double kappa_r_ = 1.0;
};

/// Transmit powers, power control, and noise. Powers in W, bandwidth in Hz.
struct PowerConfig {
    double rho_u = 0.1;
    double rho_p = 0.1;
    Eigen::VectorXd gamma;
    double sigma2 = 0.0;
    double bandwidth = 20e6;

    /// Throws ConfigError unless every field is in range and gamma has `k_count` entries.
    void validate(int k_count) const;
};

/// Path loss and shadowing parameters for the large-scale fading model.
struct PathLoss {
    double alpha = 3.5;
    double sigma_sh_db = 8.0;
    double distance_floor_km = 0.01;
};

struct ChannelRealization {
    Eigen::MatrixXcd g;  // M x K
};

/// Independent uniform AP and UE drops. AP and UE positions come from separate
/// substreams, so the first m APs of a larger drop equal a drop of m APs.
NetworkGeometry place_uniform(int m_count, int k_count, double side_km, std::uint64_t seed);

/// beta_mk = max(L_mk, floor)^-alpha * 10^(z_mk / 10), z_mk ~ N(0, sigma_sh^2) i.i.d.
/// Shadowing is drawn AP-major so nested geometries get nested fading.
LargeScaleFading compute_beta(const NetworkGeometry& geometry, const PathLoss& path_loss, std::uint64_t seed);

/// sigma^2 = B * k_B * T0 * 10^(NF / 10) in W.
double noise_power(double bandwidth_hz, double noise_figure_db);

/// Smallest and largest beta attainable in a square of the given side with no shadowing.
double beta_lower_bound(double side_km, double distance_floor_km, double alpha);
double beta_upper_bound(double side_km, double distance_floor_km, double alpha);

ChannelRealization draw_channels(const LargeScaleFading& fading, Engine& rng);
ChannelRealization draw_channels(const LargeScaleFading& fading, std::uint64_t seed);

}  // namespace cfhwi
