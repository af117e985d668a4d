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

#include "cfhwi/system_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cfhwi/errors.hpp"

namespace cfhwi {

double distance_km(const Point& a, const Point& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

NetworkGeometry::NetworkGeometry(std::vector<Point> aps, std::vector<Point> ues, double side_km)
    : aps_(std::move(aps)), ues_(std::move(ues)), side_km_(side_km) {
    if (aps_.empty() || ues_.empty()) {
        throw ConfigError("geometry needs at least one AP and one UE");
    }
    if (!(side_km_ > 0.0) || !std::isfinite(side_km_)) {
        throw ConfigError("side length must be positive, got " + std::to_string(side_km_));
    }
    auto inside = [this](const Point& p) {
        return p.x >= 0.0 && p.x <= side_km_ && p.y >= 0.0 && p.y <= side_km_;
    };
    for (const auto& p : aps_) {
        if (!inside(p)) throw ConfigError("AP position outside the deployment square");
    }
    for (const auto& p : ues_) {
        if (!inside(p)) throw ConfigError("UE position outside the deployment square");
    }
}

NetworkGeometry NetworkGeometry::with_first_aps(int m_count) const {
    if (m_count < 1 || m_count > ap_count()) {
        throw ConfigError("AP prefix length out of range: " + std::to_string(m_count));
    }
    return {std::vector<Point>(aps_.begin(), aps_.begin() + m_count), ues_, side_km_};
}

LargeScaleFading::LargeScaleFading(Eigen::MatrixXd beta) : beta_(std::move(beta)) {
    if (beta_.rows() < 1 || beta_.cols() < 1) {
        throw ConfigError("large-scale fading matrix must be at least 1 x 1");
    }
    for (Eigen::Index k = 0; k < beta_.cols(); ++k) {
        for (Eigen::Index m = 0; m < beta_.rows(); ++m) {
            const double b = beta_(m, k);
            if (!(b > 0.0) || !std::isfinite(b)) {
                throw ConfigError("large-scale fading entries must be positive and finite");
            }
        }
    }
}

LargeScaleFading LargeScaleFading::with_first_aps(int m_count) const {
    if (m_count < 1 || m_count > ap_count()) {
        throw ConfigError("AP prefix length out of range: " + std::to_string(m_count));
    }
    return LargeScaleFading(beta_.topRows(m_count));
}

HardwareProfile::HardwareProfile(double kappa_t, double kappa_r) : kappa_t_(kappa_t), kappa_r_(kappa_r) {
    if (!(kappa_t >= 0.0 && kappa_t <= 1.0) || !(kappa_r >= 0.0 && kappa_r <= 1.0)) {
        throw ConfigError("hardware quality factors must lie in [0, 1]");
    }
}

void PowerConfig::validate(int k_count) const {
    if (!(rho_u > 0.0) || !(rho_p > 0.0)) throw ConfigError("transmit powers must be positive");
    if (!(sigma2 > 0.0)) throw ConfigError("noise power must be positive");
    if (!(bandwidth > 0.0)) throw ConfigError("bandwidth must be positive");
    if (gamma.size() != k_count) {
        throw ConfigError("power control vector has " + std::to_string(gamma.size()) + " entries, expected " +
                          std::to_string(k_count));
    }
    for (Eigen::Index k = 0; k < gamma.size(); ++k) {
        if (!(gamma(k) >= 0.0 && gamma(k) <= 1.0)) throw ConfigError("power control coefficients must lie in [0, 1]");
    }
}

NetworkGeometry place_uniform(int m_count, int k_count, double side_km, std::uint64_t seed) {
    if (m_count < 1 || k_count < 1) throw ConfigError("need at least one AP and one UE");
    if (!(side_km > 0.0)) throw ConfigError("side length must be positive");

    std::uniform_real_distribution<double> coord(0.0, side_km);
    auto drop = [&](int count, Stream stream) {
        Engine rng = make_engine(seed, stream);
        std::vector<Point> points(static_cast<std::size_t>(count));
        for (auto& p : points) {
            p.x = coord(rng);
            p.y = coord(rng);
        }
        return points;
    };
    return {drop(m_count, Stream::kApPositions), drop(k_count, Stream::kUePositions), side_km};
}

LargeScaleFading compute_beta(const NetworkGeometry& geometry, const PathLoss& path_loss, std::uint64_t seed) {
    if (!(path_loss.alpha > 0.0)) throw ConfigError("path-loss exponent must be positive");
    if (!(path_loss.sigma_sh_db >= 0.0)) throw ConfigError("shadowing deviation must be non-negative");
    if (!(path_loss.distance_floor_km >= 0.0)) throw ConfigError("distance floor must be non-negative");

    const int m_count = geometry.ap_count();
    const int k_count = geometry.ue_count();
    Engine rng = make_engine(seed, Stream::kShadowing);
    std::normal_distribution<double> shadow(0.0, 1.0);

    Eigen::MatrixXd beta(m_count, k_count);
    for (int m = 0; m < m_count; ++m) {
        for (int k = 0; k < k_count; ++k) {
            const double z_db = path_loss.sigma_sh_db * shadow(rng);
            const double d = std::max(distance_km(geometry.aps()[m], geometry.ues()[k]), path_loss.distance_floor_km);
            if (d == 0.0) {
                throw SingularityError("AP " + std::to_string(m) + " coincides with UE " + std::to_string(k) +
                                       " and no distance floor is set");
            }
            beta(m, k) = std::pow(d, -path_loss.alpha) * std::pow(10.0, z_db / 10.0);
        }
    }
    return LargeScaleFading(std::move(beta));
}

double noise_power(double bandwidth_hz, double noise_figure_db) {
    if (!(bandwidth_hz > 0.0)) throw ConfigError("bandwidth must be positive");
    return bandwidth_hz * kBoltzmann * kReferenceTemperature * std::pow(10.0, noise_figure_db / 10.0);
}

double beta_lower_bound(double side_km, double distance_floor_km, double alpha) {
    return std::pow(std::max(side_km * std::sqrt(2.0), distance_floor_km), -alpha);
}

double beta_upper_bound(double /*side_km*/, double distance_floor_km, double alpha) {
    if (distance_floor_km <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(distance_floor_km, -alpha);
}

ChannelRealization draw_channels(const LargeScaleFading& fading, Engine& rng) {
    ComplexNormal cn;
    const auto& beta = fading.beta();
    ChannelRealization out{Eigen::MatrixXcd(beta.rows(), beta.cols())};
    for (Eigen::Index k = 0; k < beta.cols(); ++k) {
        for (Eigen::Index m = 0; m < beta.rows(); ++m) {
            out.g(m, k) = cn(rng, beta(m, k));
        }
    }
    return out;
}

ChannelRealization draw_channels(const LargeScaleFading& fading, std::uint64_t seed) {
    Engine rng = make_engine(seed, Stream::kChannels);
    return draw_channels(fading, rng);
}

}  // namespace cfhwi
