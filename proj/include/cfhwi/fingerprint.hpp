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
#include <span>
#include <string>

#include <Eigen/Dense>

namespace cfhwi {

/// FNV-1a over the raw bytes of the values fed in. Used to tag reports with the
/// configuration they were computed from.
class Fingerprint {
public:
    Fingerprint& add(std::uint64_t v) noexcept;
    Fingerprint& add(double v) noexcept;
    Fingerprint& add(std::span<const double> values) noexcept;
    Fingerprint& add(const Eigen::MatrixXd& m) noexcept;
    Fingerprint& add(const std::string& s) noexcept;

    [[nodiscard]] std::uint64_t value() const noexcept { return state_; }
    [[nodiscard]] std::string hex() const;

private:
    void bytes(const void* data, std::size_t n) noexcept;

    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace cfhwi
