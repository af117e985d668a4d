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

#include "cfhwi/fingerprint.hpp"

#include <cstdio>
#include <cstring>

namespace cfhwi {

void Fingerprint::bytes(const void* data, std::size_t n) noexcept {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        state_ ^= p[i];
        state_ *= 0x100000001b3ULL;
    }
}

Fingerprint& Fingerprint::add(std::uint64_t v) noexcept {
    bytes(&v, sizeof v);
    return *this;
}

Fingerprint& Fingerprint::add(double v) noexcept {
    if (v == 0.0) v = 0.0;  // fold -0.0
    bytes(&v, sizeof v);
    return *this;
}

Fingerprint& Fingerprint::add(std::span<const double> values) noexcept {
    add(static_cast<std::uint64_t>(values.size()));
    for (double v : values) add(v);
    return *this;
}

Fingerprint& Fingerprint::add(const Eigen::MatrixXd& m) noexcept {
    add(static_cast<std::uint64_t>(m.rows()));
    add(static_cast<std::uint64_t>(m.cols()));
    return add(std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

Fingerprint& Fingerprint::add(const std::string& s) noexcept {
    add(static_cast<std::uint64_t>(s.size()));
    bytes(s.data(), s.size());
    return *this;
}

std::string Fingerprint::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
    return buf;
}

}  // namespace cfhwi
