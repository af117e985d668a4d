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

#include <stdexcept>
#include <string>

namespace cfhwi {

/// Invalid or inconsistent user-supplied configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A quantity that would be infinite, e.g. an AP sitting on top of a UE with no distance floor.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Internal invariant broken; indicates a bug rather than bad input.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace cfhwi
