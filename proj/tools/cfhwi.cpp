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

// Command-line driver: runs one experiment and writes its result table as CSV.
// Exit codes: 0 success, 1 runtime or configuration error, 2 validation failure.

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cfhwi/errors.hpp"
#include "cfhwi/experiments.hpp"

namespace {

std::optional<cfhwi::Moment> parse_moment(const std::string& name) {
    if (name.empty()) return std::nullopt;
    for (cfhwi::Moment m : cfhwi::kAllMoments)
        if (cfhwi::to_string(m) == name) return m;
    throw cfhwi::ConfigError("unknown moment: " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cell-free massive MIMO uplink with hardware impairments"};
    std::string experiment;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<int> geometries;
    unsigned workers = 0;
    std::string corrupt;
    double corrupt_factor = 1.25;

    app.add_option("--experiment", experiment, "se-vs-m | scaling-law | se-cdf | ee-vs-m | validate")->required();
    app.add_option("--config", config, "Scenario file (key = value lines)")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--out", out, "Output CSV path (stdout when omitted)");
    app.add_option("--trials", trials, "Monte Carlo trials per geometry (0 disables simulation)");
    app.add_option("--geometries", geometries, "Geometry samples")->check(CLI::PositiveNumber);
    app.add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
    app.add_option("--corrupt-moment", corrupt, "validate only: scale this closed-form moment (negative control)");
    app.add_option("--corrupt-factor", corrupt_factor, "Scale factor for --corrupt-moment");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        cfhwi::ExperimentSpec spec = cfhwi::default_spec(cfhwi::parse_experiment(experiment));
        if (!config.empty()) {
            spec.scenario = cfhwi::load_scenario(config, spec.scenario);
            spec.geometries = spec.scenario.geometry_samples;
        }
        if (seed) spec.scenario.master_seed = *seed;
        if (trials) spec.trials = *trials;
        if (geometries) {
            spec.geometries = *geometries;
            spec.scenario.geometry_samples = *geometries;
        }
        spec.workers = workers;

        cfhwi::ResultTable table;
        bool failed = false;
        if (spec.id == cfhwi::ExperimentId::kValidate) {
            cfhwi::ValidateOptions options;
            options.corrupt = parse_moment(corrupt);
            options.corrupt_factor = corrupt_factor;
            table = cfhwi::run_validate(spec, options);
            failed = !cfhwi::validation_passed(table);
        } else {
            if (!corrupt.empty()) throw cfhwi::ConfigError("--corrupt-moment applies to validate only");
            table = cfhwi::run_experiment(spec);
        }

        if (out.empty())
            cfhwi::write_csv(std::cout, table);
        else
            cfhwi::save_csv(out, table);

        if (failed) {
            std::cerr << "validation failed: " << table.metadata.value("failures", 0) << " moment checks outside "
                      << table.metadata.value("z_threshold", 0.0) << " standard errors\n";
            return 2;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
