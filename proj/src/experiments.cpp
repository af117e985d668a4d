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

#include "cfhwi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cfhwi/energy.hpp"
#include "cfhwi/errors.hpp"
#include "cfhwi/monte_carlo.hpp"
#include "cfhwi/parallel.hpp"
#include "cfhwi/random.hpp"

namespace cfhwi {

namespace {

constexpr double kZ95 = 1.959963984540054;

std::vector<std::pair<double, double>> or_default(const std::vector<std::pair<double, double>>& v,
                                                  std::vector<std::pair<double, double>> fallback) {
    return v.empty() ? fallback : v;
}

ResultTable make_table(const ExperimentSpec& spec, std::vector<std::string> columns) {
    ResultTable t;
    t.columns = std::move(columns);
    t.metadata["experiment"] = std::string(to_string(spec.id));
    t.metadata["config_hash"] = scenario_hash(spec.scenario);
    t.metadata["seed"] = spec.scenario.master_seed;
    t.metadata["version"] = std::string(kVersion);
    t.metadata["trials"] = spec.trials;
    t.metadata["geometries"] = spec.geometries;
    t.metadata["scenario"] = to_text(spec.scenario);
    return t;
}

void check_spec(const ExperimentSpec& spec) {
    spec.scenario.validate();
    if (spec.geometries < 1) throw ConfigError("need at least one geometry sample");
}

double mean_log_rate(const Eigen::VectorXd& sir) {
    CompensatedSum sum;
    for (Eigen::Index k = 0; k < sir.size(); ++k) sum.add(std::log2(1.0 + sir(k)));
    return sum.value() / static_cast<double>(sir.size());
}

double percentile(std::vector<double> v, double p) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

ExperimentId parse_experiment(std::string_view name) {
    if (name == "se-vs-m") return ExperimentId::kSeVsM;
    if (name == "scaling-law") return ExperimentId::kScalingLaw;
    if (name == "se-cdf") return ExperimentId::kSeCdf;
    if (name == "ee-vs-m") return ExperimentId::kEeVsM;
    if (name == "validate") return ExperimentId::kValidate;
    throw ConfigError("unknown experiment: " + std::string(name));
}

std::string_view to_string(ExperimentId id) {
    switch (id) {
        case ExperimentId::kSeVsM: return "se-vs-m";
        case ExperimentId::kScalingLaw: return "scaling-law";
        case ExperimentId::kSeCdf: return "se-cdf";
        case ExperimentId::kEeVsM: return "ee-vs-m";
        case ExperimentId::kValidate: return "validate";
    }
    return "unknown";
}

Scenario default_scenario(ExperimentId id) {
    Scenario s;
    switch (id) {
        case ExperimentId::kSeVsM:
            s.ues = 10;
            s.tau = 10;
            s.m_grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
            s.kappa_pairs = {{1.0, 1.0}, {0.98, 1.0}, {1.0, 0.98}, {0.95, 0.95}};
            s.geometry_samples = 100;
            break;
        case ExperimentId::kScalingLaw:
            s.ues = 10;
            s.tau = 10;
            s.m_grid = {10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000};
            s.z_pairs = {{0.0, 0.0}, {0.0, 0.4}, {0.0, 0.75}, {0.5, 0.0}};
            s.kappa_t0 = 0.95;
            s.kappa_r0 = 0.95;
            s.geometry_samples = 10;
            break;
        case ExperimentId::kSeCdf:
            s.aps = 200;
            s.ues = 60;
            s.tau = 20;
            s.pilot_mode = PilotMode::kRandomAssignment;
            s.kappa_pairs = {{1.0, 1.0}, {0.98, 0.98}, {0.95, 0.95}};
            s.geometry_samples = 200;
            break;
        case ExperimentId::kEeVsM:
            s.ues = 20;
            s.tau = 20;
            s.m_grid = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 60, 70, 80, 90, 100, 120, 140, 160, 180, 200};
            s.p_m_list = {0.0125, 0.025, 0.05, 0.1};
            s.geometry_samples = 100;
            break;
        case ExperimentId::kValidate:
            s.geometry_samples = 1;
            break;
    }
    return s;
}

ExperimentSpec default_spec(ExperimentId id) {
    ExperimentSpec spec;
    spec.id = id;
    spec.scenario = default_scenario(id);
    spec.geometries = spec.scenario.geometry_samples;
    switch (id) {
        case ExperimentId::kSeVsM: spec.trials = 2000; break;
        case ExperimentId::kValidate: spec.trials = 100000; break;
        default: spec.trials = 0; break;
    }
    return spec;
}

ResultTable run_se_vs_m(const ExperimentSpec& spec) {
    check_spec(spec);
    const Scenario& sc = spec.scenario;
    const std::vector<int> grid = sc.m_grid.empty() ? std::vector<int>{sc.aps} : sc.m_grid;
    const auto pairs = or_default(sc.kappa_pairs, {{sc.kappa_t, sc.kappa_r}});
    const auto samples = static_cast<std::size_t>(spec.geometries);
    const int k_count = sc.ues;
    const int m_max = *std::max_element(grid.begin(), grid.end());

    std::vector<LargeScaleFading> fading;
    fading.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) fading.push_back(scenario_fading(sc, m_max, s));

    ResultTable t = make_table(spec, {"M", "kappa_t", "kappa_r", "mean_se_closed", "mean_se_mc", "ci_low", "ci_high",
                                      "rel_diff"});
    const bool simulate = spec.trials > 0;
    for (const auto& [kt, kr] : pairs) {
        const HardwareProfile hw(kt, kr);
        for (int m : grid) {
            std::vector<double> closed(samples), mc(samples), var(samples);
            const unsigned outer = simulate ? 1 : spec.workers;
            parallel_for(samples, outer, [&](std::size_t s) {
                const UplinkSetup setup = build_setup(sc, fading[s].with_first_aps(m), s, hw);
                closed[s] = compute_se(setup).sum();
                if (!simulate) return;
                MonteCarloOptions opt;
                opt.trials = spec.trials;
                opt.seed = derive_seed(geometry_seed(sc, s), Stream::kSymbols, static_cast<std::uint64_t>(m));
                opt.workers = spec.workers;
                CompensatedSum sum, v;
                for (const RateEstimate& r : uatf_rates(estimate_appendix_moments(setup, opt))) {
                    sum.add(r.rate);
                    v.add(r.std_error * r.std_error);
                }
                mc[s] = sum.value();
                var[s] = v.value();
            });
            CompensatedSum c_sum, m_sum, v_sum;
            for (std::size_t s = 0; s < samples; ++s) {
                c_sum.add(closed[s]);
                m_sum.add(mc[s]);
                v_sum.add(var[s]);
            }
            const double n = static_cast<double>(samples) * k_count;
            const double mean_closed = c_sum.value() / n;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            double mean_mc = nan, lo = nan, hi = nan, rel = nan;
            if (simulate) {
                mean_mc = m_sum.value() / n;
                const double se = std::sqrt(v_sum.value()) / n;
                lo = mean_mc - kZ95 * se;
                hi = mean_mc + kZ95 * se;
                rel = mean_mc != 0.0 ? std::abs(mean_closed - mean_mc) / std::abs(mean_mc) : nan;
            }
            t.add_row({static_cast<double>(m), kt, kr, mean_closed, mean_mc, lo, hi, rel});
        }
    }
    return t;
}

ResultTable run_scaling_law(const ExperimentSpec& spec) {
    check_spec(spec);
    const Scenario& sc = spec.scenario;
    if (sc.m_grid.empty()) throw ConfigError("scaling-law needs an m_grid");
    const auto pairs = or_default(sc.z_pairs, {{0.0, 0.0}});
    const auto samples = static_cast<std::size_t>(spec.geometries);
    const std::vector<int>& grid = sc.m_grid;
    const int m_max = *std::max_element(grid.begin(), grid.end());
    const PowerConfig power = sc.power();

    struct Cell {
        double se = 0.0;
        double printed = 0.0;
        double aggregate = 0.0;
    };
    // cells[(pair * grid + g) * samples + s]
    std::vector<Cell> cells(pairs.size() * grid.size() * samples);
    parallel_for(samples, spec.workers, [&](std::size_t s) {
        const LargeScaleFading full = scenario_fading(sc, m_max, s);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const LargeScaleFading fading = full.with_first_aps(grid[g]);
            // The limit depends on kappa_t0 and the pilots only; pilots do not depend on hardware.
            const UplinkSetup base = build_setup(sc, fading, s, HardwareProfile::perfect());
            Eigen::VectorXd sir_printed(sc.ues), sir_aggregate(sc.ues);
            for (int k = 0; k < sc.ues; ++k) {
                sir_printed(k) = asymptotic_sir(k, fading, base.gram, power, sc.kappa_t0, sc.tau, MuReading::kAsPrinted);
                sir_aggregate(k) =
                    asymptotic_sir(k, fading, base.gram, power, sc.kappa_t0, sc.tau, MuReading::kAggregate);
            }
            const double limit_printed = mean_log_rate(sir_printed);
            const double limit_aggregate = mean_log_rate(sir_aggregate);
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const ScalingSchedule sched{sc.kappa_t0, sc.kappa_r0, pairs[p].first, pairs[p].second};
                sched.validate();
                const UplinkSetup setup = build_setup(sc, fading, s, apply_schedule(grid[g], sched));
                Cell& cell = cells[(p * grid.size() + g) * samples + s];
                cell.se = compute_se(setup).mean();
                // A decaying UE quality drives every rate to zero.
                cell.printed = sched.z_t > 0.0 ? 0.0 : limit_printed;
                cell.aggregate = sched.z_t > 0.0 ? 0.0 : limit_aggregate;
            }
        }
    });

    ResultTable t = make_table(spec, {"geometry", "z_t", "z_r", "M", "kappa_t", "kappa_r", "mean_se", "limit_se_printed",
                                      "limit_se_aggregate"});
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const ScalingSchedule sched{sc.kappa_t0, sc.kappa_r0, pairs[p].first, pairs[p].second};
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const HardwareProfile hw = apply_schedule(grid[g], sched);
            CompensatedSum se, lp, la;
            for (std::size_t s = 0; s < samples; ++s) {
                const Cell& cell = cells[(p * grid.size() + g) * samples + s];
                t.add_row({static_cast<double>(s), sched.z_t, sched.z_r, static_cast<double>(grid[g]), hw.kappa_t(),
                           hw.kappa_r(), cell.se, cell.printed, cell.aggregate});
                se.add(cell.se);
                lp.add(cell.printed);
                la.add(cell.aggregate);
            }
            const double n = static_cast<double>(samples);
            t.add_row({-1.0, sched.z_t, sched.z_r, static_cast<double>(grid[g]), hw.kappa_t(), hw.kappa_r(),
                       se.value() / n, lp.value() / n, la.value() / n});
        }
    }
    return t;
}

ResultTable run_se_cdf(const ExperimentSpec& spec) {
    check_spec(spec);
    const Scenario& sc = spec.scenario;
    const auto pairs = or_default(sc.kappa_pairs, {{sc.kappa_t, sc.kappa_r}});
    const auto samples = static_cast<std::size_t>(spec.geometries);
    const auto k_count = static_cast<std::size_t>(sc.ues);

    // rates[(pair * samples + s) * K + k]
    std::vector<double> rates(pairs.size() * samples * k_count);
    parallel_for(samples, spec.workers, [&](std::size_t s) {
        const LargeScaleFading fading = scenario_fading(sc, sc.aps, s);
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const UplinkSetup setup = build_setup(sc, fading, s, HardwareProfile(pairs[p].first, pairs[p].second));
            const SEReport report = compute_se(setup);
            for (std::size_t k = 0; k < k_count; ++k)
                rates[(p * samples + s) * k_count + k] = report.rates(static_cast<Eigen::Index>(k));
        }
    });

    ResultTable t = make_table(spec, {"kappa_t", "kappa_r", "geometry", "ue", "se"});
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto first = rates.begin() + static_cast<std::ptrdiff_t>(p * samples * k_count);
        std::vector<double> block(first, first + static_cast<std::ptrdiff_t>(samples * k_count));
        for (std::size_t s = 0; s < samples; ++s)
            for (std::size_t k = 0; k < k_count; ++k)
                t.add_row({pairs[p].first, pairs[p].second, static_cast<double>(s), static_cast<double>(k),
                           block[s * k_count + k]});
        summary.push_back({{"kappa_t", pairs[p].first},
                           {"kappa_r", pairs[p].second},
                           {"p10", percentile(block, 0.1)},
                           {"p50", percentile(block, 0.5)},
                           {"p90", percentile(block, 0.9)}});
    }
    t.metadata["summary"] = summary;
    return t;
}

ResultTable run_ee_vs_m(const ExperimentSpec& spec) {
    check_spec(spec);
    const Scenario& sc = spec.scenario;
    if (sc.m_grid.empty()) throw ConfigError("ee-vs-m needs an m_grid");
    const std::vector<double> p_m_list = sc.p_m_list.empty() ? std::vector<double>{sc.p_m_w} : sc.p_m_list;

    SweepOptions options;
    options.geometry_samples = spec.geometries;
    options.workers = spec.workers;
    if (spec.trials > 0) {
        options.source = RateSource::kMonteCarlo;
        options.mc_trials = spec.trials;
    }

    ResultTable t = make_table(spec, {"p_m", "M", "ee", "sum_rate", "total_power", "is_argmax"});
    nlohmann::json argmax = nlohmann::json::array();
    PowerModel model = sc.power_model();
    for (double p_m : p_m_list) {
        model.p_m = p_m;
        const EESweep sweep = sweep_optimal_m(sc.m_grid, sc, model, options);
        for (const EEReport& r : sweep.curve)
            t.add_row({p_m, static_cast<double>(r.m_count), r.ee, r.sum_rate, r.total_power,
                       r.m_count == sweep.argmax_m ? 1.0 : 0.0});
        argmax.push_back({{"p_m", p_m}, {"argmax_m", sweep.argmax_m}});
    }
    t.metadata["argmax"] = argmax;
    return t;
}

std::vector<ValidationCase> default_validation_grid() {
    struct Layout {
        int ues;
        int tau;
        bool shared;
    };
    const Layout layouts[] = {{1, 1, false}, {2, 2, false}, {2, 1, true}, {2, 2, true}};
    std::vector<ValidationCase> grid;
    for (int m : {1, 2, 3, 10})
        for (double kappa : {1.0, 0.9, 0.5})
            for (const Layout& l : layouts) grid.push_back({m, l.ues, l.tau, kappa, kappa, l.shared});
    return grid;
}

UplinkSetup validation_setup(const ValidationCase& vc, std::uint64_t seed) {
    if (vc.aps < 1 || vc.ues < 1 || vc.tau < 1) throw ConfigError("validation case needs M, K, tau >= 1");
    if (!vc.shared_pilot && vc.tau < vc.ues) throw ConfigError("orthogonal pilots need tau >= K");
    Engine rng = make_engine(seed, Stream::kShadowing);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd beta(vc.aps, vc.ues);
    for (int m = 0; m < vc.aps; ++m)
        for (int k = 0; k < vc.ues; ++k) beta(m, k) = std::pow(10.0, u(rng));

    std::vector<int> assignment(static_cast<std::size_t>(vc.ues));
    for (int k = 0; k < vc.ues; ++k) assignment[static_cast<std::size_t>(k)] = vc.shared_pilot ? 0 : k;

    PowerConfig power;
    power.rho_u = 1.0;
    power.rho_p = 1.0;
    power.sigma2 = 1.0;
    power.gamma = Eigen::VectorXd::Ones(vc.ues);
    if (vc.ues > 1) power.gamma(1) = 0.6;
    return make_uplink_setup(LargeScaleFading(std::move(beta)), PilotBook(vc.tau, std::move(assignment)), power,
                             HardwareProfile(vc.kappa_t, vc.kappa_r));
}

ResultTable run_validate(const ExperimentSpec& spec, const ValidateOptions& options) {
    if (options.grid.empty()) throw ConfigError("validation grid is empty");
    if (spec.trials < 2) throw ConfigError("validation needs at least two trials");
    const std::uint64_t master = spec.scenario.master_seed;

    ResultTable t = make_table(spec, {"case", "M", "K", "tau", "kappa_t", "kappa_r", "shared", "ue", "moment",
                                      "closed_form", "monte_carlo", "std_error", "z", "pass", "closed_form_printed",
                                      "z_printed"});
    t.metadata["z_threshold"] = options.z_threshold;
    nlohmann::json moments = nlohmann::json::array();
    for (Moment m : kAllMoments) moments.push_back(std::string(to_string(m)));
    t.metadata["moments"] = moments;
    if (options.corrupt)
        t.metadata["corrupted"] = {{"moment", std::string(to_string(*options.corrupt))},
                                   {"factor", options.corrupt_factor}};

    std::size_t failures = 0, printed_failures = 0;
    double worst_split = 0.0;
    bool underpowered = false;
    for (std::size_t c = 0; c < options.grid.size(); ++c) {
        const ValidationCase& vc = options.grid[c];
        const UplinkSetup setup = validation_setup(vc, derive_seed(master, Stream::kGeometrySample, c));
        MonteCarloOptions mc;
        mc.trials = spec.trials;
        mc.seed = derive_seed(master, Stream::kSymbols, c);
        mc.workers = spec.workers;
        const AppendixMomentEstimates est = estimate_appendix_moments(setup, mc);
        worst_split = std::max(worst_split, est.max_decomposition_error);
        underpowered = underpowered || est.underpowered;

        for (int k = 0; k < vc.ues; ++k) {
            MomentSet closed = closed_form_moments(k, setup);
            const MomentSet printed = closed_form_moments(k, setup, ApDistortionReading::kAsPrinted);
            if (options.corrupt) at(closed, *options.corrupt) *= options.corrupt_factor;
            for (Moment m : kAllMoments) {
                const MomentEstimate& e = est.get(k, m);
                const double z = e.z_score(at(closed, m));
                const double zp = e.z_score(at(printed, m));
                const bool pass = std::abs(z) <= options.z_threshold;
                failures += pass ? 0 : 1;
                printed_failures += std::abs(zp) <= options.z_threshold ? 0 : 1;
                t.add_row({static_cast<double>(c), static_cast<double>(vc.aps), static_cast<double>(vc.ues),
                           static_cast<double>(vc.tau), vc.kappa_t, vc.kappa_r, vc.shared_pilot ? 1.0 : 0.0,
                           static_cast<double>(k), static_cast<double>(static_cast<int>(m)), at(closed, m), e.mean,
                           e.std_error, z, pass ? 1.0 : 0.0, at(printed, m), zp});
            }
        }
    }
    t.metadata["failures"] = failures;
    t.metadata["failures_printed_reading"] = printed_failures;
    t.metadata["max_decomposition_error"] = worst_split;
    t.metadata["underpowered"] = underpowered;
    return t;
}

bool validation_passed(const ResultTable& table) {
    const std::size_t col = table.column("pass");
    return std::all_of(table.rows.begin(), table.rows.end(), [col](const auto& row) { return row[col] == 1.0; });
}

ResultTable run_experiment(const ExperimentSpec& spec) {
    switch (spec.id) {
        case ExperimentId::kSeVsM: return run_se_vs_m(spec);
        case ExperimentId::kScalingLaw: return run_scaling_law(spec);
        case ExperimentId::kSeCdf: return run_se_cdf(spec);
        case ExperimentId::kEeVsM: return run_ee_vs_m(spec);
        case ExperimentId::kValidate: return run_validate(spec);
    }
    throw ConfigError("unknown experiment");
}

}  // namespace cfhwi
