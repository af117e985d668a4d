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

#include "cfhwi/scenario.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "cfhwi/errors.hpp"
#include "cfhwi/fingerprint.hpp"
#include "cfhwi/random.hpp"

namespace cfhwi {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError("bad value '" + std::string(text) + "' for key '" + std::string(key) + "'");
    }
    return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view key, std::string_view text) {
    std::vector<T> out;
    if (trim(text).empty()) return out;
    for (auto item : split(text, ',')) out.push_back(parse_number<T>(key, item));
    return out;
}

std::vector<std::pair<double, double>> parse_pairs(std::string_view key, std::string_view text) {
    std::vector<std::pair<double, double>> out;
    if (trim(text).empty()) return out;
    for (auto item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ConfigError("expected a:b pairs for key '" + std::string(key) + "'");
        out.emplace_back(parse_number<double>(key, parts[0]), parse_number<double>(key, parts[1]));
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_floating_point_v<T>) {
            out += format_double(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

std::string join_pairs(const std::vector<std::pair<double, double>>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += format_double(values[i].first) + ":" + format_double(values[i].second);
    }
    return out;
}

UePlacement parse_placement(std::string_view v) {
    if (v == "redraw") return UePlacement::kRedraw;
    if (v == "fixed") return UePlacement::kFixed;
    throw ConfigError("unknown ue_placement '" + std::string(v) + "'");
}

using Setter = std::function<void(Scenario&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = [] {
        std::map<std::string, Setter, std::less<>> t;
        auto num = [](double Scenario::*field) {
            return [field](Scenario& s, std::string_view k, std::string_view v) { s.*field = parse_number<double>(k, v); };
        };
        auto integer = [](int Scenario::*field) {
            return [field](Scenario& s, std::string_view k, std::string_view v) { s.*field = parse_number<int>(k, v); };
        };
        t["side_length_km"] = num(&Scenario::side_length_km);
        t["M"] = integer(&Scenario::aps);
        t["K"] = integer(&Scenario::ues);
        t["tau"] = integer(&Scenario::tau);
        t["alpha"] = num(&Scenario::alpha);
        t["sigma_sh_db"] = num(&Scenario::sigma_sh_db);
        t["noise_figure_db"] = num(&Scenario::noise_figure_db);
        t["bandwidth_hz"] = num(&Scenario::bandwidth_hz);
        t["rho_u_w"] = num(&Scenario::rho_u_w);
        t["rho_p_w"] = num(&Scenario::rho_p_w);
        t["gamma"] = [](Scenario& s, std::string_view k, std::string_view v) { s.gamma = parse_list<double>(k, v); };
        t["kappa_t"] = num(&Scenario::kappa_t);
        t["kappa_r"] = num(&Scenario::kappa_r);
        t["distance_floor_km"] = num(&Scenario::distance_floor_km);
        t["master_seed"] = [](Scenario& s, std::string_view k, std::string_view v) {
            s.master_seed = parse_number<std::uint64_t>(k, v);
        };
        t["pilot_mode"] = [](Scenario& s, std::string_view, std::string_view v) { s.pilot_mode = parse_pilot_mode(v); };
        t["ue_placement"] = [](Scenario& s, std::string_view, std::string_view v) { s.ue_placement = parse_placement(v); };
        t["p_k_w"] = num(&Scenario::p_k_w);
        t["p_m_w"] = num(&Scenario::p_m_w);
        t["p_bm_w"] = num(&Scenario::p_bm_w);
        t["m_grid"] = [](Scenario& s, std::string_view k, std::string_view v) { s.m_grid = parse_list<int>(k, v); };
        t["geometry_samples"] = integer(&Scenario::geometry_samples);
        t["kappa_pairs"] = [](Scenario& s, std::string_view k, std::string_view v) { s.kappa_pairs = parse_pairs(k, v); };
        t["z_pairs"] = [](Scenario& s, std::string_view k, std::string_view v) { s.z_pairs = parse_pairs(k, v); };
        t["kappa_t0"] = num(&Scenario::kappa_t0);
        t["kappa_r0"] = num(&Scenario::kappa_r0);
        t["p_m_list"] = [](Scenario& s, std::string_view k, std::string_view v) { s.p_m_list = parse_list<double>(k, v); };
        return t;
    }();
    return table;
}

}  // namespace

PowerConfig Scenario::power() const {
    PowerConfig p;
    p.rho_u = rho_u_w;
    p.rho_p = rho_p_w;
    p.bandwidth = bandwidth_hz;
    p.sigma2 = noise_power(bandwidth_hz, noise_figure_db);
    if (gamma.size() == 1) {
        p.gamma = Eigen::VectorXd::Constant(ues, gamma.front());
    } else {
        p.gamma = Eigen::Map<const Eigen::VectorXd>(gamma.data(), static_cast<Eigen::Index>(gamma.size()));
    }
    return p;
}

HardwareProfile Scenario::hardware() const { return {kappa_t, kappa_r}; }

PathLoss Scenario::path_loss() const { return {alpha, sigma_sh_db, distance_floor_km}; }

PowerModel Scenario::power_model() const { return {p_k_w, p_m_w, p_bm_w, bandwidth_hz}; }

void Scenario::validate() const {
    if (!(side_length_km > 0.0)) throw ConfigError("side_length_km must be positive");
    if (aps < 1 || ues < 1) throw ConfigError("M and K must be at least 1");
    if (tau < 1) throw ConfigError("tau must be at least 1");
    if (pilot_mode == PilotMode::kOrthogonal && tau < ues) {
        throw ConfigError("orthogonal pilots need tau >= K");
    }
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(sigma_sh_db >= 0.0)) throw ConfigError("sigma_sh_db must be non-negative");
    if (!(distance_floor_km >= 0.0)) throw ConfigError("distance_floor_km must be non-negative");
    if (gamma.empty() || (gamma.size() != 1 && static_cast<int>(gamma.size()) != ues)) {
        throw ConfigError("gamma must be a scalar or have K entries");
    }
    power().validate(ues);
    (void)hardware();
    power_model().validate();
    if (geometry_samples < 1) throw ConfigError("geometry_samples must be at least 1");
    for (const auto& [kt, kr] : kappa_pairs) (void)HardwareProfile(kt, kr);
    for (const auto& [zt, zr] : z_pairs) {
        if (!(zt >= 0.0) || !(zr >= 0.0)) throw ConfigError("scaling exponents must be non-negative");
    }
    ScalingSchedule{kappa_t0, kappa_r0, 0.0, 0.0}.validate();
}

Scenario parse_scenario(std::string_view text, const Scenario& base) {
    Scenario s = base;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) {
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
        it->second(s, key, value);
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path, const Scenario& base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), base);
}

std::string to_text(const Scenario& s) {
    std::ostringstream out;
    out << "side_length_km = " << format_double(s.side_length_km) << '\n'
        << "M = " << s.aps << '\n'
        << "K = " << s.ues << '\n'
        << "tau = " << s.tau << '\n'
        << "alpha = " << format_double(s.alpha) << '\n'
        << "sigma_sh_db = " << format_double(s.sigma_sh_db) << '\n'
        << "noise_figure_db = " << format_double(s.noise_figure_db) << '\n'
        << "bandwidth_hz = " << format_double(s.bandwidth_hz) << '\n'
        << "rho_u_w = " << format_double(s.rho_u_w) << '\n'
        << "rho_p_w = " << format_double(s.rho_p_w) << '\n'
        << "gamma = " << join(s.gamma) << '\n'
        << "kappa_t = " << format_double(s.kappa_t) << '\n'
        << "kappa_r = " << format_double(s.kappa_r) << '\n'
        << "distance_floor_km = " << format_double(s.distance_floor_km) << '\n'
        << "master_seed = " << s.master_seed << '\n'
        << "pilot_mode = " << to_string(s.pilot_mode) << '\n'
        << "ue_placement = " << (s.ue_placement == UePlacement::kRedraw ? "redraw" : "fixed") << '\n'
        << "p_k_w = " << format_double(s.p_k_w) << '\n'
        << "p_m_w = " << format_double(s.p_m_w) << '\n'
        << "p_bm_w = " << format_double(s.p_bm_w) << '\n'
        << "m_grid = " << join(s.m_grid) << '\n'
        << "geometry_samples = " << s.geometry_samples << '\n'
        << "kappa_pairs = " << join_pairs(s.kappa_pairs) << '\n'
        << "z_pairs = " << join_pairs(s.z_pairs) << '\n'
        << "kappa_t0 = " << format_double(s.kappa_t0) << '\n'
        << "kappa_r0 = " << format_double(s.kappa_r0) << '\n'
        << "p_m_list = " << join(s.p_m_list) << '\n';
    return out.str();
}

std::string scenario_hash(const Scenario& scenario) {
    return Fingerprint().add(to_text(scenario)).hex();
}

std::uint64_t geometry_seed(const Scenario& scenario, std::uint64_t sample) {
    return derive_seed(scenario.master_seed, Stream::kGeometrySample, sample);
}

NetworkGeometry scenario_geometry(const Scenario& scenario, int m_count, std::uint64_t sample) {
    NetworkGeometry drop = place_uniform(m_count, scenario.ues, scenario.side_length_km, geometry_seed(scenario, sample));
    if (scenario.ue_placement == UePlacement::kRedraw) return drop;
    const NetworkGeometry shared = place_uniform(1, scenario.ues, scenario.side_length_km, geometry_seed(scenario, 0));
    return {drop.aps(), shared.ues(), scenario.side_length_km};
}

LargeScaleFading scenario_fading(const Scenario& scenario, int m_count, std::uint64_t sample) {
    return compute_beta(scenario_geometry(scenario, m_count, sample), scenario.path_loss(),
                        geometry_seed(scenario, sample));
}

UplinkSetup build_setup(const Scenario& scenario, const LargeScaleFading& fading, std::uint64_t sample,
                        const HardwareProfile& hw) {
    PilotBook book = build_pilot_book(scenario.tau, fading.ue_count(), scenario.pilot_mode,
                                      geometry_seed(scenario, sample));
    PowerConfig power = scenario.power();
    if (power.gamma.size() != fading.ue_count()) throw ConfigError("gamma does not match the number of UEs");
    return make_uplink_setup(fading, std::move(book), std::move(power), hw);
}

UplinkSetup build_setup(const Scenario& scenario, int m_count, std::uint64_t sample, const HardwareProfile& hw) {
    return build_setup(scenario, scenario_fading(scenario, m_count, sample), sample, hw);
}

}  // namespace cfhwi
