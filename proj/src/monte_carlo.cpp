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

#include "cfhwi/monte_carlo.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "cfhwi/errors.hpp"
#include "cfhwi/parallel.hpp"

namespace cfhwi {

namespace {

using cd = std::complex<double>;

/// What one trial contributes to the moment estimates of one UE.
struct UeTrialRecord {
    cd gain;          // sum_m g_hat_mk^* g_mk
    cd symbol;        // q_k
    double ui = 0.0;  // sum_{k' != k} |UI_kk' q_k'|^2
    double hi_t = 0.0;
    double hi_r = 0.0;
    double ni = 0.0;
};

}  // namespace

Eigen::VectorXcd Decomposition::total() const {
    return signal + user_interference.rowwise().sum() + ue_distortion.rowwise().sum() + ap_distortion + noise;
}

PilotPhase simulate_pilot_phase(const ChannelRealization& channel, const UplinkSetup& setup, Engine& distortion_rng,
                                Engine& noise_rng) {
    const int m_count = setup.ap_count();
    const int k_count = setup.ue_count();
    const int tau = setup.tau();
    const auto& power = setup.power;
    const double kt = setup.hw.kappa_t();
    const double kr = setup.hw.kappa_r();
    const Eigen::MatrixXcd& g = channel.g;
    if (g.rows() != m_count || g.cols() != k_count) throw ConfigError("channel dimensions do not match the setup");

    ComplexNormal cn;
    // Transmitted pilot block per UE: sqrt(tau rho_p kt) phi_k + eta_kt.
    Eigen::MatrixXcd transmitted = std::sqrt(tau * power.rho_p * kt) * setup.book.sequences();
    const double tx_var = power.rho_p * (1.0 - kt);
    for (int k = 0; k < k_count; ++k) {
        for (int i = 0; i < tau; ++i) transmitted(i, k) += cn(distortion_rng, tx_var);
    }

    PilotPhase out;
    out.received = std::sqrt(kr) * transmitted * g.transpose();
    for (int m = 0; m < m_count; ++m) {
        const double rx_var = power.rho_p * (1.0 - kr) * g.row(m).squaredNorm();
        for (int i = 0; i < tau; ++i) out.received(i, m) += cn(distortion_rng, rx_var);
    }
    for (int m = 0; m < m_count; ++m) {
        for (int i = 0; i < tau; ++i) out.received(i, m) += cn(noise_rng, power.sigma2);
    }

    const Eigen::MatrixXcd despread = setup.book.sequences().adjoint() * out.received;  // K x M
    out.g_hat = (setup.coeffs.c.array() * despread.transpose().array()).matrix();
    return out;
}

UplinkData simulate_uplink_data(const ChannelRealization& channel, const PowerConfig& power, const HardwareProfile& hw,
                                const Eigen::VectorXcd& symbols, Engine& distortion_rng, Engine& noise_rng) {
    const Eigen::MatrixXcd& g = channel.g;
    const Eigen::Index m_count = g.rows();
    const Eigen::Index k_count = g.cols();
    if (symbols.size() != k_count || power.gamma.size() != k_count) {
        throw ConfigError("symbol or power-control vector does not match the number of UEs");
    }
    const double kt = hw.kappa_t();
    const double kr = hw.kappa_r();
    ComplexNormal cn;

    UplinkData out;
    out.ue_distortion.resize(k_count);
    Eigen::VectorXcd transmitted(k_count);
    for (Eigen::Index k = 0; k < k_count; ++k) {
        out.ue_distortion(k) = cn(distortion_rng, (1.0 - kt) * power.rho_u * power.gamma(k));
        transmitted(k) = std::sqrt(power.rho_u * power.gamma(k) * kt) * symbols(k) + out.ue_distortion(k);
    }
    out.ap_distortion.resize(m_count);
    out.noise.resize(m_count);
    for (Eigen::Index m = 0; m < m_count; ++m) {
        double load = 0.0;
        for (Eigen::Index k = 0; k < k_count; ++k) load += power.gamma(k) * std::norm(g(m, k));
        out.ap_distortion(m) = cn(distortion_rng, (1.0 - kr) * power.rho_u * load);
    }
    for (Eigen::Index m = 0; m < m_count; ++m) out.noise(m) = cn(noise_rng, power.sigma2);

    out.y = std::sqrt(kr) * (g * transmitted) + out.ap_distortion + out.noise;
    return out;
}

Eigen::VectorXcd mr_combine(const Eigen::MatrixXcd& g_hat, const Eigen::VectorXcd& y) {
    if (g_hat.rows() != y.size()) throw ConfigError("estimate and sample dimensions differ");
    return g_hat.adjoint() * y;
}

Decomposition decompose(const ChannelRealization& channel, const Eigen::MatrixXcd& g_hat, const UplinkData& data,
                        const Eigen::VectorXcd& symbols, const PowerConfig& power, const HardwareProfile& hw) {
    const Eigen::Index k_count = g_hat.cols();
    const double kt = hw.kappa_t();
    const double kr = hw.kappa_r();

    Decomposition d;
    d.cross_gain = g_hat.adjoint() * channel.g;
    d.signal.resize(k_count);
    d.user_interference = Eigen::MatrixXcd::Zero(k_count, k_count);
    d.ue_distortion.resize(k_count, k_count);
    for (Eigen::Index kp = 0; kp < k_count; ++kp) {
        const double amplitude = std::sqrt(power.rho_u * kr * kt * power.gamma(kp));
        for (Eigen::Index k = 0; k < k_count; ++k) {
            const cd term = amplitude * d.cross_gain(k, kp) * symbols(kp);
            if (k == kp) {
                d.signal(k) = term;
            } else {
                d.user_interference(k, kp) = term;
            }
            d.ue_distortion(k, kp) = std::sqrt(kr) * d.cross_gain(k, kp) * data.ue_distortion(kp);
        }
    }
    d.ap_distortion = g_hat.adjoint() * data.ap_distortion;
    d.noise = g_hat.adjoint() * data.noise;
    return d;
}

Eigen::VectorXcd draw_symbols(int k_count, SymbolAlphabet alphabet, Engine& rng) {
    Eigen::VectorXcd q(k_count);
    if (alphabet == SymbolAlphabet::kGaussian) {
        ComplexNormal cn;
        for (int k = 0; k < k_count; ++k) q(k) = cn(rng, 1.0);
    } else {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        for (int k = 0; k < k_count; ++k) q(k) = std::polar(1.0, phase(rng));
    }
    return q;
}

TrialOutputs run_trial(const UplinkSetup& setup, std::uint64_t seed, std::uint64_t trial, SymbolAlphabet alphabet) {
    Engine channel_rng = make_engine(seed, Stream::kChannels, trial);
    Engine distortion_rng = make_engine(seed, Stream::kDistortion, trial);
    Engine pilot_noise_rng = make_engine(seed, Stream::kPilotNoise, trial);
    Engine data_noise_rng = make_engine(seed, Stream::kDataNoise, trial);
    Engine symbol_rng = make_engine(seed, Stream::kSymbols, trial);

    TrialOutputs out;
    out.channel = draw_channels(setup.fading, channel_rng);
    PilotPhase pilot = simulate_pilot_phase(out.channel, setup, distortion_rng, pilot_noise_rng);
    out.g_hat = std::move(pilot.g_hat);
    out.symbols = draw_symbols(setup.ue_count(), alphabet, symbol_rng);
    const UplinkData data =
        simulate_uplink_data(out.channel, setup.power, setup.hw, out.symbols, distortion_rng, data_noise_rng);
    out.r = mr_combine(out.g_hat, data.y);
    out.parts = decompose(out.channel, out.g_hat, data, out.symbols, setup.power, setup.hw);
    return out;
}

double MomentEstimate::z_score(double expected) const {
    const double diff = mean - expected;
    if (std_error > 0.0) return diff / std_error;
    if (diff == 0.0) return 0.0;
    return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

MomentEstimate estimate_mean(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) throw ConfigError("a moment estimate needs at least two trials");
    CompensatedSum sum;
    for (double v : values) sum.add(v);
    const double mean = sum.value() / static_cast<double>(n);
    CompensatedSum sq;
    for (double v : values) sq.add((v - mean) * (v - mean));
    const double var = sq.value() / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

AppendixMomentEstimates estimate_appendix_moments(const UplinkSetup& setup, const MonteCarloOptions& options) {
    const std::size_t n = options.trials;
    if (n < 2) throw ConfigError("need at least two trials");
    const int k_count = setup.ue_count();
    const auto uk = static_cast<std::size_t>(k_count);

    std::vector<UeTrialRecord> records(n * uk);
    std::vector<double> decomposition_error(n, 0.0);

    parallel_for(n, options.workers, [&](std::size_t t) {
        const TrialOutputs trial = run_trial(setup, options.seed, t, options.alphabet);
        const Eigen::VectorXcd total = trial.parts.total();
        double worst = 0.0;
        for (int k = 0; k < k_count; ++k) {
            UeTrialRecord& rec = records[t * uk + static_cast<std::size_t>(k)];
            rec.gain = trial.parts.cross_gain(k, k);
            rec.symbol = trial.symbols(k);
            rec.ui = trial.parts.user_interference.row(k).squaredNorm();
            rec.hi_t = trial.parts.ue_distortion.row(k).squaredNorm();
            rec.hi_r = std::norm(trial.parts.ap_distortion(k));
            rec.ni = std::norm(trial.parts.noise(k));

            const double scale = std::abs(trial.parts.signal(k)) + trial.parts.user_interference.row(k).cwiseAbs().sum() +
                                 trial.parts.ue_distortion.row(k).cwiseAbs().sum() +
                                 std::abs(trial.parts.ap_distortion(k)) + std::abs(trial.parts.noise(k));
            if (scale > 0.0) worst = std::max(worst, std::abs(trial.r(k) - total(k)) / scale);
        }
        decomposition_error[t] = worst;
    });

    AppendixMomentEstimates out;
    out.trials = n;
    out.per_ue.resize(uk);
    out.impairment_total.resize(uk);
    for (double e : decomposition_error) out.max_decomposition_error = std::max(out.max_decomposition_error, e);
    if (n < kMinimumMomentTrials) {
        out.underpowered = true;
        out.warning = "only " + std::to_string(n) + " trials; moment estimates below " +
                      std::to_string(kMinimumMomentTrials) + " trials have little statistical power";
    }

    const auto& power = setup.power;
    const double kt = setup.hw.kappa_t();
    const double kr = setup.hw.kappa_r();
    std::vector<double> values(n);
    std::vector<double> totals(n);
    for (int k = 0; k < k_count; ++k) {
        auto rec = [&](std::size_t t) -> const UeTrialRecord& { return records[t * uk + static_cast<std::size_t>(k)]; };
        const double amplitude2 = power.rho_u * power.gamma(k) * kr * kt;
        auto& est = out.per_ue[static_cast<std::size_t>(k)];

        CompensatedSum re;
        CompensatedSum im;
        for (std::size_t t = 0; t < n; ++t) {
            re.add(rec(t).gain.real());
            im.add(rec(t).gain.imag());
        }
        const cd mean_gain(re.value() / static_cast<double>(n), im.value() / static_cast<double>(n));
        const double mean_abs = std::abs(mean_gain);

        // |DS|^2 = amplitude2 |E{gain}|^2; its error comes from the gain projected on the mean direction.
        const cd direction = mean_abs > 0.0 ? std::conj(mean_gain) / mean_abs : cd(1.0, 0.0);
        for (std::size_t t = 0; t < n; ++t) values[t] = (rec(t).gain * direction).real();
        const MomentEstimate projected = estimate_mean(values);
        CompensatedSum spread;
        for (std::size_t t = 0; t < n; ++t) spread.add(std::norm(rec(t).gain - mean_gain));
        const double dn = static_cast<double>(n);
        // |mean|^2 overshoots |E{gain}|^2 by Var{gain} / n on average.
        const double unbiased = mean_abs * mean_abs - spread.value() / (dn - 1.0) / dn;
        est[static_cast<std::size_t>(Moment::kDesiredSignal)] = {amplitude2 * unbiased,
                                                                 amplitude2 * 2.0 * mean_abs * projected.std_error, n};

        const double dof = dn / (dn - 1.0);
        for (std::size_t t = 0; t < n; ++t) {
            values[t] = dof * amplitude2 * std::norm(rec(t).gain - mean_gain) * std::norm(rec(t).symbol);
            totals[t] = values[t];
        }
        est[static_cast<std::size_t>(Moment::kBeamUncertainty)] = estimate_mean(values);

        auto component = [&](Moment m, double UeTrialRecord::*field) {
            for (std::size_t t = 0; t < n; ++t) {
                values[t] = rec(t).*field;
                totals[t] += values[t];
            }
            est[static_cast<std::size_t>(m)] = estimate_mean(values);
        };
        component(Moment::kUserInterference, &UeTrialRecord::ui);
        component(Moment::kUeDistortion, &UeTrialRecord::hi_t);
        component(Moment::kApDistortion, &UeTrialRecord::hi_r);
        component(Moment::kNoise, &UeTrialRecord::ni);
        out.impairment_total[static_cast<std::size_t>(k)] = estimate_mean(totals);
    }
    return out;
}

std::vector<RateEstimate> uatf_rates(const AppendixMomentEstimates& moments) {
    std::vector<RateEstimate> out;
    out.reserve(moments.per_ue.size());
    for (std::size_t k = 0; k < moments.per_ue.size(); ++k) {
        const MomentEstimate& ds = moments.per_ue[k][static_cast<std::size_t>(Moment::kDesiredSignal)];
        const MomentEstimate& impairment = moments.impairment_total[k];
        RateEstimate r;
        if (ds.mean <= 0.0 || impairment.mean <= 0.0) {
            out.push_back(r);
            continue;
        }
        const double sinr = ds.mean / impairment.mean;
        const double rel = std::hypot(ds.std_error / ds.mean, impairment.std_error / impairment.mean);
        r.rate = std::log2(1.0 + sinr);
        r.std_error = sinr / (1.0 + sinr) / std::numbers::ln2 * rel;
        r.ci_low = r.rate - 1.96 * r.std_error;
        r.ci_high = r.rate + 1.96 * r.std_error;
        out.push_back(r);
    }
    return out;
}

std::vector<RateEstimate> empirical_se(const UplinkSetup& setup, const MonteCarloOptions& options) {
    return uatf_rates(estimate_appendix_moments(setup, options));
}

}  // namespace cfhwi
