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

#include "cfhwi/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cfhwi/errors.hpp"
#include "cfhwi/fingerprint.hpp"

namespace cfhwi {

namespace {

void check_ue(int ue, int k_count) {
    if (ue < 0 || ue >= k_count) throw ConfigError("UE index " + std::to_string(ue) + " out of range");
}

/// Per-UE sums over APs that every term and moment is built from.
struct UeSums {
    double lambda_sum = 0.0;   // sum_m lambda_mk
    Eigen::VectorXd lb;        // sum_m lambda_mk beta_mk'
    Eigen::VectorXd cb2;       // sum_m c_mk^2 beta_mk'^2
    Eigen::VectorXd cb1;       // sum_m c_mk^2 beta_mk'
    Eigen::VectorXd coherent;  // sum_m lambda_mk beta_mk' / beta_mk
    double lambda_gamma_beta = 0.0;  // sum_m lambda_mk sum_k' gamma_k' beta_mk'
};

UeSums ue_sums(int ue, const LargeScaleFading& fading, const EstimatorCoefficients& coeffs,
               const PowerConfig& power) {
    const Eigen::MatrixXd& beta = fading.beta();
    const Eigen::VectorXd lam = coeffs.lambda.col(ue);
    const Eigen::VectorXd c2 = coeffs.c.col(ue).array().square();

    UeSums s;
    s.lambda_sum = lam.sum();
    s.lb = beta.transpose() * lam;
    s.cb2 = beta.array().square().matrix().transpose() * c2;
    s.cb1 = beta.transpose() * c2;
    s.coherent = beta.transpose() * (lam.array() / beta.col(ue).array()).matrix();
    s.lambda_gamma_beta = lam.dot(beta * power.gamma);
    return s;
}

/// Sum over k' of the AP-distortion bracket, without the (1 - kappa_r) rho_u prefactor.
double ap_distortion_sum(int ue, const UeSums& s, const PilotGram& gram, const PowerConfig& power,
                         const HardwareProfile& hw, int tau, ApDistortionReading reading) {
    const double kt = hw.kappa_t();
    const double kr = hw.kappa_r();
    const Eigen::VectorXd& received_gain = reading == ApDistortionReading::kSquaredGain ? s.cb2 : s.cb1;
    double d = s.lambda_gamma_beta;
    for (Eigen::Index kp = 0; kp < power.gamma.size(); ++kp) {
        const double g = power.gamma(kp);
        d += g * power.rho_p * (1.0 - kr) * s.cb2(kp);
        d += g * power.rho_p * kr * (tau * kt * gram(ue, static_cast<int>(kp)) + (1.0 - kt)) * received_gain(kp);
    }
    return d;
}

}  // namespace

std::string_view to_string(Moment moment) {
    switch (moment) {
        case Moment::kDesiredSignal: return "desired_signal";
        case Moment::kBeamUncertainty: return "beamforming_uncertainty";
        case Moment::kUserInterference: return "user_interference";
        case Moment::kUeDistortion: return "ue_distortion";
        case Moment::kApDistortion: return "ap_distortion";
        case Moment::kNoise: return "noise";
    }
    return "unknown";
}

double uatf_sinr(const MomentSet& moments) {
    double impairments = 0.0;
    for (Moment m : kAllMoments) {
        if (m != Moment::kDesiredSignal) impairments += at(moments, m);
    }
    return at(moments, Moment::kDesiredSignal) / impairments;
}

void ScalingSchedule::validate() const {
    if (!(kappa_t0 > 0.0 && kappa_t0 <= 1.0) || !(kappa_r0 > 0.0 && kappa_r0 <= 1.0)) {
        throw ConfigError("base hardware qualities must lie in (0, 1]");
    }
    if (!(z_t >= 0.0) || !(z_r >= 0.0)) throw ConfigError("scaling exponents must be non-negative");
}

SETerms se_terms(int ue, const LargeScaleFading& fading, const EstimatorCoefficients& coeffs, const PilotGram& gram,
                 const PowerConfig& power, const HardwareProfile& hw, int tau, ApDistortionReading reading) {
    const int k_count = fading.ue_count();
    check_ue(ue, k_count);
    if (hw.kappa_t() == 0.0) {
        throw SingularityError("coherent interference term divides by kappa_t = 0");
    }
    const double kt = hw.kappa_t();
    const double kr = hw.kappa_r();
    const UeSums s = ue_sums(ue, fading, coeffs, power);
    const double ue_distortion = (1.0 - kt) / (kt * tau);

    SETerms t;
    t.a = power.gamma(ue) * s.lambda_sum * s.lambda_sum;
    for (int kp = 0; kp < k_count; ++kp) {
        const double g = power.gamma(kp);
        t.b += g * (s.lb(kp) + power.rho_p * (1.0 - kr) * s.cb2(kp));
        t.c += g * (gram(ue, kp) + ue_distortion) * s.coherent(kp) * s.coherent(kp);
    }
    t.d = ap_distortion_sum(ue, s, gram, power, hw, tau, reading);
    t.e = power.sigma2 / power.rho_u * s.lambda_sum;
    return t;
}

SETerms se_terms(int ue, const UplinkSetup& setup, ApDistortionReading reading) {
    return se_terms(ue, setup.fading, setup.coeffs, setup.gram, setup.power, setup.hw, setup.tau(), reading);
}

double se_closed_form(const SETerms& terms, const HardwareProfile& hw) {
    const double kt = hw.kappa_t();
    const double kr = hw.kappa_r();
    if (kt == 0.0 || kr == 0.0) return 0.0;
    const double signal = kr * kt * terms.a;
    const double denom = kr * terms.b + kr * terms.c - signal + (1.0 - kr) * terms.d + terms.e;
    if (!(denom > 0.0)) {
        throw ConsistencyError("SINR denominator is not positive (" + std::to_string(denom) + ")");
    }
    return std::log2(1.0 + signal / denom);
}

SEReport compute_se(const UplinkSetup& setup, ApDistortionReading reading) {
    const int k_count = setup.ue_count();
    SEReport report;
    report.rates = Eigen::VectorXd::Zero(k_count);
    report.terms.resize(static_cast<std::size_t>(k_count));
    if (setup.hw.kappa_t() > 0.0 && setup.hw.kappa_r() > 0.0) {
        for (int k = 0; k < k_count; ++k) {
            report.terms[k] = se_terms(k, setup, reading);
            report.rates(k) = se_closed_form(report.terms[k], setup.hw);
        }
    }
    Fingerprint fp;
    fp.add(setup.fading.beta()).add(setup.gram.cross).add(setup.power.rho_u).add(setup.power.rho_p);
    fp.add(std::span<const double>(setup.power.gamma.data(), static_cast<std::size_t>(setup.power.gamma.size())));
    fp.add(setup.power.sigma2).add(setup.hw.kappa_t()).add(setup.hw.kappa_r());
    fp.add(static_cast<std::uint64_t>(setup.tau())).add(static_cast<std::uint64_t>(reading));
    report.fingerprint = fp.value();
    return report;
}

MomentSet closed_form_moments(int ue, const UplinkSetup& setup, ApDistortionReading reading) {
    const int k_count = setup.ue_count();
    check_ue(ue, k_count);
    MomentSet out{};
    const double kt = setup.hw.kappa_t();
    const double kr = setup.hw.kappa_r();
    if (kt == 0.0 || kr == 0.0) return out;  // no estimate, nothing combined

    const auto& power = setup.power;
    const int tau = setup.tau();
    const UeSums s = ue_sums(ue, setup.fading, setup.coeffs, power);
    const double ue_distortion = (1.0 - kt) / (kt * tau);

    // Omega_kk' = E|sum_m g_hat_mk^* g_mk'|^2
    auto omega = [&](int kp) {
        return s.lb(kp) + (setup.gram(ue, kp) + ue_distortion) * s.coherent(kp) * s.coherent(kp) +
               power.rho_p * (1.0 - kr) * s.cb2(kp);
    };

    const double signal_scale = power.rho_u * kr * kt;
    at(out, Moment::kDesiredSignal) = signal_scale * power.gamma(ue) * s.lambda_sum * s.lambda_sum;
    at(out, Moment::kBeamUncertainty) =
        signal_scale * power.gamma(ue) *
        (s.lb(ue) + ue_distortion * s.lambda_sum * s.lambda_sum + power.rho_p * (1.0 - kr) * s.cb2(ue));

    double interference = 0.0;
    double all_users = 0.0;
    for (int kp = 0; kp < k_count; ++kp) {
        const double w = power.gamma(kp) * omega(kp);
        all_users += w;
        if (kp != ue) interference += w;
    }
    at(out, Moment::kUserInterference) = signal_scale * interference;
    at(out, Moment::kUeDistortion) = power.rho_u * kr * (1.0 - kt) * all_users;
    at(out, Moment::kApDistortion) =
        (1.0 - kr) * power.rho_u * ap_distortion_sum(ue, s, setup.gram, power, setup.hw, tau, reading);
    at(out, Moment::kNoise) = power.sigma2 * s.lambda_sum;
    return out;
}

double ideal_hardware_rate(int ue, const LargeScaleFading& fading, const PilotGram& gram, const PowerConfig& power,
                           int tau) {
    const int m_count = fading.ap_count();
    const int k_count = fading.ue_count();
    check_ue(ue, k_count);

    // lambda_mk = tau rho_p beta_mk^2 / (tau rho_p sum_k' beta_mk' |phi_k^H phi_k'|^2 + sigma^2)
    std::vector<double> lam(static_cast<std::size_t>(m_count));
    for (int m = 0; m < m_count; ++m) {
        double contaminated = 0.0;
        for (int kp = 0; kp < k_count; ++kp) contaminated += fading(m, kp) * gram(ue, kp);
        lam[m] = tau * power.rho_p * fading(m, ue) * fading(m, ue) / (tau * power.rho_p * contaminated + power.sigma2);
    }

    double lam_sum = 0.0;
    for (double v : lam) lam_sum += v;
    const double signal = power.gamma(ue) * lam_sum * lam_sum;

    double noncoherent = 0.0;
    double contamination = 0.0;
    for (int kp = 0; kp < k_count; ++kp) {
        double lb = 0.0;
        double ratio = 0.0;
        for (int m = 0; m < m_count; ++m) {
            lb += lam[m] * fading(m, kp);
            ratio += lam[m] * fading(m, kp) / fading(m, ue);
        }
        noncoherent += power.gamma(kp) * lb;
        if (kp != ue) contamination += power.gamma(kp) * gram(ue, kp) * ratio * ratio;
    }
    const double noise = power.sigma2 / power.rho_u * lam_sum;
    return std::log2(1.0 + signal / (noncoherent + contamination + noise));
}

HardwareProfile apply_schedule(int m_count, const ScalingSchedule& schedule) {
    if (m_count < 1) throw ConfigError("number of APs must be at least 1");
    schedule.validate();
    const double m = static_cast<double>(m_count);
    const double kt = std::clamp(schedule.kappa_t0 / std::pow(m, schedule.z_t), 0.0, 1.0);
    const double kr = std::clamp(schedule.kappa_r0 / std::pow(m, schedule.z_r), 0.0, 1.0);
    return {kt, kr};
}

double asymptotic_sir(int ue, const LargeScaleFading& fading, const PilotGram& gram, const PowerConfig& power,
                      double kappa_t0, int tau, MuReading reading) {
    const int m_count = fading.ap_count();
    const int k_count = fading.ue_count();
    check_ue(ue, k_count);
    if (!(kappa_t0 > 0.0 && kappa_t0 <= 1.0)) throw ConfigError("kappa_t0 must lie in (0, 1]");
    if (power.gamma(ue) == 0.0) return 0.0;

    const Eigen::MatrixXd& beta = fading.beta();
    Eigen::VectorXd mu(m_count);
    for (int m = 0; m < m_count; ++m) {
        const double b = beta(m, ue);
        const double load = reading == MuReading::kAsPrinted ? b : beta.row(m).sum();
        mu(m) = power.rho_p * b * b / (power.rho_p * load + power.sigma2);
    }
    const double mu_sum = mu.sum();
    const Eigen::VectorXd ratio = beta.transpose() * (mu.array() / beta.col(ue).array()).matrix();

    double denom = 0.0;
    for (int kp = 0; kp < k_count; ++kp) {
        const double w = power.gamma(kp) / power.gamma(ue);
        const double r = ratio(kp) / mu_sum;
        denom += w * (gram(ue, kp) + (1.0 - kappa_t0) / (kappa_t0 * tau)) * r * r;
    }
    denom -= kappa_t0;
    // Relative tolerance: the single-UE, kappa_t0 = 1 limit cancels exactly in exact arithmetic.
    if (denom <= 1e-12 * kappa_t0) return std::numeric_limits<double>::infinity();
    return kappa_t0 / denom;
}

}  // namespace cfhwi
