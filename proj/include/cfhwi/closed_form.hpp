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

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cfhwi/estimator.hpp"
#include "cfhwi/system_model.hpp"

namespace cfhwi {

/// Building blocks of the per-UE SINR bound.
///   a: coherent desired-signal gain    b: non-coherent interference and AP pilot distortion
///   c: coherent (pilot-contamination) interference
///   d: AP receiver distortion          e: noise
struct SETerms {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
};

/// How the AP-distortion term weights its interferer channel gains.
///
/// The printed expression multiplies the kappa_r summand by beta_mk' while the
/// (1 - kappa_r) summand uses beta_mk'^2. Only the squared form is dimensionally
/// consistent and agrees with the simulated E|HI_r|^2; the printed form is kept so
/// the validation suite can show the mismatch.
enum class ApDistortionReading {
    kSquaredGain,
    kAsPrinted,
};

/// Second moments of the received-signal decomposition for one UE. All values
/// carry the rho_u factor, i.e. they are powers in the combined signal r_uk.
enum class Moment : int {
    kDesiredSignal = 0,    // |DS_k|^2
    kBeamUncertainty,      // E|BU_k|^2
    kUserInterference,     // sum_{k' != k} E|UI_kk'|^2
    kUeDistortion,         // sum_k' E|HI_t,kk'|^2
    kApDistortion,         // E|HI_r|^2
    kNoise,                // E|NI_k|^2
};
inline constexpr std::size_t kMomentCount = 6;
inline constexpr std::array<Moment, kMomentCount> kAllMoments{
    Moment::kDesiredSignal, Moment::kBeamUncertainty, Moment::kUserInterference,
    Moment::kUeDistortion,  Moment::kApDistortion,    Moment::kNoise};

std::string_view to_string(Moment moment);

using MomentSet = std::array<double, kMomentCount>;

inline double& at(MomentSet& set, Moment m) { return set[static_cast<std::size_t>(m)]; }
inline double at(const MomentSet& set, Moment m) { return set[static_cast<std::size_t>(m)]; }

/// |DS|^2 over the sum of the five impairment moments.
double uatf_sinr(const MomentSet& moments);

struct SEReport {
    Eigen::VectorXd rates;  // bits/s/Hz per UE
    std::vector<SETerms> terms;
    std::uint64_t fingerprint = 0;

    [[nodiscard]] double mean() const { return rates.size() ? rates.mean() : 0.0; }
    [[nodiscard]] double sum() const { return rates.sum(); }
};

/// kappa_t = kappa_t0 / M^z_t, kappa_r = kappa_r0 / M^z_r.
struct ScalingSchedule {
    double kappa_t0 = 1.0;
    double kappa_r0 = 1.0;
    double z_t = 0.0;
    double z_r = 0.0;

    void validate() const;
};

/// Throws SingularityError when kappa_t == 0 (the coherent term divides by it).
SETerms se_terms(int ue, const LargeScaleFading& fading, const EstimatorCoefficients& coeffs, const PilotGram& gram,
                 const PowerConfig& power, const HardwareProfile& hw, int tau,
                 ApDistortionReading reading = ApDistortionReading::kSquaredGain);
SETerms se_terms(int ue, const UplinkSetup& setup,
                 ApDistortionReading reading = ApDistortionReading::kSquaredGain);

/// log2(1 + kr kt A / (kr B + kr C - kr kt A + (1 - kr) D + E)). Zero when either
/// quality factor is zero; throws ConsistencyError on a non-positive denominator.
double se_closed_form(const SETerms& terms, const HardwareProfile& hw);

/// Rates for every UE. Zero-quality hardware short-circuits to zero rates.
SEReport compute_se(const UplinkSetup& setup, ApDistortionReading reading = ApDistortionReading::kSquaredGain);

/// Closed-form moments for UE `ue`; their UatF ratio equals the SINR inside se_closed_form.
MomentSet closed_form_moments(int ue, const UplinkSetup& setup,
                              ApDistortionReading reading = ApDistortionReading::kSquaredGain);

/// Perfect-hardware rate computed from scratch (own LMMSE scalars, no distortion
/// terms at all). Used as an independent check of the general expression at kappa = 1.
double ideal_hardware_rate(int ue, const LargeScaleFading& fading, const PilotGram& gram, const PowerConfig& power,
                           int tau);

HardwareProfile apply_schedule(int m_count, const ScalingSchedule& schedule);

/// Weighting used for the large-M limit.
///   kAsPrinted: mu_mk = rho_p beta_mk^2 / (rho_p beta_mk + sigma^2)
///   kAggregate: mu_mk = rho_p beta_mk^2 / (rho_p sum_k' beta_mk' + sigma^2), the kappa_r -> 0
///               limit of the LMMSE scalar
enum class MuReading {
    kAsPrinted,
    kAggregate,
};

/// Limiting SIR when z_t = 0 and 0 < z_r < 1/2. Returns +infinity when the
/// denominator is not positive (no residual interference or UE distortion).
double asymptotic_sir(int ue, const LargeScaleFading& fading, const PilotGram& gram, const PowerConfig& power,
                      double kappa_t0, int tau, MuReading reading = MuReading::kAsPrinted);

}  // namespace cfhwi
