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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "cfhwi/closed_form.hpp"
#include "cfhwi/errors.hpp"
#include "cfhwi/monte_carlo.hpp"
#include "cfhwi/random.hpp"
#include "cfhwi/scenario.hpp"

using namespace cfhwi;

namespace {

PowerConfig unit_power(int k_count) {
    PowerConfig p;
    p.rho_u = 1.0;
    p.rho_p = 1.0;
    p.sigma2 = 1.0;
    p.gamma = Eigen::VectorXd::Ones(k_count);
    return p;
}

UplinkSetup random_setup(std::uint64_t seed, int m, int k, int tau, HardwareProfile hw, bool shared) {
    Engine rng = make_engine(seed, Stream::kShadowing);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd beta(m, k);
    for (Eigen::Index i = 0; i < beta.size(); ++i) beta(i) = std::pow(10.0, u(rng));
    PowerConfig p = unit_power(k);
    for (int i = 0; i < k; ++i) p.gamma(i) = 0.5 + 0.5 * (u(rng) + 1.0) / 2.0;
    const PilotBook book = shared ? build_pilot_book(tau, k, PilotMode::kRandomAssignment, seed)
                                  : build_pilot_book(tau, k, PilotMode::kOrthogonal, seed);
    return make_uplink_setup(LargeScaleFading(beta), book, p, hw);
}

// Straight transcription of the five rate terms, one scalar at a time, with the LMMSE
// scalars recomputed from the pilot model rather than taken from the library.
SETerms loop_terms(int k, const UplinkSetup& s, bool squared_gain) {
    const auto& beta = s.fading.beta();
    const int m_count = s.ap_count();
    const int k_count = s.ue_count();
    const double kt = s.hw.kappa_t(), kr = s.hw.kappa_r();
    const double rp = s.power.rho_p, ru = s.power.rho_u, s2 = s.power.sigma2;
    const int tau = s.tau();
    auto psi = [&](int a, int b) { return std::norm(s.book.sequences().col(a).dot(s.book.sequences().col(b))); };
    auto c = [&](int m, int kk) {
        double den = s2;
        for (int j = 0; j < k_count; ++j) den += rp * beta(m, j) * (kr * kt * tau * psi(kk, j) + 1.0 - kr * kt);
        return std::sqrt(tau * rp * kr * kt) * beta(m, kk) / den;
    };
    auto lam = [&](int m, int kk) { return std::sqrt(tau * rp * kr * kt) * beta(m, kk) * c(m, kk); };

    SETerms t;
    double lsum = 0.0;
    for (int m = 0; m < m_count; ++m) lsum += lam(m, k);
    t.a = s.power.gamma(k) * lsum * lsum;
    t.e = s2 / ru * lsum;
    for (int j = 0; j < k_count; ++j) {
        const double g = s.power.gamma(j);
        double lb = 0.0, cb = 0.0, coh = 0.0, dk = 0.0;
        for (int m = 0; m < m_count; ++m) {
            const double cm = c(m, k);
            lb += lam(m, k) * beta(m, j);
            cb += cm * cm * beta(m, j) * beta(m, j);
            coh += lam(m, k) * beta(m, j) / beta(m, k);
            const double rx = squared_gain ? beta(m, j) * beta(m, j) : beta(m, j);
            dk += lam(m, k) * beta(m, j) + cm * cm * (1.0 - kr) * rp * beta(m, j) * beta(m, j) +
                  cm * cm * kr * rp * rx * (tau * kt * psi(k, j) + 1.0 - kt);
        }
        t.b += g * (lb + rp * (1.0 - kr) * cb);
        t.c += g * (psi(k, j) + (1.0 - kt) / (kt * tau)) * coh * coh;
        t.d += g * dk;
    }
    return t;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("single-link terms and rate by hand") {
    const UplinkSetup s =
        make_uplink_setup(LargeScaleFading(Eigen::MatrixXd::Ones(1, 1)), PilotBook(1, {0}), unit_power(1), {});
    const SETerms t = se_terms(0, s);
    CHECK(t.a == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(t.b == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.c == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(t.e == doctest::Approx(0.5).epsilon(1e-14));
    // SINR = 0.25 / (0.5 + 0.25 - 0.25 + 0 * D + 0.5) = 0.25
    const double rate = se_closed_form(t, s.hw);
    CHECK(rate == doctest::Approx(std::log2(1.25)).epsilon(1e-14));
    CHECK(rate == doctest::Approx(0.3219).epsilon(1e-4));
}

TEST_CASE("perfect hardware annihilates the distortion summands") {
    const UplinkSetup s = random_setup(3, 4, 3, 3, HardwareProfile::perfect(), false);
    for (int k = 0; k < 3; ++k) {
        const SETerms t = se_terms(k, s);
        // With kappa = 1, B reduces to sum_k' gamma_k' sum_m lambda_mk beta_mk' and
        // C to gamma_k (sum_m lambda_mk)^2 for orthogonal pilots.
        double b = 0.0;
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 4; ++m) b += s.power.gamma(j) * s.coeffs.lambda(m, k) * s.fading(m, j);
        CHECK(rel(t.b, b) < 1e-13);
        CHECK(rel(t.c, t.a) < 1e-13);
    }
}

TEST_CASE("library terms match a scalar transcription") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const double kappa = 1.0 - 0.04 * static_cast<double>(seed);
        const bool shared = seed % 2 == 0;
        const UplinkSetup s = random_setup(seed, 5, 4, shared ? 2 : 4, HardwareProfile(kappa, 1.02 - 0.05 * seed), shared);
        for (int k = 0; k < 4; ++k) {
            for (bool squared : {true, false}) {
                const SETerms lib =
                    se_terms(k, s, squared ? ApDistortionReading::kSquaredGain : ApDistortionReading::kAsPrinted);
                const SETerms ref = loop_terms(k, s, squared);
                CHECK(rel(lib.a, ref.a) < 1e-12);
                CHECK(rel(lib.b, ref.b) < 1e-12);
                CHECK(rel(lib.c, ref.c) < 1e-12);
                CHECK(rel(lib.d, ref.d) < 1e-12);
                CHECK(rel(lib.e, ref.e) < 1e-12);
            }
        }
    }
}

TEST_CASE("general expression reduces to the ideal-hardware rate") {
    const Scenario sc;
    for (std::uint64_t sample = 0; sample < 3; ++sample) {
        const UplinkSetup s = build_setup(sc, 30, sample, HardwareProfile::perfect());
        const SEReport r = compute_se(s);
        for (int k = 0; k < s.ue_count(); ++k)
            CHECK(rel(r.rates(k), ideal_hardware_rate(k, s.fading, s.gram, s.power, s.tau())) < 1e-12);
    }
}

TEST_CASE("moments reproduce the rate") {
    const UplinkSetup s = random_setup(8, 6, 3, 2, HardwareProfile(0.9, 0.8), true);
    for (int k = 0; k < 3; ++k) {
        const MomentSet m = closed_form_moments(k, s);
        CHECK(rel(std::log2(1.0 + uatf_sinr(m)), se_closed_form(se_terms(k, s), s.hw)) < 1e-12);
        for (double v : m) CHECK(v >= 0.0);
    }
}

TEST_CASE("useless hardware carries no information") {
    const UplinkSetup s = random_setup(4, 3, 2, 2, HardwareProfile(0.0, 0.7), false);
    CHECK(compute_se(s).rates.isZero(0.0));
    CHECK_THROWS_AS(se_terms(0, s), SingularityError);
    const UplinkSetup r = random_setup(4, 3, 2, 2, HardwareProfile(0.7, 0.0), false);
    CHECK(compute_se(r).rates.isZero(0.0));
    CHECK(se_closed_form(se_terms(0, r), r.hw) == 0.0);
}

TEST_CASE("terms are non-negative and the denominator is positive") {
    const Scenario sc;
    for (double kappa : {1.0, 0.99, 0.95, 0.8, 0.5, 0.1}) {
        for (std::uint64_t sample = 0; sample < 4; ++sample) {
            const HardwareProfile hw(kappa, std::sqrt(kappa));
            const UplinkSetup s = build_setup(sc, 40, sample, hw);
            for (int k = 0; k < s.ue_count(); ++k) {
                const SETerms t = se_terms(k, s);
                CHECK(t.a >= 0.0);
                CHECK(t.b >= 0.0);
                CHECK(t.c >= 0.0);
                CHECK(t.d >= 0.0);
                CHECK(t.e > 0.0);
                const double kr = hw.kappa_r(), kt = hw.kappa_t();
                CHECK(kr * t.b + kr * t.c - kr * kt * t.a + (1.0 - kr) * t.d + t.e > 0.0);
            }
        }
    }
}

TEST_CASE("rate grows strictly with uplink power") {
    // Unit-scale fading so the noise term is resolvable in double precision.
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const bool shared = seed % 2 == 0;
        const UplinkSetup base = random_setup(seed, 8, 3, shared ? 2 : 3, HardwareProfile(0.95, 0.97), shared);
        Eigen::VectorXd previous = Eigen::VectorXd::Constant(base.ue_count(), -1.0);
        for (double rho : {0.001, 0.01, 0.05, 0.1, 0.2, 1.0, 10.0}) {
            UplinkSetup s = base;
            s.power.rho_u = rho;
            const Eigen::VectorXd rates = compute_se(s).rates;
            for (int k = 0; k < rates.size(); ++k) CHECK(rates(k) > previous(k));
            previous = rates;
        }
    }
}

TEST_CASE("a lone UE never gains from worse hardware") {
    const double grid[] = {0.1, 0.3, 0.5, 0.7, 0.9, 0.95, 0.98, 1.0};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const UplinkSetup base = random_setup(seed, 12, 1, 1 + static_cast<int>(seed % 3), HardwareProfile::perfect(), false);
        for (double fixed : {0.5, 0.9, 1.0}) {
            double last_t = 0.0, last_r = 0.0;
            for (double q : grid) {
                const double rt =
                    compute_se(make_uplink_setup(base.fading, base.book, base.power, HardwareProfile(q, fixed))).rates(0);
                const double rr =
                    compute_se(make_uplink_setup(base.fading, base.book, base.power, HardwareProfile(fixed, q))).rates(0);
                CHECK(rt >= last_t);
                CHECK(rr >= last_r);
                last_t = rt;
                last_r = rr;
            }
        }
    }
}

TEST_CASE("with strong interferers a weak UE can gain from transmitter distortion") {
    // Pilot distortion shrinks the LMMSE scalar at APs dominated by other UEs, which
    // acts as interference-aware weighting for MR combining. The simulator agrees.
    const Scenario sc;
    const LargeScaleFading f = scenario_fading(sc, 30, 0);
    const UplinkSetup ideal = build_setup(sc, f, 0, HardwareProfile::perfect());
    const UplinkSetup impaired = build_setup(sc, f, 0, HardwareProfile(0.98, 1.0));
    const Eigen::VectorXd r1 = compute_se(ideal).rates;
    const Eigen::VectorXd r2 = compute_se(impaired).rates;
    int best = 0;
    for (int k = 1; k < sc.ues; ++k)
        if (r2(k) - r1(k) > r2(best) - r1(best)) best = k;
    REQUIRE(r2(best) > 1.5 * r1(best));

    MonteCarloOptions opt;
    opt.trials = 4000;
    opt.seed = 5;
    const auto mc1 = uatf_rates(estimate_appendix_moments(ideal, opt));
    const auto mc2 = uatf_rates(estimate_appendix_moments(impaired, opt));
    const auto b = static_cast<std::size_t>(best);
    CHECK(std::abs(mc1[b].rate - r1(best)) < 4.0 * mc1[b].std_error);
    CHECK(std::abs(mc2[b].rate - r2(best)) < 4.0 * mc2[b].std_error);
    CHECK(mc2[b].ci_low > mc1[b].ci_high);
}

TEST_CASE("hardware scaling schedule") {
    const HardwareProfile a = apply_schedule(100, {1.0, 1.0, 0.0, 0.5});
    CHECK(a.kappa_r() == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(a.kappa_t() == 1.0);
    for (int m : {1, 7, 1000}) {
        const HardwareProfile id = apply_schedule(m, {0.9, 0.8, 0.0, 0.0});
        CHECK(id.kappa_t() == 0.9);
        CHECK(id.kappa_r() == 0.8);
    }
    const HardwareProfile one = apply_schedule(1, {0.9, 0.8, 0.7, 2.0});
    CHECK(one.kappa_t() == 0.9);
    CHECK(one.kappa_r() == 0.8);
    CHECK_THROWS_AS(apply_schedule(10, {0.0, 1.0, 0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(apply_schedule(10, {1.0, 1.0, -0.1, 0.0}), ConfigError);
}

TEST_CASE("large-M limit for a single UE") {
    const LargeScaleFading f(Eigen::MatrixXd::Constant(20, 1, 0.3));
    const PilotGram gram = pilot_gram(PilotBook(1, {0}));
    const PowerConfig p = unit_power(1);
    CHECK(std::isinf(asymptotic_sir(0, f, gram, p, 1.0, 1)));
    CHECK(asymptotic_sir(0, f, gram, p, 0.5, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(asymptotic_sir(0, f, gram, p, 0.5, 1, MuReading::kAggregate) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    // K = 1 with tau = 4: kappa / ((1 + (1 - kappa) / (4 kappa)) - kappa).
    CHECK(asymptotic_sir(0, f, pilot_gram(PilotBook(4, {0})), p, 0.8, 4) ==
          doctest::Approx(0.8 / (1.0 + 0.2 / 3.2 - 0.8)).epsilon(1e-14));
}

TEST_CASE("receiver-side decay keeps a nonzero rate below the limit") {
    Scenario sc;
    sc.ues = 4;
    sc.tau = 4;
    const ScalingSchedule sched{0.9, 0.9, 0.0, 0.4};
    const LargeScaleFading full = scenario_fading(sc, 500, 0);
    for (int m : {50, 100, 200, 500}) {
        const LargeScaleFading f = full.with_first_aps(m);
        const UplinkSetup s = build_setup(sc, f, 0, apply_schedule(m, sched));
        for (int k = 0; k < sc.ues; ++k) {
            const double se = compute_se(s).rates(k);
            CHECK(se > 0.0);
            CHECK(se < std::log2(1.0 + asymptotic_sir(k, f, s.gram, s.power, sched.kappa_t0, sc.tau,
                                                      MuReading::kAggregate)));
        }
    }
}

TEST_CASE("receiver-side decay converges to the limit at rate M^(2 z_r - 1)") {
    const ScalingSchedule sched{0.9, 0.9, 0.0, 0.4};
    const PilotBook book(2, {0, 1});
    const PowerConfig p = unit_power(2);
    std::vector<double> log_m, log_residual;
    double last_gap = std::numeric_limits<double>::infinity();
    for (int m : {100, 1000, 10000, 100000, 1000000}) {
        Eigen::MatrixXd beta(m, 2);
        beta.col(0).setConstant(1.0);
        beta.col(1).setConstant(0.5);
        const LargeScaleFading f(beta);
        const UplinkSetup s = make_uplink_setup(f, book, p, apply_schedule(m, sched));
        const double sir = asymptotic_sir(0, f, s.gram, p, sched.kappa_t0, 2, MuReading::kAggregate);
        const double se = compute_se(s).rates(0);
        const double gap = std::log2(1.0 + sir) - se;
        CHECK(gap > 0.0);
        CHECK(gap < last_gap);
        last_gap = gap;
        log_m.push_back(std::log(static_cast<double>(m)));
        log_residual.push_back(std::log(sir / (std::exp2(se) - 1.0) - 1.0));
    }
    const std::size_t n = log_m.size();
    const double slope = (log_residual[n - 1] - log_residual[n - 3]) / (log_m[n - 1] - log_m[n - 3]);
    CHECK(slope == doctest::Approx(2.0 * sched.z_r - 1.0).epsilon(0.1));
}
