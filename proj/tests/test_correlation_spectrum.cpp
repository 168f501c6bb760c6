#include "test_support.hpp"
#include "trimer/correlation.hpp"
#include "trimer/errors.hpp"
#include "trimer/spectrum.hpp"
#include "trimer/steady_state.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

using namespace trimer;
using testing_support::linspace;

namespace {

constexpr double kPi = std::numbers::pi;

ChainParams chain(double delta, double j, double omega, double gamma = 1.0) {
    ChainParams p;
    p.delta = delta;
    p.j = j;
    p.omega_drive = omega;
    p.gamma = gamma;
    return p;
}

// Lossy squeezed oscillator on its own: (<b^dag b>, <b^dag b^dag>)(tau) under
// the 2x2 block, with the textbook single-mode steady state.
std::vector<Complex> single_mode_g1(double gamma, double delta, double omega, const std::vector<double>& tau) {
    Eigen::Matrix2cd m;
    m << Complex(delta, -gamma), omega, -omega, Complex(-delta, -gamma);
    const double den = gamma * gamma + delta * delta - omega * omega;
    const double n = omega * omega / (2.0 * den);
    const Complex pair_dag = Complex(0.0, 1.0) * Complex(gamma * omega, delta * omega) / (2.0 * den);
    const Eigen::Vector2cd v0(n, pair_dag);
    std::vector<Complex> out;
    for (double t : tau) {
        const Eigen::Matrix2cd gen = Complex(0.0, -t) * m;
        out.push_back((gen.exp() * v0)(0) / n);
    }
    return out;
}

double max_diff(const CorrelationTrace& a, const CorrelationTrace& b) {
    return testing_support::max_abs_diff(a.values, b.values);
}

SpectrumTrace synthetic_doublet(double w0, double width) {
    SpectrumTrace s;
    s.omega_grid = linspace(-3.0, 3.0, 2001);
    for (double w : s.omega_grid) {
        s.values.push_back(std::exp(-(w - w0) * (w - w0) / (2 * width * width)) +
                           std::exp(-(w + w0) * (w + w0) / (2 * width * width)));
    }
    return s;
}

}  // namespace

TEST_CASE("g1 is normalised at zero delay on every path") {
    for (const ChainParams& p : {chain(2.0, 0.25, 1.0), chain(1.0, 0.6, 0.5), chain(2.0, 0.0, 1.5)}) {
        const std::vector<double> tau{0.0, 0.5};
        CHECK(std::abs(g1_closed_form(p, tau).values[0] - 1.0) < 1e-9);
        CHECK(std::abs(g1_qrt(p, tau).values[0] - 1.0) < 1e-9);
        CHECK(std::abs(g1(p, tau).values[0] - 1.0) < 1e-9);
    }
    CHECK(std::abs(g1(chain(2.0, 0.5, 2.0), {0.0}).values[0] - 1.0) < 1e-9);
}

TEST_CASE("closed-form g1 agrees with the regression equation") {
    const std::vector<double> tau = linspace(0.0, 20.0, 801);
    for (const ChainParams& p : {chain(2.0, 0.25, 1.0), chain(2.0, 0.5, 1.0), chain(1.0, 0.7, 0.3),
                                 chain(2.0, 0.25, 1.9), chain(0.5, 0.1, 0.8, 2.0)}) {
        CHECK(max_diff(g1_closed_form(p, tau), g1_qrt(p, tau)) < 1e-8);
    }
}

TEST_CASE("uncoupled chain reduces to the single lossy oscillator") {
    const std::vector<double> tau = linspace(0.0, 15.0, 151);
    for (double omega : {0.5, 1.0, 1.8}) {
        const ChainParams p = chain(2.0, 0.0, omega);
        const std::vector<Complex> oracle = single_mode_g1(1.0, 2.0, omega, tau);
        CHECK(testing_support::max_abs_diff(g1_qrt(p, tau).values, oracle) < 1e-9);
        CHECK(testing_support::max_abs_diff(g1_closed_form(p, tau).values, oracle) < 1e-9);
    }
}

TEST_CASE("single-oscillator EP decays without oscillation") {
    const std::vector<double> tau = linspace(0.0, 20.0, 401);
    const CorrelationTrace t = g1(chain(2.0, 0.0, 2.0), tau);
    CHECK(t.method == CorrelationMethod::QrtNumeric);
    for (std::size_t i = 21; i < tau.size(); ++i) CHECK(std::abs(t.values[i]) <= std::abs(t.values[i - 1]) + 1e-15);
    const std::vector<Complex> oracle = single_mode_g1(1.0, 2.0, 2.0, tau);
    CHECK(testing_support::max_abs_diff(t.values, oracle) < 1e-9);
}

TEST_CASE("coupled EP trace oscillates at sqrt(2) J") {
    const double j = 0.5;
    const CorrelationTrace t = g1_qrt_until_decayed(chain(2.0, j, 2.0), 0.01);
    // direct half-line transform of the samples, scanned for its maximum
    double best_w = 0.0;
    double best = -1.0;
    for (double w = 0.3; w <= 1.2; w += 1e-4) {
        Complex acc(0.0);
        for (std::size_t i = 0; i < t.tau_grid.size(); ++i) {
            const double weight = (i == 0 || i + 1 == t.tau_grid.size()) ? 0.5 : 1.0;
            acc += weight * t.values[i] * std::exp(Complex(0.0, w * t.tau_grid[i]));
        }
        if (acc.real() > best) {
            best = acc.real();
            best_w = w;
        }
    }
    CHECK(std::abs(best_w - std::sqrt(2.0) * j) < 2e-3);
}

TEST_CASE("g1 error paths") {
    CHECK_THROWS_AS(g1_closed_form(chain(2.0, 0.25, 2.0), {0.0}), NearEPSingularity);
    CHECK(away_from_ep_singularity(chain(2.0, 0.25, 1.0)));
    CHECK_FALSE(away_from_ep_singularity(chain(2.0, 0.25, 2.0)));
    CHECK_THROWS_AS(g1_qrt(chain(2.0, 0.25, 0.0), {0.0}), UndefinedCorrelation);
    CHECK_THROWS_AS(g1_qrt(chain(2.0, 0.25, 2.3), {0.0}), NoSteadyState);
    ChainParams detuned = chain(2.0, 0.25, 1.0);
    detuned.delta_a = 0.2;
    CHECK_THROWS_AS(g1_closed_form(detuned, {0.0}), OutsidePaperRegime);
}

TEST_CASE("regression trace extends until decayed") {
    const CorrelationTrace t = g1_qrt_until_decayed(chain(2.0, 0.25, 1.0), 0.05);
    CHECK(std::abs(t.values.back()) < 1e-8);
    CHECK(t.tau_grid.front() == 0.0);
    CHECK(t.tau_grid[1] == doctest::Approx(0.05));
}

TEST_CASE("EP spectrum identities") {
    for (double j : {0.25, 0.5, 0.7}) {
        CAPTURE(j);
        const ChainParams p = chain(2.0, j, 2.0);
        const double wp = std::sqrt(2.0) * j;
        CHECK(spectrum_ep_value(p, 0.0) == 0.0);
        CHECK(std::abs(spectrum_rational(p, 0.0)) < 1e-12);
        CHECK(std::abs(spectrum_ep_value(p, wp) - 2.0 / kPi) < 1e-9);
        CHECK(std::abs(spectrum_rational(p, wp) - 2.0 / kPi) < 1e-9);
        for (double w : linspace(-3.0, 3.0, 61)) {
            CHECK(spectrum_ep_value(p, w) == spectrum_ep_value(p, -w));
            CHECK(std::abs(spectrum_ep_factored(p, w) - spectrum_rational(p, w)) < 1e-12);
            CHECK(std::abs(spectrum_ep_value(p, w) - spectrum_rational(p, w)) < 1e-12);
            CHECK(spectrum_ep_value(p, w) <= 2.0 / kPi + 1e-12);
        }
    }
}

TEST_CASE("uncoupled EP spectrum is the squared Lorentzian") {
    const ChainParams p = chain(2.0, 0.0, 2.0);
    CHECK(std::abs(spectrum_rational(p, 0.0) - 2.0 / kPi) < 1e-12);
    for (double w : linspace(-3.0, 3.0, 31)) {
        const double expected = 2.0 / (kPi * (1 + w * w) * (1 + w * w));
        CHECK(std::abs(spectrum_rational(p, w) - expected) < 1e-12);
        CHECK(std::abs(spectrum_ep_value(p, w) - expected) < 1e-12);
    }
}

TEST_CASE("EP peak positions do not depend on gamma") {
    const double j = 0.5;
    for (double gamma : {0.5, 1.0, 2.0}) {
        ChainParams p = chain(2.0, j, 2.0, gamma);
        const SpectrumTrace s = spectrum_ep(p, linspace(-3.0, 3.0, 2001));
        REQUIRE(s.peaks.size() == 2);
        CHECK(std::abs(s.peaks[0].position + std::sqrt(2.0) * j) < 1e-3);
        CHECK(std::abs(s.peaks[1].position - std::sqrt(2.0) * j) < 1e-3);
        CHECK(std::abs(s.peaks[1].height - 2.0 / (kPi * gamma)) < 1e-5);
    }
}

TEST_CASE("Lorentzian assembly equals the rational form") {
    for (const ChainParams& p : {chain(2.0, 0.25, 1.0), chain(2.0, 0.5, 1.0), chain(1.0, 0.3, 0.9), chain(2.0, 0.5, 2.2)}) {
        for (double w : linspace(-3.0, 3.0, 121)) {
            const double r = spectrum_rational(p, w);
            CHECK(std::abs(spectrum_lorentzian_sum(p, w) - r) < 1e-10 * std::max(1.0, r));
        }
    }
    CHECK_THROWS_AS(spectrum_lorentzian_sum(chain(2.0, 0.5, 2.0), 0.3), NearEPSingularity);
}

TEST_CASE("numeric transform matches the closed form") {
    for (const ChainParams& p : {chain(2.0, 0.25, 1.0), chain(2.0, 0.5, 2.0), chain(2.0, 0.25, 2.0)}) {
        const std::vector<double> w = linspace(-3.0, 3.0, 301);
        const SpectrumTrace cf = spectrum_closed_form(p, w);
        const SpectrumTrace ft = spectrum_fourier(p, w);
        const double peak = *std::max_element(cf.values.begin(), cf.values.end());
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (cf.values[i] > 0.01 * peak) CHECK(std::abs(ft.values[i] - cf.values[i]) < 1e-3 * cf.values[i]);
        }
    }
}

TEST_CASE("spectra are non-negative and carry unit weight") {
    for (const ChainParams& p : {chain(2.0, 0.25, 1.0), chain(2.0, 0.5, 2.0), chain(2.0, 0.0, 2.0), chain(1.0, 0.6, 0.4)}) {
        CHECK(std::abs(spectrum_total_weight(p) - 1.0) < 1e-6);
        const SpectrumTrace s = spectrum_closed_form(p, linspace(-40.0, 40.0, 40001));
        CHECK(std::abs(trace_integral(s) - 1.0) < 1e-3);
        CHECK(*std::min_element(s.values.begin(), s.values.end()) >= -1e-12);
    }
}

TEST_CASE("quadruplet collapses to a doublet that stays put") {
    const std::vector<double> w = linspace(-3.0, 3.0, 2001);
    const SpectrumTrace below = spectrum_closed_form(chain(2.0, 0.5, 1.0), w);
    const SpectrumTrace at = spectrum_closed_form(chain(2.0, 0.5, 2.0), w);
    const SpectrumTrace beyond = spectrum_closed_form(chain(2.0, 0.5, 2.2), w);
    CHECK(below.peaks.size() == 4);
    REQUIRE(at.peaks.size() == 2);
    REQUIRE(beyond.peaks.size() == 2);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(at.peaks[k].position - beyond.peaks[k].position) < 1e-3);
}

TEST_CASE("find_peaks refines by parabola and merges close maxima") {
    SpectrumTrace s;
    s.omega_grid = linspace(-1.0, 1.0, 201);
    for (double w : s.omega_grid) s.values.push_back(1.0 - (w - 0.0123) * (w - 0.0123));
    const auto peaks = find_peaks(s);
    REQUIRE(peaks.size() == 1);
    CHECK(std::abs(peaks[0].position - 0.0123) < 1e-12);

    SpectrumTrace flat;
    flat.omega_grid = linspace(-1.0, 1.0, 11);
    flat.values.assign(11, 0.0);
    CHECK(find_peaks(flat).empty());
}

TEST_CASE("coupling estimate from the doublet") {
    CHECK(estimate_coupling(synthetic_doublet(0.70711, 0.1)).j_hat == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(estimate_coupling(synthetic_doublet(0.35355, 0.1)).j_hat == doctest::Approx(0.25).epsilon(1e-4));
    const double j_hat = estimate_coupling(spectrum_ep(chain(2.0, 0.4, 2.0), linspace(-3.0, 3.0, 2001))).j_hat;
    CHECK(std::abs(j_hat - 0.4) < 0.004);
}

TEST_CASE("coupling estimate needs exactly two peaks") {
    const std::vector<double> w = linspace(-3.0, 3.0, 2001);
    CHECK_THROWS_AS(estimate_coupling(spectrum_ep(chain(2.0, 0.0, 2.0), w)), NotDoublet);
    CHECK_THROWS_AS(estimate_coupling(spectrum_closed_form(chain(2.0, 0.5, 1.0), w)), NotDoublet);
}

TEST_CASE("spectrum preconditions") {
    CHECK_THROWS_AS(spectrum_closed_form(chain(2.0, 0.5, 2.5), {0.0, 1.0}), NoSteadyState);
    CHECK_THROWS_AS(spectrum_ep(chain(2.0, 0.5, 1.0), {0.0, 1.0}), std::invalid_argument);
    CorrelationTrace short_trace{linspace(0.0, 1.0, 11), std::vector<Complex>(11, Complex(1.0)), CorrelationMethod::QrtNumeric};
    CHECK_THROWS_AS(spectrum_fourier(short_trace, {0.0, 1.0}), InsufficientDecay);
}
