// spectrum.hpp — optical spectrum S(w) = (1/pi) Re int_0^inf g1(tau) e^{i w tau} dtau
// of oscillator B: closed forms, numeric half-line transform, peak analytics and
// coupling estimation from the doublet at the exceptional point.

#pragma once

#include "trimer/correlation.hpp"
#include "trimer/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace trimer {

enum class SpectrumMethod { ClosedForm, LorentzianSum, ExceptionalPoint, FourierNumeric };

std::string_view method_name(SpectrumMethod m);

struct Peak {
    double position = 0.0;
    double height = 0.0;
    double fwhm = 0.0;  // NaN when a half-maximum crossing lies outside the grid
};

struct SpectrumTrace {
    std::vector<double> omega_grid;
    std::vector<double> values;
    std::vector<Peak> peaks;
    SpectrumMethod method = SpectrumMethod::ClosedForm;
};

// Pointwise evaluators. All require the resonant regime and Omega < Omega_c.

// Rational closed form; the omega^4 common factor is cancelled analytically at J = 0.
double spectrum_rational(const ChainParams& params, double omega);

// Assembly from the four Lorentzian-like terms F1..F4. Throws NearEPSingularity.
double spectrum_lorentzian_sum(const ChainParams& params, double omega, double eps_ep = kDefaultEpGuard);

// 2 gamma^3 w^4 / (pi (gamma^2 w^2 + (w^2 - 2 J^2)^2)^2), valid at Omega = Delta.
double spectrum_ep_value(const ChainParams& params, double omega);

// Same spectrum written as a product over the coalesced eigenvalues, using the
// complex (2J^2 > gamma^2/4) or overdamped (2J^2 < gamma^2/4) factorisation.
double spectrum_ep_factored(const ChainParams& params, double omega);

enum class ClosedFormPath { Rational, LorentzianSum };

SpectrumTrace spectrum_closed_form(const ChainParams& params, const std::vector<double>& omega_grid,
                                   ClosedFormPath path = ClosedFormPath::Rational);

// Requires Omega == Delta.
SpectrumTrace spectrum_ep(const ChainParams& params, const std::vector<double>& omega_grid);

// Trapezoidal half-line transform of a trace sampled uniformly from tau = 0.
// Throws InsufficientDecay when |g1| has not dropped below decay_floor at the
// end of the trace.
SpectrumTrace spectrum_fourier(const CorrelationTrace& trace, const std::vector<double>& omega_grid,
                               double decay_floor = 1e-8);

// Regression trace + transform with step min(0.01/gamma, 0.1/max|w|).
SpectrumTrace spectrum_fourier(const ChainParams& params, const std::vector<double>& omega_grid,
                               double tau_cap = 1000.0);

struct PeakOptions {
    double threshold_fraction = 0.005;  // of the global maximum
    double merge_steps = 2.0;           // merge radius in grid steps
};

std::vector<Peak> find_peaks(const SpectrumTrace& spec, const PeakOptions& opts = {});

struct CouplingEstimate {
    double j_hat = 0.0;
    double separation = 0.0;
    std::vector<std::string> notes;
};

// J = (w_p+ - w_p-) / (2 sqrt 2). Throws NotDoublet unless exactly two peaks.
CouplingEstimate estimate_coupling(const SpectrumTrace& spec, const PeakOptions& opts = {});

// Trapezoidal integral of the sampled values over the trace grid.
double trace_integral(const SpectrumTrace& spec);

// int_{-inf}^{inf} S dw of the rational closed form by adaptive Gauss-Kronrod.
double spectrum_total_weight(const ChainParams& params);

}  // namespace trimer
