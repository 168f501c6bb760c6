// correlation.hpp — normalised first-order correlation g1(tau) of oscillator B,
// from the closed form and from the regression equation on the dynamical matrix.

#pragma once

#include "trimer/model.hpp"

#include <string_view>
#include <vector>

namespace trimer {

enum class CorrelationMethod { ClosedForm, QrtNumeric, FockOracle };

std::string_view method_name(CorrelationMethod m);

struct CorrelationTrace {
    std::vector<double> tau_grid;  // units of 1/gamma
    std::vector<Complex> values;
    CorrelationMethod method = CorrelationMethod::ClosedForm;
};

inline constexpr double kDefaultEpGuard = 1e-6;  // in units of gamma

// True when |Pi| and |omega_pm| all exceed eps_ep * gamma.
bool away_from_ep_singularity(const ChainParams& params, double eps_ep = kDefaultEpGuard);

// Two-term exponential/trigonometric closed form. Throws NearEPSingularity,
// NoSteadyState, UndefinedCorrelation (Omega = 0), OutsidePaperRegime.
CorrelationTrace g1_closed_form(const ChainParams& params, const std::vector<double>& tau_grid,
                                double eps_ep = kDefaultEpGuard);

// Regression theorem: d v / d tau = -i H v from the steady-state cross moments,
// normalised by <b^dag b>_ss. Throws NoSteadyState, UndefinedCorrelation.
CorrelationTrace g1_qrt(const ChainParams& params, const std::vector<double>& tau_grid);

// Closed form where it is well conditioned, regression otherwise.
CorrelationTrace g1(const ChainParams& params, const std::vector<double>& tau_grid);

// Regression trace on the uniform grid 0, step, 2 step, ... extended until
// |g1| < floor over the trailing samples or tau reaches tau_cap.
CorrelationTrace g1_qrt_until_decayed(const ChainParams& params, double step, double tau_cap = 1000.0,
                                      double floor = 1e-8);

std::vector<double> uniform_grid(double lo, double hi, int points);

}  // namespace trimer
