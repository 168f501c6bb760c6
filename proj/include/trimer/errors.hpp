#pragma once

#include <stdexcept>
#include <string>

namespace trimer {

// Base of every recoverable failure raised by the library. Callers that only
// care about "something physical went wrong" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Closed-form operation called with delta_a != 0 or delta_c != 0.
class OutsidePaperRegime : public Error {
public:
    explicit OutsidePaperRegime(const std::string& what)
        : Error("outside resonant regime (delta_a = delta_c = 0 required): " + what) {}
};

// Omega >= Omega_c, or a bright-sector mode with non-negative decay.
class NoSteadyState : public Error {
public:
    using Error::Error;
};

// Second-moment system has conserved directions beyond the catalogued dark modes.
class SingularBeyondDarkSector : public Error {
public:
    using Error::Error;
};

// Pi or omega_pm too close to zero for the exponential/trigonometric closed form.
class NearEPSingularity : public Error {
public:
    using Error::Error;
};

// g1 is not normalisable because the steady-state population of B vanishes.
class UndefinedCorrelation : public Error {
public:
    using Error::Error;
};

// Correlation trace does not decay far enough for a half-line transform.
class InsufficientDecay : public Error {
public:
    using Error::Error;
};

// Coupling estimation needs exactly two spectral peaks.
class NotDoublet : public Error {
public:
    using Error::Error;
};

// Fock-space truncation is no longer negligible.
class CutoffSaturation : public Error {
public:
    using Error::Error;
};

// Eigensolver, bisection or integrator failed to converge.
class SolverFailure : public Error {
public:
    using Error::Error;
};

class StepSizeUnderflow : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

}  // namespace trimer
