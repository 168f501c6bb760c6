// model.hpp — parameters of the driven trimer, the 6x6 first-moment dynamical
// matrix, and the closed-form eigenvalue / exceptional-point formulas.
//
// All frequencies and rates are dimensionless multiples of gamma (gamma = 1 by
// default). The chain is A - B - C with nearest-neighbour coupling J, loss 2*gamma
// and a two-photon drive of strength Omega/2 on B, written in the frame rotating
// with the drive.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string_view>

namespace trimer {

using Complex = std::complex<double>;
using Matrix6c = Eigen::Matrix<Complex, 6, 6>;
using Vector6c = Eigen::Matrix<Complex, 6, 1>;

inline constexpr Complex kI{0.0, 1.0};

struct ChainParams {
    double delta_a = 0.0;      // detuning of A
    double delta = 2.0;        // detuning of B
    double delta_c = 0.0;      // detuning of C
    double j = 0.0;            // A-B and B-C coupling
    double gamma = 1.0;        // B loses at rate 2*gamma
    double omega_drive = 0.0;  // two-photon drive amplitude

    // Throws std::invalid_argument on gamma <= 0, j < 0, omega_drive < 0 or
    // non-finite fields.
    void validate() const;

    // A and C resonant with the drive; the closed forms only hold here.
    bool paper_regime() const noexcept { return delta_a == 0.0 && delta_c == 0.0; }
};

struct DerivedScalars {
    Complex pi_;          // sqrt(Omega^2 - Delta^2)
    Complex z;            // 8 J^2 - gamma^2 - Pi^2
    Complex omega_minus;  // sqrt(Z - 2 gamma Pi)
    Complex omega_plus;   // sqrt(Z + 2 gamma Pi)
    Complex gamma_plus;   // gamma + Pi
    Complex gamma_minus;  // gamma - Pi
    Complex alpha_plus;   // gamma + i Delta
    Complex alpha_minus;  // gamma - i Delta
    Complex beta_plus;    // Delta + i Pi
    Complex beta_minus;   // Delta - i Pi
};

// Ordering of the first-moment vector Psi.
inline constexpr std::array<std::string_view, 6> kBasisOrder{"a", "b", "c", "a+", "b+", "c+"};

struct DynMatrix {
    Matrix6c entries;
    ChainParams params;
};

// i dPsi/dt = H Psi. Delta_a, Delta_c sit on (1,1),(3,3) and their negatives on
// (4,4),(6,6) (1-based), reducing to the textbook matrix when they vanish.
DynMatrix build_dyn_matrix(const ChainParams& params);

// Principal-branch square roots throughout.
DerivedScalars derived_scalars(const ChainParams& params);

// {0, 0, (-i(g+Pi) +- w_-)/2, (-i(g-Pi) +- w_+)/2} in that order.
// Throws OutsidePaperRegime.
std::array<Complex, 6> analytic_eigenvalues(const ChainParams& params);

struct EpDriveStrengths {
    double ep1 = 0.0;       // Omega = Delta
    double ep_plus = 0.0;   // sqrt(Delta^2 + (gamma + 2 sqrt2 J)^2)
    double ep_minus = 0.0;  // sqrt(Delta^2 + (gamma - 2 sqrt2 J)^2)
};

// Drive strengths at which a square-root argument of the eigenvalues vanishes.
// Throws OutsidePaperRegime.
EpDriveStrengths ep_drive_strengths(const ChainParams& params);

// Omega_c = sqrt(gamma^2 + Delta^2). No steady state for Omega >= Omega_c.
double critical_drive(const ChainParams& params);

bool below_critical_drive(const ChainParams& params);

// 2 J^2 <= gamma^2. Outside this band the steady-state argument is not
// guaranteed; treated as a warning by callers, never as an error.
bool within_coupling_bound(const ChainParams& params);

// Coalesced eigenvalues at Omega = Delta: -i gamma/2 +- sqrt(2 J^2 - gamma^2/4).
std::array<Complex, 2> ep1_eigenvalues(const ChainParams& params);

// Coalesced eigenvector (1, lambda/J, 1, 1, -lambda/J, 1) at Omega = Delta, J > 0.
Vector6c ep1_eigenvector(const ChainParams& params, Complex lambda);

}  // namespace trimer
