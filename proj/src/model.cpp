#include "trimer/model.hpp"

#include "trimer/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace trimer {

void ChainParams::validate() const {
    for (double v : {delta_a, delta, delta_c, j, gamma, omega_drive}) {
        if (!std::isfinite(v)) throw std::invalid_argument("ChainParams: non-finite field");
    }
    if (gamma <= 0.0) throw std::invalid_argument("ChainParams: gamma must be > 0");
    if (j < 0.0) throw std::invalid_argument("ChainParams: j must be >= 0");
    if (omega_drive < 0.0) throw std::invalid_argument("ChainParams: omega_drive must be >= 0");
}

DynMatrix build_dyn_matrix(const ChainParams& p) {
    p.validate();
    const double J = p.j;
    const double W = p.omega_drive;
    Matrix6c h = Matrix6c::Zero();

    // annihilation block
    h(0, 0) = p.delta_a;
    h(0, 1) = J;
    h(1, 0) = J;
    h(1, 1) = Complex(p.delta, -p.gamma);
    h(1, 2) = J;
    h(2, 1) = J;
    h(2, 2) = p.delta_c;
    h(1, 4) = W;

    // creation block
    h(3, 3) = -p.delta_a;
    h(3, 4) = -J;
    h(4, 3) = -J;
    h(4, 4) = Complex(-p.delta, -p.gamma);
    h(4, 5) = -J;
    h(5, 4) = -J;
    h(5, 5) = -p.delta_c;
    h(4, 1) = -W;

    return DynMatrix{h, p};
}

DerivedScalars derived_scalars(const ChainParams& p) {
    const double g = p.gamma;
    const double D = p.delta;
    const double W = p.omega_drive;
    DerivedScalars s;
    // Real argument; std::sqrt on a complex with +0 imaginary part gives the
    // principal root, i.e. +i sqrt(|x|) for x < 0.
    s.pi_ = std::sqrt(Complex(W * W - D * D, 0.0));
    s.z = 8.0 * p.j * p.j - g * g - s.pi_ * s.pi_;
    s.omega_minus = std::sqrt(s.z - 2.0 * g * s.pi_);
    s.omega_plus = std::sqrt(s.z + 2.0 * g * s.pi_);
    s.gamma_plus = g + s.pi_;
    s.gamma_minus = g - s.pi_;
    s.alpha_plus = Complex(g, D);
    s.alpha_minus = Complex(g, -D);
    s.beta_plus = D + kI * s.pi_;
    s.beta_minus = D - kI * s.pi_;
    return s;
}

std::array<Complex, 6> analytic_eigenvalues(const ChainParams& p) {
    p.validate();
    if (!p.paper_regime()) throw OutsidePaperRegime("analytic_eigenvalues");
    const DerivedScalars s = derived_scalars(p);
    const Complex lead_minus = -kI * s.gamma_plus;
    const Complex lead_plus = -kI * s.gamma_minus;
    return {Complex(0.0),
            Complex(0.0),
            0.5 * (lead_minus + s.omega_minus),
            0.5 * (lead_minus - s.omega_minus),
            0.5 * (lead_plus + s.omega_plus),
            0.5 * (lead_plus - s.omega_plus)};
}

EpDriveStrengths ep_drive_strengths(const ChainParams& p) {
    p.validate();
    if (!p.paper_regime()) throw OutsidePaperRegime("ep_drive_strengths");
    const double shift = 2.0 * std::sqrt(2.0) * p.j;
    return {std::abs(p.delta), std::hypot(p.delta, p.gamma + shift),
            std::hypot(p.delta, p.gamma - shift)};
}

double critical_drive(const ChainParams& p) { return std::hypot(p.gamma, p.delta); }

bool below_critical_drive(const ChainParams& p) { return p.omega_drive < critical_drive(p); }

bool within_coupling_bound(const ChainParams& p) { return 2.0 * p.j * p.j <= p.gamma * p.gamma; }

std::array<Complex, 2> ep1_eigenvalues(const ChainParams& p) {
    const Complex root = std::sqrt(Complex(2.0 * p.j * p.j - 0.25 * p.gamma * p.gamma, 0.0));
    const Complex centre(0.0, -0.5 * p.gamma);
    return {centre + root, centre - root};
}

Vector6c ep1_eigenvector(const ChainParams& p, Complex lambda) {
    if (p.j <= 0.0) throw std::invalid_argument("ep1_eigenvector: requires J > 0");
    Vector6c u;
    u << 1.0, lambda / p.j, 1.0, 1.0, -lambda / p.j, 1.0;
    return u;
}

}  // namespace trimer
