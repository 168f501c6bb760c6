#include "trimer/correlation.hpp"

#include "trimer/errors.hpp"
#include "trimer/moment_dynamics.hpp"
#include "trimer/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trimer {

std::string_view method_name(CorrelationMethod m) {
    switch (m) {
        case CorrelationMethod::ClosedForm: return "closed_form";
        case CorrelationMethod::QrtNumeric: return "qrt_numeric";
        case CorrelationMethod::FockOracle: return "fock_oracle";
    }
    return "?";
}

std::vector<double> uniform_grid(double lo, double hi, int points) {
    if (points < 2) throw std::invalid_argument("uniform_grid: need >= 2 points");
    if (!(hi > lo)) throw std::invalid_argument("uniform_grid: need hi > lo");
    std::vector<double> g(static_cast<std::size_t>(points));
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) g[i] = lo + i * step;
    g.back() = hi;
    return g;
}

namespace {

void require_correlation_defined(const ChainParams& p) {
    p.validate();
    if (!below_critical_drive(p)) {
        throw NoSteadyState("drive at or above critical strength sqrt(gamma^2 + Delta^2)");
    }
    if (p.omega_drive == 0.0) throw UndefinedCorrelation("undriven chain: <b^dag b>_ss = 0");
}

}  // namespace

bool away_from_ep_singularity(const ChainParams& p, double eps_ep) {
    const DerivedScalars s = derived_scalars(p);
    const double eps = eps_ep * p.gamma;
    return std::abs(s.pi_) > eps && std::abs(s.omega_minus) > eps && std::abs(s.omega_plus) > eps;
}

CorrelationTrace g1_closed_form(const ChainParams& p, const std::vector<double>& tau_grid, double eps_ep) {
    if (!p.paper_regime()) throw OutsidePaperRegime("g1_closed_form");
    require_correlation_defined(p);
    if (!away_from_ep_singularity(p, eps_ep)) {
        throw NearEPSingularity("g1 closed form is singular near Pi = 0 or omega_pm = 0");
    }

    const DerivedScalars s = derived_scalars(p);
    const double W = p.omega_drive;
    const double W2 = W * W;
    const double W3 = W2 * W;

    // Each cos/sin pair is split into its two exponentials so that large
    // imaginary parts of omega_pm never overflow on their own.
    struct Branch {
        Complex rate_plus;   // exponent of e^{+i w tau/2} component
        Complex rate_minus;  // exponent of e^{-i w tau/2} component
        Complex amp_plus;
        Complex amp_minus;
    };
    auto make_branch = [&](Complex decay, Complex w, Complex weight, Complex cos_coef, Complex sin_coef) {
        // weight/w * e^{-decay tau/2} (cos_coef cos(w tau/2) + sin_coef sin(w tau/2))
        const Complex pre = weight / w;
        Branch b;
        b.rate_plus = 0.5 * (-decay + kI * w);
        b.rate_minus = 0.5 * (-decay - kI * w);
        b.amp_plus = pre * 0.5 * (cos_coef - kI * sin_coef);
        b.amp_minus = pre * 0.5 * (cos_coef + kI * sin_coef);
        return b;
    };

    const Complex ap = s.alpha_plus;
    const Branch first = make_branch(s.gamma_plus, s.omega_minus, W3 + kI * ap * s.beta_plus * W,
                                     s.beta_minus * s.omega_minus, -(ap * s.beta_minus - kI * W2));
    const Branch second = make_branch(s.gamma_minus, s.omega_plus, -(W3 + kI * ap * s.beta_minus * W),
                                      s.beta_plus * s.omega_plus, -ap * s.beta_plus + kI * W2);
    const Complex prefactor = kI / (2.0 * s.pi_ * W3);

    CorrelationTrace trace{tau_grid, {}, CorrelationMethod::ClosedForm};
    trace.values.reserve(tau_grid.size());
    for (double tau : tau_grid) {
        Complex sum(0.0);
        for (const Branch* b : {&first, &second}) {
            sum += b->amp_plus * std::exp(b->rate_plus * tau) + b->amp_minus * std::exp(b->rate_minus * tau);
        }
        trace.values.push_back(prefactor * sum);
    }
    return trace;
}

CorrelationTrace g1_qrt(const ChainParams& p, const std::vector<double>& tau_grid) {
    require_correlation_defined(p);
    const MomentState ss = steady_state(p);
    const double n_b = ss.population(ModeB);
    if (!(n_b > 0.0)) throw UndefinedCorrelation("<b^dag b>_ss vanishes");

    CorrelationTrace trace{tau_grid, {}, CorrelationMethod::QrtNumeric};
    if (tau_grid.empty()) return trace;
    const Trajectory traj = evolve_first_moments(build_dyn_matrix(p), regression_initial_vector(ss), tau_grid);
    trace.values.reserve(tau_grid.size());
    for (const auto& v : traj.states) trace.values.push_back(v(1) / n_b);
    return trace;
}

CorrelationTrace g1(const ChainParams& p, const std::vector<double>& tau_grid) {
    if (p.paper_regime() && away_from_ep_singularity(p)) return g1_closed_form(p, tau_grid);
    return g1_qrt(p, tau_grid);
}

CorrelationTrace g1_qrt_until_decayed(const ChainParams& p, double step, double tau_cap, double floor) {
    if (!(step > 0.0) || !(tau_cap > step)) throw std::invalid_argument("g1_qrt_until_decayed: bad step or cap");
    require_correlation_defined(p);
    const MomentState ss = steady_state(p);
    const double n_b = ss.population(ModeB);
    if (!(n_b > 0.0)) throw UndefinedCorrelation("<b^dag b>_ss vanishes");

    const DynMatrix dyn = build_dyn_matrix(p);
    const int chunk = std::max(16, static_cast<int>(std::lround(25.0 / (p.gamma * step))));
    const long max_samples = static_cast<long>(std::floor(tau_cap / step)) + 1;

    CorrelationTrace trace{{}, {}, CorrelationMethod::QrtNumeric};
    Vector6c state = regression_initial_vector(ss);
    trace.tau_grid.push_back(0.0);
    trace.values.push_back(state(1) / n_b);

    std::vector<double> local(static_cast<std::size_t>(chunk) + 1);
    for (int i = 0; i <= chunk; ++i) local[i] = i * step;

    while (static_cast<long>(trace.tau_grid.size()) < max_samples) {
        const long base = static_cast<long>(trace.tau_grid.size()) - 1;
        const long remaining = max_samples - 1 - base;
        const int n = static_cast<int>(std::min<long>(chunk, remaining));
        std::vector<double> t(local.begin(), local.begin() + n + 1);
        const Trajectory traj = evolve_first_moments(dyn, state, t);

        double tail = 0.0;
        for (int i = 1; i <= n; ++i) {
            trace.tau_grid.push_back(static_cast<double>(base + i) * step);
            const Complex g = traj.states[i](1) / n_b;
            trace.values.push_back(g);
            tail = std::max(tail, std::abs(g));
        }
        state = traj.states.back();
        if (tail < floor) break;
    }
    return trace;
}

}  // namespace trimer
