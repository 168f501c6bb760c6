#include "trimer/spectrum.hpp"

#include "trimer/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace trimer {

namespace {

constexpr double kPi = std::numbers::pi;

void require_spectrum_defined(const ChainParams& p, const char* who) {
    p.validate();
    if (!p.paper_regime()) throw OutsidePaperRegime(who);
    if (!below_critical_drive(p)) {
        throw NoSteadyState("drive at or above critical strength sqrt(gamma^2 + Delta^2)");
    }
}

bool is_uniform(const std::vector<double>& g, double& step) {
    if (g.size() < 2) return false;
    step = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (std::abs((g[i] - g[i - 1]) - step) > 1e-9 * std::abs(step)) return false;
    }
    return step > 0.0;
}

SpectrumTrace make_trace(const std::vector<double>& grid, std::vector<double> values, SpectrumMethod m) {
    SpectrumTrace t{grid, std::move(values), {}, m};
    t.peaks = find_peaks(t);
    return t;
}

}  // namespace

std::string_view method_name(SpectrumMethod m) {
    switch (m) {
        case SpectrumMethod::ClosedForm: return "closed_form";
        case SpectrumMethod::LorentzianSum: return "lorentzian_sum";
        case SpectrumMethod::ExceptionalPoint: return "exceptional_point";
        case SpectrumMethod::FourierNumeric: return "fourier_numeric";
    }
    return "?";
}

double spectrum_rational(const ChainParams& p, double w) {
    const double g = p.gamma;
    const double g2 = g * g;
    const double pi2 = p.omega_drive * p.omega_drive - p.delta * p.delta;  // Pi^2, real
    const double w2 = w * w;
    const double w4 = w2 * w2;
    const double lead = g2 * g2 + 2.0 * g2 * (w2 - pi2) + (pi2 + w2) * (pi2 + w2);
    const double num_scale = 2.0 * g * (g2 - pi2);

    if (p.j == 0.0) return num_scale / (kPi * lead);

    const double j2 = p.j * p.j;
    const double j4 = j2 * j2;
    const double den = w4 * lead + 16.0 * j4 * j4 - 32.0 * j4 * j2 * w2 + 8.0 * j4 * w2 * (g2 + pi2 + 3.0 * w2) -
                       8.0 * j2 * w4 * (g2 + pi2 + w2);
    return num_scale * w4 / (kPi * den);
}

double spectrum_lorentzian_sum(const ChainParams& p, double w, double eps_ep) {
    if (!away_from_ep_singularity(p, eps_ep)) {
        throw NearEPSingularity("Lorentzian assembly is singular near Pi = 0 or omega_pm = 0");
    }
    if (p.omega_drive == 0.0) throw UndefinedCorrelation("undriven chain: <b^dag b>_ss = 0");
    const DerivedScalars s = derived_scalars(p);
    const double W = p.omega_drive;
    const double W2 = W * W;
    const double W3 = W2 * W;
    const Complex ap = s.alpha_plus;

    const Complex s1 = 0.5 * s.gamma_plus - kI * w;
    const Complex s3 = 0.5 * s.gamma_minus - kI * w;
    const Complex hm = 0.5 * s.omega_minus;
    const Complex hp = 0.5 * s.omega_plus;
    const Complex den1 = hm * hm + s1 * s1;
    const Complex den3 = hp * hp + s3 * s3;
    const Complex f1 = s1 / den1;
    const Complex f2 = hm / den1;
    const Complex f3 = s3 / den3;
    const Complex f4 = hp / den3;

    const Complex first = (W3 + kI * ap * s.beta_plus * W) / s.omega_minus *
                          (s.beta_minus * s.omega_minus * f1 - (ap * s.beta_minus - kI * W2) * f2);
    const Complex second = (W3 + kI * ap * s.beta_minus * W) / s.omega_plus *
                           (s.beta_plus * s.omega_plus * f3 - (ap * s.beta_plus - kI * W2) * f4);
    const Complex fs = kI / (2.0 * s.pi_ * W3) * (first - second);
    return fs.real() / kPi;
}

double spectrum_ep_value(const ChainParams& p, double w) {
    const double g = p.gamma;
    const double g3 = g * g * g;
    if (p.j == 0.0) {
        const double d = g * g + w * w;
        return 2.0 * g3 / (kPi * d * d);
    }
    const double w2 = w * w;
    const double shift = w2 - 2.0 * p.j * p.j;
    const double d = g * g * w2 + shift * shift;
    return 2.0 * g3 * w2 * w2 / (kPi * d * d);
}

double spectrum_ep_factored(const ChainParams& p, double w) {
    const double g = p.gamma;
    const double g3 = g * g * g;
    const double half = 0.5 * g;
    const double disc = 2.0 * p.j * p.j - half * half;
    if (p.j == 0.0) {
        // Both factorisations carry a w^4 that cancels the numerator.
        const double d = g * g + w * w;
        return 2.0 * g3 / (kPi * d * d);
    }
    const double w4 = w * w * w * w;
    double product;
    if (disc >= 0.0) {
        // Coalesced eigenvalues -i gamma/2 +- w1 with w1 real.
        const double w1 = std::sqrt(disc);
        product = (half * half + (w - w1) * (w - w1)) * (half * half + (w + w1) * (w + w1));
    } else {
        // Purely imaginary coalesced eigenvalues -i (gamma/2 -+ w2).
        const double w2 = std::sqrt(-disc);
        product = ((half - w2) * (half - w2) + w * w) * ((half + w2) * (half + w2) + w * w);
    }
    return 2.0 * g3 * w4 / (kPi * product * product);
}

SpectrumTrace spectrum_closed_form(const ChainParams& p, const std::vector<double>& grid, ClosedFormPath path) {
    require_spectrum_defined(p, "spectrum_closed_form");
    if (p.omega_drive == 0.0) throw UndefinedCorrelation("undriven chain: <b^dag b>_ss = 0");
    std::vector<double> values;
    values.reserve(grid.size());
    if (path == ClosedFormPath::Rational) {
        for (double w : grid) values.push_back(spectrum_rational(p, w));
        return make_trace(grid, std::move(values), SpectrumMethod::ClosedForm);
    }
    for (double w : grid) values.push_back(spectrum_lorentzian_sum(p, w));
    return make_trace(grid, std::move(values), SpectrumMethod::LorentzianSum);
}

SpectrumTrace spectrum_ep(const ChainParams& p, const std::vector<double>& grid) {
    require_spectrum_defined(p, "spectrum_ep");
    if (p.omega_drive != std::abs(p.delta)) {
        throw std::invalid_argument("spectrum_ep: requires omega_drive == |delta|");
    }
    std::vector<double> values;
    values.reserve(grid.size());
    for (double w : grid) values.push_back(spectrum_ep_value(p, w));
    return make_trace(grid, std::move(values), SpectrumMethod::ExceptionalPoint);
}

SpectrumTrace spectrum_fourier(const CorrelationTrace& trace, const std::vector<double>& omega_grid,
                               double decay_floor) {
    const auto& tau = trace.tau_grid;
    const auto& g = trace.values;
    if (tau.size() < 3 || g.size() != tau.size()) {
        throw std::invalid_argument("spectrum_fourier: trace needs >= 3 samples");
    }
    if (tau.front() != 0.0) throw std::invalid_argument("spectrum_fourier: trace must start at tau = 0");
    double h = 0.0;
    if (!is_uniform(tau, h)) throw std::invalid_argument("spectrum_fourier: tau grid must be uniform");

    const std::size_t n = g.size();
    const std::size_t tail_start = n - std::max<std::size_t>(1, n / 50);
    double tail = 0.0;
    for (std::size_t k = tail_start; k < n; ++k) tail = std::max(tail, std::abs(g[k]));
    if (!(tail < decay_floor)) {
        std::ostringstream os;
        os << "|g1| = " << tail << " at tau = " << tau.back() << " has not decayed below " << decay_floor;
        throw InsufficientDecay(os.str());
    }

    std::vector<double> values;
    values.reserve(omega_grid.size());
    for (double w : omega_grid) {
        // e^{i w tau_k} by repeated multiplication, renormalised periodically.
        const Complex rot = std::exp(kI * (w * h));
        Complex phase(1.0);
        Complex acc = 0.5 * g[0];
        for (std::size_t k = 1; k < n; ++k) {
            phase *= rot;
            if ((k & 1023u) == 0) phase = std::exp(kI * (w * tau[k]));
            acc += (k + 1 == n ? 0.5 : 1.0) * g[k] * phase;
        }
        values.push_back((acc * h).real() / kPi);
    }
    return make_trace(omega_grid, std::move(values), SpectrumMethod::FourierNumeric);
}

SpectrumTrace spectrum_fourier(const ChainParams& p, const std::vector<double>& omega_grid, double tau_cap) {
    double w_max = 0.0;
    for (double w : omega_grid) w_max = std::max(w_max, std::abs(w));
    double step = 0.01 / p.gamma;
    if (w_max > 0.0) step = std::min(step, 0.1 / w_max);
    const CorrelationTrace trace = g1_qrt_until_decayed(p, step, tau_cap);
    return spectrum_fourier(trace, omega_grid);
}

std::vector<Peak> find_peaks(const SpectrumTrace& spec, const PeakOptions& opts) {
    const auto& x = spec.omega_grid;
    const auto& y = spec.values;
    std::vector<Peak> peaks;
    if (x.size() < 3 || y.size() != x.size()) return peaks;

    const double global = *std::max_element(y.begin(), y.end());
    if (!(global > 0.0)) return peaks;
    const double threshold = opts.threshold_fraction * global;

    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= threshold)) continue;

        // Vertex of the parabola through the three samples.
        const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
        const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
        const double d01 = (y1 - y0) / (x1 - x0);
        const double d12 = (y2 - y1) / (x2 - x1);
        const double curv = (d12 - d01) / (x2 - x0);
        Peak pk{x1, y1, std::numeric_limits<double>::quiet_NaN()};
        if (curv < 0.0) {
            // Newton form y0 + d01 (x - x0) + curv (x - x0)(x - x1).
            const double vertex = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
            if (vertex > x0 && vertex < x2) {
                pk.position = vertex;
                pk.height = y0 + d01 * (vertex - x0) + curv * (vertex - x0) * (vertex - x1);
            }
        }

        const double half = 0.5 * pk.height;
        double left = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = i; k > 0; --k) {
            if (y[k - 1] < half) {
                left = x[k - 1] + (half - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1]);
                break;
            }
        }
        double right = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = i; k + 1 < y.size(); ++k) {
            if (y[k + 1] < half) {
                right = x[k] + (y[k] - half) * (x[k + 1] - x[k]) / (y[k] - y[k + 1]);
                break;
            }
        }
        pk.fwhm = right - left;
        peaks.push_back(pk);
    }

    // Merge neighbours closer than merge_steps local grid steps, keeping the taller.
    std::vector<Peak> merged;
    for (const Peak& pk : peaks) {
        if (!merged.empty()) {
            const auto it = std::lower_bound(x.begin(), x.end(), pk.position);
            const std::size_t idx = std::clamp<std::size_t>(static_cast<std::size_t>(it - x.begin()), 1, x.size() - 1);
            const double local_step = x[idx] - x[idx - 1];
            if (pk.position - merged.back().position < opts.merge_steps * local_step) {
                if (pk.height > merged.back().height) merged.back() = pk;
                continue;
            }
        }
        merged.push_back(pk);
    }
    return merged;
}

CouplingEstimate estimate_coupling(const SpectrumTrace& spec, const PeakOptions& opts) {
    const std::vector<Peak> peaks = find_peaks(spec, opts);
    if (peaks.size() != 2) {
        throw NotDoublet("coupling estimation needs exactly 2 peaks, found " + std::to_string(peaks.size()));
    }
    CouplingEstimate est;
    est.separation = peaks[1].position - peaks[0].position;
    est.j_hat = est.separation / (2.0 * std::numbers::sqrt2);

    const double asym = std::abs(peaks[0].position + peaks[1].position);
    if (asym > 1e-3 * est.separation) {
        std::ostringstream os;
        os << "peaks not symmetric about 0 (centre offset " << asym << ")";
        est.notes.push_back(os.str());
    }
    const double height_ratio = peaks[0].height / peaks[1].height;
    if (std::abs(height_ratio - 1.0) > 1e-2) {
        std::ostringstream os;
        os << "peak heights differ (ratio " << height_ratio << ")";
        est.notes.push_back(os.str());
    }
    if (spec.omega_grid.size() >= 2) {
        const double step = (spec.omega_grid.back() - spec.omega_grid.front()) /
                            static_cast<double>(spec.omega_grid.size() - 1);
        std::ostringstream os;
        os << "grid step " << step << " (parabolic refinement)";
        est.notes.push_back(os.str());
    }
    return est;
}

double trace_integral(const SpectrumTrace& spec) {
    const auto& x = spec.omega_grid;
    const auto& y = spec.values;
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size() && i < y.size(); ++i) sum += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return sum;
}

double spectrum_total_weight(const ChainParams& p) {
    require_spectrum_defined(p, "spectrum_total_weight");
    using boost::math::quadrature::gauss_kronrod;
    const double inf = std::numeric_limits<double>::infinity();
    auto f = [&p](double w) { return spectrum_rational(p, w); };
    // Split at 0 and at the natural peak scale so narrow lines are not stepped over.
    const double scale = std::max({p.gamma, std::numbers::sqrt2 * p.j, 1e-3});
    double total = 0.0;
    const double cuts[] = {-inf, -4.0 * scale, -scale, 0.0, scale, 4.0 * scale, inf};
    for (int k = 0; k + 1 < 7; ++k) {
        total += gauss_kronrod<double, 61>::integrate(f, cuts[k], cuts[k + 1], 20, 1e-12);
    }
    return total;
}

}  // namespace trimer
