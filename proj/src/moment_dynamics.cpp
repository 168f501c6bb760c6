#include "trimer/moment_dynamics.hpp"

#include "trimer/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace trimer {

namespace {

double overlap(const Vector6c& u, const Vector6c& v) {
    const double nu = u.norm();
    const double nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return std::abs(u.dot(v)) / (nu * nv);
}

int find_root(std::array<int, 6>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

bool same_semisimple_cluster(const EigenSet& es, int i, int j) {
    if (es.cluster_labels[i] != es.cluster_labels[j]) return false;
    return !es.clusters[es.cluster_labels[i]].defective();
}

// Golden-section search for a minimum of f on [lo, hi].
template <class F>
double golden_minimize(F&& f, double lo, double hi, double tol, int max_iter = 400) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    int iter = 0;
    while (b - a > tol) {
        if (++iter > max_iter) throw SolverFailure("golden-section refinement did not converge");
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

std::array<Complex, 6> eigenvalues_only(const Matrix6c& h) {
    Eigen::ComplexEigenSolver<Matrix6c> solver(h, false);
    if (solver.info() != Eigen::Success) throw SolverFailure("eigenvalue solver did not converge");
    std::array<Complex, 6> out;
    for (int i = 0; i < 6; ++i) out[i] = solver.eigenvalues()(i);
    return out;
}

}  // namespace

double EigenSet::max_pair_overlap() const {
    double best = 0.0;
    for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) {
            if (same_semisimple_cluster(*this, i, j)) continue;
            best = std::max(best, overlap(eigenvectors.col(i), eigenvectors.col(j)));
        }
    }
    return best;
}

double EigenSet::min_coalescing_gap(double min_overlap) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) {
            if (same_semisimple_cluster(*this, i, j)) continue;
            if (overlap(eigenvectors.col(i), eigenvectors.col(j)) < min_overlap) continue;
            best = std::min(best, std::abs(eigenvalues[i] - eigenvalues[j]));
        }
    }
    return best;
}

EigenSet eig(const DynMatrix& dyn, const EigOptions& opts) {
    const Matrix6c& h = dyn.entries;
    if (!h.allFinite()) throw std::invalid_argument("eig: non-finite matrix entries");

    Eigen::ComplexEigenSolver<Matrix6c> solver(h, true);
    if (solver.info() != Eigen::Success) throw SolverFailure("eigenvalue solver did not converge");

    EigenSet es;
    es.eigenvectors = solver.eigenvectors();
    for (int i = 0; i < 6; ++i) {
        es.eigenvalues[i] = solver.eigenvalues()(i);
        const double n = es.eigenvectors.col(i).norm();
        if (n > 0.0) es.eigenvectors.col(i) /= n;
    }

    std::array<int, 6> parent;
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < 6; ++i) {
        for (int j = i + 1; j < 6; ++j) {
            if (std::abs(es.eigenvalues[i] - es.eigenvalues[j]) < opts.cluster_tol) {
                parent[find_root(parent, j)] = find_root(parent, i);
            }
        }
    }

    std::array<int, 6> root_to_label;
    root_to_label.fill(-1);
    for (int i = 0; i < 6; ++i) {
        const int r = find_root(parent, i);
        if (root_to_label[r] < 0) {
            root_to_label[r] = static_cast<int>(es.clusters.size());
            es.clusters.emplace_back();
        }
        es.cluster_labels[i] = root_to_label[r];
        es.clusters[root_to_label[r]].members.push_back(i);
    }

    const double scale = std::max(1.0, h.norm());
    for (auto& cl : es.clusters) {
        Complex sum(0.0);
        for (int m : cl.members) sum += es.eigenvalues[m];
        cl.centroid = sum / static_cast<double>(cl.members.size());
        if (cl.members.size() < 2) continue;

        double spread = 0.0;
        for (int m : cl.members) spread = std::max(spread, std::abs(es.eigenvalues[m] - cl.centroid));

        const Matrix6c shifted = h - cl.centroid * Matrix6c::Identity();
        Eigen::JacobiSVD<Matrix6c> svd(shifted, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        const double threshold = std::max(opts.rank_tol * scale, 2.0 * spread);
        int nullity = 0;
        for (int k = 0; k < 6; ++k) {
            if (sv(k) < threshold) ++nullity;
        }
        cl.geometric_multiplicity = std::min(nullity, cl.order());

        if (!cl.defective()) {
            // Orthonormal basis of the eigenspace: right singular vectors of the
            // smallest singular values.
            const int m = cl.order();
            for (int k = 0; k < m; ++k) {
                es.eigenvectors.col(cl.members[k]) = svd.matrixV().col(5 - k);
            }
            cl.defect_measure = 0.0;
            continue;
        }
        double worst = 0.0;
        for (std::size_t a = 0; a < cl.members.size(); ++a) {
            for (std::size_t b = a + 1; b < cl.members.size(); ++b) {
                worst = std::max(worst, overlap(es.eigenvectors.col(cl.members[a]),
                                                es.eigenvectors.col(cl.members[b])));
            }
        }
        cl.defect_measure = std::clamp(worst, 0.0, 1.0);
    }
    return es;
}

Knob parse_knob(std::string_view name) {
    if (name == "omega" || name == "omega_drive" || name == "omega-drive") return Knob::OmegaDrive;
    if (name == "delta") return Knob::Delta;
    if (name == "j") return Knob::J;
    if (name == "gamma") return Knob::Gamma;
    if (name == "delta_a" || name == "delta-a") return Knob::DeltaA;
    if (name == "delta_c" || name == "delta-c") return Knob::DeltaC;
    throw std::invalid_argument("unknown knob '" + std::string(name) + "'");
}

std::string_view knob_name(Knob knob) {
    switch (knob) {
        case Knob::OmegaDrive: return "omega";
        case Knob::Delta: return "delta";
        case Knob::J: return "j";
        case Knob::Gamma: return "gamma";
        case Knob::DeltaA: return "delta_a";
        case Knob::DeltaC: return "delta_c";
    }
    return "?";
}

ChainParams with_knob(ChainParams p, Knob knob, double value) {
    switch (knob) {
        case Knob::OmegaDrive: p.omega_drive = value; break;
        case Knob::Delta: p.delta = value; break;
        case Knob::J: p.j = value; break;
        case Knob::Gamma: p.gamma = value; break;
        case Knob::DeltaA: p.delta_a = value; break;
        case Knob::DeltaC: p.delta_c = value; break;
    }
    return p;
}

std::vector<EpRecord> detect_ep(const ChainParams& params, Knob knob, double lo, double hi,
                                double tol, const EpSearchOptions& opts) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw std::invalid_argument("detect_ep: range must be finite with lo < hi");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("detect_ep: tol must be > 0");
    if (opts.scan_points < 3) throw std::invalid_argument("detect_ep: need >= 3 scan points");

    auto eigen_at = [&](double k) {
        return eig(build_dyn_matrix(with_knob(params, knob, k)), EigOptions{tol, 1e-8});
    };
    auto defect_gap = [&](double k) { return 1.0 - eigen_at(k).max_pair_overlap(); };

    const int n = opts.scan_points;
    const double step = (hi - lo) / (n - 1);
    std::vector<double> knobs(n);
    std::vector<double> measure(n);
    for (int i = 0; i < n; ++i) {
        knobs[i] = (i == n - 1) ? hi : lo + i * step;
        measure[i] = 1.0 - defect_gap(knobs[i]);
    }

    std::vector<EpRecord> found;
    for (int i = 1; i + 1 < n; ++i) {
        if (!(measure[i] >= measure[i - 1] && measure[i] > measure[i + 1])) continue;
        double a = knobs[i - 1];
        double b = knobs[i + 1];
        const double coarse = golden_minimize(defect_gap, a, b, opts.knob_tol);

        // Eigenvalue splitting scales like sqrt(|k - k_EP|), so it pins the
        // EP far more sharply than the overlap does.
        const double window = std::max(10.0 * opts.knob_tol, 1e-3 * step);
        a = std::max(a, coarse - window);
        b = std::min(b, coarse + window);
        const double polish_tol = 1e-15 * std::max(1.0, std::abs(coarse));
        const double k_ep = golden_minimize(
            [&](double k) { return eigen_at(k).min_coalescing_gap(0.9); }, a, b, polish_tol);

        const EigenSet es = eigen_at(k_ep);
        EpRecord rec{k_ep, {}};
        for (const auto& cl : es.clusters) {
            if (!cl.defective()) continue;
            double spread = 0.0;
            for (int m : cl.members) {
                for (int q : cl.members) {
                    spread = std::max(spread, std::abs(es.eigenvalues[m] - es.eigenvalues[q]));
                }
            }
            if (spread < tol && cl.defect_measure > 1.0 - tol) {
                rec.clusters.push_back(EpCluster{cl.centroid, cl.order(), cl.defect_measure, spread});
            }
        }
        if (rec.clusters.empty()) continue;
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const EpRecord& r) {
            return std::abs(r.knob_value - k_ep) < 10.0 * opts.knob_tol;
        });
        if (!duplicate) found.push_back(std::move(rec));
    }
    return found;
}

SweepTrace sweep_eigenvalues(const ChainParams& params, Knob knob, const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("sweep_eigenvalues: grid needs >= 2 points");
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw std::invalid_argument("sweep_eigenvalues: grid must be sorted");
    }

    SweepTrace trace;
    trace.knob = knob;
    trace.grid = grid;
    for (auto& br : trace.branches) br.reserve(grid.size());
    trace.stable.reserve(grid.size());

    std::array<Complex, 6> previous{};
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const ChainParams p = with_knob(params, knob, grid[k]);
        std::array<Complex, 6> ev = eigenvalues_only(build_dyn_matrix(p).entries);

        double max_im = -std::numeric_limits<double>::infinity();
        for (const auto& l : ev) max_im = std::max(max_im, l.imag());
        const bool stable = (!p.paper_regime() || below_critical_drive(p)) && max_im <= 1e-9;
        trace.stable.push_back(stable);

        if (k == 0) {
            std::sort(ev.begin(), ev.end(), [](Complex x, Complex y) {
                return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
            });
        } else {
            // Exhaustive assignment over the 720 permutations.
            std::array<int, 6> perm;
            std::iota(perm.begin(), perm.end(), 0);
            std::array<int, 6> best_perm = perm;
            double best_cost = std::numeric_limits<double>::infinity();
            do {
                double cost = 0.0;
                for (int b = 0; b < 6 && cost < best_cost; ++b) cost += std::abs(previous[b] - ev[perm[b]]);
                if (cost < best_cost) {
                    best_cost = cost;
                    best_perm = perm;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            std::array<Complex, 6> ordered;
            for (int b = 0; b < 6; ++b) ordered[b] = ev[best_perm[b]];
            ev = ordered;
        }
        for (int b = 0; b < 6; ++b) trace.branches[b].push_back(ev[b]);
        previous = ev;
    }
    return trace;
}

Trajectory evolve_first_moments(const DynMatrix& dyn, const Vector6c& psi0,
                                const std::vector<double>& t_grid, const EvolveOptions& opts) {
    namespace odeint = boost::numeric::odeint;
    using State = std::array<Complex, 6>;

    if (t_grid.empty()) return {};
    if (t_grid.front() != 0.0) throw std::invalid_argument("evolve_first_moments: t_grid must start at 0");
    if (!std::is_sorted(t_grid.begin(), t_grid.end()) ||
        std::adjacent_find(t_grid.begin(), t_grid.end()) != t_grid.end()) {
        throw std::invalid_argument("evolve_first_moments: t_grid must be strictly increasing");
    }

    const Matrix6c generator = -kI * dyn.entries;
    auto rhs = [&generator](const State& x, State& dxdt, double /*t*/) {
        for (int r = 0; r < 6; ++r) {
            Complex acc(0.0);
            for (int c = 0; c < 6; ++c) acc += generator(r, c) * x[c];
            dxdt[r] = acc;
        }
    };

    State x;
    for (int i = 0; i < 6; ++i) x[i] = psi0(i);

    Trajectory traj;
    traj.times.reserve(t_grid.size());
    traj.states.reserve(t_grid.size());
    auto observer = [&traj](const State& s, double t) {
        traj.times.push_back(t);
        Vector6c v;
        for (int i = 0; i < 6; ++i) v(i) = s[i];
        traj.states.push_back(v);
    };

    if (t_grid.size() == 1) {
        observer(x, 0.0);
        return traj;
    }

    const double rate = std::max(1.0, generator.cwiseAbs().rowwise().sum().maxCoeff());
    const double dt0 = std::min(1e-3 / rate, t_grid[1] - t_grid[0]);
    auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
    try {
        odeint::integrate_times(stepper, rhs, x, t_grid.begin(), t_grid.end(), dt0, observer,
                                odeint::max_step_checker(1000000));
    } catch (const odeint::odeint_error& e) {
        throw StepSizeUnderflow(std::string("first-moment integration failed: ") + e.what());
    }
    return traj;
}

}  // namespace trimer
