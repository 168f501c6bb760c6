#include "trimer/fock_oracle.hpp"

#include "trimer/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace trimer {

int FockConfig::dimension() const { return (cutoffs[0] + 1) * (cutoffs[1] + 1) * (cutoffs[2] + 1); }

void FockConfig::validate() const {
    for (int n : cutoffs) {
        if (n < 0) throw std::invalid_argument("FockConfig: negative cutoff");
    }
    if (dimension() > 10000) throw std::invalid_argument("FockConfig: Hilbert dimension above 1e4");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("FockConfig: dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("FockConfig: bad t_end");
    if (!(tolerance > 0.0)) throw std::invalid_argument("FockConfig: tolerance must be positive");
}

FockSpace::FockSpace(std::array<int, 3> cutoffs) : cutoffs_(cutoffs) {
    dim_ = (cutoffs[0] + 1) * (cutoffs[1] + 1) * (cutoffs[2] + 1);
    occ_.resize(static_cast<std::size_t>(dim_));
    for (int na = 0; na <= cutoffs[0]; ++na) {
        for (int nb = 0; nb <= cutoffs[1]; ++nb) {
            for (int nc = 0; nc <= cutoffs[2]; ++nc) occ_[static_cast<std::size_t>(index(na, nb, nc))] = {na, nb, nc};
        }
    }
    for (int mode = 0; mode < 3; ++mode) {
        std::vector<Eigen::Triplet<Complex>> entries;
        for (int s = 0; s < dim_; ++s) {
            auto n = occ_[static_cast<std::size_t>(s)];
            const int k = n[mode];
            if (k == 0) continue;
            n[mode] = k - 1;
            entries.emplace_back(index(n[0], n[1], n[2]), s, std::sqrt(static_cast<double>(k)));
        }
        lower_[mode].resize(dim_, dim_);
        lower_[mode].setFromTriplets(entries.begin(), entries.end());
    }
}

int FockSpace::index(int na, int nb, int nc) const {
    return (na * (cutoffs_[1] + 1) + nb) * (cutoffs_[2] + 1) + nc;
}

SparseOp FockSpace::hamiltonian(const ChainParams& p) const {
    const SparseOp& a = lower_[0];
    const SparseOp& b = lower_[1];
    const SparseOp& c = lower_[2];
    const SparseOp ad = raising(0);
    const SparseOp bd = raising(1);
    const SparseOp cd = raising(2);

    SparseOp h = Complex(p.delta_a) * SparseOp(ad * a);
    h += Complex(p.delta) * SparseOp(bd * b);
    h += Complex(p.delta_c) * SparseOp(cd * c);
    h += Complex(p.j) * SparseOp(SparseOp(ad * b) + SparseOp(a * bd) + SparseOp(bd * c) + SparseOp(b * cd));
    h += Complex(0.5 * p.omega_drive) * SparseOp(SparseOp(bd * bd) + SparseOp(b * b));
    h.prune(Complex(0.0));
    return h;
}

CMatrix FockSpace::vacuum() const {
    CMatrix rho = CMatrix::Zero(dim_, dim_);
    rho(0, 0) = 1.0;
    return rho;
}

double DensityOperator::trace_deviation() const { return std::abs(matrix.trace() - Complex(1.0)); }

double DensityOperator::hermiticity_defect() const {
    return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double DensityOperator::min_eigenvalue() const {
    const CMatrix herm = 0.5 * (matrix + matrix.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw SolverFailure("density-matrix eigensolver did not converge");
    return solver.eigenvalues()(0);
}

std::array<double, 3> DensityOperator::top_level_probability() const {
    const FockSpace space(cutoffs);
    std::array<double, 3> top{0.0, 0.0, 0.0};
    for (int s = 0; s < space.dimension(); ++s) {
        for (int mode = 0; mode < 3; ++mode) {
            if (space.occupation(s, mode) == cutoffs[mode]) top[mode] += matrix(s, s).real();
        }
    }
    return top;
}

Liouvillian::Liouvillian(const ChainParams& params, const FockSpace& space)
    : space_(space), gamma_(params.gamma) {
    const int dim = space.dimension();
    const SparseOp n_b = SparseOp(space.raising(1) * space.lowering(1));
    const SparseOp h_eff = space.hamiltonian(params) - Complex(0.0, params.gamma) * n_b;

    std::map<int, Eigen::VectorXcd> by_offset;
    for (int r = 0; r < h_eff.outerSize(); ++r) {
        for (SparseOp::InnerIterator it(h_eff, r); it; ++it) {
            auto [pos, fresh] = by_offset.try_emplace(static_cast<int>(it.col()) - r, Eigen::VectorXcd::Zero(dim));
            pos->second(r) += it.value();
        }
    }
    for (const auto& [offset, weight] : by_offset) {
        Diagonal d;
        d.offset = offset;
        d.weight_re = weight.real();
        d.weight_im = weight.imag();
        d.has_imag = d.weight_im.cwiseAbs().maxCoeff() > 0.0;
        d.lo = std::max(0, -offset);
        d.len = dim - std::abs(offset);
        diagonals_.push_back(std::move(d));
    }

    b_stride_ = space.cutoffs()[2] + 1;
    sqrt_raise_b_ = Eigen::VectorXd::Zero(dim);
    for (int s = 0; s < dim; ++s) {
        const int nb = space.occupation(s, 1);
        if (nb < space.cutoffs()[1]) sqrt_raise_b_(s) = std::sqrt(static_cast<double>(nb + 1));
    }
    for (Split* buf : {&k1_, &k2_, &stage_}) {
        buf->re.resize(dim, dim);
        buf->im.resize(dim, dim);
    }
}

void Liouvillian::apply_into(const Split& x, Split& out) const {
    const int dim = space_.dimension();
    const double g2 = 2.0 * gamma_;
    const int ob = b_stride_;
    for (int n = 0; n < dim; ++n) {
        auto re = out.re.col(n);
        auto im = out.im.col(n);
        re.setZero();
        im.setZero();
        const auto xr = x.re.col(n);
        const auto xi = x.im.col(n);
        for (const Diagonal& d : diagonals_) {
            // -i H_eff x
            const auto wr = d.weight_re.segment(d.lo, d.len);
            const auto sr = xr.segment(d.lo + d.offset, d.len);
            const auto si = xi.segment(d.lo + d.offset, d.len);
            re.segment(d.lo, d.len) += wr.cwiseProduct(si);
            im.segment(d.lo, d.len) -= wr.cwiseProduct(sr);
            if (d.has_imag) {
                const auto wi = d.weight_im.segment(d.lo, d.len);
                re.segment(d.lo, d.len) += wi.cwiseProduct(sr);
                im.segment(d.lo, d.len) += wi.cwiseProduct(si);
            }
            // +i x H_eff^dag: column n picks up column n + offset
            const int src = n + d.offset;
            const double cr = d.weight_re(n);
            const double ci = d.weight_im(n);
            if (src < 0 || src >= dim || (cr == 0.0 && ci == 0.0)) continue;
            re += ci * x.re.col(src) - cr * x.im.col(src);
            im += cr * x.re.col(src) + ci * x.im.col(src);
        }
        // 2 gamma b x b^dag
        const double sn = sqrt_raise_b_(n);
        if (sn != 0.0) {
            const auto s = sqrt_raise_b_.head(dim - ob);
            re.head(dim - ob) += (g2 * sn) * s.cwiseProduct(x.re.col(n + ob).tail(dim - ob));
            im.head(dim - ob) += (g2 * sn) * s.cwiseProduct(x.im.col(n + ob).tail(dim - ob));
        }
    }
}

void Liouvillian::step(Split& x, double dt) const {
    apply_into(x, k1_);
    stage_.re = x.re + (0.5 * dt) * k1_.re;
    stage_.im = x.im + (0.5 * dt) * k1_.im;
    apply_into(stage_, k2_);
    k1_.re += 2.0 * k2_.re;
    k1_.im += 2.0 * k2_.im;
    stage_.re = x.re + (0.5 * dt) * k2_.re;
    stage_.im = x.im + (0.5 * dt) * k2_.im;
    apply_into(stage_, k2_);
    k1_.re += 2.0 * k2_.re;
    k1_.im += 2.0 * k2_.im;
    stage_.re = x.re + dt * k2_.re;
    stage_.im = x.im + dt * k2_.im;
    apply_into(stage_, k2_);
    x.re += (dt / 6.0) * (k1_.re + k2_.re);
    x.im += (dt / 6.0) * (k1_.im + k2_.im);
}

CMatrix Liouvillian::apply(const CMatrix& x) const {
    const Split in{x.real(), x.imag()};
    Split out{Eigen::MatrixXd(x.rows(), x.cols()), Eigen::MatrixXd(x.rows(), x.cols())};
    apply_into(in, out);
    CMatrix result(x.rows(), x.cols());
    result.real() = out.re;
    result.imag() = out.im;
    return result;
}

void Liouvillian::rk4_steps(CMatrix& x, double dt, long n_steps) const {
    if (n_steps <= 0) return;
    Split state{x.real(), x.imag()};
    for (long k = 0; k < n_steps; ++k) step(state, dt);
    x.real() = state.re;
    x.imag() = state.im;
}

void Liouvillian::rk4_step(CMatrix& x, double dt) const { rk4_steps(x, dt, 1); }

namespace {

Complex expectation(const SparseOp& op, const CMatrix& rho) {
    Complex sum(0.0);
    for (int r = 0; r < op.outerSize(); ++r) {
        for (SparseOp::InnerIterator it(op, r); it; ++it) sum += it.value() * rho(it.col(), it.row());
    }
    return sum;
}

std::array<double, 3> populations(const FockSpace& space, const CMatrix& rho) {
    std::array<double, 3> pop{0.0, 0.0, 0.0};
    for (int s = 0; s < space.dimension(); ++s) {
        const double p = rho(s, s).real();
        for (int mode = 0; mode < 3; ++mode) pop[mode] += space.occupation(s, mode) * p;
    }
    return pop;
}

void check_invariants(const CMatrix& rho, bool hermitian, double t) {
    const double trace_dev = std::abs(rho.trace() - Complex(1.0));
    if (!(trace_dev <= 1e-9)) {
        throw SolverFailure("trace drifted by " + std::to_string(trace_dev) + " at t = " + std::to_string(t));
    }
    if (hermitian) {
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        if (!(herm <= 1e-10)) throw SolverFailure("density operator lost hermiticity at t = " + std::to_string(t));
    }
}

void check_saturation(const DensityOperator& rho, double threshold) {
    const auto top = rho.top_level_probability();
    static constexpr const char* names[] = {"a", "b", "c"};
    for (int mode = 0; mode < 3; ++mode) {
        if (rho.cutoffs[mode] == 0) continue;  // mode frozen in vacuum
        if (top[mode] > threshold) {
            throw CutoffSaturation(std::string("mode ") + names[mode] + " occupies its top Fock level with probability " +
                                   std::to_string(top[mode]));
        }
    }
}

}  // namespace

MomentVector fock_moments(const FockSpace& space, const CMatrix& rho) {
    std::array<SparseOp, 3> up;
    for (int i = 0; i < 3; ++i) up[i] = space.raising(i);
    MomentVector m;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m(normal_index(i, j)) = expectation(SparseOp(up[i] * space.lowering(j)), rho);
        for (int j = i; j < 3; ++j) {
            m(pair_index(i, j)) = expectation(SparseOp(space.lowering(i) * space.lowering(j)), rho);
            m(pair_dag_index(i, j)) = expectation(SparseOp(up[i] * up[j]), rho);
        }
    }
    return m;
}

DensityOperator evolve_rho(const ChainParams& params, const FockConfig& cfg, const DensityOperator& rho0) {
    params.validate();
    cfg.validate();
    if (rho0.cutoffs != cfg.cutoffs || rho0.matrix.rows() != cfg.dimension() || rho0.matrix.cols() != cfg.dimension()) {
        throw std::invalid_argument("evolve_rho: initial state does not match the cutoffs");
    }
    const FockSpace space(cfg.cutoffs);
    const Liouvillian liouv(params, space);
    const bool hermitian = rho0.hermiticity_defect() < 1e-12;

    const long steps = std::max(0L, static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-9)));
    const double h = steps > 0 ? cfg.t_end / static_cast<double>(steps) : 0.0;
    DensityOperator rho = rho0;
    for (long done = 0; done < steps; done += 100) {
        const long n = std::min(100L, steps - done);
        liouv.rk4_steps(rho.matrix, h, n);
        check_invariants(rho.matrix, hermitian, (done + n) * h);
    }
    check_saturation(rho, cfg.saturation_threshold);
    return rho;
}

FockSteadyState fock_steady_state(const ChainParams& params, const FockConfig& cfg) {
    params.validate();
    cfg.validate();
    const FockSpace space(cfg.cutoffs);
    const Liouvillian liouv(params, space);

    FockSteadyState out;
    out.rho.cutoffs = cfg.cutoffs;
    out.rho.matrix = space.vacuum();

    const long per_check = std::max(1L, std::lround(1.0 / (params.gamma * cfg.dt)));
    const double interval = per_check * cfg.dt;
    constexpr int kQuietChecks = 3;
    MomentVector prev = fock_moments(space, out.rho.matrix);
    long step = 0;
    int quiet = 0;
    while (out.t_reached + 0.5 * cfg.dt < cfg.t_end) {
        for (long done = 0; done < per_check; done += 100) {
            const long n = std::min(100L, per_check - done);
            liouv.rk4_steps(out.rho.matrix, cfg.dt, n);
            step += n;
            check_invariants(out.rho.matrix, true, step * cfg.dt);
        }
        out.t_reached = step * cfg.dt;
        const MomentVector m = fock_moments(space, out.rho.matrix);
        const double scale = m.cwiseAbs().maxCoeff();
        const double drift = (m - prev).cwiseAbs().maxCoeff();
        prev = m;
        const bool settled = scale == 0.0 ? drift == 0.0 : drift / (scale * interval) < cfg.tolerance;
        quiet = settled ? quiet + 1 : 0;
        if (quiet >= kQuietChecks) {
            out.converged = true;
            break;
        }
    }
    check_saturation(out.rho, cfg.saturation_threshold);
    return out;
}

CorrelationTrace oracle_g1(const FockSteadyState& ss, const ChainParams& params, const FockConfig& cfg,
                           const std::vector<double>& tau_grid) {
    if (!ss.converged) throw NoSteadyState("Fock-space state did not settle within t_end");
    if (ss.rho.cutoffs != cfg.cutoffs) throw std::invalid_argument("oracle_g1: steady state has different cutoffs");
    for (std::size_t i = 0; i < tau_grid.size(); ++i) {
        if (tau_grid[i] < 0.0 || (i > 0 && !(tau_grid[i] > tau_grid[i - 1]))) {
            throw std::invalid_argument("oracle_g1: tau grid must be non-negative and increasing");
        }
    }
    const FockSpace space(cfg.cutoffs);
    const Liouvillian liouv(params, space);
    const SparseOp& b = space.lowering(1);
    const double n_b = populations(space, ss.rho.matrix)[1];
    if (!(n_b > 0.0)) throw UndefinedCorrelation("<b^dag b>_ss vanishes");

    CMatrix sigma = ss.rho.matrix * space.raising(1);
    CorrelationTrace trace{tau_grid, {}, CorrelationMethod::FockOracle};
    trace.values.reserve(tau_grid.size());
    double t = 0.0;
    for (double tau : tau_grid) {
        const long steps = static_cast<long>(std::ceil((tau - t) / cfg.dt - 1e-9));
        if (steps > 0) {
            const double h = (tau - t) / static_cast<double>(steps);
            liouv.rk4_steps(sigma, h, steps);
        }
        t = tau;
        trace.values.push_back(expectation(b, sigma) / n_b);
    }
    return trace;
}

CorrelationTrace oracle_g1(const ChainParams& params, const FockConfig& cfg, const std::vector<double>& tau_grid) {
    return oracle_g1(fock_steady_state(params, cfg), params, cfg, tau_grid);
}

}  // namespace trimer
