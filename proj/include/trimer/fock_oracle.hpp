// fock_oracle.hpp — brute-force master-equation integration in a truncated
// three-mode Fock space. Used only to cross-check the moment-level results.
//
// Keep to Omega <= Omega_c / 2; near the exceptional point populations grow
// and no desk-scale cutoff is adequate.

#pragma once

#include "trimer/correlation.hpp"
#include "trimer/model.hpp"
#include "trimer/steady_state.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <vector>

namespace trimer {

using CMatrix = Eigen::MatrixXcd;
using SparseOp = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

struct FockConfig {
    std::array<int, 3> cutoffs{6, 8, 6};  // max occupation of a, b, c
    double dt = 2e-2;                     // RK4 step, units of 1/gamma
    double t_end = 400.0;
    double tolerance = 1e-5;              // relative moment drift per unit time
    double saturation_threshold = 1e-4;   // top-level occupation probability

    int dimension() const;
    // Throws std::invalid_argument on negative cutoffs, dimension > 1e4 or bad dt/t_end.
    void validate() const;
};

// Product basis |n_a n_b n_c>, index (n_a (N_b+1) + n_b)(N_c+1) + n_c.
class FockSpace {
public:
    explicit FockSpace(std::array<int, 3> cutoffs);

    int dimension() const { return dim_; }
    const std::array<int, 3>& cutoffs() const { return cutoffs_; }
    int index(int na, int nb, int nc) const;
    int occupation(int state, int mode) const { return occ_[static_cast<std::size_t>(state)][mode]; }

    const SparseOp& lowering(int mode) const { return lower_[mode]; }
    SparseOp raising(int mode) const { return SparseOp(lower_[mode].adjoint()); }

    SparseOp hamiltonian(const ChainParams& p) const;
    CMatrix vacuum() const;

private:
    std::array<int, 3> cutoffs_;
    int dim_ = 0;
    std::vector<std::array<int, 3>> occ_;
    std::array<SparseOp, 3> lower_;
};

struct DensityOperator {
    CMatrix matrix;
    std::array<int, 3> cutoffs{};

    double trace_deviation() const;        // |Tr rho - 1|
    double hermiticity_defect() const;     // max |rho - rho^dag|
    double min_eigenvalue() const;
    std::array<double, 3> top_level_probability() const;
};

// Matrix-free Lindblad generator. H_eff = H - i gamma b^dag b is stored by
// diagonals, so both H_eff x and x H_eff^dag reduce to shifted column updates.
// Internally operators are held as separate real and imaginary parts.
class Liouvillian {
public:
    Liouvillian(const ChainParams& params, const FockSpace& space);

    // -i [H, x] + gamma (2 b x b^dag - b^dag b x - x b^dag b) for any operator x.
    CMatrix apply(const CMatrix& x) const;

    // Classic RK4 step. Reuses internal buffers: one Liouvillian per thread.
    void rk4_step(CMatrix& x, double dt) const;
    // Same, n_steps times, without converting in between.
    void rk4_steps(CMatrix& x, double dt, long n_steps) const;
    const FockSpace& space() const { return space_; }

private:
    struct Split {
        Eigen::MatrixXd re, im;
    };
    struct Diagonal {
        int offset = 0;  // (H_eff)(m, m + offset) = weight[m]
        Eigen::VectorXd weight_re, weight_im;
        bool has_imag = false;
        int lo = 0, len = 0;  // rows with m + offset inside the basis
    };

    void apply_into(const Split& x, Split& out) const;
    void step(Split& x, double dt) const;

    const FockSpace& space_;
    double gamma_;
    std::vector<Diagonal> diagonals_;
    int b_stride_ = 0;
    Eigen::VectorXd sqrt_raise_b_;  // sqrt(n_b + 1), zero at the cutoff
    mutable Split k1_, k2_, stage_;
};

// <x_i^dag x_j>, <x_i x_j>, <x_i^dag x_j^dag> in the steady-state moment layout.
MomentVector fock_moments(const FockSpace& space, const CMatrix& rho);

// Integrates from rho0 up to cfg.t_end. Throws CutoffSaturation when the final
// state occupies the top level of any mode with probability above the threshold
// (modes with cutoff 0 are frozen in vacuum and exempt),
// SolverFailure when trace or hermiticity drift along the way.
DensityOperator evolve_rho(const ChainParams& params, const FockConfig& cfg, const DensityOperator& rho0);

struct FockSteadyState {
    DensityOperator rho;
    double t_reached = 0.0;
    bool converged = false;
};

// Evolves from vacuum until the second moments drift by less than cfg.tolerance
// per unit time on three consecutive checks, or cfg.t_end.
FockSteadyState fock_steady_state(const ChainParams& params, const FockConfig& cfg);

// Tr[b e^{L tau}(rho_ss b^dag)] / Tr[b^dag b rho_ss]. Throws NoSteadyState if the
// drift criterion is not met by cfg.t_end.
CorrelationTrace oracle_g1(const ChainParams& params, const FockConfig& cfg, const std::vector<double>& tau_grid);
CorrelationTrace oracle_g1(const FockSteadyState& ss, const ChainParams& params, const FockConfig& cfg,
                           const std::vector<double>& tau_grid);

}  // namespace trimer
