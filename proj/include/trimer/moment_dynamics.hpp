// moment_dynamics.hpp — numeric eigenstructure of the dynamical matrix,
// exceptional-point detection, branch-continuous sweeps and first-moment
// time evolution.

#pragma once

#include "trimer/model.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace trimer {

struct EigenCluster {
    std::vector<int> members;        // indices into EigenSet::eigenvalues
    Complex centroid;
    int geometric_multiplicity = 1;  // nullity of (H - centroid)
    double defect_measure = 0.0;     // max |<u_i,u_j>| over member pairs, 0 when semisimple

    int order() const noexcept { return static_cast<int>(members.size()); }
    bool defective() const noexcept { return geometric_multiplicity < order(); }
};

struct EigenSet {
    std::array<Complex, 6> eigenvalues{};
    Matrix6c eigenvectors;            // unit-norm columns
    std::array<int, 6> cluster_labels{};
    std::vector<EigenCluster> clusters;

    // Largest |overlap| between eigenvectors of distinct eigenvalues, outside
    // semisimple clusters. Tends to 1 at an exceptional point.
    double max_pair_overlap() const;

    // Smallest eigenvalue gap among pairs whose eigenvectors overlap by more
    // than min_overlap; +inf when no such pair exists.
    double min_coalescing_gap(double min_overlap = 0.9) const;
};

struct EigOptions {
    double cluster_tol = 1e-6;  // eigenvalue clustering radius (absolute)
    double rank_tol = 1e-8;     // relative singular-value threshold for nullity
};

// Full eigendecomposition. Defective clusters keep the solver's (nearly
// parallel) eigenvectors; semisimple degenerate clusters are replaced by an
// orthonormal basis of the eigenspace. Throws SolverFailure.
EigenSet eig(const DynMatrix& dyn, const EigOptions& opts = {});

enum class Knob { OmegaDrive, Delta, J, Gamma, DeltaA, DeltaC };

Knob parse_knob(std::string_view name);
std::string_view knob_name(Knob knob);
ChainParams with_knob(ChainParams params, Knob knob, double value);

struct EpCluster {
    Complex eigenvalue;
    int order = 0;
    double overlap = 0.0;
    double gap = 0.0;  // largest distance of a member from the centroid
};

struct EpRecord {
    double knob_value = 0.0;
    std::vector<EpCluster> clusters;
};

struct EpSearchOptions {
    int scan_points = 401;
    double knob_tol = 1e-6;  // golden-section tolerance on the defectiveness
};

// Scan the knob over [lo, hi] on the eigenvector-overlap measure, refine every
// interior local maximum, and keep points where some cluster has eigenvalue gap
// < tol and overlap > 1 - tol. Empty result when no EP lies inside the range.
std::vector<EpRecord> detect_ep(const ChainParams& params, Knob knob, double lo, double hi,
                                double tol, const EpSearchOptions& opts = {});

struct SweepTrace {
    Knob knob = Knob::OmegaDrive;
    std::vector<double> grid;
    std::array<std::vector<Complex>, 6> branches;
    std::vector<bool> stable;  // Omega < Omega_c and all Im(lambda) <= 0
};

// Branches are continued across the grid by minimum-cost assignment.
SweepTrace sweep_eigenvalues(const ChainParams& params, Knob knob, const std::vector<double>& grid);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector6c> states;
};

struct EvolveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
};

// Adaptive Dormand-Prince integration of dPsi/dt = -i H Psi, sampled on
// t_grid (increasing, starting at 0). Throws StepSizeUnderflow.
Trajectory evolve_first_moments(const DynMatrix& dyn, const Vector6c& psi0,
                                const std::vector<double>& t_grid, const EvolveOptions& opts = {});

}  // namespace trimer
