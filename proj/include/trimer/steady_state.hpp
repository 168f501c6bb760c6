// steady_state.hpp — closed linear ODE for the 21 second moments, derived by
// normal-ordered commutator expansion of the master equation, and its
// vacuum-initialised steady state.

#pragma once

#include "trimer/boson_algebra.hpp"
#include "trimer/model.hpp"

#include <Eigen/Dense>

#include <string>

namespace trimer {

inline constexpr int kNumMoments = 21;
using MomentVector = Eigen::Matrix<Complex, kNumMoments, 1>;
using MomentMatrix = Eigen::Matrix<Complex, kNumMoments, kNumMoments>;

enum Mode : int { ModeA = 0, ModeB = 1, ModeC = 2 };

// Index layout of MomentVector:
//   [0, 9)   <x_i^dag x_j>    at 3*i + j
//   [9, 15)  <x_i x_j>        for i <= j: (aa, ab, ac, bb, bc, cc)
//   [15, 21) <x_i^dag x_j^dag> same pair order
int normal_index(int i, int j);
int pair_index(int i, int j);
int pair_dag_index(int i, int j);
std::string moment_label(int index);

// Moment of the canonical (normal-ordered) quadratic word, or -1 if the word is
// not one of the 21 quadratic monomials.
int moment_index(const boson::Word& w);

struct MomentState {
    Eigen::Matrix3cd normal = Eigen::Matrix3cd::Zero();    // (i,j) -> <x_i^dag x_j>
    Eigen::Matrix3cd pair = Eigen::Matrix3cd::Zero();      // symmetric <x_i x_j>
    Eigen::Matrix3cd pair_dag = Eigen::Matrix3cd::Zero();  // symmetric <x_i^dag x_j^dag>

    MomentVector to_vector() const;
    static MomentState from_vector(const MomentVector& m);

    double population(int mode) const { return normal(mode, mode).real(); }
};

struct MomentSystem {
    MomentMatrix system_matrix;  // A
    MomentVector drive_vector;   // d, with dm/dt = A m + d
    int nullity = 0;             // numerical dimension of ker A
};

// Hamiltonian of the rotating-frame trimer as a normal-ordered polynomial.
boson::Polynomial hamiltonian(const ChainParams& params);

// Heisenberg-picture generator: i[H, O] + gamma (2 b^dag O b - b^dag b O - O b^dag b).
boson::Polynomial adjoint_generator(const ChainParams& params, const boson::Polynomial& observable);

MomentSystem build_moment_system(const ChainParams& params);

// Number of conserved quadratic moments implied by the first-moment spectrum
// (pairs i <= j with lambda_i + lambda_j = 0).
int catalogued_dark_moments(const ChainParams& params);

// Solves A m = -d with the conserved (dark-sector) moments pinned to their
// vacuum values. Throws NoSteadyState, SingularBeyondDarkSector, SolverFailure.
MomentState steady_state(const MomentSystem& system, const ChainParams& params);

MomentState steady_state(const ChainParams& params);

// (<b^dag a>, <b^dag b>, <b^dag c>, <b^dag a^dag>, <b^dag b^dag>, <b^dag c^dag>):
// the tau = 0 data of the regression equation.
Vector6c regression_initial_vector(const MomentState& state);

// Closed-form steady-state moments of the resonant chain (J > 0 for A and C).
// Throw OutsidePaperRegime.
double closed_form_population_b(const ChainParams& params);
double closed_form_population_a(const ChainParams& params);
Complex closed_form_pair_dag_b(const ChainParams& params);

}  // namespace trimer
