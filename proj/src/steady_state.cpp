#include "trimer/steady_state.hpp"

#include "trimer/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace trimer {

using boson::Ladder;
using boson::Polynomial;
using boson::Word;

namespace {

constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};
constexpr std::array<const char*, 3> kModeNames{"a", "b", "c"};

int pair_slot(int i, int j) {
    if (i > j) std::swap(i, j);
    for (int k = 0; k < 6; ++k) {
        if (kPairs[k][0] == i && kPairs[k][1] == j) return k;
    }
    throw std::out_of_range("pair_slot: mode out of range");
}

Polynomial quadratic_monomial(int index) {
    if (index < 9) {
        return Polynomial::create(index / 3) * Polynomial::annihilate(index % 3);
    }
    if (index < 15) {
        const auto [i, j] = kPairs[index - 9];
        return Polynomial::annihilate(i) * Polynomial::annihilate(j);
    }
    const auto [i, j] = kPairs[index - 15];
    return Polynomial::create(i) * Polynomial::create(j);
}

}  // namespace

int normal_index(int i, int j) { return 3 * i + j; }
int pair_index(int i, int j) { return 9 + pair_slot(i, j); }
int pair_dag_index(int i, int j) { return 15 + pair_slot(i, j); }

std::string moment_label(int index) {
    if (index < 0 || index >= kNumMoments) throw std::out_of_range("moment_label");
    std::string s = "<";
    if (index < 9) {
        s += kModeNames[index / 3];
        s += "+ ";
        s += kModeNames[index % 3];
    } else if (index < 15) {
        s += kModeNames[kPairs[index - 9][0]];
        s += ' ';
        s += kModeNames[kPairs[index - 9][1]];
    } else {
        s += kModeNames[kPairs[index - 15][0]];
        s += "+ ";
        s += kModeNames[kPairs[index - 15][1]];
        s += '+';
    }
    return s + ">";
}

int moment_index(const Word& w) {
    if (w.size() != 2) return -1;
    const Ladder& x = w[0];
    const Ladder& y = w[1];
    if (x.dagger && !y.dagger) return normal_index(x.mode, y.mode);
    if (!x.dagger && !y.dagger) return pair_index(x.mode, y.mode);
    if (x.dagger && y.dagger) return pair_dag_index(x.mode, y.mode);
    return -1;  // not canonical
}

MomentVector MomentState::to_vector() const {
    MomentVector m;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m(normal_index(i, j)) = normal(i, j);
    }
    for (const auto& [i, j] : kPairs) {
        m(pair_index(i, j)) = pair(i, j);
        m(pair_dag_index(i, j)) = pair_dag(i, j);
    }
    return m;
}

MomentState MomentState::from_vector(const MomentVector& m) {
    MomentState s;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) s.normal(i, j) = m(normal_index(i, j));
    }
    for (const auto& [i, j] : kPairs) {
        s.pair(i, j) = s.pair(j, i) = m(pair_index(i, j));
        s.pair_dag(i, j) = s.pair_dag(j, i) = m(pair_dag_index(i, j));
    }
    return s;
}

Polynomial hamiltonian(const ChainParams& p) {
    const Polynomial a = Polynomial::annihilate(ModeA);
    const Polynomial b = Polynomial::annihilate(ModeB);
    const Polynomial c = Polynomial::annihilate(ModeC);
    const Polynomial ad = Polynomial::create(ModeA);
    const Polynomial bd = Polynomial::create(ModeB);
    const Polynomial cd = Polynomial::create(ModeC);

    Polynomial h = Complex(p.delta_a) * (ad * a);
    h += Complex(p.delta) * (bd * b);
    h += Complex(p.delta_c) * (cd * c);
    h += Complex(p.j) * (ad * b + a * bd + bd * c + b * cd);
    h += Complex(0.5 * p.omega_drive) * (bd * bd + b * b);
    return h.pruned();
}

Polynomial adjoint_generator(const ChainParams& p, const Polynomial& o) {
    const Polynomial b = Polynomial::annihilate(ModeB);
    const Polynomial bd = Polynomial::create(ModeB);
    const Polynomial n_b = bd * b;

    Polynomial out = kI * commutator(hamiltonian(p), o);
    Polynomial dissipator = Complex(2.0) * (bd * o * b);
    dissipator -= n_b * o;
    dissipator -= o * n_b;
    out += Complex(p.gamma) * dissipator;
    return out.pruned();
}

MomentSystem build_moment_system(const ChainParams& p) {
    p.validate();
    MomentSystem sys;
    sys.system_matrix.setZero();
    sys.drive_vector.setZero();

    for (int row = 0; row < kNumMoments; ++row) {
        const Polynomial rate = adjoint_generator(p, quadratic_monomial(row));
        for (const auto& [word, coef] : rate.terms()) {
            if (word.empty()) {
                sys.drive_vector(row) += coef;
                continue;
            }
            const int col = moment_index(word);
            if (col < 0) {
                throw std::logic_error("moment hierarchy did not close on quadratic monomials");
            }
            sys.system_matrix(row, col) += coef;
        }
    }

    Eigen::JacobiSVD<MomentMatrix> svd(sys.system_matrix);
    const auto& sv = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, sv(0));
    sys.nullity = static_cast<int>((sv.array() < cut).count());
    return sys;
}

int catalogued_dark_moments(const ChainParams& p) {
    const DynMatrix dyn = build_dyn_matrix(p);
    Eigen::ComplexEigenSolver<Matrix6c> solver(dyn.entries, false);
    if (solver.info() != Eigen::Success) throw SolverFailure("eigenvalue solver did not converge");
    const auto& ev = solver.eigenvalues();
    const double tol = 1e-8 * std::max(1.0, dyn.entries.norm());
    int count = 0;
    for (int i = 0; i < 6; ++i) {
        for (int j = i; j < 6; ++j) {
            if (std::abs(ev(i) + ev(j)) < tol) ++count;
        }
    }
    return count;
}

MomentState steady_state(const MomentSystem& sys, const ChainParams& p) {
    p.validate();
    if (p.paper_regime() && !below_critical_drive(p)) {
        throw NoSteadyState("drive at or above critical strength sqrt(gamma^2 + Delta^2)");
    }
    {
        Eigen::ComplexEigenSolver<Matrix6c> solver(build_dyn_matrix(p).entries, false);
        if (solver.info() != Eigen::Success) throw SolverFailure("eigenvalue solver did not converge");
        for (int i = 0; i < 6; ++i) {
            if (solver.eigenvalues()(i).imag() > 1e-12) {
                throw NoSteadyState("first-moment mode with positive growth rate");
            }
        }
    }

    const MomentMatrix& a = sys.system_matrix;
    const MomentVector& d = sys.drive_vector;
    const double d_norm = d.norm();
    if (d_norm == 0.0) return MomentState{};

    Eigen::JacobiSVD<MomentMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = 1e-10 * std::max(1.0, sv(0));
    const int nullity = static_cast<int>((sv.array() < cut).count());
    const int catalogued = catalogued_dark_moments(p);
    if (nullity > catalogued) {
        throw SingularBeyondDarkSector("second-moment matrix has " + std::to_string(nullity) +
                                       " null directions, dark sector accounts for " +
                                       std::to_string(catalogued));
    }

    MomentMatrix shifted = a;
    if (nullity > 0) {
        const Eigen::MatrixXcd right = svd.matrixV().rightCols(nullity);
        const Eigen::MatrixXcd left = svd.matrixU().rightCols(nullity);
        // Conserved combinations l^H m start at zero in vacuum; they stay there
        // only if the drive does not feed them.
        if ((left.adjoint() * d).norm() > 1e-10 * d_norm) {
            throw NoSteadyState("drive feeds a conserved second moment");
        }
        const Eigen::MatrixXcd gram = left.adjoint() * right;
        Eigen::FullPivLU<Eigen::MatrixXcd> gram_lu(gram);
        if (!gram_lu.isInvertible()) {
            throw SingularBeyondDarkSector("zero eigenvalue of the second-moment matrix is defective");
        }
        // A - P0 with P0 the spectral projector on ker A is invertible, and its
        // solution satisfies both A m = -d and l^H m = 0.
        shifted -= right * gram_lu.solve(left.adjoint());
    }

    Eigen::PartialPivLU<MomentMatrix> lu(shifted);
    const MomentVector m = lu.solve(-d);
    const double residual = (a * m + d).norm();
    if (!(residual < 1e-10 * d_norm)) {
        throw SolverFailure("steady-state residual " + std::to_string(residual) + " exceeds tolerance");
    }
    return MomentState::from_vector(m);
}

MomentState steady_state(const ChainParams& p) { return steady_state(build_moment_system(p), p); }

Vector6c regression_initial_vector(const MomentState& s) {
    Vector6c v;
    v << s.normal(ModeB, ModeA), s.normal(ModeB, ModeB), s.normal(ModeB, ModeC),
        s.pair_dag(ModeB, ModeA), s.pair_dag(ModeB, ModeB), s.pair_dag(ModeB, ModeC);
    return v;
}

namespace {
double threshold_denominator(const ChainParams& p) {
    if (!p.paper_regime()) throw OutsidePaperRegime("steady-state closed form");
    return p.gamma * p.gamma + p.delta * p.delta - p.omega_drive * p.omega_drive;
}
}  // namespace

double closed_form_population_b(const ChainParams& p) {
    return p.omega_drive * p.omega_drive / (2.0 * threshold_denominator(p));
}

double closed_form_population_a(const ChainParams& p) {
    return p.omega_drive * p.omega_drive / (4.0 * threshold_denominator(p));
}

Complex closed_form_pair_dag_b(const ChainParams& p) {
    const double W = p.omega_drive;
    return kI * Complex(p.gamma * W, p.delta * W) / (2.0 * threshold_denominator(p));
}

}  // namespace trimer
