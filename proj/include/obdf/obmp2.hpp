#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "obdf/integrals.hpp"

namespace obdf {

// Spin-free MP2 doubles amplitudes t[i][j][a][b] over the given occupied /
// virtual index lists, stored dense with i,j running over occ_list and a,b
// over virt_list.
struct Amplitudes {
  std::vector<int> occ_list;
  std::vector<int> virt_list;
  std::vector<double> t;

  double at(int i, int j, int a, int b) const {
    const int no = static_cast<int>(occ_list.size());
    const int nv = static_cast<int>(virt_list.size());
    return t[((static_cast<std::size_t>(i) * no + j) * nv + a) * nv + b];
  }
};

// t_ij^ab = (ia|jb) / (eps_i + eps_j - eps_a - eps_b - level_shift).
// Throws if any denominator magnitude falls below 1e-8 (degenerate gap),
// naming the offending orbital quadruple.
Amplitudes mp2_amplitudes(const IntegralSet& ints, const Eigen::VectorXd& eps,
                          double level_shift = 0.0);

// Closed-shell MP2 correlation energy for the given amplitudes.
double mp2_energy(const IntegralSet& ints, const Amplitudes& amp);

// Which operator enters the quadratic (double-commutator) term of the
// truncated similarity transform H + [H,A] + 1/2 [[X,A],A].
enum class DoubleCommutator { Fock, Hamiltonian };

// One-body correlated Fock: f_bar = f + v, plus the scalar shift c_bar that
// accompanies the mean-field reduction of the commutator terms.
struct CorrelatedFock {
  Eigen::MatrixXd f_bar;  // f + v, spatial orbitals
  Eigen::MatrixXd v;      // correlation correction, spatial orbitals
  double c_bar = 0.0;     // scalar part of the reduction
};

// Reduce [H,A] + 1/2 [[X,A],A] (A = T - T^dagger built from amp) to one-body
// form over the closed-shell reference with the given spatial occupied count.
CorrelatedFock obmp2_potential(const IntegralSet& ints, const Eigen::MatrixXd& f,
                               const Amplitudes& amp,
                               DoubleCommutator variant = DoubleCommutator::Fock);

struct Obmp2Options {
  int max_iter = 50;
  double tol = 1e-8;
  double level_shift = 0.0;
  DoubleCommutator variant = DoubleCommutator::Fock;
};

struct Obmp2Result {
  double energy = 0.0;               // final total energy
  std::vector<double> energies;      // per-iteration total energies
  bool converged = false;
  int n_iter = 0;
  IntegralSet ints_bar;              // integrals rotated to the f_bar eigenbasis
  Eigen::MatrixXd f_bar;             // correlated Fock in that basis (diagonal)
  Eigen::VectorXd eps_bar;           // its eigenvalues
  double c_bar = 0.0;                // scalar shift at convergence
  RotationMatrix u;                  // accumulated rotation from the input basis
};

// Self-consistent one-body MP2: canonicalize, then iterate
// amplitudes -> potential -> rotate to the f_bar eigenbasis until the total
// energy is stationary.
Obmp2Result obmp2_scf(const IntegralSet& ints, const Obmp2Options& opt = {});

// Closed-shell occupation mask over spin-orbitals (alpha block first).
std::uint64_t reference_mask(int n_orb, int n_occ);

}  // namespace obdf
