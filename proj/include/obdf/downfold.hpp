#pragma once

#include <Eigen/Dense>
#include <vector>

#include "obdf/hamiltonian.hpp"
#include "obdf/integrals.hpp"
#include "obdf/obmp2.hpp"

namespace obdf {

// Partition of the (canonicalized, energy-ordered) orbital space.
struct ActivePartition {
  std::vector<int> core;    // doubly occupied, frozen
  std::vector<int> active;  // correlated subspace
  std::vector<int> ext;     // external virtuals
  int n_act_elec = 0;       // electrons placed in the active space
};

// Energy-window selection: the active space holds n_act_orb orbitals centred
// on the Fermi level, with n_act_elec electrons; core fills from the bottom.
ActivePartition select_active(const IntegralSet& ints, int n_act_orb,
                              int n_act_elec);

// Same, but with an explicit active orbital list (indices into the current
// basis). Core is every occupied orbital not in the list.
ActivePartition select_active_list(const IntegralSet& ints,
                                   const std::vector<int>& active_list);

// Standard frozen-core embedding of the active block: one-body part absorbs
// the core mean field, the scalar absorbs the core energy.
EffectiveHamiltonian build_cas_hamiltonian(const IntegralSet& ints,
                                           const ActivePartition& part);

// One-body potential from the external (non-active) amplitude block, reduced
// over the mean-field reference and restricted to the active space.
struct ExternalPotential {
  Eigen::MatrixXd v_act;  // active-block one-body correction
  double scalar = 0.0;    // core + scalar contribution
};

ExternalPotential external_potential(const IntegralSet& ints,
                                     const Eigen::MatrixXd& f,
                                     const Amplitudes& amp,
                                     const ActivePartition& part,
                                     DoubleCommutator variant = DoubleCommutator::Fock);

// CAS embedding plus the external one-body potential; expects integrals and
// eps in the correlated (post-self-consistency) basis.
EffectiveHamiltonian build_obdf_hamiltonian(const IntegralSet& ints_bar,
                                            const Eigen::VectorXd& eps_bar,
                                            const ActivePartition& part,
                                            DoubleCommutator variant = DoubleCommutator::Fock,
                                            double level_shift = 0.0);

}  // namespace obdf
