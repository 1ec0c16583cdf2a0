#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace obdf {

struct IntegralSet;

/// Active-space second-quantized Hamiltonian: one-body matrix, two-body
/// tensor in chemists' notation (8-fold symmetric), and a scalar that makes
/// active-space eigenvalues directly comparable to total energies.
struct EffectiveHamiltonian {
  int n_act = 0;
  Eigen::MatrixXd h_eff;
  std::vector<double> g_act;  // (uv|wx), size n_act^4
  double e_scalar = 0.0;
  std::string label = "CAS";

  double g_val(int p, int q, int r, int s) const {
    return g_act[((static_cast<std::size_t>(p) * n_act + q) * n_act + r) * n_act + s];
  }
};

/// Whole-space view of an IntegralSet as an EffectiveHamiltonian.
EffectiveHamiltonian as_effective(const IntegralSet& ints);

/// Inverse direction, for FCIDUMP interoperability (e_scalar goes into the
/// core-energy record).
IntegralSet as_integral_set(const EffectiveHamiltonian& heff, int n_elec, int ms2 = 0);

}  // namespace obdf
