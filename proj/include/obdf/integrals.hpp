#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace obdf {

/// One- and two-electron integrals in an orthonormal spatial-orbital basis.
/// Two-electron values are stored densely in chemists' notation (pq|rs) with
/// the full 8-fold permutational symmetry written out. Immutable by
/// convention once built; all operations below return fresh objects.
struct IntegralSet {
  int n_orb = 0;
  int n_elec = 0;
  int ms2 = 0;
  Eigen::MatrixXd h;       // n_orb x n_orb, symmetric
  std::vector<double> g;   // (pq|rs), size n_orb^4
  double e_core = 0.0;

  void resize(int norb);
  double g_val(int p, int q, int r, int s) const {
    return g[((static_cast<std::size_t>(p) * n_orb + q) * n_orb + r) * n_orb + s];
  }
  // writes the value into all 8 symmetry images
  void set_g(int p, int q, int r, int s, double v);
};

struct RotationMatrix {
  Eigen::MatrixXd u;  // orthogonal
};

struct FockResult {
  Eigen::MatrixXd f;    // Fock matrix in the current basis
  Eigen::VectorXd eps;  // eigenvalues of f, ascending
  double e_hf = 0.0;
};

IntegralSet parse_fcidump(std::istream& in);
IntegralSet parse_fcidump_file(const std::string& path);
void write_fcidump(const IntegralSet& ints, std::ostream& out);
void write_fcidump_file(const IntegralSet& ints, const std::string& path);

/// Closed-shell occupations: occ[p] in {0,2}, sum == n_elec.
FockResult build_fock(const IntegralSet& ints, const std::vector<int>& occ);

/// Aufbau closed-shell occupation vector in the current orbital ordering:
/// the first n_elec/2 orbitals doubly occupied.
std::vector<int> aufbau_occupations(const IntegralSet& ints);

bool is_orthogonal(const Eigen::MatrixXd& u, double tol = 1e-10);

/// Basis change h' = u^T h u, g' via four one-index transforms (O(n^5)).
IntegralSet rotate_integrals(const IntegralSet& ints, const RotationMatrix& rot);

}  // namespace obdf
