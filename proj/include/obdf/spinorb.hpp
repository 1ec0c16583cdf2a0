#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace obdf {

struct IntegralSet;

/// Generic particle-conserving spin-orbital operator
///   O = c0 + sum_pq h1(p,q) a+_p a_q + sum_pqrs w[p,q,r,s] a+_p a+_q a_s a_r
/// with spin orbitals indexed alpha block [0, n_orb) then beta block
/// [n_orb, 2*n_orb). No symmetry of w is assumed.
struct SoOperator {
  int n_so = 0;
  double c0 = 0.0;
  Eigen::MatrixXd h1;
  std::vector<double> w;

  void resize(int nso);
  double w_at(int p, int q, int r, int s) const {
    return w[((static_cast<std::size_t>(p) * n_so + q) * n_so + r) * n_so + s];
  }
  double& w_ref(int p, int q, int r, int s) {
    return w[((static_cast<std::size_t>(p) * n_so + q) * n_so + r) * n_so + s];
  }
};

/// Sparse vector over spin-orbital occupation masks.
using SoVector = std::unordered_map<std::uint64_t, double>;

SoOperator hamiltonian_so(const IntegralSet& ints);
SoOperator one_body_so(const Eigen::MatrixXd& f_spatial);

/// Anti-Hermitian doubles generator A = T - T+ with
///   T = 1/2 sum_{ijab, st} t[i,j,a,b] a+_{a s} a+_{b t} a_{j t} a_{i s}
/// over spatial occupied/virtual index lists.
SoOperator doubles_generator_so(const std::vector<double>& t,
                                const std::vector<int>& occ_list,
                                const std::vector<int>& virt_list, int n_orb);

/// Exact commutator [F, X] of a one-body operator with X (O(n^5)).
SoOperator commutator_one_body(const Eigen::MatrixXd& f_so, const SoOperator& x);

/// out += coef * O |det>
void apply_so(const SoOperator& op, std::uint64_t det, double coef, SoVector& out);
SoVector apply_so(const SoOperator& op, const SoVector& v);
double dot(const SoVector& a, const SoVector& b);

/// One-body-plus-scalar mean-field reduction, contracting all higher-body
/// content of a commutator with the reference density of `occ_mask`:
/// the reduced operator reproduces the exact expectation values over the
/// reference determinant and all of its single substitutions.
struct ReducedOneBody {
  Eigen::MatrixXd v;  // n_so x n_so
  double c0 = 0.0;
};

/// Reduction of C = [X, A]; X Hermitian, A anti-Hermitian.
ReducedOneBody reduce_commutator(const SoOperator& x, const SoOperator& a,
                                 std::uint64_t occ_mask);
ReducedOneBody reduce_commutator_serial(const SoOperator& x, const SoOperator& a,
                                        std::uint64_t occ_mask);

/// Reduction of C = [[X, A], A]; X Hermitian, A anti-Hermitian. Costlier than
/// the single-commutator path (nested sparse applications per entry).
ReducedOneBody reduce_double_commutator(const SoOperator& x, const SoOperator& a,
                                        std::uint64_t occ_mask);

}  // namespace obdf
