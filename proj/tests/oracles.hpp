#pragma once

// Independent dense Fock-space oracles for the test suites. Everything here
// works on explicit dense matrices over spin-orbital occupation masks, built
// from its own elementary creation/annihilation bit algebra — deliberately a
// different code path from the production determinant machinery.

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "obdf/integrals.hpp"

namespace oracle {

// spin orbital p of spatial orbital o: alpha = o, beta = o + n_orb
// mask bit p set = occupied; sign = (-1)^(occupied below p)

inline int ann(std::uint64_t& m, int p) {
  if (!(m >> p & 1)) return 0;
  const int sign = (std::popcount(m & ((1ULL << p) - 1)) & 1) ? -1 : 1;
  m &= ~(1ULL << p);
  return sign;
}

inline int cre(std::uint64_t& m, int p) {
  if (m >> p & 1) return 0;
  const int sign = (std::popcount(m & ((1ULL << p) - 1)) & 1) ? -1 : 1;
  m |= 1ULL << p;
  return sign;
}

// all masks with the given per-spin particle numbers, ascending mask order
inline std::vector<std::uint64_t> sector_masks(int n_orb, int n_alpha, int n_beta) {
  std::vector<std::uint64_t> out;
  const std::uint64_t lo_mask = (1ULL << n_orb) - 1;
  for (std::uint64_t m = 0; m < (1ULL << (2 * n_orb)); ++m)
    if (std::popcount(m & lo_mask) == n_alpha &&
        std::popcount(m >> n_orb) == n_beta)
      out.push_back(m);
  return out;
}

inline std::unordered_map<std::uint64_t, std::size_t> index_of(
    const std::vector<std::uint64_t>& basis) {
  std::unordered_map<std::uint64_t, std::size_t> idx;
  for (std::size_t i = 0; i < basis.size(); ++i) idx[basis[i]] = i;
  return idx;
}

// dense matrix of sum_pq h_pq a+_p a_q over the basis (h in spin orbitals)
inline Eigen::MatrixXd one_body_matrix(const Eigen::MatrixXd& h_so,
                                       const std::vector<std::uint64_t>& basis) {
  const auto idx = index_of(basis);
  const int n = static_cast<int>(h_so.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (std::size_t col = 0; col < basis.size(); ++col)
    for (int q = 0; q < n; ++q)
      for (int p = 0; p < n; ++p) {
        if (h_so(p, q) == 0.0) continue;
        std::uint64_t m = basis[col];
        int s = ann(m, q);
        if (!s) continue;
        const int s2 = cre(m, p);
        if (!s2) continue;
        const auto it = idx.find(m);
        if (it == idx.end()) continue;
        out(static_cast<Eigen::Index>(it->second), static_cast<Eigen::Index>(col)) +=
            h_so(p, q) * s * s2;
      }
  return out;
}

// dense molecular Hamiltonian (spatial integrals, chemists' notation):
// H = e_core + sum h_pq a+_ps a_qs + 1/2 sum (pq|rs) a+_ps a+_rt a_st a_qs
inline Eigen::MatrixXd hamiltonian_matrix(const obdf::IntegralSet& ints,
                                          const std::vector<std::uint64_t>& basis) {
  const auto idx = index_of(basis);
  const int n = ints.n_orb;
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(dim, dim) * ints.e_core;

  Eigen::MatrixXd h_so = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  h_so.block(0, 0, n, n) = ints.h;
  h_so.block(n, n, n, n) = ints.h;
  out += one_body_matrix(h_so, basis);

  for (std::size_t col = 0; col < basis.size(); ++col)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) {
            const double v = 0.5 * ints.g_val(p, q, r, s);
            if (v == 0.0) continue;
            for (int sp = 0; sp < 2; ++sp)
              for (int tp = 0; tp < 2; ++tp) {
                std::uint64_t m = basis[col];
                int sign = ann(m, q + sp * n);
                if (!sign) continue;
                int s2 = ann(m, s + tp * n);
                if (!s2) continue;
                sign *= s2;
                s2 = cre(m, r + tp * n);
                if (!s2) continue;
                sign *= s2;
                s2 = cre(m, p + sp * n);
                if (!s2) continue;
                sign *= s2;
                const auto it = idx.find(m);
                if (it == idx.end()) continue;
                out(static_cast<Eigen::Index>(it->second),
                    static_cast<Eigen::Index>(col)) += v * sign;
              }
          }
  return out;
}

// dense matrix of the spin-free doubles operator
// T = 1/2 sum_{ijab,st} t_ij^ab a+_as a+_bt a_jt a_is
inline Eigen::MatrixXd doubles_matrix(const std::vector<double>& t,
                                      const std::vector<int>& occ_list,
                                      const std::vector<int>& virt_list, int n_orb,
                                      const std::vector<std::uint64_t>& basis) {
  const auto idx = index_of(basis);
  const int no = static_cast<int>(occ_list.size());
  const int nv = static_cast<int>(virt_list.size());
  Eigen::MatrixXd out =
      Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (std::size_t col = 0; col < basis.size(); ++col)
    for (int i = 0; i < no; ++i)
      for (int j = 0; j < no; ++j)
        for (int a = 0; a < nv; ++a)
          for (int b = 0; b < nv; ++b) {
            const double v =
                0.5 * t[((static_cast<std::size_t>(i) * no + j) * nv + a) * nv + b];
            if (v == 0.0) continue;
            for (int sp = 0; sp < 2; ++sp)
              for (int tp = 0; tp < 2; ++tp) {
                std::uint64_t m = basis[col];
                int sign = ann(m, occ_list[i] + sp * n_orb);
                if (!sign) continue;
                int s2 = ann(m, occ_list[j] + tp * n_orb);
                if (!s2) continue;
                sign *= s2;
                s2 = cre(m, virt_list[b] + tp * n_orb);
                if (!s2) continue;
                sign *= s2;
                s2 = cre(m, virt_list[a] + sp * n_orb);
                if (!s2) continue;
                sign *= s2;
                const auto it = idx.find(m);
                if (it == idx.end()) continue;
                out(static_cast<Eigen::Index>(it->second),
                    static_cast<Eigen::Index>(col)) += v * sign;
              }
          }
  return out;
}

inline double ground_energy(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  return es.eigenvalues()(0);
}

inline Eigen::MatrixXd expm(const Eigen::MatrixXd& m) { return m.exp(); }

}  // namespace oracle
