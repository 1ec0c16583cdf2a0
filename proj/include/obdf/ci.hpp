#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "obdf/hamiltonian.hpp"

namespace obdf {

/// Spin-resolved occupation bitmasks; bit p = spatial orbital p. Matches the
/// (x_down, x_up) bitstring layout with alpha = up in the low half.
struct Determinant {
  std::uint64_t alpha = 0;
  std::uint64_t beta = 0;

  friend bool operator==(const Determinant&, const Determinant&) = default;
  friend auto operator<=>(const Determinant&, const Determinant&) = default;
};

struct DeterminantHash {
  std::size_t operator()(const Determinant& d) const noexcept {
    std::uint64_t x = d.alpha * 0x9e3779b97f4a7c15ULL ^ (d.beta + 0xda942042e4dd58b5ULL);
    x ^= x >> 32;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 32;
    return static_cast<std::size_t>(x);
  }
};

/// All determinants of a fixed (n_alpha, n_beta) particle sector, in
/// lexicographic (beta-major) bitmask order, with the reverse index map.
struct SectorBasis {
  int n_orb = 0;
  int n_alpha = 0;
  int n_beta = 0;
  std::vector<Determinant> dets;
  std::unordered_map<Determinant, std::size_t, DeterminantHash> index;

  std::size_t size() const { return dets.size(); }
};

struct CiVector {
  const SectorBasis* basis = nullptr;
  Eigen::VectorXd c;
};

struct SparseHamiltonian {
  std::size_t dim = 0;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;
  Eigen::VectorXd diag;

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd multiply_serial(const Eigen::VectorXd& x) const;
};

inline constexpr std::size_t kDefaultSectorCap = 20'000'000;

SectorBasis enumerate_sector(int n_orb, int n_alpha, int n_beta,
                             std::size_t cap = kDefaultSectorCap);

/// Exact <d1|H|d2> by the Slater-Condon rules, with fermionic sign from the
/// occupation ordering. Zero for excitation degree > 2. The scalar enters the
/// diagonal only.
double slater_condon(const Determinant& d1, const Determinant& d2,
                     const EffectiveHamiltonian& heff);

/// Symmetric sparse matrix of all pairwise elements over `dets`. Beyond
/// dimension 2000 the connection search screens through generated
/// singles/doubles instead of all pairs. Parallel over rows, deterministic.
SparseHamiltonian build_projected_hamiltonian(const std::vector<Determinant>& dets,
                                              const EffectiveHamiltonian& heff);
/// All-pairs reference assembly, serial; kept for tests and benchmarks.
SparseHamiltonian build_projected_hamiltonian_serial(const std::vector<Determinant>& dets,
                                                     const EffectiveHamiltonian& heff);

struct DavidsonOptions {
  double tol = 1e-8;    // residual norm
  int max_space = 30;
  int max_restarts = 200;
};

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd c;
};

GroundState davidson_ground(const SparseHamiltonian& hmat,
                            const DavidsonOptions& opt = {});

std::pair<double, CiVector> fci_ground(const EffectiveHamiltonian& heff,
                                       const SectorBasis& basis);

/// Owning variant; carries the sector basis alongside the eigenpair.
struct FciResult {
  double energy = 0.0;
  SectorBasis basis;
  Eigen::VectorXd c;

  CiVector vector() const { return {&basis, c}; }
};

FciResult fci_ground(const IntegralSet& ints, int n_alpha, int n_beta);
FciResult fci_ground(const EffectiveHamiltonian& heff, int n_alpha, int n_beta);

/// Diagonal spin-orbital occupations (alpha block then beta block, length
/// 2*n_orb) and the spin-resolved 1-RDMs.
struct OneRdm {
  Eigen::VectorXd occupations;  // [n_p(alpha), n_p(beta)]
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;
  bool renormalized = false;  // input was not normalized
};

OneRdm one_rdm(const CiVector& psi, const std::vector<Determinant>& dets, int n_orb);
OneRdm one_rdm(const CiVector& psi);

}  // namespace obdf
