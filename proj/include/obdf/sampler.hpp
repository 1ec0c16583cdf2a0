#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "obdf/ci.hpp"
#include "obdf/obmp2.hpp"

namespace obdf {

// Measurement outcomes: raw bitstring (2*n_orb bits, beta in the high half,
// alpha in the low half — the (x_down, x_up) layout) -> multiplicity.
struct SampleSet {
  int n_orb = 0;
  long long shots = 0;
  std::map<std::uint64_t, long long> counts;

  static std::uint64_t raw_of(const Determinant& d, int n_orb) {
    return (d.beta << n_orb) | d.alpha;
  }
  static Determinant det_of(std::uint64_t raw, int n_orb) {
    const std::uint64_t lo = (n_orb == 64) ? ~0ULL : ((1ULL << n_orb) - 1);
    return {raw & lo, raw >> n_orb};
  }
};

// Text interchange format: header `norb shots`, then one `bitstring count`
// line per distinct outcome, bitstring MSB-first.
void write_samples(std::ostream& os, const SampleSet& s);
void write_samples_file(const std::string& path, const SampleSet& s);
SampleSet parse_samples(std::istream& is);
SampleSet parse_samples_file(const std::string& path);

struct NoiseModel {
  double p_flip = 0.0;  // independent per-bit readout flip probability
  std::uint64_t seed = 0;
};

// One circuit layer: exp(K) * diag(e^{i n.J n}) * exp(-K), K anti-symmetric
// orbital rotation generator, J symmetric density-density coupling, both
// n_orb x n_orb spatial matrices acting identically on the two spins.
struct UcjLayer {
  Eigen::MatrixXd k;
  Eigen::MatrixXd j;
};

struct UcjAnsatz {
  std::vector<UcjLayer> layers;
  Determinant reference;
};

// Multinomial draw over |c_x|^2; deterministic given seed (counter-based RNG
// per shot, independent of thread count).
SampleSet sample_exact(const CiVector& psi, long long shots, std::uint64_t seed);

// Apply the ansatz layers to the reference inside the fixed-particle-number
// sector. Returns the real part when the imaginary norm is < 1e-10, else the
// per-determinant modulus (same sampling distribution).
CiVector prepare_ucj_state(const UcjAnsatz& ansatz, const SectorBasis& basis);

// Double factorization of the doubles tensor: reshape to the symmetric
// (occ*virt)^2 matrix, keep the n_layers largest-|eigenvalue| modes, one
// (K, J) layer each.
UcjAnsatz ucj_from_t2(const Amplitudes& amp, int n_layers, int n_orb);

// Numerical rank (|eigenvalue| > 1e-12) of the reshaped amplitude matrix;
// the maximum admissible layer count for ucj_from_t2.
int t2_rank(const Amplitudes& amp);

// Independent per-bit readout flips; shot count preserved, deterministic.
SampleSet apply_noise(const SampleSet& s, const NoiseModel& noise);

}  // namespace obdf
