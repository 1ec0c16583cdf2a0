#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "obdf/ci.hpp"
#include "obdf/sampler.hpp"

namespace obdf {

struct SqdConfig {
  int k_batches = 5;          // K
  int batch_size = 50;        // d
  int max_outer_iter = 10;
  double occ_tol = 1e-3;      // convergence threshold on max|dn|
  std::uint64_t seed = 0;
  double delta = 0.01;        // ReLU floor
  bool include_reference = false;  // force the HF determinant into every batch
  bool cumulative = false;         // union batch pools across iterations
  std::string trace_path;          // optional JSON-lines per-iteration trace
};

struct SqdResult {
  double energy = 0.0;
  std::vector<std::vector<double>> per_batch_energies;  // [outer][batch]
  Eigen::VectorXd final_occupations;  // alpha block then beta block
  std::size_t subspace_dim = 0;       // winning batch, distinct determinants
  int n_outer = 0;
  bool converged = false;
  std::vector<std::string> flags;     // degenerate/fallback conditions hit
};

// Split samples by per-spin Hamming weight: valid bitstrings become
// determinants, the rest stay raw for later recovery.
struct FilteredSamples {
  std::map<Determinant, long long> valid;
  std::map<std::uint64_t, long long> invalid;
};
FilteredSamples filter_valid(const SampleSet& s, int n_alpha, int n_beta);

// Piecewise-linear recovery weight: w(u) = delta*u/h for u <= h, else
// delta + (1-delta)*(u-h)/(1-h). Degenerate filling h in {0,1} falls back to
// w(u) = u and sets *degenerate.
double relu_weight(double u, double h, double delta, bool* degenerate = nullptr);

// Flip exactly the surplus/deficit per spin sector, bits chosen without
// replacement with probability proportional to relu_weight(|x_p - n_p|).
// occ is alpha block then beta block, length 2*n_orb. Deterministic.
std::map<Determinant, long long> recover_configurations(
    const std::map<std::uint64_t, long long>& invalid, const Eigen::VectorXd& occ,
    int n_orb, int n_alpha, int n_beta, double delta, std::uint64_t seed,
    std::vector<std::string>* flags = nullptr);

// K batches of <= d distinct determinants, sampled without replacement and
// weighted by multiplicity; keyed by (seed, iter_key, batch, config).
std::vector<std::vector<Determinant>> make_batches(
    const std::map<Determinant, long long>& pool, const SqdConfig& cfg, int n_orb,
    int n_alpha, int n_beta, std::uint64_t iter_key,
    std::vector<std::string>* flags = nullptr);

// Full outer loop: filter, batch, diagonalize, average occupations,
// recover, repeat until the occupations settle.
SqdResult sqd_solve(const EffectiveHamiltonian& heff, const SampleSet& samples,
                    int n_alpha, int n_beta, const SqdConfig& cfg = {});

}  // namespace obdf
