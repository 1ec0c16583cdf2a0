// Timing comparison of the OpenMP kernels against their serial reference
// implementations on the largest shipped fixture (H6 chain).

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "obdf/ci.hpp"
#include "obdf/integrals.hpp"
#include "obdf/obmp2.hpp"
#include "obdf/rng.hpp"
#include "obdf/spinorb.hpp"

using namespace obdf;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt < best) best = dt;
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %9.4f ms   parallel %9.4f ms   speedup %5.2fx\n", name,
              serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run serially\n");
#endif

  const IntegralSet ints =
      parse_fcidump_file(std::string(OBDF_DATA_DIR) + "/h6_chain_sto3g_1.50.fcidump");
  const EffectiveHamiltonian heff = as_effective(ints);
  const SectorBasis basis = enumerate_sector(ints.n_orb, 3, 3);
  std::printf("fixture: h6_chain_sto3g_1.50, sector dimension %zu\n\n", basis.size());

  // projected Hamiltonian assembly
  report("assemble projected H",
         time_best_of(5, [&] { build_projected_hamiltonian_serial(basis.dets, heff); }),
         time_best_of(5, [&] { build_projected_hamiltonian(basis.dets, heff); }));

  // sparse matrix-vector product
  const SparseHamiltonian hmat = build_projected_hamiltonian(basis.dets, heff);
  Eigen::VectorXd x(static_cast<Eigen::Index>(hmat.dim));
  for (std::size_t i = 0; i < hmat.dim; ++i)
    x[static_cast<Eigen::Index>(i)] = rng_uniform(1, i) - 0.5;
  report("sparse mat-vec (x100)",
         time_best_of(5, [&] { for (int k = 0; k < 100; ++k) hmat.multiply_serial(x); }),
         time_best_of(5, [&] { for (int k = 0; k < 100; ++k) hmat.multiply(x); }));

  // one-body reduction of the commutator with the doubles generator
  const FockResult fr = build_fock(ints, aufbau_occupations(ints));
  const Amplitudes amp = mp2_amplitudes(ints, fr.eps);
  const SoOperator h_so = hamiltonian_so(ints);
  const SoOperator a_so =
      doubles_generator_so(amp.t, amp.occ_list, amp.virt_list, ints.n_orb);
  const std::uint64_t ref = reference_mask(ints.n_orb, ints.n_elec / 2);
  report("one-body reduction",
         time_best_of(3, [&] { reduce_commutator_serial(h_so, a_so, ref); }),
         time_best_of(3, [&] { reduce_commutator(h_so, a_so, ref); }));

  return 0;
}
