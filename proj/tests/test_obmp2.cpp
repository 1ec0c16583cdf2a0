#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "obdf/obmp2.hpp"
#include "obdf/spinorb.hpp"
#include "oracles.hpp"

using namespace obdf;

TEST_CASE("mp2_amplitudes: textbook formula and degenerate-gap error") {
  const IntegralSet ints = fixtures::load("h2_sto3g_0.74.fcidump");
  const FockResult fr = build_fock(ints, aufbau_occupations(ints));
  const Amplitudes amp = mp2_amplitudes(ints, fr.eps);
  REQUIRE(amp.occ_list.size() == 1);
  REQUIRE(amp.virt_list.size() == 1);
  CHECK(amp.at(0, 0, 0, 0) ==
        doctest::Approx(ints.g_val(0, 1, 0, 1) / (2 * fr.eps(0) - 2 * fr.eps(1)))
            .epsilon(1e-14));

  Eigen::VectorXd eps_degen = fr.eps;
  eps_degen(1) = eps_degen(0);  // zero occupied-virtual gap
  CHECK_THROWS_WITH_AS(static_cast<void>(mp2_amplitudes(ints, eps_degen)),
                       doctest::Contains("degenerate"), std::runtime_error);
  // a level shift restores a usable denominator
  CHECK_NOTHROW(static_cast<void>(mp2_amplitudes(ints, eps_degen, 0.5)));
}

TEST_CASE("iteration-1 energy equals E_HF + E_MP2 (textbook formula)") {
  for (const char* name :
       {"h2_sto3g_0.74.fcidump", "h4_chain_sto3g_1.00.fcidump"}) {
    const IntegralSet ints = fixtures::load(name);
    const FockResult fr = build_fock(ints, aufbau_occupations(ints));
    // independent closed-shell MP2 sum, written out directly
    const int no = ints.n_elec / 2;
    const int nv = ints.n_orb - no;
    double e_mp2 = 0.0;
    for (int i = 0; i < no; ++i)
      for (int j = 0; j < no; ++j)
        for (int a = no; a < no + nv; ++a)
          for (int b = no; b < no + nv; ++b) {
            const double iajb = ints.g_val(i, a, j, b);
            const double ibja = ints.g_val(i, b, j, a);
            e_mp2 += iajb * (2.0 * iajb - ibja) /
                     (fr.eps(i) + fr.eps(j) - fr.eps(a) - fr.eps(b));
          }
    Obmp2Options opt;
    opt.max_iter = 1;
    const Obmp2Result res = obmp2_scf(ints, opt);
    REQUIRE(res.energies.size() == 1);
    CHECK(std::abs(res.energies[0] - (fr.e_hf + e_mp2)) < 1e-8);
  }
}

TEST_CASE("self-consistency converges and the energy goes below HF") {
  const IntegralSet ints = fixtures::load("h4_chain_sto3g_1.25.fcidump");
  const FockResult fr = build_fock(ints, aufbau_occupations(ints));
  const Obmp2Result res = obmp2_scf(ints);
  CHECK(res.converged);
  CHECK(res.energy < fr.e_hf);
  CHECK(res.n_iter <= 50);
  // last two sweep energies agree to the tolerance
  const std::size_t k = res.energies.size();
  REQUIRE(k >= 2);
  CHECK(std::abs(res.energies[k - 1] - res.energies[k - 2]) < 1e-8);
  // the returned basis diagonalizes the correlated Fock
  CHECK((res.f_bar - Eigen::MatrixXd(res.eps_bar.asDiagonal())).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK(is_orthogonal(res.u.u));
}

TEST_CASE("obmp2_potential: Hermitian one-body output, both variants") {
  const IntegralSet ints = fixtures::load("h2_midbond_sto3g_0.74.fcidump");
  const FockResult fr = build_fock(ints, aufbau_occupations(ints));
  const Amplitudes amp = mp2_amplitudes(ints, fr.eps);
  for (DoubleCommutator variant :
       {DoubleCommutator::Fock, DoubleCommutator::Hamiltonian}) {
    const CorrelatedFock pot = obmp2_potential(ints, fr.f, amp, variant);
    CHECK((pot.v - pot.v.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((pot.f_bar - (fr.f + pot.v)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(pot.v.cwiseAbs().maxCoeff() > 0.0);
  }
}

TEST_CASE("BCH truncation: Hamiltonian-variant error shrinks at third order") {
  // reference energy of the truncated, one-body-reduced transform vs the
  // exact unitary similarity transform, under amplitude scaling
  const IntegralSet ints = fixtures::load("h2_sto3g_0.74.fcidump");
  const int n = ints.n_orb;
  const int no = ints.n_elec / 2;
  const FockResult fr = build_fock(ints, aufbau_occupations(ints));
  const Amplitudes amp0 = mp2_amplitudes(ints, fr.eps);
  const std::uint64_t ref = reference_mask(n, no);

  const auto basis = oracle::sector_masks(n, no, no);
  const auto idx = oracle::index_of(basis);
  const Eigen::Index ri = static_cast<Eigen::Index>(idx.at(ref));
  const Eigen::MatrixXd h_dense = oracle::hamiltonian_matrix(ints, basis);
  const Eigen::MatrixXd t_dense =
      oracle::doubles_matrix(amp0.t, amp0.occ_list, amp0.virt_list, n, basis);
  const Eigen::MatrixXd a_dense = t_dense - t_dense.transpose();

  std::vector<double> errs;
  for (const double lambda : {1.0, 0.5, 0.25, 0.125}) {
    Amplitudes amp = amp0;
    for (double& v : amp.t) v *= lambda;
    const CorrelatedFock pot =
        obmp2_potential(ints, fr.f, amp, DoubleCommutator::Hamiltonian);
    double e_red = fr.e_hf + pot.c_bar;
    for (int i = 0; i < no; ++i) e_red += 2.0 * pot.v(i, i);

    const Eigen::MatrixXd u = oracle::expm(lambda * a_dense);
    const Eigen::VectorXd phi = u.col(ri);
    const double e_exact = phi.dot(h_dense * phi);
    errs.push_back(std::abs(e_red - e_exact));
  }
  // least-squares slope of log(err) vs log(lambda)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < errs.size(); ++k) {
    const double x = std::log(std::pow(0.5, static_cast<double>(k)));
    const double y = std::log(errs[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
  CHECK(slope >= 2.7);
}
