#include "doctest.h"

#include <bit>
#include <cmath>

#include "fixtures.hpp"
#include "obdf/obmp2.hpp"
#include "obdf/spinorb.hpp"
#include "oracles.hpp"

using namespace obdf;

namespace {

// dense column of op acting on basis[col]
Eigen::VectorXd dense_column(const SoOperator& op,
                             const std::vector<std::uint64_t>& basis,
                             std::size_t col) {
  const auto idx = oracle::index_of(basis);
  SoVector out;
  apply_so(op, basis[col], 1.0, out);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& [det, coef] : out) {
    const auto it = idx.find(det);
    REQUIRE(it != idx.end());  // number-conserving operators stay in sector
    v(static_cast<Eigen::Index>(it->second)) += coef;
  }
  return v;
}

Eigen::MatrixXd dense_of(const SoOperator& op,
                         const std::vector<std::uint64_t>& basis) {
  Eigen::MatrixXd m(basis.size(), basis.size());
  for (std::size_t col = 0; col < basis.size(); ++col)
    m.col(static_cast<Eigen::Index>(col)) = dense_column(op, basis, col);
  return m;
}

struct Setup {
  IntegralSet ints;
  Amplitudes amp;
  SoOperator h_so;
  SoOperator a_so;
  Eigen::MatrixXd f_so;
  std::vector<std::uint64_t> basis;
  Eigen::MatrixXd h_dense;
  Eigen::MatrixXd a_dense;
  std::uint64_t ref;
};

Setup make_setup(const std::string& fixture) {
  Setup s;
  s.ints = fixtures::load(fixture);
  const int n = s.ints.n_orb;
  const int no = s.ints.n_elec / 2;
  const FockResult fr = build_fock(s.ints, aufbau_occupations(s.ints));
  s.amp = mp2_amplitudes(s.ints, fr.eps);
  s.h_so = hamiltonian_so(s.ints);
  s.a_so = doubles_generator_so(s.amp.t, s.amp.occ_list, s.amp.virt_list, n);
  s.f_so = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  s.f_so.block(0, 0, n, n) = fr.f;
  s.f_so.block(n, n, n, n) = fr.f;
  s.basis = oracle::sector_masks(n, no, no);
  s.h_dense = oracle::hamiltonian_matrix(s.ints, s.basis);
  const Eigen::MatrixXd t_dense =
      oracle::doubles_matrix(s.amp.t, s.amp.occ_list, s.amp.virt_list, n, s.basis);
  s.a_dense = t_dense - t_dense.transpose();
  s.ref = reference_mask(n, no);
  return s;
}

}  // namespace

TEST_CASE("hamiltonian_so action equals the dense oracle Hamiltonian") {
  for (const char* name :
       {"h2_sto3g_0.74.fcidump", "h2_midbond_sto3g_0.74.fcidump"}) {
    const Setup s = make_setup(name);
    CHECK((dense_of(s.h_so, s.basis) - s.h_dense).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("doubles generator equals the anti-Hermitian dense oracle operator") {
  const Setup s = make_setup("h2_midbond_sto3g_0.74.fcidump");
  const Eigen::MatrixXd a = dense_of(s.a_so, s.basis);
  CHECK((a - s.a_dense).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((a + a.transpose()).cwiseAbs().maxCoeff() < 1e-12);  // anti-Hermitian
}

TEST_CASE("commutator_one_body equals the dense commutator") {
  const Setup s = make_setup("h2_midbond_sto3g_0.74.fcidump");
  const SoOperator fa = commutator_one_body(s.f_so, s.a_so);
  const Eigen::MatrixXd f_dense = oracle::one_body_matrix(s.f_so, s.basis);
  const Eigen::MatrixXd want = f_dense * s.a_dense - s.a_dense * f_dense;
  CHECK((dense_of(fa, s.basis) - want).cwiseAbs().maxCoeff() < 1e-11);
}

namespace {

Eigen::MatrixXd reduced_dense(const ReducedOneBody& red,
                              const std::vector<std::uint64_t>& basis) {
  Eigen::MatrixXd m = oracle::one_body_matrix(red.v, basis);
  m += red.c0 * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  return m;
}

// check that the one-body reduction reproduces the reference-column matrix
// elements (diagonal and all single substitutions) of the dense target
void check_reduction(const ReducedOneBody& red, const Eigen::MatrixXd& target,
                     const Setup& s) {
  const auto idx = oracle::index_of(s.basis);
  const Eigen::Index ri = static_cast<Eigen::Index>(idx.at(s.ref));
  const Eigen::MatrixXd od = reduced_dense(red, s.basis);
  CHECK(std::abs(od(ri, ri) - target(ri, ri)) < 1e-10);
  const int n_so = 2 * s.ints.n_orb;
  for (int p = 0; p < n_so; ++p)
    for (int q = 0; q < n_so; ++q) {
      if (p == q) continue;
      if (!(s.ref >> q & 1) || (s.ref >> p & 1)) continue;
      if ((p < s.ints.n_orb) != (q < s.ints.n_orb)) continue;  // spin flip leaves sector
      const std::uint64_t single = (s.ref & ~(1ULL << q)) | (1ULL << p);
      const Eigen::Index si = static_cast<Eigen::Index>(idx.at(single));
      CHECK(std::abs(od(si, ri) - target(si, ri)) < 1e-10);
    }
}

}  // namespace

TEST_CASE("reduce_commutator reproduces dense [H,A] on the reference block") {
  for (const char* name :
       {"h2_sto3g_0.74.fcidump", "h2_midbond_sto3g_0.74.fcidump"}) {
    const Setup s = make_setup(name);
    const ReducedOneBody red = reduce_commutator(s.h_so, s.a_so, s.ref);
    const Eigen::MatrixXd target = s.h_dense * s.a_dense - s.a_dense * s.h_dense;
    check_reduction(red, target, s);
    // Hermitian result for Hermitian X, anti-Hermitian A
    CHECK((red.v - red.v.transpose()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("reduce_double_commutator reproduces dense [[F,A],A]") {
  const Setup s = make_setup("h2_midbond_sto3g_0.74.fcidump");
  const SoOperator f_op = one_body_so(s.f_so.block(0, 0, s.ints.n_orb, s.ints.n_orb));
  const ReducedOneBody red = reduce_double_commutator(f_op, s.a_so, s.ref);
  const Eigen::MatrixXd f_dense = oracle::one_body_matrix(s.f_so, s.basis);
  const Eigen::MatrixXd fa = f_dense * s.a_dense - s.a_dense * f_dense;
  const Eigen::MatrixXd target = fa * s.a_dense - s.a_dense * fa;
  check_reduction(red, target, s);
}

TEST_CASE("reduction: parallel and serial paths agree bit for bit") {
  const Setup s = make_setup("h4_chain_sto3g_1.00.fcidump");
  const ReducedOneBody a = reduce_commutator(s.h_so, s.a_so, s.ref);
  const ReducedOneBody b = reduce_commutator_serial(s.h_so, s.a_so, s.ref);
  CHECK(a.c0 == b.c0);
  CHECK(a.v == b.v);
}

TEST_CASE("dot and apply_so basics") {
  SoVector x{{0b0101, 1.0}, {0b0110, 2.0}};
  SoVector y{{0b0101, 0.5}, {0b1001, 3.0}};
  CHECK(dot(x, y) == doctest::Approx(0.5));
  // empty operator leaves only the scalar action
  SoOperator id;
  id.resize(4);
  id.c0 = 2.0;
  SoVector out;
  apply_so(id, 0b0101, 1.5, out);
  CHECK(out.size() == 1);
  CHECK(out.at(0b0101) == doctest::Approx(3.0));
}
