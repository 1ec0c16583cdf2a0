#include "obdf/obmp2.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "obdf/spinorb.hpp"

namespace obdf {

std::uint64_t reference_mask(int n_orb, int n_occ) {
  const std::uint64_t block = (n_occ == 0) ? 0 : ((1ULL << n_occ) - 1);
  return block | (block << n_orb);
}

Amplitudes mp2_amplitudes(const IntegralSet& ints, const Eigen::VectorXd& eps,
                          double level_shift) {
  const int n = ints.n_orb;
  const int no = ints.n_elec / 2;
  const int nv = n - no;
  if (eps.size() != n)
    throw std::invalid_argument("mp2_amplitudes: eps size does not match n_orb");
  Amplitudes amp;
  amp.occ_list.resize(no);
  amp.virt_list.resize(nv);
  std::iota(amp.occ_list.begin(), amp.occ_list.end(), 0);
  std::iota(amp.virt_list.begin(), amp.virt_list.end(), no);
  amp.t.assign(static_cast<std::size_t>(no) * no * nv * nv, 0.0);
  std::size_t idx = 0;
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j)
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b, ++idx) {
          const double denom =
              eps(i) + eps(j) - eps(no + a) - eps(no + b) - level_shift;
          if (std::abs(denom) < 1e-8) {
            std::ostringstream msg;
            msg << "mp2_amplitudes: degenerate occupied-virtual gap for (i=" << i
                << ", j=" << j << ", a=" << no + a << ", b=" << no + b
                << "), denominator " << denom;
            throw std::runtime_error(msg.str());
          }
          amp.t[idx] = ints.g_val(i, no + a, j, no + b) / denom;
        }
  return amp;
}

double mp2_energy(const IntegralSet& ints, const Amplitudes& amp) {
  const int no = static_cast<int>(amp.occ_list.size());
  const int nv = static_cast<int>(amp.virt_list.size());
  double e = 0.0;
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j)
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) {
          const int ia = amp.occ_list[i], ja = amp.occ_list[j];
          const int aa = amp.virt_list[a], ba = amp.virt_list[b];
          e += amp.at(i, j, a, b) *
               (2.0 * ints.g_val(ia, aa, ja, ba) - ints.g_val(ia, ba, ja, aa));
        }
  return e;
}

CorrelatedFock obmp2_potential(const IntegralSet& ints, const Eigen::MatrixXd& f,
                               const Amplitudes& amp, DoubleCommutator variant) {
  const int n = ints.n_orb;
  const int no = ints.n_elec / 2;
  const std::uint64_t ref = reference_mask(n, no);

  const SoOperator h_so = hamiltonian_so(ints);
  const SoOperator a_op = doubles_generator_so(amp.t, amp.occ_list, amp.virt_list, n);

  const ReducedOneBody lin = reduce_commutator(h_so, a_op, ref);
  const SoOperator x_so =
      (variant == DoubleCommutator::Fock) ? one_body_so(f) : h_so;
  const ReducedOneBody quad = reduce_double_commutator(x_so, a_op, ref);

  Eigen::MatrixXd v_so = lin.v + 0.5 * quad.v;
  const double c = lin.c0 + 0.5 * quad.c0;

  // spin-fold: restricted reference, so the alpha and beta blocks must agree
  // and the cross blocks vanish.
  const Eigen::MatrixXd vaa = v_so.block(0, 0, n, n);
  const Eigen::MatrixXd vbb = v_so.block(n, n, n, n);
  if ((vaa - vbb).cwiseAbs().maxCoeff() > 1e-9 ||
      v_so.block(0, n, n, n).cwiseAbs().maxCoeff() > 1e-9)
    throw std::runtime_error("obmp2_potential: spin symmetry broken in reduction");
  Eigen::MatrixXd v = 0.5 * (vaa + vbb);
  v = 0.5 * (v + v.transpose()).eval();  // kill numerical asymmetry

  CorrelatedFock out;
  out.v = v;
  out.f_bar = f + v;
  out.c_bar = c;
  return out;
}

Obmp2Result obmp2_scf(const IntegralSet& ints_in, const Obmp2Options& opt) {
  const int n = ints_in.n_orb;
  const int no = ints_in.n_elec / 2;
  std::vector<int> occ(n, 0);
  for (int i = 0; i < no; ++i) occ[i] = 2;

  Obmp2Result res;
  res.u.u = Eigen::MatrixXd::Identity(n, n);
  IntegralSet cur = ints_in;

  // canonicalize: rotate to the eigenbasis of the bare Fock matrix
  double e_prev;
  {
    FockResult f0 = build_fock(cur, occ);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f0.f);
    RotationMatrix u0{es.eigenvectors()};
    cur = rotate_integrals(cur, u0);
    res.u.u = res.u.u * u0.u;
    res.eps_bar = es.eigenvalues();
    e_prev = f0.e_hf;
  }
  for (int k = 1; k <= opt.max_iter; ++k) {
    res.n_iter = k;
    FockResult fr = build_fock(cur, occ);
    const Amplitudes amp = mp2_amplitudes(cur, res.eps_bar, opt.level_shift);
    const CorrelatedFock pot = obmp2_potential(cur, fr.f, amp, opt.variant);

    double corr = pot.c_bar;
    for (int i = 0; i < no; ++i) corr += 2.0 * pot.v(i, i);
    const double e_k = fr.e_hf + corr;
    res.energies.push_back(e_k);
    res.energy = e_k;
    res.c_bar = pot.c_bar;

    // rotate to the f_bar eigenbasis for the next pass (and for the output)
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pot.f_bar);
    RotationMatrix uk{es.eigenvectors()};
    cur = rotate_integrals(cur, uk);
    res.u.u = (res.u.u * uk.u).eval();
    res.eps_bar = es.eigenvalues();
    res.f_bar = res.eps_bar.asDiagonal();

    if (std::abs(e_k - e_prev) < opt.tol) {
      res.converged = true;
      break;
    }
    e_prev = e_k;
  }
  res.ints_bar = cur;
  return res;
}

}  // namespace obdf
