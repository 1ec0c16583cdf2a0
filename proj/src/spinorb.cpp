#include "obdf/spinorb.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "obdf/integrals.hpp"

namespace obdf {

namespace {

inline int parity(std::uint64_t m, int p) {
  return (std::popcount(m & ((1ULL << p) - 1)) & 1) ? -1 : 1;
}

}  // namespace

void SoOperator::resize(int nso) {
  n_so = nso;
  c0 = 0.0;
  h1 = Eigen::MatrixXd::Zero(nso, nso);
  w.assign(static_cast<std::size_t>(nso) * nso * nso * nso, 0.0);
}

SoOperator hamiltonian_so(const IntegralSet& ints) {
  const int n = ints.n_orb;
  SoOperator op;
  op.resize(2 * n);
  op.c0 = ints.e_core;
  op.h1.block(0, 0, n, n) = ints.h;
  op.h1.block(n, n, n, n) = ints.h;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = 0.5 * ints.g_val(p, q, r, s);
          if (v == 0.0) continue;
          for (int sp = 0; sp < 2; ++sp)
            for (int tp = 0; tp < 2; ++tp)
              op.w_ref(p + sp * n, r + tp * n, q + sp * n, s + tp * n) += v;
        }
  return op;
}

SoOperator one_body_so(const Eigen::MatrixXd& f_spatial) {
  const int n = static_cast<int>(f_spatial.rows());
  SoOperator op;
  op.resize(2 * n);
  op.h1.block(0, 0, n, n) = f_spatial;
  op.h1.block(n, n, n, n) = f_spatial;
  return op;
}

SoOperator doubles_generator_so(const std::vector<double>& t,
                                const std::vector<int>& occ_list,
                                const std::vector<int>& virt_list, int n_orb) {
  const int no = static_cast<int>(occ_list.size());
  const int nv = static_cast<int>(virt_list.size());
  if (t.size() != static_cast<std::size_t>(no) * no * nv * nv)
    throw std::invalid_argument("doubles_generator_so: amplitude tensor size mismatch");
  const int nso = 2 * n_orb;
  std::vector<double> wt(static_cast<std::size_t>(nso) * nso * nso * nso, 0.0);
  auto wref = [&wt, nso](int p, int q, int r, int s) -> double& {
    return wt[((static_cast<std::size_t>(p) * nso + q) * nso + r) * nso + s];
  };
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j)
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) {
          const double v =
              0.5 * t[((static_cast<std::size_t>(i) * no + j) * nv + a) * nv + b];
          if (v == 0.0) continue;
          for (int sp = 0; sp < 2; ++sp)
            for (int tp = 0; tp < 2; ++tp)
              wref(virt_list[a] + sp * n_orb, virt_list[b] + tp * n_orb,
                   occ_list[i] + sp * n_orb, occ_list[j] + tp * n_orb) += v;
        }
  SoOperator a_op;
  a_op.resize(nso);
  for (int p = 0; p < nso; ++p)
    for (int q = 0; q < nso; ++q)
      for (int r = 0; r < nso; ++r)
        for (int s = 0; s < nso; ++s) {
          const double v =
              wt[((static_cast<std::size_t>(p) * nso + q) * nso + r) * nso + s] -
              wt[((static_cast<std::size_t>(r) * nso + s) * nso + p) * nso + q];
          if (v != 0.0) a_op.w_ref(p, q, r, s) = v;
        }
  return a_op;
}

SoOperator commutator_one_body(const Eigen::MatrixXd& f_so, const SoOperator& x) {
  const int n = x.n_so;
  if (f_so.rows() != n || f_so.cols() != n)
    throw std::invalid_argument("commutator_one_body: dimension mismatch");
  SoOperator out;
  out.resize(n);
  out.h1 = f_so * x.h1 - x.h1 * f_so;
  // [sum f_mn a+_m a_n, a+_p a+_q a_s a_r] =
  //   sum_m f_mp (m q r s) + sum_m f_mq (p m r s)
  //   - sum_n f_sn (p q r n) - sum_n f_rn (p q n s)
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = x.w_at(p, q, r, s);
          if (v == 0.0) continue;
          for (int m = 0; m < n; ++m) {
            if (f_so(m, p) != 0.0) out.w_ref(m, q, r, s) += f_so(m, p) * v;
            if (f_so(m, q) != 0.0) out.w_ref(p, m, r, s) += f_so(m, q) * v;
            if (f_so(s, m) != 0.0) out.w_ref(p, q, r, m) -= f_so(s, m) * v;
            if (f_so(r, m) != 0.0) out.w_ref(p, q, m, s) -= f_so(r, m) * v;
          }
        }
  return out;
}

void apply_so(const SoOperator& op, std::uint64_t det, double coef, SoVector& out) {
  const int n = op.n_so;
  if (op.c0 != 0.0) out[det] += coef * op.c0;
  // one-body
  for (int q = 0; q < n; ++q) {
    if (!(det >> q & 1)) continue;
    const std::uint64_t m1 = det & ~(1ULL << q);
    const int s1 = parity(det, q);
    for (int p = 0; p < n; ++p) {
      if (m1 >> p & 1) continue;
      const double v = op.h1(p, q);
      if (v == 0.0) continue;
      out[m1 | (1ULL << p)] += coef * v * s1 * parity(m1, p);
    }
  }
  if (op.w.empty()) return;
  // two-body a+_p a+_q a_s a_r applied right to left
  for (int r = 0; r < n; ++r) {
    if (!(det >> r & 1)) continue;
    const std::uint64_t m1 = det & ~(1ULL << r);
    const int sr = parity(det, r);
    for (int s = 0; s < n; ++s) {
      if (!(m1 >> s & 1)) continue;
      const std::uint64_t m2 = m1 & ~(1ULL << s);
      const int ss = sr * parity(m1, s);
      for (int q = 0; q < n; ++q) {
        if (m2 >> q & 1) continue;
        const std::uint64_t m3 = m2 | (1ULL << q);
        const int sq = ss * parity(m2, q);
        for (int p = 0; p < n; ++p) {
          if (m3 >> p & 1) continue;
          const double v = op.w_at(p, q, r, s);
          if (v == 0.0) continue;
          out[m3 | (1ULL << p)] += coef * v * sq * parity(m3, p);
        }
      }
    }
  }
}

SoVector apply_so(const SoOperator& op, const SoVector& v) {
  SoVector out;
  for (const auto& [det, coef] : v) {
    if (coef == 0.0) continue;
    apply_so(op, det, coef, out);
  }
  return out;
}

double dot(const SoVector& a, const SoVector& b) {
  const SoVector& small = a.size() <= b.size() ? a : b;
  const SoVector& large = a.size() <= b.size() ? b : a;
  double acc = 0.0;
  for (const auto& [det, coef] : small) {
    auto it = large.find(det);
    if (it != large.end()) acc += coef * it->second;
  }
  return acc;
}

namespace {

SoVector apply_to_det(const SoOperator& op, std::uint64_t det) {
  SoVector out;
  apply_so(op, det, 1.0, out);
  return out;
}

// <bra| [X, A] |ket> with X Hermitian, A anti-Hermitian
double elem_single(const SoOperator& x, const SoOperator& a, std::uint64_t bra,
                   std::uint64_t ket) {
  const SoVector xb = apply_to_det(x, bra);
  const SoVector ak = apply_to_det(a, ket);
  const SoVector ab = apply_to_det(a, bra);
  const SoVector xk = apply_to_det(x, ket);
  return dot(xb, ak) + dot(ab, xk);
}

// <bra| [[X, A], A] |ket> = <bra| XAA - 2 AXA + AAX |ket>
double elem_double(const SoOperator& x, const SoOperator& a, std::uint64_t bra,
                   std::uint64_t ket) {
  const SoVector ak = apply_to_det(a, ket);
  const SoVector aak = apply_so(a, ak);
  const SoVector xak = apply_so(x, ak);
  const SoVector xb = apply_to_det(x, bra);
  const SoVector ab = apply_to_det(a, bra);
  const SoVector aab = apply_so(a, ab);
  const SoVector xk = apply_to_det(x, ket);
  return dot(xb, aak) + 2.0 * dot(ab, xak) + dot(aab, xk);
}

template <typename Elem>
ReducedOneBody reduce_impl(int n_so, std::uint64_t occ_mask, Elem&& elem, bool parallel) {
  ReducedOneBody red;
  red.v = Eigen::MatrixXd::Zero(n_so, n_so);
  const double d_ref = elem(occ_mask, occ_mask);

  struct Entry {
    int p, q;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<std::size_t>(n_so) * n_so);
  for (int p = 0; p < n_so; ++p)
    for (int q = 0; q < n_so; ++q) entries.push_back({p, q});

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
#endif
  for (long long e = 0; e < static_cast<long long>(entries.size()); ++e) {
    const int p = entries[e].p;
    const int q = entries[e].q;
    const bool p_occ = occ_mask >> p & 1;
    const bool q_occ = occ_mask >> q & 1;
    double val;
    if (p == q) {
      if (p_occ)
        val = d_ref - elem(occ_mask & ~(1ULL << p), occ_mask & ~(1ULL << p));
      else
        val = elem(occ_mask | (1ULL << p), occ_mask | (1ULL << p)) - d_ref;
    } else {
      std::uint64_t ket;
      if (!p_occ && q_occ)
        ket = occ_mask;
      else if (p_occ && !q_occ)
        ket = (occ_mask & ~(1ULL << p)) | (1ULL << q);
      else if (p_occ && q_occ)
        ket = occ_mask & ~(1ULL << p);
      else
        ket = occ_mask | (1ULL << q);
      const std::uint64_t bra = (ket & ~(1ULL << q)) | (1ULL << p);
      const int sign = parity(ket, q) * parity(ket & ~(1ULL << q), p);
      val = sign * elem(bra, ket);
    }
    red.v(p, q) = val;
  }
  double occ_sum = 0.0;
  for (int p = 0; p < n_so; ++p)
    if (occ_mask >> p & 1) occ_sum += red.v(p, p);
  red.c0 = d_ref - occ_sum;
  return red;
}

}  // namespace

ReducedOneBody reduce_commutator(const SoOperator& x, const SoOperator& a,
                                 std::uint64_t occ_mask) {
  return reduce_impl(
      x.n_so, occ_mask,
      [&](std::uint64_t bra, std::uint64_t ket) { return elem_single(x, a, bra, ket); },
      true);
}

ReducedOneBody reduce_commutator_serial(const SoOperator& x, const SoOperator& a,
                                        std::uint64_t occ_mask) {
  return reduce_impl(
      x.n_so, occ_mask,
      [&](std::uint64_t bra, std::uint64_t ket) { return elem_single(x, a, bra, ket); },
      false);
}

ReducedOneBody reduce_double_commutator(const SoOperator& x, const SoOperator& a,
                                        std::uint64_t occ_mask) {
  return reduce_impl(
      x.n_so, occ_mask,
      [&](std::uint64_t bra, std::uint64_t ket) { return elem_double(x, a, bra, ket); },
      true);
}

}  // namespace obdf
