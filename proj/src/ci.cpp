#include "obdf/ci.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "obdf/integrals.hpp"
#include "obdf/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace obdf {

EffectiveHamiltonian as_effective(const IntegralSet& ints) {
  EffectiveHamiltonian heff;
  heff.n_act = ints.n_orb;
  heff.h_eff = ints.h;
  heff.g_act = ints.g;
  heff.e_scalar = ints.e_core;
  heff.label = "FULL";
  return heff;
}

IntegralSet as_integral_set(const EffectiveHamiltonian& heff, int n_elec, int ms2) {
  IntegralSet ints;
  ints.resize(heff.n_act);
  ints.n_elec = n_elec;
  ints.ms2 = ms2;
  ints.h = heff.h_eff;
  ints.g = heff.g_act;
  ints.e_core = heff.e_scalar;
  return ints;
}

namespace {

std::uint64_t comb(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * static_cast<std::uint64_t>(n - i) / (i + 1);
  return r;
}

// next bit permutation with same popcount (Gosper)
std::uint64_t next_perm(std::uint64_t v) {
  std::uint64_t t = v | (v - 1);
  return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

std::vector<std::uint64_t> sector_masks(int n_orb, int k) {
  std::vector<std::uint64_t> out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  std::uint64_t v = (k == 64) ? ~0ULL : ((1ULL << k) - 1);
  const std::uint64_t last = v << (n_orb - k);
  while (true) {
    out.push_back(v);
    if (v == last) break;
    v = next_perm(v);
  }
  return out;
}

inline std::uint64_t mask_between(int a, int b) {
  if (a > b) std::swap(a, b);
  if (b - a < 2) return 0;
  return ((1ULL << (b - a - 1)) - 1) << (a + 1);
}

// sign of a_to^dagger a_from acting on |mask>, from occupied, to empty
inline int single_sign(std::uint64_t mask, int from, int to) {
  return std::popcount(mask & mask_between(from, to)) % 2 == 0 ? 1 : -1;
}

struct SingleExc {
  int hole = -1, part = -1;  // hole in ket, particle in bra
};

}  // namespace

SectorBasis enumerate_sector(int n_orb, int n_alpha, int n_beta, std::size_t cap) {
  if (n_orb < 1 || n_orb > 32)
    throw std::invalid_argument("enumerate_sector: n_orb out of range [1,32]");
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orb || n_beta > n_orb)
    throw std::invalid_argument("enumerate_sector: electron counts out of range");
  const std::uint64_t dim = comb(n_orb, n_alpha) * comb(n_orb, n_beta);
  if (dim > cap)
    throw std::runtime_error("enumerate_sector: sector dimension " +
                             std::to_string(dim) + " exceeds capacity cap");
  SectorBasis basis;
  basis.n_orb = n_orb;
  basis.n_alpha = n_alpha;
  basis.n_beta = n_beta;
  basis.dets.reserve(dim);
  const auto amasks = sector_masks(n_orb, n_alpha);
  const auto bmasks = sector_masks(n_orb, n_beta);
  for (std::uint64_t b : bmasks)
    for (std::uint64_t a : amasks) basis.dets.push_back({a, b});
  basis.index.reserve(basis.dets.size() * 2);
  for (std::size_t i = 0; i < basis.dets.size(); ++i) basis.index.emplace(basis.dets[i], i);
  return basis;
}

double slater_condon(const Determinant& d1, const Determinant& d2,
                     const EffectiveHamiltonian& heff) {
  const std::uint64_t da = d1.alpha ^ d2.alpha;
  const std::uint64_t db = d1.beta ^ d2.beta;
  const int na = std::popcount(da);
  const int nb = std::popcount(db);
  const int degree = (na + nb) / 2;
  if (degree > 2) return 0.0;
  const auto& h = heff.h_eff;
  const int n = heff.n_act;

  auto occ_list = [n](std::uint64_t m) {
    std::vector<int> v;
    v.reserve(std::popcount(m));
    while (m) {
      v.push_back(std::countr_zero(m));
      m &= m - 1;
    }
    (void)n;
    return v;
  };

  if (degree == 0) {
    double e = heff.e_scalar;
    const auto oa = occ_list(d1.alpha);
    const auto ob = occ_list(d1.beta);
    for (int p : oa) e += h(p, p);
    for (int p : ob) e += h(p, p);
    for (int p : oa)
      for (int q : oa) e += 0.5 * (heff.g_val(p, p, q, q) - heff.g_val(p, q, q, p));
    for (int p : ob)
      for (int q : ob) e += 0.5 * (heff.g_val(p, p, q, q) - heff.g_val(p, q, q, p));
    for (int p : oa)
      for (int q : ob) e += heff.g_val(p, p, q, q);
    return e;
  }

  if (degree == 1) {
    // p occupied in d1 only, q in d2 only, same spin
    const bool alpha = (na == 2);
    const std::uint64_t diff = alpha ? da : db;
    const std::uint64_t m1 = alpha ? d1.alpha : d1.beta;
    const std::uint64_t m2 = alpha ? d2.alpha : d2.beta;
    const int p = std::countr_zero(diff & m1);
    const int q = std::countr_zero(diff & m2);
    const int sign = single_sign(m2, q, p);
    double e = h(p, q);
    const auto osame = occ_list((alpha ? d2.alpha : d2.beta) & ~(1ULL << q));
    const auto oother = occ_list(alpha ? d2.beta : d2.alpha);
    for (int i : osame) e += heff.g_val(p, q, i, i) - heff.g_val(p, i, i, q);
    for (int i : oother) e += heff.g_val(p, q, i, i);
    return sign * e;
  }

  // degree == 2
  if (na == 2 && nb == 2) {
    const int pa = std::countr_zero(da & d1.alpha);
    const int qa = std::countr_zero(da & d2.alpha);
    const int pb = std::countr_zero(db & d1.beta);
    const int qb = std::countr_zero(db & d2.beta);
    const int sign = single_sign(d2.alpha, qa, pa) * single_sign(d2.beta, qb, pb);
    return sign * heff.g_val(pa, qa, pb, qb);
  }
  // same-spin double
  const bool alpha = (na == 4);
  const std::uint64_t m1 = alpha ? d1.alpha : d1.beta;
  const std::uint64_t m2 = alpha ? d2.alpha : d2.beta;
  const std::uint64_t diff = alpha ? da : db;
  std::uint64_t holes = diff & m2;  // occupied in d2 only
  std::uint64_t parts = diff & m1;  // occupied in d1 only
  const int q1 = std::countr_zero(holes);
  holes &= holes - 1;
  const int q2 = std::countr_zero(holes);
  const int p1 = std::countr_zero(parts);
  parts &= parts - 1;
  const int p2 = std::countr_zero(parts);
  // apply q1 -> p1 then q2 -> p2 on the intermediate mask
  int sign = single_sign(m2, q1, p1);
  const std::uint64_t mid = (m2 & ~(1ULL << q1)) | (1ULL << p1);
  sign *= single_sign(mid, q2, p2);
  return sign * (heff.g_val(p1, q1, p2, q2) - heff.g_val(p1, q2, p2, q1));
}

namespace {

void assemble_row(std::size_t i, const std::vector<Determinant>& dets,
                  const std::unordered_map<Determinant, std::size_t, DeterminantHash>& index,
                  const EffectiveHamiltonian& heff, bool screened,
                  std::vector<std::pair<std::uint32_t, double>>& row, double& diag) {
  const Determinant& di = dets[i];
  diag = slater_condon(di, di, heff);
  row.clear();
  row.emplace_back(static_cast<std::uint32_t>(i), diag);
  if (!screened) {
    for (std::size_t j = 0; j < dets.size(); ++j) {
      if (j == i) continue;
      const double v = slater_condon(di, dets[j], heff);
      if (v != 0.0) row.emplace_back(static_cast<std::uint32_t>(j), v);
    }
  } else {
    const int n = heff.n_act;
    auto probe = [&](const Determinant& dj) {
      auto it = index.find(dj);
      if (it == index.end() || it->second == i) return;
      const double v = slater_condon(di, dj, heff);
      if (v != 0.0) row.emplace_back(static_cast<std::uint32_t>(it->second), v);
    };
    auto singles_of = [n](std::uint64_t m, auto&& emit) {
      for (int q = 0; q < n; ++q) {
        if (!(m >> q & 1)) continue;
        for (int p = 0; p < n; ++p) {
          if (m >> p & 1) continue;
          emit((m & ~(1ULL << q)) | (1ULL << p));
        }
      }
    };
    // alpha singles and alpha-alpha doubles
    singles_of(di.alpha, [&](std::uint64_t a1) {
      probe({a1, di.beta});
      singles_of(a1, [&](std::uint64_t a2) { probe({a2, di.beta}); });
    });
    // beta singles and beta-beta doubles
    singles_of(di.beta, [&](std::uint64_t b1) {
      probe({di.alpha, b1});
      singles_of(b1, [&](std::uint64_t b2) { probe({di.alpha, b2}); });
    });
    // alpha-beta doubles
    singles_of(di.alpha, [&](std::uint64_t a1) {
      singles_of(di.beta, [&](std::uint64_t b1) { probe({a1, b1}); });
    });
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end(),
                          [](const auto& x, const auto& y) { return x.first == y.first; }),
              row.end());
  }
}

SparseHamiltonian build_impl(const std::vector<Determinant>& dets,
                             const EffectiveHamiltonian& heff, bool parallel) {
  SparseHamiltonian H;
  H.dim = dets.size();
  H.rows.resize(H.dim);
  H.diag.resize(static_cast<Eigen::Index>(H.dim));
  std::unordered_map<Determinant, std::size_t, DeterminantHash> index;
  index.reserve(dets.size() * 2);
  for (std::size_t i = 0; i < dets.size(); ++i)
    if (!index.emplace(dets[i], i).second)
      throw std::invalid_argument("build_projected_hamiltonian: duplicate determinant");
  const bool screened = parallel && dets.size() > 2000;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
#endif
  for (long long i = 0; i < static_cast<long long>(H.dim); ++i) {
    double d;
    assemble_row(static_cast<std::size_t>(i), dets, index, heff, screened, H.rows[i], d);
    H.diag[i] = d;
  }
  return H;
}

}  // namespace

SparseHamiltonian build_projected_hamiltonian(const std::vector<Determinant>& dets,
                                              const EffectiveHamiltonian& heff) {
  return build_impl(dets, heff, true);
}

SparseHamiltonian build_projected_hamiltonian_serial(const std::vector<Determinant>& dets,
                                                     const EffectiveHamiltonian& heff) {
  return build_impl(dets, heff, false);
}

Eigen::VectorXd SparseHamiltonian::multiply(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long i = 0; i < static_cast<long long>(dim); ++i) {
    double acc = 0.0;
    for (const auto& [j, v] : rows[i]) acc += v * x[j];
    y[i] = acc;
  }
  return y;
}

Eigen::VectorXd SparseHamiltonian::multiply_serial(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y(x.size());
  for (std::size_t i = 0; i < dim; ++i) {
    double acc = 0.0;
    for (const auto& [j, v] : rows[i]) acc += v * x[j];
    y[static_cast<Eigen::Index>(i)] = acc;
  }
  return y;
}

GroundState davidson_ground(const SparseHamiltonian& hmat, const DavidsonOptions& opt) {
  const Eigen::Index n = static_cast<Eigen::Index>(hmat.dim);
  if (n < 1) throw std::invalid_argument("davidson_ground: empty matrix");
  if (n == 1) return {hmat.diag[0], Eigen::VectorXd::Ones(1)};

  // The sparsity graph of a projected subspace can fall apart into several
  // connected components; residual expansion never leaves the component of the
  // starting vector, so seed one guess per component (its lowest diagonal).
  std::vector<Eigen::Index> comp(static_cast<std::size_t>(n));
  std::iota(comp.begin(), comp.end(), 0);
  const auto root = [&comp](Eigen::Index i) {
    while (comp[static_cast<std::size_t>(i)] != i) {
      comp[static_cast<std::size_t>(i)] =
          comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(i)])];
      i = comp[static_cast<std::size_t>(i)];
    }
    return i;
  };
  for (std::size_t i = 0; i < hmat.dim; ++i)
    for (const auto& [j, v] : hmat.rows[i])
      if (v != 0.0) comp[static_cast<std::size_t>(root(static_cast<Eigen::Index>(i)))] =
          root(static_cast<Eigen::Index>(j));
  std::unordered_map<Eigen::Index, Eigen::Index> comp_min;  // root -> argmin diag
  for (Eigen::Index i = 0; i < n; ++i) {
    auto [it, fresh] = comp_min.emplace(root(i), i);
    if (!fresh && hmat.diag[i] < hmat.diag[it->second]) it->second = i;
  }

  std::vector<Eigen::VectorXd> V, W;
  for (const auto& [r, i0] : comp_min) {
    Eigen::VectorXd v0 = Eigen::VectorXd::Zero(n);
    v0[i0] = 1.0;
    V.push_back(v0);
    W.push_back(hmat.multiply(v0));
  }

  // A converged Ritz pair can still be an excited eigenvector when the ground
  // state lives in a symmetry sector no coordinate seed touches. A dense
  // deterministic-random start vector overlaps every sector, so the subspace
  // minimum cannot settle above the ground state.
  {
    Eigen::VectorXd rv(n);
    for (Eigen::Index i = 0; i < n; ++i)
      rv[i] = rng_uniform(0x9e3779b9, static_cast<std::uint64_t>(i)) - 0.5;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : V) rv -= v.dot(rv) * v;
    if (rv.norm() > 1e-8) {
      rv.normalize();
      V.push_back(rv);
      W.push_back(hmat.multiply(rv));
    }
  }

  Eigen::VectorXd x = V.front();
  double theta = hmat.diag.minCoeff();
  const int max_space = std::min<int>(
      std::max<int>(opt.max_space, static_cast<int>(V.size()) + 8),
      static_cast<int>(n));
  for (int iter = 0; iter < opt.max_restarts * max_space; ++iter) {
    const int m = static_cast<int>(V.size());
    Eigen::MatrixXd S(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) S(a, b) = V[a].dot(W[b]);
    S = 0.5 * (S + S.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    theta = es.eigenvalues()[0];
    const Eigen::VectorXd s = es.eigenvectors().col(0);
    x.setZero();
    Eigen::VectorXd wx = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < m; ++a) {
      x += s[a] * V[a];
      wx += s[a] * W[a];
    }
    Eigen::VectorXd r = wx - theta * x;
    if (r.norm() < opt.tol) return {theta, x / x.norm()};

    if (m >= max_space) {
      // restart with the current Ritz vector, keeping one direction per
      // component so no disconnected block drops out of the search space
      V.clear();
      W.clear();
      x.normalize();
      V.push_back(x);
      W.push_back(hmat.multiply(x));
      for (const auto& [r, i0] : comp_min) {
        Eigen::VectorXd v0 = Eigen::VectorXd::Zero(n);
        v0[i0] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& v : V) v0 -= v.dot(v0) * v;
        if (v0.norm() < 1e-8) continue;
        v0.normalize();
        V.push_back(v0);
        W.push_back(hmat.multiply(v0));
      }
    }
    // diagonal preconditioner
    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double denom = theta - hmat.diag[i];
      if (std::abs(denom) < 1e-8) denom = std::copysign(1e-8, denom == 0.0 ? -1.0 : denom);
      t[i] = r[i] / denom;
    }
    // orthogonalize twice against the current space
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& v : V) t -= v.dot(t) * v;
    const double tn = t.norm();
    if (tn < 1e-12) {
      // space exhausted; fall back to an unexplored coordinate direction
      bool found = false;
      for (Eigen::Index i = 0; i < n && !found; ++i) {
        t.setZero();
        t[i] = 1.0;
        for (int pass = 0; pass < 2; ++pass)
          for (const auto& v : V) t -= v.dot(t) * v;
        if (t.norm() > 1e-6) found = true;
      }
      if (!found) return {theta, x / x.norm()};
      t.normalize();
    } else {
      t /= tn;
    }
    V.push_back(t);
    W.push_back(hmat.multiply(t));
  }
  throw std::runtime_error("davidson_ground: no convergence after configured restarts");
}

std::pair<double, CiVector> fci_ground(const EffectiveHamiltonian& heff,
                                       const SectorBasis& basis) {
  auto H = build_projected_hamiltonian(basis.dets, heff);
  auto gs = davidson_ground(H);
  CiVector psi;
  psi.basis = &basis;
  psi.c = gs.c;
  return {gs.energy, psi};
}

FciResult fci_ground(const EffectiveHamiltonian& heff, int n_alpha, int n_beta) {
  FciResult res;
  res.basis = enumerate_sector(heff.n_act, n_alpha, n_beta);
  auto H = build_projected_hamiltonian(res.basis.dets, heff);
  auto gs = davidson_ground(H);
  res.energy = gs.energy;
  res.c = std::move(gs.c);
  return res;
}

FciResult fci_ground(const IntegralSet& ints, int n_alpha, int n_beta) {
  return fci_ground(as_effective(ints), n_alpha, n_beta);
}

OneRdm one_rdm(const CiVector& psi, const std::vector<Determinant>& dets, int n_orb) {
  OneRdm rdm;
  Eigen::VectorXd c = psi.c;
  const double nrm = c.norm();
  if (std::abs(nrm - 1.0) > 1e-10) {
    if (nrm == 0.0) throw std::invalid_argument("one_rdm: zero vector");
    c /= nrm;
    rdm.renormalized = true;
  }
  rdm.occupations = Eigen::VectorXd::Zero(2 * n_orb);
  rdm.alpha = Eigen::MatrixXd::Zero(n_orb, n_orb);
  rdm.beta = Eigen::MatrixXd::Zero(n_orb, n_orb);
  std::unordered_map<Determinant, std::size_t, DeterminantHash> index;
  index.reserve(dets.size() * 2);
  for (std::size_t i = 0; i < dets.size(); ++i) index.emplace(dets[i], i);

  for (std::size_t i = 0; i < dets.size(); ++i) {
    const double ci = c[static_cast<Eigen::Index>(i)];
    if (ci == 0.0) continue;
    const Determinant& d = dets[i];
    for (int p = 0; p < n_orb; ++p) {
      if (d.alpha >> p & 1) {
        rdm.alpha(p, p) += ci * ci;
        rdm.occupations[p] += ci * ci;
      }
      if (d.beta >> p & 1) {
        rdm.beta(p, p) += ci * ci;
        rdm.occupations[n_orb + p] += ci * ci;
      }
    }
    // single-excitation connections, alpha then beta
    for (int q = 0; q < n_orb; ++q) {
      if (d.alpha >> q & 1) {
        for (int p = 0; p < n_orb; ++p) {
          if (p == q || (d.alpha >> p & 1)) continue;
          Determinant dj{(d.alpha & ~(1ULL << q)) | (1ULL << p), d.beta};
          auto it = index.find(dj);
          if (it == index.end()) continue;
          const double cj = c[static_cast<Eigen::Index>(it->second)];
          if (cj == 0.0) continue;
          rdm.alpha(p, q) += cj * ci * single_sign(d.alpha, q, p);
        }
      }
      if (d.beta >> q & 1) {
        for (int p = 0; p < n_orb; ++p) {
          if (p == q || (d.beta >> p & 1)) continue;
          Determinant dj{d.alpha, (d.beta & ~(1ULL << q)) | (1ULL << p)};
          auto it = index.find(dj);
          if (it == index.end()) continue;
          const double cj = c[static_cast<Eigen::Index>(it->second)];
          if (cj == 0.0) continue;
          rdm.beta(p, q) += cj * ci * single_sign(d.beta, q, p);
        }
      }
    }
  }
  return rdm;
}

OneRdm one_rdm(const CiVector& psi) {
  if (!psi.basis) throw std::invalid_argument("one_rdm: CiVector has no basis");
  return one_rdm(psi, psi.basis->dets, psi.basis->n_orb);
}

}  // namespace obdf
