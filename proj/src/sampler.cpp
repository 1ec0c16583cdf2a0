#include "obdf/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "obdf/rng.hpp"

namespace obdf {

namespace {

std::string bit_string(std::uint64_t raw, int width) {
  std::string s(width, '0');
  for (int b = 0; b < width; ++b)
    if (raw >> b & 1) s[width - 1 - b] = '1';
  return s;
}

}  // namespace

void write_samples(std::ostream& os, const SampleSet& s) {
  os << s.n_orb << ' ' << s.shots << '\n';
  for (const auto& [raw, count] : s.counts)
    os << bit_string(raw, 2 * s.n_orb) << ' ' << count << '\n';
}

void write_samples_file(const std::string& path, const SampleSet& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_samples(os, s);
}

SampleSet parse_samples(std::istream& is) {
  SampleSet s;
  if (!(is >> s.n_orb >> s.shots))
    throw std::runtime_error("sample set: malformed header (want `norb shots`)");
  if (s.n_orb < 1 || s.n_orb > 32)
    throw std::runtime_error("sample set: n_orb out of range");
  std::string bits;
  long long count, total = 0;
  while (is >> bits >> count) {
    if (static_cast<int>(bits.size()) != 2 * s.n_orb)
      throw std::runtime_error("sample set: bitstring width mismatch: " + bits);
    std::uint64_t raw = 0;
    for (char ch : bits) {
      if (ch != '0' && ch != '1')
        throw std::runtime_error("sample set: non-binary bitstring: " + bits);
      raw = (raw << 1) | static_cast<std::uint64_t>(ch - '0');
    }
    if (count < 0) throw std::runtime_error("sample set: negative count");
    s.counts[raw] += count;
    total += count;
  }
  if (total != s.shots)
    throw std::runtime_error("sample set: counts do not sum to the declared shots");
  return s;
}

SampleSet parse_samples_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return parse_samples(is);
}

SampleSet sample_exact(const CiVector& psi, long long shots, std::uint64_t seed) {
  if (!psi.basis) throw std::invalid_argument("sample_exact: unbound CI vector");
  const SectorBasis& basis = *psi.basis;
  SampleSet out;
  out.n_orb = basis.n_orb;
  out.shots = shots;
  if (shots == 0) return out;

  const std::size_t dim = basis.size();
  std::vector<double> cdf(dim);
  double acc = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    acc += psi.c(static_cast<Eigen::Index>(i)) * psi.c(static_cast<Eigen::Index>(i));
    cdf[i] = acc;
  }
  if (acc <= 0.0) throw std::invalid_argument("sample_exact: zero-norm state");
  for (double& v : cdf) v /= acc;

  std::map<std::uint64_t, long long> counts;
#ifdef _OPENMP
#pragma omp parallel
  {
    std::map<std::uint64_t, long long> local;
#pragma omp for schedule(static)
    for (long long shot = 0; shot < shots; ++shot) {
      const double u = rng_uniform(seed, static_cast<std::uint64_t>(shot));
      const std::size_t i =
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
      local[SampleSet::raw_of(basis.dets[std::min(i, dim - 1)], basis.n_orb)]++;
    }
#pragma omp critical
    for (const auto& [k, v] : local) counts[k] += v;
  }
#else
  for (long long shot = 0; shot < shots; ++shot) {
    const double u = rng_uniform(seed, static_cast<std::uint64_t>(shot));
    const std::size_t i = std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
    counts[SampleSet::raw_of(basis.dets[std::min(i, dim - 1)], basis.n_orb)]++;
  }
#endif
  out.counts = std::move(counts);
  return out;
}

namespace {

// action of sum_pq k_pq (a+_pa a_qa + a+_pb a_qb) on a sector CI vector
Eigen::VectorXcd apply_one_body(const Eigen::MatrixXd& k, const SectorBasis& basis,
                                const Eigen::VectorXcd& x) {
  const int n = basis.n_orb;
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
  auto parity = [](std::uint64_t m, int p) {
    return (std::popcount(m & ((1ULL << p) - 1)) & 1) ? -1.0 : 1.0;
  };
  for (std::size_t row = 0; row < basis.size(); ++row) {
    const std::complex<double> coef = x(static_cast<Eigen::Index>(row));
    if (coef == std::complex<double>(0.0)) continue;
    const Determinant& d = basis.dets[row];
    for (int spin = 0; spin < 2; ++spin) {
      const std::uint64_t occ = spin == 0 ? d.alpha : d.beta;
      for (int q = 0; q < n; ++q) {
        if (!(occ >> q & 1)) continue;
        const std::uint64_t m1 = occ & ~(1ULL << q);
        const double s1 = parity(occ, q);
        for (int p = 0; p < n; ++p) {
          if (m1 >> p & 1) continue;
          const double v = k(p, q);
          if (v == 0.0) continue;
          Determinant d2 = d;
          (spin == 0 ? d2.alpha : d2.beta) = m1 | (1ULL << p);
          const auto it = basis.index.find(d2);
          if (it == basis.index.end()) continue;  // unreachable within sector
          y(static_cast<Eigen::Index>(it->second)) += coef * v * s1 * parity(m1, p);
        }
      }
    }
  }
  return y;
}

// exp(K-hat) |x> via scaling and squaring with a Taylor inner step
Eigen::VectorXcd apply_exp_one_body(const Eigen::MatrixXd& k, const SectorBasis& basis,
                                    Eigen::VectorXcd x) {
  const double nrm = k.norm();
  int s = 0;
  while (nrm / (1 << s) > 0.5 && s < 40) ++s;
  const Eigen::MatrixXd h = k / static_cast<double>(1 << s);
  for (int rep = 0; rep < (1 << s); ++rep) {
    Eigen::VectorXcd term = x;
    Eigen::VectorXcd acc = x;
    for (int m = 1; m <= 80; ++m) {
      term = apply_one_body(h, basis, term) / static_cast<double>(m);
      acc += term;
      if (term.norm() < 1e-16 * std::max(1.0, acc.norm())) break;
    }
    x = std::move(acc);
  }
  return x;
}

}  // namespace

CiVector prepare_ucj_state(const UcjAnsatz& ansatz, const SectorBasis& basis) {
  const auto ref_it = basis.index.find(ansatz.reference);
  if (ref_it == basis.index.end())
    throw std::invalid_argument("prepare_ucj_state: reference outside the sector");
  const int n = basis.n_orb;

  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  psi(static_cast<Eigen::Index>(ref_it->second)) = 1.0;

  for (const UcjLayer& layer : ansatz.layers) {
    if ((layer.k + layer.k.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("prepare_ucj_state: K not anti-symmetric");
    if ((layer.j - layer.j.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("prepare_ucj_state: J not symmetric");
    psi = apply_exp_one_body(-layer.k, basis, std::move(psi));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const Determinant& d = basis.dets[i];
      Eigen::VectorXd occ(n);
      for (int p = 0; p < n; ++p)
        occ(p) = static_cast<double>((d.alpha >> p & 1) + (d.beta >> p & 1));
      const double theta = occ.dot(layer.j * occ);
      psi(static_cast<Eigen::Index>(i)) *= std::exp(std::complex<double>(0.0, theta));
    }
    psi = apply_exp_one_body(layer.k, basis, std::move(psi));
  }

  CiVector out;
  out.basis = &basis;
  if (psi.imag().norm() < 1e-10)
    out.c = psi.real();
  else
    out.c = psi.cwiseAbs();
  return out;
}

namespace {

Eigen::MatrixXd t2_matrix(const Amplitudes& amp) {
  const int no = static_cast<int>(amp.occ_list.size());
  const int nv = static_cast<int>(amp.virt_list.size());
  const int dim = no * nv;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j)
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b) m(i * nv + a, j * nv + b) = amp.at(i, j, a, b);
  return 0.5 * (m + m.transpose()).eval();
}

}  // namespace

int t2_rank(const Amplitudes& amp) {
  const Eigen::MatrixXd m = t2_matrix(amp);
  if (m.rows() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  int rank = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) > 1e-12) ++rank;
  return rank;
}

UcjAnsatz ucj_from_t2(const Amplitudes& amp, int n_layers, int n_orb) {
  const int no = static_cast<int>(amp.occ_list.size());
  const int nv = static_cast<int>(amp.virt_list.size());
  const int dim = no * nv;
  const Eigen::MatrixXd m = t2_matrix(amp);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  std::vector<int> order(dim);
  for (int i = 0; i < dim; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });
  int rank = 0;
  while (rank < dim && std::abs(es.eigenvalues()(order[rank])) > 1e-12) ++rank;
  if (n_layers > rank) {
    std::ostringstream msg;
    msg << "ucj_from_t2: requested " << n_layers
        << " layers but the amplitude matrix has rank " << rank;
    throw std::invalid_argument(msg.str());
  }

  UcjAnsatz ansatz;
  const std::uint64_t occ_mask = (no == 0) ? 0 : ((1ULL << no) - 1);
  ansatz.reference = {occ_mask, occ_mask};
  for (int mu = 0; mu < n_layers; ++mu) {
    const double lambda = es.eigenvalues()(order[mu]);
    const Eigen::VectorXd vec = es.eigenvectors().col(order[mu]);
    // lift the (occ,virt) mode to a symmetric one-body matrix
    Eigen::MatrixXd dmat = Eigen::MatrixXd::Zero(n_orb, n_orb);
    for (int i = 0; i < no; ++i)
      for (int a = 0; a < nv; ++a) {
        dmat(amp.occ_list[i], amp.virt_list[a]) = vec(i * nv + a);
        dmat(amp.virt_list[a], amp.occ_list[i]) = vec(i * nv + a);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ed(dmat);
    Eigen::MatrixXd v = ed.eigenvectors();
    if (v.determinant() < 0) v.col(0) *= -1.0;  // land in SO(n) for a real log
    const Eigen::VectorXd d = ed.eigenvalues();

    // K = log(V) through the complex eigendecomposition; V orthogonal with
    // det +1 has an anti-symmetric real logarithm.
    Eigen::ComplexEigenSolver<Eigen::MatrixXd> ev(v);
    Eigen::VectorXcd loglam = ev.eigenvalues().array().log();
    Eigen::MatrixXd k =
        (ev.eigenvectors() * loglam.asDiagonal() * ev.eigenvectors().inverse())
            .real();
    k = 0.5 * (k - k.transpose()).eval();

    UcjLayer layer;
    layer.k = k;
    layer.j = lambda * d * d.transpose();
    ansatz.layers.push_back(std::move(layer));
  }
  return ansatz;
}

SampleSet apply_noise(const SampleSet& s, const NoiseModel& noise) {
  if (noise.p_flip < 0.0 || noise.p_flip > 1.0)
    throw std::invalid_argument("apply_noise: p_flip outside [0,1]");
  SampleSet out;
  out.n_orb = s.n_orb;
  out.shots = s.shots;
  if (noise.p_flip == 0.0) {
    out.counts = s.counts;
    return out;
  }
  const int width = 2 * s.n_orb;
  long long shot = 0;
  for (const auto& [raw, count] : s.counts) {
    for (long long rep = 0; rep < count; ++rep, ++shot) {
      std::uint64_t flipped = raw;
      for (int b = 0; b < width; ++b)
        if (rng_uniform(noise.seed, static_cast<std::uint64_t>(shot),
                        static_cast<std::uint64_t>(b)) < noise.p_flip)
          flipped ^= 1ULL << b;
      out.counts[flipped]++;
    }
  }
  return out;
}

}  // namespace obdf
