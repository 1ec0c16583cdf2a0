#include "obdf/sqd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "json.hpp"

#include "obdf/rng.hpp"

namespace obdf {

FilteredSamples filter_valid(const SampleSet& s, int n_alpha, int n_beta) {
  FilteredSamples out;
  const int width = 2 * s.n_orb;
  for (const auto& [raw, count] : s.counts) {
    if (width < 64 && (raw >> width) != 0)
      throw std::invalid_argument("filter_valid: bitstring wider than 2*n_orb");
    const Determinant d = SampleSet::det_of(raw, s.n_orb);
    if (std::popcount(d.alpha) == n_alpha && std::popcount(d.beta) == n_beta)
      out.valid[d] += count;
    else
      out.invalid[raw] += count;
  }
  return out;
}

double relu_weight(double u, double h, double delta, bool* degenerate) {
  if (h <= 0.0 || h >= 1.0) {
    if (degenerate) *degenerate = true;
    return u;
  }
  if (u <= h) return delta * u / h;
  return delta + (1.0 - delta) * (u - h) / (1.0 - h);
}

namespace {

void add_flag(std::vector<std::string>* flags, const std::string& msg) {
  if (!flags) return;
  if (std::find(flags->begin(), flags->end(), msg) == flags->end())
    flags->push_back(msg);
}

// pick `take` indices out of `cand` without replacement, probability
// proportional to weight (exponential-key reservoir scheme); zero-weight
// candidates are chosen only if every weight vanishes (uniform fallback).
std::vector<int> weighted_pick(const std::vector<int>& cand,
                               const std::vector<double>& weight, int take,
                               std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                               std::vector<std::string>* flags,
                               const char* zero_msg) {
  double total = 0.0;
  for (double w : weight) total += w;
  std::vector<std::pair<double, int>> keyed(cand.size());
  for (std::size_t i = 0; i < cand.size(); ++i) {
    const double r = rng_uniform(seed, a, b, static_cast<std::uint64_t>(cand[i]));
    double key;
    if (total <= 0.0) {
      key = r;  // uniform fallback
    } else if (weight[i] > 0.0) {
      key = std::pow(r, 1.0 / weight[i]);
    } else {
      key = -1.0;  // never beats a positive-weight candidate
    }
    keyed[i] = {key, cand[i]};
  }
  if (total <= 0.0 && !cand.empty()) add_flag(flags, zero_msg);
  std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
    return x.first > y.first || (x.first == y.first && x.second < y.second);
  });
  std::vector<int> out;
  for (int i = 0; i < take && i < static_cast<int>(keyed.size()); ++i)
    out.push_back(keyed[i].second);
  return out;
}

// restore the exact per-spin Hamming weight of one spin sector
std::uint64_t fix_sector(std::uint64_t bits, int n_orb, int target,
                         const Eigen::VectorXd& occ, int occ_offset, double h,
                         double delta, std::uint64_t seed, std::uint64_t shot,
                         int spin, std::vector<std::string>* flags) {
  const int cur = std::popcount(bits);
  if (cur == target) return bits;
  const bool surplus = cur > target;
  std::vector<int> cand;
  std::vector<double> weight;
  for (int p = 0; p < n_orb; ++p) {
    const bool set = bits >> p & 1;
    if (set != surplus) continue;  // surplus: flip occupied; deficit: flip empty
    const double x = set ? 1.0 : 0.0;
    cand.push_back(p);
    weight.push_back(relu_weight(std::abs(x - occ(occ_offset + p)), h, delta));
  }
  const std::vector<int> flips =
      weighted_pick(cand, weight, std::abs(cur - target), seed, shot,
                    static_cast<std::uint64_t>(spin), flags,
                    "recover_configurations: zero-weight sector, uniform fallback");
  for (int p : flips) bits ^= 1ULL << p;
  return bits;
}

}  // namespace

std::map<Determinant, long long> recover_configurations(
    const std::map<std::uint64_t, long long>& invalid, const Eigen::VectorXd& occ,
    int n_orb, int n_alpha, int n_beta, double delta, std::uint64_t seed,
    std::vector<std::string>* flags) {
  if (occ.size() != 2 * n_orb)
    throw std::invalid_argument("recover_configurations: occupation vector size");
  const double h = static_cast<double>(n_alpha + n_beta) / (2.0 * n_orb);
  std::map<Determinant, long long> out;
  std::uint64_t shot = 0;
  for (const auto& [raw, count] : invalid) {
    for (long long rep = 0; rep < count; ++rep, ++shot) {
      Determinant d = SampleSet::det_of(raw, n_orb);
      d.alpha = fix_sector(d.alpha, n_orb, n_alpha, occ, 0, h, delta, seed, shot, 0, flags);
      d.beta = fix_sector(d.beta, n_orb, n_beta, occ, n_orb, h, delta, seed, shot, 1, flags);
      if (std::popcount(d.alpha) != n_alpha || std::popcount(d.beta) != n_beta)
        throw std::logic_error("recover_configurations: weight restoration failed");
      out[d] += 1;
    }
  }
  return out;
}

std::vector<std::vector<Determinant>> make_batches(
    const std::map<Determinant, long long>& pool, const SqdConfig& cfg, int n_orb,
    int n_alpha, int n_beta, std::uint64_t iter_key,
    std::vector<std::string>* flags) {
  if (pool.empty()) throw std::invalid_argument("make_batches: empty pool");
  std::vector<Determinant> configs;
  std::vector<double> mult;
  configs.reserve(pool.size());
  for (const auto& [d, count] : pool) {
    configs.push_back(d);
    mult.push_back(static_cast<double>(count));
  }
  if (static_cast<int>(configs.size()) < cfg.batch_size)
    add_flag(flags, "make_batches: pool smaller than the requested batch size");

  const std::uint64_t a_low = (n_alpha == 0) ? 0 : ((1ULL << n_alpha) - 1);
  const std::uint64_t b_low = (n_beta == 0) ? 0 : ((1ULL << n_beta) - 1);
  const Determinant ref{a_low, b_low};

  std::vector<std::vector<Determinant>> batches(cfg.k_batches);
  for (int k = 0; k < cfg.k_batches; ++k) {
    std::vector<std::pair<double, std::size_t>> keyed(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const double r = rng_uniform(cfg.seed, iter_key,
                                   static_cast<std::uint64_t>(k), i);
      keyed[i] = {std::pow(r, 1.0 / mult[i]), i};
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) {
      return x.first > y.first || (x.first == y.first && x.second < y.second);
    });
    std::vector<Determinant>& batch = batches[k];
    const int take = std::min<int>(cfg.batch_size, static_cast<int>(configs.size()));
    for (int i = 0; i < take; ++i) batch.push_back(configs[keyed[i].second]);
    if (cfg.include_reference &&
        std::find(batch.begin(), batch.end(), ref) == batch.end()) {
      if (static_cast<int>(batch.size()) >= cfg.batch_size) batch.pop_back();
      batch.push_back(ref);
    }
    std::sort(batch.begin(), batch.end());
  }
  return batches;
}

namespace {

struct IterationOutcome {
  std::vector<double> energies;
  Eigen::VectorXd occ_avg;
  std::size_t best_dim = 0;
  double best_energy = 0.0;
};

IterationOutcome run_iteration(const EffectiveHamiltonian& heff,
                               const std::vector<std::vector<Determinant>>& batches) {
  IterationOutcome out;
  const int n = heff.n_act;
  out.occ_avg = Eigen::VectorXd::Zero(2 * n);
  out.best_energy = std::numeric_limits<double>::infinity();
  for (const auto& batch : batches) {
    const SparseHamiltonian hmat = build_projected_hamiltonian(batch, heff);
    const GroundState gs = davidson_ground(hmat);
    const OneRdm rdm = one_rdm(CiVector{nullptr, gs.c}, batch, n);
    out.occ_avg += rdm.occupations;
    out.energies.push_back(gs.energy);
    if (gs.energy < out.best_energy) {
      out.best_energy = gs.energy;
      out.best_dim = batch.size();
    }
  }
  out.occ_avg /= static_cast<double>(batches.size());
  return out;
}

void merge_into(std::map<Determinant, long long>& dst,
                const std::map<Determinant, long long>& src) {
  for (const auto& [d, count] : src) dst[d] += count;
}

}  // namespace

SqdResult sqd_solve(const EffectiveHamiltonian& heff, const SampleSet& samples,
                    int n_alpha, int n_beta, const SqdConfig& cfg) {
  if (samples.n_orb != heff.n_act)
    throw std::invalid_argument("sqd_solve: sample width does not match the Hamiltonian");
  if (cfg.k_batches < 1 || cfg.batch_size < 1)
    throw std::invalid_argument("sqd_solve: K and d must be positive");
  const int n = heff.n_act;

  FilteredSamples fs = filter_valid(samples, n_alpha, n_beta);
  if (fs.valid.empty() && fs.invalid.empty())
    throw std::runtime_error("sqd_solve: no samples to work with");

  SqdResult res;
  std::ofstream trace;
  if (!cfg.trace_path.empty()) {
    trace.open(cfg.trace_path);
    if (!trace) throw std::runtime_error("sqd_solve: cannot open trace file");
  }
  auto emit_trace = [&](int iter, const std::vector<double>& energies,
                        double occ_delta) {
    if (!trace.is_open()) return;
    nlohmann::json line = {{"iteration", iter}, {"batch_energies", energies}};
    if (occ_delta >= 0.0)
      line["occ_delta"] = occ_delta;
    else
      line["occ_delta"] = nullptr;
    trace << line.dump() << '\n';
  };

  Eigen::VectorXd occ;
  std::map<Determinant, long long> cumulative_pool;
  int iters_done = 0;

  if (!fs.valid.empty()) {
    std::map<Determinant, long long> pool = fs.valid;
    if (cfg.cumulative) {
      merge_into(cumulative_pool, pool);
      pool = cumulative_pool;
    }
    const auto batches =
        make_batches(pool, cfg, n, n_alpha, n_beta, /*iter_key=*/0, &res.flags);
    const IterationOutcome it0 = run_iteration(heff, batches);
    res.per_batch_energies.push_back(it0.energies);
    res.energy = it0.best_energy;
    res.subspace_dim = it0.best_dim;
    occ = it0.occ_avg;
    iters_done = 1;
    emit_trace(0, it0.energies, -1.0);
    if (fs.invalid.empty()) {
      res.converged = true;
      res.n_outer = 1;
      res.final_occupations = occ;
      return res;
    }
  } else {
    // no valid strings: recover against the mean-field occupation prior
    add_flag(&res.flags, "sqd_solve: empty valid pool, HF occupation prior");
    occ = Eigen::VectorXd::Zero(2 * n);
    for (int p = 0; p < n_alpha; ++p) occ(p) = 1.0;
    for (int p = 0; p < n_beta; ++p) occ(n + p) = 1.0;
  }

  for (int t = iters_done; t < cfg.max_outer_iter; ++t) {
    const auto recovered = recover_configurations(
        fs.invalid, occ, n, n_alpha, n_beta, cfg.delta,
        rng_u64(cfg.seed, 0x5151ULL, static_cast<std::uint64_t>(t)), &res.flags);
    std::map<Determinant, long long> pool = fs.valid;
    merge_into(pool, recovered);
    if (cfg.cumulative) {
      merge_into(cumulative_pool, pool);
      pool = cumulative_pool;
    }
    const auto batches = make_batches(pool, cfg, n, n_alpha, n_beta,
                                      static_cast<std::uint64_t>(t), &res.flags);
    const IterationOutcome it = run_iteration(heff, batches);
    res.per_batch_energies.push_back(it.energies);
    res.energy = it.best_energy;
    res.subspace_dim = it.best_dim;
    const double delta_occ = (it.occ_avg - occ).cwiseAbs().maxCoeff();
    occ = it.occ_avg;
    iters_done = t + 1;
    emit_trace(t, it.energies, delta_occ);
    if (delta_occ < cfg.occ_tol) {
      res.converged = true;
      break;
    }
  }

  res.n_outer = iters_done;
  res.final_occupations = occ;
  return res;
}

}  // namespace obdf
