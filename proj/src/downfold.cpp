#include "obdf/downfold.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace obdf {

namespace {

bool contains(const std::vector<int>& v, int x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

ActivePartition select_active(const IntegralSet& ints, int n_act_orb,
                              int n_act_elec) {
  const int n_occ = ints.n_elec / 2;
  if (n_act_elec % 2 != 0)
    throw std::invalid_argument("select_active: active electron count must be even");
  const int n_core = n_occ - n_act_elec / 2;
  if (n_core < 0 || n_core + n_act_orb > ints.n_orb ||
      n_act_elec > 2 * n_act_orb)
    throw std::invalid_argument("select_active: active window does not fit");
  ActivePartition part;
  part.n_act_elec = n_act_elec;
  for (int p = 0; p < n_core; ++p) part.core.push_back(p);
  for (int p = n_core; p < n_core + n_act_orb; ++p) part.active.push_back(p);
  for (int p = n_core + n_act_orb; p < ints.n_orb; ++p) part.ext.push_back(p);
  return part;
}

ActivePartition select_active_list(const IntegralSet& ints,
                                   const std::vector<int>& active_list) {
  const int n_occ = ints.n_elec / 2;
  ActivePartition part;
  part.active = active_list;
  std::sort(part.active.begin(), part.active.end());
  for (int p = 0; p < ints.n_orb; ++p) {
    if (contains(part.active, p)) continue;
    if (p < n_occ)
      part.core.push_back(p);
    else
      part.ext.push_back(p);
  }
  part.n_act_elec = ints.n_elec - 2 * static_cast<int>(part.core.size());
  if (part.n_act_elec < 0 ||
      part.n_act_elec > 2 * static_cast<int>(part.active.size()))
    throw std::invalid_argument("select_active_list: electrons do not fit the active space");
  return part;
}

EffectiveHamiltonian build_cas_hamiltonian(const IntegralSet& ints,
                                           const ActivePartition& part) {
  const int na = static_cast<int>(part.active.size());
  EffectiveHamiltonian heff;
  heff.n_act = na;
  heff.label = "CAS";
  heff.h_eff = Eigen::MatrixXd::Zero(na, na);
  heff.g_act.assign(static_cast<std::size_t>(na) * na * na * na, 0.0);

  for (int t = 0; t < na; ++t)
    for (int u = 0; u < na; ++u) {
      double v = ints.h(part.active[t], part.active[u]);
      for (int c : part.core)
        v += 2.0 * ints.g_val(part.active[t], part.active[u], c, c) -
             ints.g_val(part.active[t], c, c, part.active[u]);
      heff.h_eff(t, u) = v;
    }
  for (int t = 0; t < na; ++t)
    for (int u = 0; u < na; ++u)
      for (int v = 0; v < na; ++v)
        for (int w = 0; w < na; ++w)
          heff.g_act[((static_cast<std::size_t>(t) * na + u) * na + v) * na + w] =
              ints.g_val(part.active[t], part.active[u], part.active[v],
                         part.active[w]);

  heff.e_scalar = ints.e_core;
  for (int c : part.core) heff.e_scalar += 2.0 * ints.h(c, c);
  for (int c : part.core)
    for (int d : part.core)
      heff.e_scalar += 2.0 * ints.g_val(c, c, d, d) - ints.g_val(c, d, d, c);
  return heff;
}

ExternalPotential external_potential(const IntegralSet& ints,
                                     const Eigen::MatrixXd& f,
                                     const Amplitudes& amp,
                                     const ActivePartition& part,
                                     DoubleCommutator variant) {
  const int na = static_cast<int>(part.active.size());
  ExternalPotential out;
  out.v_act = Eigen::MatrixXd::Zero(na, na);

  // keep only amplitudes touching at least one non-active orbital; the
  // all-active block is handled exactly by the active-space solver.
  Amplitudes ext = amp;
  const int no = static_cast<int>(amp.occ_list.size());
  const int nv = static_cast<int>(amp.virt_list.size());
  bool any = false;
  std::size_t idx = 0;
  for (int i = 0; i < no; ++i)
    for (int j = 0; j < no; ++j)
      for (int a = 0; a < nv; ++a)
        for (int b = 0; b < nv; ++b, ++idx) {
          const bool all_active =
              contains(part.active, amp.occ_list[i]) &&
              contains(part.active, amp.occ_list[j]) &&
              contains(part.active, amp.virt_list[a]) &&
              contains(part.active, amp.virt_list[b]);
          if (all_active)
            ext.t[idx] = 0.0;
          else if (ext.t[idx] != 0.0)
            any = true;
        }
  if (!any) return out;  // full active space: the potential is exactly zero

  const CorrelatedFock pot = obmp2_potential(ints, f, ext, variant);
  for (int t = 0; t < na; ++t)
    for (int u = 0; u < na; ++u)
      out.v_act(t, u) = pot.v(part.active[t], part.active[u]);
  out.scalar = pot.c_bar;
  for (int c : part.core) out.scalar += 2.0 * pot.v(c, c);
  return out;
}

EffectiveHamiltonian build_obdf_hamiltonian(const IntegralSet& ints_bar,
                                            const Eigen::VectorXd& eps_bar,
                                            const ActivePartition& part,
                                            DoubleCommutator variant,
                                            double level_shift) {
  const int no = ints_bar.n_elec / 2;
  std::vector<int> occ(ints_bar.n_orb, 0);
  for (int i = 0; i < no; ++i) occ[i] = 2;
  const FockResult fr = build_fock(ints_bar, occ);
  const Amplitudes amp = mp2_amplitudes(ints_bar, eps_bar, level_shift);
  const ExternalPotential ext = external_potential(ints_bar, fr.f, amp, part, variant);

  EffectiveHamiltonian heff = build_cas_hamiltonian(ints_bar, part);
  heff.h_eff += ext.v_act;
  heff.e_scalar += ext.scalar;
  heff.label = "OBDF";
  return heff;
}

}  // namespace obdf
