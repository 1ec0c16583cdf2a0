#include "obdf/integrals.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace obdf {

void IntegralSet::resize(int norb) {
  n_orb = norb;
  h = Eigen::MatrixXd::Zero(norb, norb);
  g.assign(static_cast<std::size_t>(norb) * norb * norb * norb, 0.0);
}

void IntegralSet::set_g(int p, int q, int r, int s, double v) {
  auto at = [this](int a, int b, int c, int d) -> double& {
    return g[((static_cast<std::size_t>(a) * n_orb + b) * n_orb + c) * n_orb + d];
  };
  at(p, q, r, s) = v;
  at(q, p, r, s) = v;
  at(p, q, s, r) = v;
  at(q, p, s, r) = v;
  at(r, s, p, q) = v;
  at(s, r, p, q) = v;
  at(r, s, q, p) = v;
  at(s, r, q, p) = v;
}

namespace {

// Extracts "KEY=value" integer fields from the FCIDUMP header blob.
int header_int(const std::string& header, const std::string& key) {
  auto pos = header.find(key);
  if (pos == std::string::npos)
    throw std::runtime_error("FCIDUMP header missing field " + key);
  pos += key.size();
  while (pos < header.size() &&
         (header[pos] == '=' || std::isspace(static_cast<unsigned char>(header[pos]))))
    ++pos;
  std::size_t end = pos;
  while (end < header.size() &&
         (std::isdigit(static_cast<unsigned char>(header[end])) ||
          header[end] == '-' || header[end] == '+'))
    ++end;
  if (end == pos)
    throw std::runtime_error("FCIDUMP header field " + key + " has no value");
  return std::stoi(header.substr(pos, end - pos));
}

}  // namespace

IntegralSet parse_fcidump(std::istream& in) {
  std::string header;
  std::string line;
  bool in_header = true;
  IntegralSet ints;
  // read header up to &END or a bare '/'
  while (in_header && std::getline(in, line)) {
    std::string upper = line;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    auto endpos = upper.find("&END");
    auto slashpos = upper.find('/');
    if (endpos != std::string::npos || slashpos != std::string::npos) {
      header += line.substr(0, std::min(endpos, slashpos)) + "\n";
      in_header = false;
    } else {
      header += line + "\n";
    }
  }
  if (in_header) throw std::runtime_error("FCIDUMP: header terminator not found");
  std::string upper = header;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (upper.find("&FCI") == std::string::npos)
    throw std::runtime_error("FCIDUMP: missing &FCI in header");
  int norb = header_int(upper, "NORB");
  int nelec = header_int(upper, "NELEC");
  int ms2 = upper.find("MS2") != std::string::npos ? header_int(upper, "MS2") : 0;
  if (norb <= 0 || norb > 32)
    throw std::runtime_error("FCIDUMP: NORB out of supported range [1,32]");
  if (nelec < 0 || (nelec + ms2) / 2 > norb)
    throw std::runtime_error("FCIDUMP: infeasible NELEC/MS2 for NORB");
  ints.resize(norb);
  ints.n_elec = nelec;
  ints.ms2 = ms2;

  while (std::getline(in, line)) {
    std::istringstream ss(line);
    double value;
    int i, j, k, l;
    if (!(ss >> value)) {
      // skip blank lines
      std::string rest;
      if (ss.clear(), !(std::istringstream(line) >> rest)) continue;
      throw std::runtime_error("FCIDUMP: non-numeric value field in line: " + line);
    }
    if (!(ss >> i >> j >> k >> l))
      throw std::runtime_error("FCIDUMP: truncated index fields in line: " + line);
    if (i < 0 || j < 0 || k < 0 || l < 0 || i > norb || j > norb || k > norb || l > norb)
      throw std::runtime_error("FCIDUMP: index out of range in line: " + line);
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      ints.e_core = value;
    } else if (k == 0 && l == 0) {
      if (i == 0 || j == 0)
        throw std::runtime_error("FCIDUMP: malformed one-electron indices: " + line);
      ints.h(i - 1, j - 1) = value;
      ints.h(j - 1, i - 1) = value;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0)
        throw std::runtime_error("FCIDUMP: malformed two-electron indices: " + line);
      ints.set_g(i - 1, j - 1, k - 1, l - 1, value);
    }
  }
  return ints;
}

IntegralSet parse_fcidump_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open FCIDUMP file: " + path);
  return parse_fcidump(in);
}

void write_fcidump(const IntegralSet& ints, std::ostream& out) {
  const int n = ints.n_orb;
  out << "&FCI NORB=" << n << ",NELEC=" << ints.n_elec << ",MS2=" << ints.ms2 << ",\n";
  out << " ORBSYM=";
  for (int i = 0; i < n; ++i) out << "1,";
  out << "\n ISYM=1,\n&END\n";
  out << std::scientific << std::setprecision(15);
  auto emit = [&out](double v, int i, int j, int k, int l) {
    out << ' ' << v << ' ' << i << ' ' << j << ' ' << k << ' ' << l << '\n';
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k <= i; ++k) {
        const int lmax = (k == i) ? j : k;
        for (int l = 0; l <= lmax; ++l) {
          double v = ints.g_val(i, j, k, l);
          if (v != 0.0) emit(v, i + 1, j + 1, k + 1, l + 1);
        }
      }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (ints.h(i, j) != 0.0) emit(ints.h(i, j), i + 1, j + 1, 0, 0);
  emit(ints.e_core, 0, 0, 0, 0);
}

void write_fcidump_file(const IntegralSet& ints, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_fcidump(ints, out);
}

std::vector<int> aufbau_occupations(const IntegralSet& ints) {
  if (ints.n_elec % 2 != 0)
    throw std::runtime_error("restricted closed-shell mode requires even n_elec");
  std::vector<int> occ(ints.n_orb, 0);
  for (int i = 0; i < ints.n_elec / 2; ++i) occ[i] = 2;
  return occ;
}

FockResult build_fock(const IntegralSet& ints, const std::vector<int>& occ) {
  const int n = ints.n_orb;
  if (static_cast<int>(occ.size()) != n)
    throw std::invalid_argument("build_fock: occupation vector size mismatch");
  int sum = 0;
  for (int o : occ) {
    if (o != 0 && o != 2)
      throw std::invalid_argument("build_fock: open-shell occupations unsupported");
    sum += o;
  }
  if (sum != ints.n_elec)
    throw std::invalid_argument("build_fock: occupations do not sum to n_elec");

  FockResult res;
  res.f = ints.h;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        if (occ[i] == 0) continue;
        acc += 2.0 * ints.g_val(p, q, i, i) - ints.g_val(p, i, i, q);
      }
      res.f(p, q) += acc;
    }
  double e = ints.e_core;
  for (int i = 0; i < n; ++i) {
    if (occ[i] == 0) continue;
    e += 2.0 * ints.h(i, i);
    for (int j = 0; j < n; ++j) {
      if (occ[j] == 0) continue;
      e += 2.0 * ints.g_val(i, i, j, j) - ints.g_val(i, j, j, i);
    }
  }
  res.e_hf = e;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(res.f);
  res.eps = es.eigenvalues();
  return res;
}

bool is_orthogonal(const Eigen::MatrixXd& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.transpose() * u - Eigen::MatrixXd::Identity(u.rows(), u.cols()))
             .cwiseAbs()
             .maxCoeff() < tol;
}

IntegralSet rotate_integrals(const IntegralSet& ints, const RotationMatrix& rot) {
  const int n = ints.n_orb;
  if (rot.u.rows() != n || rot.u.cols() != n)
    throw std::invalid_argument("rotate_integrals: dimension mismatch");
  if (!is_orthogonal(rot.u))
    throw std::invalid_argument("rotate_integrals: matrix is not orthogonal");
  IntegralSet out;
  out.resize(n);
  out.n_elec = ints.n_elec;
  out.ms2 = ints.ms2;
  out.e_core = ints.e_core;
  out.h = rot.u.transpose() * ints.h * rot.u;

  const std::size_t nn = static_cast<std::size_t>(n);
  auto idx = [nn](int a, int b, int c, int d) {
    return ((static_cast<std::size_t>(a) * nn + b) * nn + c) * nn + d;
  };
  // one index at a time: g(pqrs) -> sum_p u(p,P) g(pqrs)
  std::vector<double> t1(ints.g.size(), 0.0), t2(ints.g.size(), 0.0);
  for (int P = 0; P < n; ++P)
    for (int p = 0; p < n; ++p) {
      const double c = rot.u(p, P);
      if (c == 0.0) continue;
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s)
            t1[idx(P, q, r, s)] += c * ints.g[idx(p, q, r, s)];
    }
  for (int Q = 0; Q < n; ++Q)
    for (int q = 0; q < n; ++q) {
      const double c = rot.u(q, Q);
      if (c == 0.0) continue;
      for (int P = 0; P < n; ++P)
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s)
            t2[idx(P, Q, r, s)] += c * t1[idx(P, q, r, s)];
    }
  std::fill(t1.begin(), t1.end(), 0.0);
  for (int R = 0; R < n; ++R)
    for (int r = 0; r < n; ++r) {
      const double c = rot.u(r, R);
      if (c == 0.0) continue;
      for (int P = 0; P < n; ++P)
        for (int Q = 0; Q < n; ++Q)
          for (int s = 0; s < n; ++s)
            t1[idx(P, Q, R, s)] += c * t2[idx(P, Q, r, s)];
    }
  std::fill(out.g.begin(), out.g.end(), 0.0);
  for (int S = 0; S < n; ++S)
    for (int s = 0; s < n; ++s) {
      const double c = rot.u(s, S);
      if (c == 0.0) continue;
      for (int P = 0; P < n; ++P)
        for (int Q = 0; Q < n; ++Q)
          for (int R = 0; R < n; ++R)
            out.g[idx(P, Q, R, S)] += c * t1[idx(P, Q, R, s)];
    }
  return out;
}

}  // namespace obdf
