#include "obdf/driver.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "obdf/downfold.hpp"
#include "obdf/rng.hpp"

namespace obdf {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string fmt_energy(double e) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(10) << e;
  return os.str();
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == '/' || ch == '\\' || ch == ' ') ch = '_';
  return s;
}

ActivePartition make_partition(const RunConfig& cfg, const IntegralSet& ints) {
  if (!cfg.active_list.empty()) return select_active_list(ints, cfg.active_list);
  const int na = cfg.n_act > 0 ? cfg.n_act : ints.n_orb;
  const int ne = cfg.n_act > 0 ? cfg.n_act_elec : ints.n_elec;
  return select_active(ints, na, ne);
}

// canonicalize to the HF Fock eigenbasis (ascending eigenvalue order)
IntegralSet hf_canonical(const IntegralSet& ints) {
  std::vector<int> occ(ints.n_orb, 0);
  for (int i = 0; i < ints.n_elec / 2; ++i) occ[i] = 2;
  const FockResult fr = build_fock(ints, occ);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fr.f);
  return rotate_integrals(ints, RotationMatrix{es.eigenvectors()});
}

SampleSet make_samples(const RunConfig& cfg, const EffectiveHamiltonian& heff,
                       int n_alpha, int n_beta, std::uint64_t seed,
                       std::string* note) {
  SampleSet samples;
  if (cfg.sampler == SamplerKind::Exact) {
    const FciResult fci = fci_ground(heff, n_alpha, n_beta);
    samples = sample_exact(fci.vector(), cfg.shots, seed);
  } else {
    const IntegralSet acts = as_integral_set(heff, n_alpha + n_beta);
    std::vector<int> occ(acts.n_orb, 0);
    for (int i = 0; i < acts.n_elec / 2; ++i) occ[i] = 2;
    const FockResult fr = build_fock(acts, occ);
    const Amplitudes amp = mp2_amplitudes(acts, fr.eps);
    const int layers = std::min(cfg.ucj_layers, t2_rank(amp));
    if (layers < cfg.ucj_layers && note)
      *note = "ucj layers clamped to rank " + std::to_string(layers);
    const UcjAnsatz ansatz = ucj_from_t2(amp, layers, heff.n_act);
    const SectorBasis basis = enumerate_sector(heff.n_act, n_alpha, n_beta);
    const CiVector psi = prepare_ucj_state(ansatz, basis);
    samples = sample_exact(psi, cfg.shots, seed);
  }
  if (cfg.p_flip > 0.0)
    samples = apply_noise(samples, NoiseModel{cfg.p_flip, rng_u64(seed, 0xf11bULL)});
  return samples;
}

void run_sqd_method(const RunConfig& cfg, const std::string& label,
                    const std::string& method, const EffectiveHamiltonian& heff,
                    int n_alpha, int n_beta, ScanRecord& rec) {
  std::string note;
  const std::uint64_t sample_seed = rng_u64(cfg.seed, 0x5a3eULL);
  const SampleSet samples = make_samples(cfg, heff, n_alpha, n_beta, sample_seed, &note);
  SqdConfig sqd = cfg.sqd;
  if (sqd.seed == 0) sqd.seed = cfg.seed;
  if (sqd.trace_path.empty() && !cfg.out_dir.empty())
    sqd.trace_path = (std::filesystem::path(cfg.out_dir) /
                      (sanitize(label) + "_" + sanitize(method) + ".trace.jsonl"))
                         .string();
  const SqdResult res = sqd_solve(heff, samples, n_alpha, n_beta, sqd);
  rec.energies[method] = res.energy;
  std::ostringstream meta;
  meta << "dim=" << res.subspace_dim << " iters=" << res.n_outer
       << " converged=" << (res.converged ? 1 : 0);
  for (const std::string& f : res.flags) meta << " [" << f << "]";
  if (!note.empty()) meta << " [" << note << "]";
  rec.metadata[method] = meta.str();
}

}  // namespace

ScanRecord run_point(const RunConfig& cfg, const std::string& label,
                     const std::string& path) {
  ScanRecord rec;
  rec.label = label;
  const IntegralSet ints = parse_fcidump_file(path);
  const int n_alpha = (ints.n_elec + ints.ms2) / 2;
  const int n_beta = (ints.n_elec - ints.ms2) / 2;

  for (const std::string& method : cfg.methods) {
    try {
      if (method == "HF") {
        const FockResult fr = build_fock(ints, aufbau_occupations(ints));
        rec.energies[method] = fr.e_hf;
      } else if (method == "FCI") {
        rec.energies[method] = fci_ground(ints, n_alpha, n_beta).energy;
      } else if (method == "OBMP2") {
        rec.energies[method] = obmp2_scf(ints, cfg.obmp2).energy;
      } else if (method == "CAS-SQD") {
        const IntegralSet canon = hf_canonical(ints);
        const ActivePartition part = make_partition(cfg, canon);
        const EffectiveHamiltonian heff = build_cas_hamiltonian(canon, part);
        run_sqd_method(cfg, label, method, heff, part.n_act_elec / 2,
                       part.n_act_elec / 2, rec);
      } else if (method == "OBDF-SQD") {
        const Obmp2Result ob = obmp2_scf(ints, cfg.obmp2);
        const ActivePartition part = make_partition(cfg, ob.ints_bar);
        const EffectiveHamiltonian heff = build_obdf_hamiltonian(
            ob.ints_bar, ob.eps_bar, part, cfg.obmp2.variant, cfg.obmp2.level_shift);
        run_sqd_method(cfg, label, method, heff, part.n_act_elec / 2,
                       part.n_act_elec / 2, rec);
      } else {
        throw std::invalid_argument("unknown method: " + method);
      }
    } catch (const std::exception& ex) {
      rec.failures.push_back(method + ": " + ex.what());
    }
  }
  if (rec.energies.count("FCI")) {
    // compute errors from the 10-decimal rounded energies so the printed
    // error column equals the difference of the printed energy columns
    const double e_fci = std::stod(fmt_energy(rec.energies.at("FCI")));
    for (const auto& [m, e] : rec.energies)
      if (m != "FCI") rec.errors[m] = std::stod(fmt_energy(e)) - e_fci;
  }
  return rec;
}

std::vector<ScanRecord> run_scan(const RunConfig& cfg) {
  if (cfg.inputs.empty()) throw std::invalid_argument("run_scan: no inputs");
  if (cfg.methods.empty()) throw std::invalid_argument("run_scan: no methods");
  std::filesystem::create_directories(cfg.out_dir);

  std::vector<ScanRecord> records(cfg.inputs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long i = 0; i < static_cast<long long>(cfg.inputs.size()); ++i) {
    RunConfig point = cfg;
    point.seed = rng_u64(cfg.seed, static_cast<std::uint64_t>(i));
    point.sqd.seed = 0;  // derive from the per-point seed
    records[i] = run_point(point, cfg.inputs[i].first, cfg.inputs[i].second);
  }

  // scan.csv: label + one energy column per method + error columns
  std::vector<std::string> err_methods;
  for (const std::string& m : cfg.methods)
    if (m != "FCI") err_methods.push_back(m);
  const bool have_fci =
      std::find(cfg.methods.begin(), cfg.methods.end(), "FCI") != cfg.methods.end();

  auto cell = [](const ScanRecord& r, const std::map<std::string, double>& src,
                 const std::string& key) {
    const auto it = src.find(key);
    return it == src.end() ? std::string() : fmt_energy(it->second);
  };

  {
    std::ofstream os(std::filesystem::path(cfg.out_dir) / "scan.csv");
    os << "label";
    for (const std::string& m : cfg.methods) os << ',' << m;
    if (have_fci)
      for (const std::string& m : err_methods) os << ",err_" << m;
    os << '\n';
    for (const ScanRecord& r : records) {
      os << r.label;
      for (const std::string& m : cfg.methods) os << ',' << cell(r, r.energies, m);
      if (have_fci)
        for (const std::string& m : err_methods) os << ',' << cell(r, r.errors, m);
      os << '\n';
    }
  }
  {
    std::ofstream os(std::filesystem::path(cfg.out_dir) / "scan_errors.csv");
    os << "label";
    for (const std::string& m : err_methods) os << ",err_" << m;
    os << '\n';
    for (const ScanRecord& r : records) {
      os << r.label;
      for (const std::string& m : err_methods) os << ',' << cell(r, r.errors, m);
      os << '\n';
    }
  }
  {
    std::ofstream os(std::filesystem::path(cfg.out_dir) / "run_meta.json");
    os << run_meta_json(cfg) << '\n';
  }
  return records;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key=value, got: " + t);
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
  for (const auto& [key, value] : kv) {
    if (key == "methods") {
      cfg.methods.clear();
      for (const std::string& m : split(value, ','))
        if (!trim(m).empty()) cfg.methods.push_back(trim(m));
    } else if (key == "inputs") {
      cfg.inputs.clear();
      for (const std::string& item : split(value, ',')) {
        const auto parts = split(trim(item), ':');
        if (parts.size() == 2)
          cfg.inputs.emplace_back(trim(parts[0]), trim(parts[1]));
        else
          cfg.inputs.emplace_back(trim(item), trim(item));
      }
    } else if (key == "active_list") {
      cfg.active_list.clear();
      for (const std::string& item : split(value, ','))
        if (!trim(item).empty()) cfg.active_list.push_back(std::stoi(trim(item)));
    } else if (key == "n_act") {
      cfg.n_act = std::stoi(value);
    } else if (key == "n_act_elec") {
      cfg.n_act_elec = std::stoi(value);
    } else if (key == "sampler") {
      if (value == "exact")
        cfg.sampler = SamplerKind::Exact;
      else if (value == "ucj")
        cfg.sampler = SamplerKind::Ucj;
      else
        throw std::runtime_error("config: sampler must be exact or ucj");
    } else if (key == "shots") {
      cfg.shots = std::stoll(value);
    } else if (key == "p_flip") {
      cfg.p_flip = std::stod(value);
    } else if (key == "ucj_layers") {
      cfg.ucj_layers = std::stoi(value);
    } else if (key == "k_batches") {
      cfg.sqd.k_batches = std::stoi(value);
    } else if (key == "batch_size") {
      cfg.sqd.batch_size = std::stoi(value);
    } else if (key == "max_outer_iter") {
      cfg.sqd.max_outer_iter = std::stoi(value);
    } else if (key == "occ_tol") {
      cfg.sqd.occ_tol = std::stod(value);
    } else if (key == "delta") {
      cfg.sqd.delta = std::stod(value);
    } else if (key == "include_reference") {
      cfg.sqd.include_reference = (value == "1" || value == "true");
    } else if (key == "cumulative") {
      cfg.sqd.cumulative = (value == "1" || value == "true");
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "obmp2_max_iter") {
      cfg.obmp2.max_iter = std::stoi(value);
    } else if (key == "obmp2_tol") {
      cfg.obmp2.tol = std::stod(value);
    } else if (key == "level_shift") {
      cfg.obmp2.level_shift = std::stod(value);
    } else if (key == "double_commutator") {
      if (value == "fock")
        cfg.obmp2.variant = DoubleCommutator::Fock;
      else if (value == "hamiltonian")
        cfg.obmp2.variant = DoubleCommutator::Hamiltonian;
      else
        throw std::runtime_error("config: double_commutator must be fock or hamiltonian");
    } else {
      throw std::runtime_error("config: unknown key: " + key);
    }
  }
}

std::string run_meta_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["version"] = "obdf-sqd 0.1.0";
  nlohmann::json inputs = nlohmann::json::array();
  for (const auto& [label, path] : cfg.inputs)
    inputs.push_back({{"label", label}, {"path", path}});
  j["inputs"] = inputs;
  j["methods"] = cfg.methods;
  j["active"] = {{"n_act", cfg.n_act},
                 {"n_act_elec", cfg.n_act_elec},
                 {"active_list", cfg.active_list}};
  j["sampler"] = {{"kind", cfg.sampler == SamplerKind::Exact ? "exact" : "ucj"},
                  {"shots", cfg.shots},
                  {"p_flip", cfg.p_flip},
                  {"ucj_layers", cfg.ucj_layers}};
  j["sqd"] = {{"k_batches", cfg.sqd.k_batches},
              {"batch_size", cfg.sqd.batch_size},
              {"max_outer_iter", cfg.sqd.max_outer_iter},
              {"occ_tol", cfg.sqd.occ_tol},
              {"delta", cfg.sqd.delta},
              {"include_reference", cfg.sqd.include_reference},
              {"cumulative", cfg.sqd.cumulative}};
  j["obmp2"] = {{"max_iter", cfg.obmp2.max_iter},
                {"tol", cfg.obmp2.tol},
                {"level_shift", cfg.obmp2.level_shift},
                {"double_commutator",
                 cfg.obmp2.variant == DoubleCommutator::Fock ? "fock" : "hamiltonian"}};
  j["seed"] = cfg.seed;
  j["out_dir"] = cfg.out_dir;
  return j.dump(2);
}

namespace {

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

Csv read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  Csv csv;
  std::string line;
  if (std::getline(is, line)) csv.header = split(trim(line), ',');
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    csv.rows.push_back(split(trim(line), ','));
  }
  return csv;
}

}  // namespace

std::string report(const std::string& scan_csv_path,
                   const std::optional<std::string>& reference_csv_path) {
  Csv scan = read_csv(scan_csv_path);
  if (scan.header.empty() || scan.header[0] != "label")
    throw std::runtime_error("report: not a scan.csv (missing label column)");

  if (reference_csv_path) {
    const Csv ref = read_csv(*reference_csv_path);
    if (ref.header.empty() || ref.header[0] != "label")
      throw std::runtime_error("report: reference CSV needs a label column");
    std::map<std::string, std::vector<std::string>> by_label;
    for (const auto& row : ref.rows) by_label[row[0]] = row;
    for (std::size_t c = 1; c < ref.header.size(); ++c)
      scan.header.push_back("ref_" + ref.header[c]);
    for (auto& row : scan.rows) {
      const auto it = by_label.find(row[0]);
      if (it == by_label.end())
        throw std::runtime_error("report: no reference row for label " + row[0]);
      for (std::size_t c = 1; c < ref.header.size(); ++c)
        row.push_back(c < it->second.size() ? it->second[c] : "");
    }
  }

  std::vector<std::size_t> width(scan.header.size());
  for (std::size_t c = 0; c < scan.header.size(); ++c) {
    width[c] = scan.header[c].size();
    for (const auto& row : scan.rows)
      if (c < row.size()) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < scan.header.size(); ++c)
      os << std::setw(static_cast<int>(width[c]) + 2)
         << (c < row.size() ? row[c] : "");
    os << '\n';
  };
  emit_row(scan.header);
  for (const auto& row : scan.rows) emit_row(row);

  os << "\nerror summary (vs FCI):\n";
  for (std::size_t c = 1; c < scan.header.size(); ++c) {
    if (scan.header[c].rfind("err_", 0) != 0) continue;
    double mx = 0.0, sum = 0.0;
    int count = 0;
    for (const auto& row : scan.rows) {
      if (c >= row.size() || row[c].empty()) continue;
      const double v = std::abs(std::stod(row[c]));
      mx = std::max(mx, v);
      sum += v;
      ++count;
    }
    os << "  " << scan.header[c] << ": max " << fmt_energy(mx) << ", mean "
       << fmt_energy(count ? sum / count : 0.0) << " over " << count << " points\n";
  }
  return os.str();
}

}  // namespace obdf
