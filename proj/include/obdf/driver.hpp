#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "obdf/obmp2.hpp"
#include "obdf/sqd.hpp"

namespace obdf {

enum class SamplerKind { Exact, Ucj };

struct RunConfig {
  std::vector<std::pair<std::string, std::string>> inputs;  // (label, path)
  std::vector<std::string> methods;  // subset of HF OBMP2 FCI CAS-SQD OBDF-SQD
  // active space: explicit list wins over the (n_act, n_act_elec) window;
  // n_act = 0 means the full orbital space.
  int n_act = 0;
  int n_act_elec = 0;
  std::vector<int> active_list;
  // sampler
  SamplerKind sampler = SamplerKind::Exact;
  long long shots = 10'000;
  double p_flip = 0.0;
  int ucj_layers = 2;
  // solver knobs
  SqdConfig sqd;
  Obmp2Options obmp2;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
};

struct ScanRecord {
  std::string label;
  std::map<std::string, double> energies;       // method -> total energy
  std::map<std::string, double> errors;         // method -> energy - E_FCI
  std::map<std::string, std::string> metadata;  // SQD dims, iterations, flags
  std::vector<std::string> failures;            // per-method error messages
};

// One geometry through the requested method pipelines.
ScanRecord run_point(const RunConfig& cfg, const std::string& label,
                     const std::string& path);

// All geometries; writes scan.csv, scan_errors.csv, and run_meta.json under
// cfg.out_dir. Per-point failures leave empty cells and the scan continues.
std::vector<ScanRecord> run_scan(const RunConfig& cfg);

// Aligned comparison table from a scan.csv, optionally merged with an
// external reference CSV (label,<method> columns), plus per-method max/mean
// absolute-error summary against the FCI column.
std::string report(const std::string& scan_csv_path,
                   const std::optional<std::string>& reference_csv_path);

// key=value configuration file (# comments, blank lines ignored)
std::map<std::string, std::string> parse_config_file(const std::string& path);
void apply_config(RunConfig& cfg, const std::map<std::string, std::string>& kv);

// serialized defaults + effective settings, for run_meta.json
std::string run_meta_json(const RunConfig& cfg);

}  // namespace obdf
