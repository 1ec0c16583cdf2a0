#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "obdf/downfold.hpp"
#include "obdf/driver.hpp"

namespace {

void add_common(CLI::App* cmd, obdf::RunConfig& cfg, std::string& config_path) {
  cmd->add_option("--config", config_path, "key=value configuration file");
  cmd->add_option("--methods", cfg.methods,
                  "methods: HF OBMP2 FCI CAS-SQD OBDF-SQD")
      ->delimiter(',');
  cmd->add_option("--n-act", cfg.n_act, "active orbitals (0 = full space)");
  cmd->add_option("--n-act-elec", cfg.n_act_elec, "active electrons");
  cmd->add_option("--active-list", cfg.active_list, "explicit active orbitals")
      ->delimiter(',');
  cmd->add_option_function<std::string>(
         "--sampler",
         [&cfg](const std::string& v) {
           cfg.sampler = v == "ucj" ? obdf::SamplerKind::Ucj : obdf::SamplerKind::Exact;
         },
         "exact | ucj")
      ->check(CLI::IsMember({"exact", "ucj"}));
  cmd->add_option("--shots", cfg.shots, "sampler shots");
  cmd->add_option("--p-flip", cfg.p_flip, "readout flip probability");
  cmd->add_option("--ucj-layers", cfg.ucj_layers, "ansatz layers");
  cmd->add_option("--k-batches", cfg.sqd.k_batches, "SQD batches K");
  cmd->add_option("--batch-size", cfg.sqd.batch_size, "SQD batch size d");
  cmd->add_option("--max-outer-iter", cfg.sqd.max_outer_iter, "SQD outer iterations");
  cmd->add_option("--occ-tol", cfg.sqd.occ_tol, "occupation convergence threshold");
  cmd->add_option("--delta", cfg.sqd.delta, "recovery weight floor");
  cmd->add_flag("--include-reference", cfg.sqd.include_reference,
                "force the HF determinant into every batch");
  cmd->add_flag("--cumulative", cfg.sqd.cumulative, "union batch pools across iterations");
  cmd->add_option("--seed", cfg.seed, "global RNG seed");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--obmp2-max-iter", cfg.obmp2.max_iter, "OBMP2 iteration cap");
  cmd->add_option("--obmp2-tol", cfg.obmp2.tol, "OBMP2 energy tolerance");
  cmd->add_option("--level-shift", cfg.obmp2.level_shift, "MP2 denominator shift");
  cmd->add_option_function<std::string>(
         "--double-commutator",
         [&cfg](const std::string& v) {
           cfg.obmp2.variant = v == "hamiltonian"
                                   ? obdf::DoubleCommutator::Hamiltonian
                                   : obdf::DoubleCommutator::Fock;
         },
         "fock | hamiltonian")
      ->check(CLI::IsMember({"fock", "hamiltonian"}));
}

void print_record(const obdf::ScanRecord& rec) {
  std::cout << std::fixed << std::setprecision(10);
  std::cout << "point " << rec.label << '\n';
  for (const auto& [method, energy] : rec.energies) {
    std::cout << "  " << std::left << std::setw(10) << method << std::right
              << std::setw(18) << energy;
    const auto it = rec.errors.find(method);
    if (it != rec.errors.end()) std::cout << "   err " << it->second;
    const auto mi = rec.metadata.find(method);
    if (mi != rec.metadata.end()) std::cout << "   (" << mi->second << ')';
    std::cout << '\n';
  }
  for (const std::string& f : rec.failures) std::cout << "  FAILED " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"one-body downfolded sample-based diagonalization toolkit"};
  app.require_subcommand(1);

  obdf::RunConfig cfg;
  std::string config_path;
  std::string input;
  std::vector<std::string> inputs;
  std::vector<std::string> labels;
  std::string scan_csv, reference_csv;
  std::string variant = "fock";
  int max_iter_cli = -1;

  CLI::App* run = app.add_subcommand("run", "single-point method comparison");
  run->add_option("--input", input, "FCIDUMP file")->required();
  run->add_option("--label", labels, "geometry label (default: file stem)");
  add_common(run, cfg, config_path);

  CLI::App* scan = app.add_subcommand("scan", "dissociation-curve scan");
  scan->add_option("--inputs", inputs, "ordered FCIDUMP files")->delimiter(',');
  scan->add_option("--labels", labels, "matching geometry labels")->delimiter(',');
  add_common(scan, cfg, config_path);

  CLI::App* fci = app.add_subcommand("fci", "exact ground state of one FCIDUMP");
  fci->add_option("--input", input, "FCIDUMP file")->required();

  CLI::App* obmp2 = app.add_subcommand("obmp2", "self-consistent one-body MP2");
  obmp2->add_option("--input", input, "FCIDUMP file")->required();
  obmp2->add_option("--double-commutator", variant, "fock | hamiltonian")
      ->check(CLI::IsMember({"fock", "hamiltonian"}));
  obmp2->add_option("--max-iter", max_iter_cli, "iteration cap");
  obmp2->add_option("--tol", cfg.obmp2.tol, "energy tolerance");
  obmp2->add_option("--level-shift", cfg.obmp2.level_shift, "denominator shift");

  CLI::App* rep = app.add_subcommand("report", "comparison table from scan outputs");
  rep->add_option("--scan", scan_csv, "scan.csv path")->required();
  rep->add_option("--reference", reference_csv, "external reference CSV");

  CLI::App* check = app.add_subcommand("fcidump-check", "parse and round-trip a FCIDUMP");
  check->add_option("--input", input, "FCIDUMP file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty())
      obdf::apply_config(cfg, obdf::parse_config_file(config_path));

    if (run->parsed()) {
      const std::string label =
          labels.empty() ? std::filesystem::path(input).stem().string() : labels[0];
      cfg.inputs = {{label, input}};
      if (cfg.methods.empty()) cfg.methods = {"HF", "FCI"};
      std::filesystem::create_directories(cfg.out_dir);
      {
        std::ofstream os(std::filesystem::path(cfg.out_dir) / "run_meta.json");
        os << obdf::run_meta_json(cfg) << '\n';
      }
      print_record(obdf::run_point(cfg, label, input));
    } else if (scan->parsed()) {
      if (!inputs.empty()) {
        cfg.inputs.clear();
        for (std::size_t i = 0; i < inputs.size(); ++i)
          cfg.inputs.emplace_back(
              i < labels.size() ? labels[i]
                                : std::filesystem::path(inputs[i]).stem().string(),
              inputs[i]);
      }
      if (cfg.methods.empty()) cfg.methods = {"HF", "FCI"};
      for (const auto& rec : obdf::run_scan(cfg)) print_record(rec);
      std::cout << "wrote scan.csv, scan_errors.csv, run_meta.json under "
                << cfg.out_dir << '\n';
    } else if (fci->parsed()) {
      const obdf::IntegralSet ints = obdf::parse_fcidump_file(input);
      const int na = (ints.n_elec + ints.ms2) / 2;
      const int nb = (ints.n_elec - ints.ms2) / 2;
      const obdf::FciResult res = obdf::fci_ground(ints, na, nb);
      std::cout << std::fixed << std::setprecision(10)
                << "E_FCI = " << res.energy << "  (dim " << res.basis.size() << ")\n";
    } else if (obmp2->parsed()) {
      cfg.obmp2.variant = variant == "hamiltonian"
                              ? obdf::DoubleCommutator::Hamiltonian
                              : obdf::DoubleCommutator::Fock;
      if (max_iter_cli > 0) cfg.obmp2.max_iter = max_iter_cli;
      const obdf::IntegralSet ints = obdf::parse_fcidump_file(input);
      const obdf::Obmp2Result res = obdf::obmp2_scf(ints, cfg.obmp2);
      std::cout << std::fixed << std::setprecision(10);
      for (std::size_t k = 0; k < res.energies.size(); ++k)
        std::cout << "iter " << k + 1 << "  E = " << res.energies[k] << '\n';
      std::cout << "E_OBMP2 = " << res.energy
                << (res.converged ? "  (converged)" : "  (NOT converged)") << '\n';
    } else if (rep->parsed()) {
      std::cout << obdf::report(scan_csv,
                                reference_csv.empty()
                                    ? std::nullopt
                                    : std::optional<std::string>(reference_csv));
    } else if (check->parsed()) {
      const obdf::IntegralSet ints = obdf::parse_fcidump_file(input);
      std::ostringstream round;
      obdf::write_fcidump(ints, round);
      std::istringstream back(round.str());
      const obdf::IntegralSet again = obdf::parse_fcidump(back);
      double max_diff = std::abs(ints.e_core - again.e_core);
      max_diff = std::max(max_diff, (ints.h - again.h).cwiseAbs().maxCoeff());
      for (std::size_t i = 0; i < ints.g.size(); ++i)
        max_diff = std::max(max_diff, std::abs(ints.g[i] - again.g[i]));
      std::cout << "norb " << ints.n_orb << "  nelec " << ints.n_elec << "  ms2 "
                << ints.ms2 << "\nround-trip max deviation " << std::scientific
                << std::setprecision(3) << max_diff << '\n';
      if (max_diff > 1e-12) {
        std::cerr << "round-trip check FAILED\n";
        return 1;
      }
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
