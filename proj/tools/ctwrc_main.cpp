#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ctwrc/ctwrc.hpp"

namespace {

int run_sweep(ctwrc::SweepConfig cfg) {
  const ctwrc::SweepResult res = ctwrc::compute_sweep(cfg);
  if (cfg.out.empty()) {
    ctwrc::write_sweep_csv(res, std::cout);
  } else {
    std::ofstream out(cfg.out);
    if (!out) {
      std::cerr << "error: cannot open " << cfg.out << " for writing\n";
      return 1;
    }
    ctwrc::write_sweep_csv(res, out);
    std::cerr << "wrote " << res.rows.size() << " rows to " << cfg.out << "\n";
  }
  return 0;
}

int run_lab(const ctwrc::LabConfig& cfg) {
  const ctwrc::LabReport rep = ctwrc::run_latticelab(cfg);
  std::printf("frames run          %ld\n", rep.frames);
  std::printf("component errors    %ld (BS message)  %ld (MS message)\n",
              rep.component_errors_b, rep.component_errors_m);
  std::printf("max residual        %.3e\n", rep.max_residual);
  std::printf("inject detected     %s\n", rep.inject_detected ? "yes" : "no");
  std::printf("%s\n", rep.ok ? "OK" : "FAIL");
  return rep.ok ? 0 : 2;
}

int run_check(const ctwrc::InvariantConfig& cfg) {
  using Rep = ctwrc::InvariantReport;
  const Rep rep = ctwrc::run_invariant_suite(cfg);
  std::printf("cases               %ld\n", rep.cases);
  std::printf("unitarity           %.3e  (tol %.0e)\n", rep.max_unitarity, Rep::tol_unitarity);
  std::printf("reconstruction      %.3e  (tol %.0e)\n", rep.max_reconstruction,
              Rep::tol_reconstruction);
  std::printf("interference        %.3e  (tol %.0e)\n", rep.max_interference,
              Rep::tol_interference);
  std::printf("det identity        %.3e  (tol %.0e)\n", rep.max_det_rel, Rep::tol_det);
  std::printf("diagonal mismatches %ld\n", rep.diag_mismatches);
  std::printf("scale violations    %ld\n", rep.scale_violations);
  std::printf("%s\n", rep.ok ? "OK" : "FAIL");
  return rep.ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice-coded two-way relaying simulator"};
  app.require_subcommand(1);

  /* Config file values load first so command-line flags can override them. */
  std::string config_path;
  {
    CLI::App pre;
    pre.allow_extras();
    pre.set_help_flag();
    pre.add_option("-c,--config", config_path);
    try {
      pre.parse(argc, argv);
    } catch (const CLI::ParseError&) {
      config_path.clear();
    }
  }

  ctwrc::SweepConfig scfg;
  if (!config_path.empty()) {
    try {
      ctwrc::apply_config(scfg, ctwrc::load_config_file(config_path));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo rate sweep over an SNR grid");
  sweep->add_option("-c,--config", config_path, "config file with key = value lines");
  sweep->add_option("-k,--k", scfg.k, "number of mobile stations");
  sweep->add_option("--ms-antennas", scfg.ms_antennas, "antennas per mobile (virtual streams)");
  sweep->add_option("--snr", scfg.snr, "SNR grid in dB: 'a:b:step' or comma list");
  sweep->add_option("--sweep-target", scfg.sweep_target, "budgets on the grid: all | b");
  sweep->add_option("--snr-r", scfg.snr_r_db, "relay SNR in dB when sweep-target=b");
  sweep->add_option("--snr-m", scfg.snr_m_db, "mobile SNR in dB when sweep-target=b");
  sweep->add_option("-t,--trials", scfg.trials, "channel draws per grid point");
  sweep->add_option("-s,--seed", scfg.seed, "master seed");
  sweep->add_option("--dpc", scfg.dpc, "encoding orders searched: exhaustive | random:N");
  sweep->add_option("--power", scfg.power, "order-search objective: equal | mp");
  sweep->add_option("--eps", scfg.eps, "relative optimality gap for the mp allocator");
  sweep->add_option("--xi-b", scfg.xi_b, "downlink stream weight");
  sweep->add_option("--xi-m", scfg.xi_m, "uplink stream weight");
  sweep->add_option("-o,--out", scfg.out, "CSV output path (default stdout)");
  sweep->add_option("--threads", scfg.threads, "worker threads");
  sweep->add_option("--sigma2", scfg.sigma2, "noise variance");
  sweep->add_flag("--non-reciprocal", [&](std::int64_t) { scfg.reciprocal = false; },
                  "draw independent second-phase channels");

  ctwrc::LabConfig lcfg;
  CLI::App* lab = app.add_subcommand("latticelab", "noiseless nested-lattice codec check");
  lab->add_option("-k,--k", lcfg.k, "number of mobile stations");
  lab->add_option("--symbols", lcfg.t, "symbols per frame");
  lab->add_option("-f,--frames", lcfg.frames, "frames to run");
  lab->add_option("-s,--seed", lcfg.seed, "master seed");
  lab->add_option("--qc", lcfg.q_c, "codeword grid spacing");
  lab->add_option("--b", lcfg.b, "BS shaping ratio (>= 2)");
  lab->add_option("--m", lcfg.m, "MS shaping ratio (>= 1)");
  lab->add_flag("--non-reciprocal", [&](std::int64_t) { lcfg.reciprocal = false; },
                "draw independent second-phase channels");

  ctwrc::InvariantConfig icfg;
  std::string suite = "invariants";
  CLI::App* check = app.add_subcommand("check", "structural invariant suite");
  check->add_option("--suite", suite, "suite name (invariants)");
  check->add_option("--kmin", icfg.k_min, "smallest system size");
  check->add_option("--kmax", icfg.k_max, "largest system size");
  check->add_option("--seeds", icfg.seeds_per_k, "seeds per size");
  check->add_option("-s,--seed", icfg.seed, "master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sweep->parsed()) return run_sweep(scfg);
    if (lab->parsed()) return run_lab(lcfg);
    if (check->parsed()) {
      if (suite != "invariants") {
        std::cerr << "error: unknown suite '" << suite << "'\n";
        return 1;
      }
      return run_check(icfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
