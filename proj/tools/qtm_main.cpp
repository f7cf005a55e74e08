#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <string>

#include "qtm/cli.hpp"
#include "qtm/mixed_fuel.hpp"
#include "qtm/therm_models.hpp"
#include "qtm/zeno.hpp"

namespace {

struct CommonOpts {
  qtm::EngineConfig config;
  std::string mode_name = "selective";
  std::string therm_name = "instant";
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool with_mode = true) {
  cmd->add_option("--l", opts.config.l, "clock spin, positive half-integer");
  cmd->add_option("--dt", opts.config.dt, "stabilisation interval");
  cmd->add_option("--beta", opts.config.beta, "inverse temperature");
  cmd->add_option("--tau-tilde", opts.config.tau_tilde, "start of the extraction window");
  cmd->add_option("--tau-prime", opts.config.tau_prime, "end of the extraction window");
  if (with_mode) {
    cmd->add_option("--mode", opts.mode_name, "selective|unselective|zeno");
  }
  cmd->add_option("--therm", opts.therm_name, "instant|subunit|bosonic");
  cmd->add_option("--n-beta", opts.config.n_beta, "thermalisation sub-steps per protocol");
  cmd->add_option("--tau-beta", opts.config.tau_beta, "bath contact per sub-step (bosonic)");
  cmd->add_option("--out", opts.out_path, "write CSV here instead of stdout");
}

void finish_config(CommonOpts& opts) {
  opts.config.mode = qtm::parse_mode(opts.mode_name);
  opts.config.therm_kind = qtm::parse_therm(opts.therm_name);
}

void write_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << text;
  if (!file.good()) throw std::runtime_error("write failed for " + path);
}

int run_sample(const qtm::EngineConfig& config, long cycles, unsigned long seed) {
  using namespace qtm;
  if (cycles < 1) throw std::invalid_argument("cycles: must be >= 1");
  const std::string problem = validate(config);
  if (!problem.empty()) throw std::invalid_argument(problem);
  const MachineSpec spec = build_spin_machine(config.l);
  const auto records =
      analytic_up_records(spec, config.beta, config.dt, config.tau_tilde, config.tau_prime);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double total = 0.0;
  double total_sq = 0.0;
  for (long c = 0; c < cycles; ++c) {
    double work = 0.0;
    for (const UpQuantities& up : records) {
      double u = unit(rng);
      if (u < up.p_d) {
        work += up.energy_d - up.reset;
        continue;
      }
      u -= up.p_d;
      size_t m = 0;
      while (m + 1 < up.p_misfire.size() && u >= up.p_misfire[m]) u -= up.p_misfire[m++];
      work += up.energy_misfire[m] - up.reset;
      break;
    }
    total += work;
    total_sq += work * work;
  }
  const double mean = total / cycles;
  const double var = std::max(0.0, total_sq / cycles - mean * mean);
  const CycleLedger exact = selective_cycle_average(
      spec, config.beta, config.dt, ThermModel::instant(), config.tau_tilde, config.tau_prime);
  std::printf("sampled cycles: %ld\n", cycles);
  std::printf("sampled mean work: %s\n", format_number(mean).c_str());
  std::printf("sample std error:  %s\n",
              format_number(std::sqrt(var / std::max(1L, cycles - 1))).c_str());
  std::printf("exact average:     %s\n", format_number(exact.net_work).c_str());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"work-extraction engine driven by a measurement-stabilised spin clock"};
  app.require_subcommand(1);
  // key=value file with one [subcommand] section, e.g. [run]\nl=3\nbeta=2
  app.set_config("--config", "", "configuration file; sections name subcommands");
  app.allow_config_extras(CLI::config_extras_mode::error);

  CommonOpts run_opts, sweep_opts, therm_opts, fuel_opts, zeno_opts, sample_opts;
  int jobs = 1;
  int zeno_samples = 101;
  std::vector<double> q_values{0.0};
  bool classical_limit = false;
  long sample_cycles = 10000;
  unsigned long sample_seed = 1;

  CLI::App* cmd_run = app.add_subcommand("run", "evaluate one configuration");
  add_common(cmd_run, run_opts);

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "cross-product of l and dt lists");
  add_common(cmd_sweep, sweep_opts);
  cmd_sweep->add_option("--l-list", sweep_opts.config.l_values, "clock spins to sweep");
  cmd_sweep->add_option("--dt-list", sweep_opts.config.dt_values, "intervals to sweep");
  cmd_sweep->add_option("--jobs", jobs, "worker threads (order and values unaffected)");

  CLI::App* cmd_zeno = app.add_subcommand("zeno", "continuous-stabilisation profiles");
  add_common(cmd_zeno, zeno_opts, false);
  cmd_zeno->add_option("--samples", zeno_samples, "sample count over the window");

  CLI::App* cmd_therm = app.add_subcommand("therm", "sub-unit and finite-rate thermalisation");
  add_common(cmd_therm, therm_opts);
  therm_opts.therm_name = "subunit";

  CLI::App* cmd_fuel = app.add_subcommand("mixed-fuel", "engine statistics on mixed inputs");
  add_common(cmd_fuel, fuel_opts, false);
  cmd_fuel->add_option("--q", q_values, "input mixedness values");
  cmd_fuel->add_flag("--classical-limit", classical_limit,
                     "evaluate the infinite-clock analytic path");

  CLI::App* cmd_sample = app.add_subcommand(
      "sample", "Monte Carlo trajectory demo (the library itself never samples)");
  add_common(cmd_sample, sample_opts);
  cmd_sample->add_option("--cycles", sample_cycles, "trajectories to draw");
  cmd_sample->add_option("--seed", sample_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);
    return 1;
  }

  try {
    if (cmd_run->parsed()) {
      finish_config(run_opts);
      write_text(qtm::to_csv({qtm::run_single(run_opts.config)}), run_opts.out_path);
      return 0;
    }
    if (cmd_sweep->parsed()) {
      finish_config(sweep_opts);
      const qtm::SweepOutcome outcome = qtm::run_sweep(sweep_opts.config, jobs);
      write_text(qtm::to_csv(outcome.rows), sweep_opts.out_path);
      for (const std::string& error : outcome.errors) {
        std::cerr << "row failed: " << error << "\n";
      }
      return outcome.errors.empty() ? 0 : 2;
    }
    if (cmd_zeno->parsed()) {
      finish_config(zeno_opts);
      const std::string problem = qtm::validate(zeno_opts.config);
      if (!problem.empty()) throw std::invalid_argument(problem);
      const qtm::MachineSpec spec = qtm::build_spin_machine(zeno_opts.config.l);
      const qtm::ZenoReport report =
          qtm::zeno_report(spec, zeno_opts.config.beta, zeno_samples,
                           zeno_opts.config.tau_tilde, zeno_opts.config.tau_prime);
      std::string csv = "t,work_rate,free_energy\n";
      for (size_t i = 0; i < report.work_rate_samples.size(); ++i) {
        csv += qtm::format_number(report.work_rate_samples[i].first) + "," +
               qtm::format_number(report.work_rate_samples[i].second) + "," +
               qtm::format_number(report.free_energy_samples[i].second) + "\n";
      }
      write_text(csv, zeno_opts.out_path);
      std::cerr << "w_zeno = " << qtm::format_number(report.w_zeno) << "\n";
      return 0;
    }
    if (cmd_therm->parsed()) {
      finish_config(therm_opts);
      if (therm_opts.config.therm_kind == qtm::ThermModel::Kind::InstantGibbs) {
        throw std::invalid_argument("therm: pick subunit or bosonic for this command");
      }
      write_text(qtm::to_csv({qtm::run_single(therm_opts.config)}), therm_opts.out_path);
      return 0;
    }
    if (cmd_fuel->parsed()) {
      finish_config(fuel_opts);
      const std::string problem = qtm::validate(fuel_opts.config);
      if (!problem.empty()) throw std::invalid_argument(problem);
      const qtm::MachineSpec spec = qtm::build_spin_machine(fuel_opts.config.l);
      const double q_breakeven = qtm::breakeven_mixedness();
      std::string csv =
          "q,mode,p_fail_first,p_fail_rest,p_out_pure,p_out_mixed,q_star,q_breakeven,"
          "net_work\n";
      for (double q : q_values) {
        const qtm::MixedFuelReport r = qtm::mixed_cycle_stats(
            spec, fuel_opts.config.beta, fuel_opts.config.dt, q,
            classical_limit ? qtm::FuelMode::ClassicalLimit : qtm::FuelMode::Finite,
            fuel_opts.config.tau_tilde, fuel_opts.config.tau_prime);
        csv += qtm::format_number(r.q);
        csv += classical_limit ? ",classical," : ",finite,";
        csv += qtm::format_number(r.p_fail_first) + "," + qtm::format_number(r.p_fail_rest) +
               "," + qtm::format_number(r.p_out_pure) + "," +
               qtm::format_number(r.p_out_mixed) + "," + qtm::format_number(r.q_star) + "," +
               qtm::format_number(q_breakeven) + "," + qtm::format_number(r.net_work) + "\n";
      }
      write_text(csv, fuel_opts.out_path);
      return 0;
    }
    if (cmd_sample->parsed()) {
      finish_config(sample_opts);
      return run_sample(sample_opts.config, sample_cycles, sample_seed);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
