#include "qtm/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "qtm/mixed_fuel.hpp"
#include "qtm/therm_models.hpp"
#include "qtm/zeno.hpp"

namespace qtm {

namespace {

constexpr double kLog2 = 0.6931471805599453;

bool half_integer(double l) {
  const double t = 2.0 * l;
  return l > 0.0 && std::abs(t - std::lround(t)) <= 1e-9;
}

} // namespace

std::string validate(const EngineConfig& config) {
  if (!half_integer(config.l)) return "l: must be a positive half-integer";
  for (double l : config.l_values) {
    if (!half_integer(l)) return "l-list: entries must be positive half-integers";
  }
  if (!(config.beta > 0.0) || !std::isfinite(config.beta)) {
    return "beta: must be positive and finite";
  }
  if (!(config.tau_tilde < config.tau_prime) || !(config.tau_prime <= 2.0 * kPi) ||
      !(config.tau_tilde >= 0.0)) {
    return "tau-tilde/tau-prime: need 0 <= tau_tilde < tau_prime <= 2*pi";
  }
  const double span = config.tau_prime - config.tau_tilde;
  if (!(config.dt > 0.0) || config.dt > span) {
    return "dt: must satisfy 0 < dt <= tau_prime - tau_tilde";
  }
  for (double dt : config.dt_values) {
    if (!(dt > 0.0) || dt > span) {
      return "dt-list: entries must satisfy 0 < dt <= tau_prime - tau_tilde";
    }
  }
  if (config.n_beta < 1) return "n-beta: must be >= 1";
  if (config.tau_beta < 0.0) return "tau-beta: must be nonnegative";
  if (config.mode == Mode::Unselective &&
      config.therm_kind != ThermModel::Kind::InstantGibbs) {
    return "therm: unselective mode supports only the instant model";
  }
  return {};
}

namespace {

ThermModel make_model(const EngineConfig& config) {
  switch (config.therm_kind) {
    case ThermModel::Kind::InstantGibbs:
      return ThermModel::instant();
    case ThermModel::Kind::Subunit:
      return ThermModel::subunit(config.n_beta);
    case ThermModel::Kind::Bosonic:
      return ThermModel::bosonic(config.n_beta, config.tau_beta);
  }
  throw std::logic_error("unreachable");
}

} // namespace

ResultRow run_single(const EngineConfig& config) {
  const std::string problem = validate(config);
  if (!problem.empty()) throw std::invalid_argument(problem);

  const MachineSpec spec = build_spin_machine(config.l);
  ResultRow row;
  row.l = config.l;
  row.dt = config.dt;
  row.beta = config.beta;
  row.mode = config.mode;
  row.therm = config.therm_kind;
  row.n_beta = config.n_beta;
  row.tau_beta = config.therm_kind == ThermModel::Kind::Bosonic ? config.tau_beta : 0.0;
  row.w_zeno = zeno_total_work(spec, config.beta, config.tau_tilde, config.tau_prime);

  switch (config.mode) {
    case Mode::Selective: {
      const CycleLedger ledger =
          selective_cycle_average(spec, config.beta, config.dt, make_model(config),
                                  config.tau_tilde, config.tau_prime);
      row.w_ideal = ledger.w_ideal;
      row.w_avg = ledger.net_work;
      row.reset_cost = ledger.reset_cost;
      row.heat_in = ledger.heat_in;
      break;
    }
    case Mode::Unselective: {
      const CycleLedger ledger =
          unselective_cycle_average(spec, config.beta, config.dt, make_model(config),
                                    config.tau_tilde, config.tau_prime);
      row.w_ideal = ledger.w_ideal;
      row.w_avg = ledger.net_work;
      row.reset_cost = ledger.reset_cost;
      row.heat_in = ledger.heat_in;
      break;
    }
    case Mode::Zeno: {
      row.w_ideal = row.w_zeno;
      row.w_avg = row.w_zeno;
      row.reset_cost = 0.0;
      // the qubit returns to degeneracy, so cycle heat equals cycle work
      row.heat_in = row.w_zeno;
      break;
    }
  }
  return row;
}

SweepOutcome run_sweep(const EngineConfig& config, int jobs) {
  const std::string problem = validate(config);
  if (!problem.empty()) throw std::invalid_argument(problem);

  const std::vector<double> ls =
      config.l_values.empty() ? std::vector<double>{config.l} : config.l_values;
  const std::vector<double> dts =
      config.dt_values.empty() ? std::vector<double>{config.dt} : config.dt_values;
  struct Slot {
    bool ok = false;
    ResultRow row;
    std::string error;
  };
  std::vector<Slot> slots(ls.size() * dts.size());

  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      EngineConfig point = config;
      point.l_values.clear();
      point.dt_values.clear();
      point.l = ls[i / dts.size()];
      point.dt = dts[i % dts.size()];
      try {
        slots[i].row = run_single(point);
        slots[i].ok = true;
      } catch (const std::exception& e) {
        slots[i].error = "l=" + format_number(point.l) + " dt=" + format_number(point.dt) +
                         ": " + e.what();
      }
    }
  };

  jobs = std::max(1, jobs);
  if (jobs == 1 || slots.size() < 2) {
    work(0, slots.size());
  } else {
    const size_t n_threads = std::min<size_t>(jobs, slots.size());
    std::vector<std::thread> threads;
    threads.reserve(n_threads);
    const size_t chunk = (slots.size() + n_threads - 1) / n_threads;
    for (size_t t = 0; t < n_threads; ++t) {
      const size_t begin = t * chunk;
      const size_t end = std::min(slots.size(), begin + chunk);
      if (begin < end) threads.emplace_back(work, begin, end);
    }
    for (auto& thread : threads) thread.join();
  }

  SweepOutcome outcome;
  for (Slot& slot : slots) {
    if (slot.ok) {
      outcome.rows.push_back(slot.row);
    } else {
      outcome.errors.push_back(std::move(slot.error));
    }
  }
  return outcome;
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::Selective: return "selective";
    case Mode::Unselective: return "unselective";
    case Mode::Zeno: return "zeno";
  }
  return "?";
}

const char* therm_name(ThermModel::Kind kind) {
  switch (kind) {
    case ThermModel::Kind::InstantGibbs: return "instant";
    case ThermModel::Kind::Subunit: return "subunit";
    case ThermModel::Kind::Bosonic: return "bosonic";
  }
  return "?";
}

Mode parse_mode(const std::string& name) {
  if (name == "selective") return Mode::Selective;
  if (name == "unselective") return Mode::Unselective;
  if (name == "zeno") return Mode::Zeno;
  throw std::invalid_argument("mode: expected selective|unselective|zeno, got " + name);
}

ThermModel::Kind parse_therm(const std::string& name) {
  if (name == "instant") return ThermModel::Kind::InstantGibbs;
  if (name == "subunit") return ThermModel::Kind::Subunit;
  if (name == "bosonic") return ThermModel::Kind::Bosonic;
  throw std::invalid_argument("therm: expected instant|subunit|bosonic, got " + name);
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // canonical zero, no negative zero
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string csv_header() {
  return "l,dt,beta,mode,therm_model,n_beta,tau_beta,"
         "w_ideal,w_avg,w_zeno,reset_cost,heat_in,"
         "w_ideal_norm,w_avg_norm,w_zeno_norm,reset_cost_norm,heat_in_norm";
}

std::string to_csv_row(const ResultRow& row) {
  const double norm = row.beta / kLog2;  // 1/(kT log 2)
  std::string out;
  out += format_number(row.l);
  out += ',';
  out += format_number(row.dt);
  out += ',';
  out += format_number(row.beta);
  out += ',';
  out += mode_name(row.mode);
  out += ',';
  out += therm_name(row.therm);
  out += ',';
  out += std::to_string(row.n_beta);
  out += ',';
  out += format_number(row.tau_beta);
  for (double v : {row.w_ideal, row.w_avg, row.w_zeno, row.reset_cost, row.heat_in}) {
    out += ',';
    out += format_number(v);
  }
  for (double v : {row.w_ideal, row.w_avg, row.w_zeno, row.reset_cost, row.heat_in}) {
    out += ',';
    out += format_number(v * norm);
  }
  return out;
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = csv_header();
  out += '\n';
  for (const ResultRow& row : rows) {
    out += to_csv_row(row);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << to_csv(rows);
  if (!file.good()) throw std::runtime_error("write failed for " + path);
}

} // namespace qtm
