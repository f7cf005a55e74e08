#pragma once

#include <string>
#include <vector>

#include "qtm/accounting.hpp"

namespace qtm {

/// One experiment configuration; sweep lists, when nonempty, override the
/// scalar l and dt.
struct EngineConfig {
  double l = 1.0;
  double dt = 0.05;
  double beta = 1.0;
  double tau_tilde = kDefaultTauTilde;
  double tau_prime = kDefaultTauPrime;
  Mode mode = Mode::Selective;
  ThermModel::Kind therm_kind = ThermModel::Kind::InstantGibbs;
  int n_beta = 1;
  double tau_beta = 1.0;
  std::vector<double> l_values;
  std::vector<double> dt_values;
};

/// Empty when valid; otherwise a message that names the offending field.
std::string validate(const EngineConfig& config);

struct ResultRow {
  double l = 0.0;
  double dt = 0.0;
  double beta = 1.0;
  Mode mode = Mode::Selective;
  ThermModel::Kind therm = ThermModel::Kind::InstantGibbs;
  int n_beta = 1;
  double tau_beta = 0.0;
  double w_ideal = 0.0;
  double w_avg = 0.0;
  double w_zeno = 0.0;
  double reset_cost = 0.0;
  double heat_in = 0.0;
};

/// Evaluates one configuration. Throws std::invalid_argument on an invalid
/// config, with the field name in the message.
ResultRow run_single(const EngineConfig& config);

struct SweepOutcome {
  std::vector<ResultRow> rows;                // successful rows, l-major dt-minor
  std::vector<std::string> errors;            // one message per failed row
};

/// Cross-product of the l and dt lists. Rows are independent and may be
/// evaluated on several threads; order and values do not depend on jobs.
SweepOutcome run_sweep(const EngineConfig& config, int jobs = 1);

const char* mode_name(Mode mode);
const char* therm_name(ThermModel::Kind kind);
Mode parse_mode(const std::string& name);
ThermModel::Kind parse_therm(const std::string& name);

/// 12 significant digits, '.' decimal, no exponent padding.
std::string format_number(double value);

std::string csv_header();
std::string to_csv_row(const ResultRow& row);

/// Header plus rows, LF line endings, UTF-8.
std::string to_csv(const std::vector<ResultRow>& rows);

/// Throws std::runtime_error on I/O failure.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

} // namespace qtm
