#pragma once

// Configuration-driven verification campaigns.
//
// An experiment picks one scenario, draws `replications` independent samples
// of it (replication r uses stream r of the master seed) and evaluates a list
// of registered identities on each. Per-replication values are kept in index
// order and reduced serially, so reports do not depend on the worker count.
//
// Config grammar (ini, one key per line, '#' or ';' comments):
//
//   [experiment]
//   scenario     = brownian-last-zero | cpp-honest | max-combined | abs-brownian | tree
//   replications = 1000
//   master_seed  = 1
//   identities   = t1-additive, t1-multiplicative
//   out          = results            ; optional
//
//   [parameters]                      ; all optional
//   mu = 1   theta = 2   a = 0   depth = 3   dt = 1e-3   horizon = 10
//   near_kappa = 3   min_step_ratio = 0.015625   times = 0.25, 1, 4
//
//   [tolerances]                      ; all optional
//   z = 3   exact = 1e-10   path = 3   fraction = 0.99   rms = 5   ratio = 0.01

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace laglad {

enum class ScenarioKind { BrownianLastZero, CppHonest, MaxCombined, AbsBrownian, Tree };

const char* to_string(ScenarioKind k);

struct ExperimentParams {
  double mu = 1.0;
  double theta = 2.0;
  double a = 0.0;
  std::size_t depth = 3;
  double dt = 1e-3;
  double horizon = 10.0;
  double near_kappa = 3.0;
  double min_step_ratio = 1.0 / 64.0;
  /// Checkpoints for the identities that compare at fixed times; empty
  /// means the identity's own default.
  std::vector<double> times;
};

struct ExperimentTolerances {
  double z = 3.0;           ///< |z| bound for Monte Carlo comparisons
  double exact = 1e-10;     ///< absolute bound for exact identities
  double path = 3.0;        ///< pathwise bound, in units of dt^{1/2}
  double fraction = 0.99;   ///< required share of replications within `path`
  double rms = 5.0;         ///< RMS bound for the stochastic exponential, in units of dt^{1/2}
  double ratio = 0.01;      ///< support-leak share
};

struct ExperimentConfig {
  ScenarioKind scenario = ScenarioKind::BrownianLastZero;
  ExperimentParams params;
  std::size_t replications = 1;
  std::uint64_t master_seed = 0;
  std::vector<std::string> identities;
  ExperimentTolerances tol;
  std::filesystem::path out_dir;
  int workers = 0;
};

/// Reads an ini file; throws ConfigInvalid on malformed or unknown keys.
ExperimentConfig load_config(const std::filesystem::path& file);
ExperimentConfig parse_config(const std::string& text);
/// Throws ConfigInvalid unless every invariant holds.
void validate(const ExperimentConfig& cfg);

struct IdentityInfo {
  std::string name;
  std::string anchor;
  std::vector<ScenarioKind> scenarios;
};

const std::vector<IdentityInfo>& identity_catalog();

struct ReportRow {
  std::string identity;
  double s = 0.0;
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double estimate = 0.0;
  double se = 0.0;
  double tolerance = 0.0;
  double z_score = 0.0;
  bool pass = false;
};

struct IdentityResiduals {
  std::string identity;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  ///< one per replication
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ReportRow> rows;
  std::vector<IdentityResiduals> residuals;
  bool all_pass() const;
};

/// Runs every requested identity. Throws ConfigInvalid or ScenarioFailure.
ExperimentReport run(const ExperimentConfig& cfg);

/// report.csv, stamp.txt and one <identity>.csv per identity under dir.
void write_report(const ExperimentReport& rep, const std::filesystem::path& dir);
std::string report_csv(const ExperimentReport& rep);

/// Replication 0 of the configured scenario as CSV (t, F̃ triples, and the
/// driving path where there is one). For trees, the tree JSON text.
std::string dump_scenario(const ExperimentConfig& cfg);

}  // namespace laglad
