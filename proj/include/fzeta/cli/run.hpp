#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fzeta/common.hpp"

namespace fzeta::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericError = 2, kVerificationFailed = 3 };

struct RunConfig {
  std::string command;  // construct, eval, poles, residues, tube, fit, verify, report

  // target: exactly one of these is normally set
  std::string catalog;   // e.g. "cantor-geometric", "sierpinski-carpet"
  std::string spec;      // string spec: name ("a-string:1"), JSON text, or @file
  std::string set;       // bounded set: name ("cantor", "carpet:4"), JSON text, or @file
  std::string tube_csv;  // previously written tube samples

  std::optional<cplx> s;
  double delta = 0.5;
  double eps = 1e-12;
  int resolution = 1024;
  int k_max = 5;
  double radius = 0.1;
  std::array<double, 2> im_range{-10.0, 10.0};
  std::optional<std::array<double, 2>> re_range;
  double t_min = 1e-8;
  double t_max = 0.1;
  int per_decade = 400;
  std::optional<double> period;
  bool numeric = false;    // poles: search numerically even when a catalog exists
  bool tube_zeta = false;  // residues: report tube-zeta residues instead of distance-zeta ones

  std::string check;  // verify: functional-equation, residue-content, moran, hyperfractal, all
  int points = 10;
  double tol = 0.0;   // 0: per-check default
  std::vector<double> ratios;
  double dimension = 0.5;
  int K = 100;
  long m_start = 2;
  double window = 10.0;
  double gap_target = 0.05;

  std::string artifacts;  // report: directory holding fit.json and residues.json
  std::string out;        // empty: stdout
  std::string format;     // csv, json or text; empty: per-command default
  std::uint64_t seed = 1;
};

/// Checks the knobs that do not depend on the target; throws ConfigParse.
void validate(const RunConfig& cfg);

/// Runs one command. Artifacts go to cfg.out (or `out`), diagnostics to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal form; integral values keep a trailing ".0".
std::string format_number(double x);
std::string format_complex(cplx z);

}  // namespace fzeta::cli
