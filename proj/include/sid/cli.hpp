#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sid/json_io.hpp"
#include "sid/tolerances.hpp"

namespace sid {

inline constexpr const char* kReportSchema = "sid-report/1";

enum class Command { CheckSI, Commutant, Canonicalize, AlignFamily, K0, Uniqueness, Generate, Selftest };

std::string to_string(Command c);
std::optional<Command> parse_command(const std::string& name);

struct RunConfig {
  Command command = Command::CheckSI;
  std::string input_path;
  std::string output_path;  // empty: stdout
  Tolerances tol;
  std::optional<std::uint64_t> seed;

  std::string operator_name = "T";
  std::string idempotent;
  std::optional<int> m;
  std::string family;  // family name or comma-separated field names
  std::string onto;
  bool full_solve = false;

  int n = 2;
  int gen_m = 2;
  int atoms = 3;
  std::string pattern;
};

/// Exit codes: 0 success, 1 well-formed negative verdict, 2 failure.
struct RunResult {
  int exit_code = 0;
  Json report;
};

/// Dispatches one command. Never throws for library errors: they become an
/// "error" object and exit code 2. `generate` returns the document itself.
RunResult run(const RunConfig& config);

/// Parses argv, runs, writes the report. Returns the process exit code.
int cli_main(int argc, char** argv);

}  // namespace sid
