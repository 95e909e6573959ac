// Command-line front end.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "adlab/params.hpp"

namespace adlab {

enum class Command { tau, sieve, delta, sweep, voronoi, meansquare, cstar, diag };
enum class OutputFormat { csv, json };

struct RunConfig {
  Command command = Command::tau;
  Params params;
  std::string n = "1";  // decimal, up to 128 bits
  double t = 1.0;
  double t_min = 1024.0;
  double z = -1.0;  // negative: default cutoff
  int h_order = 100;
  u64 nmax = 1000;
  u64 points = 100;
  double cap = 1e4;
  std::string kind = "psi";
  OutputFormat format = OutputFormat::csv;
  std::string out;
  std::string dump;
  unsigned threads = 1;
  std::uint64_t seed = 1;
  u64 max_n = u64{1} << 32;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

/// Parses argv (argv[0] is the program name), runs the command and writes data
/// to `out` (or --out) and diagnostics to `err`. Returns the process exit code.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace adlab
