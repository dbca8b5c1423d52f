#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "distortion/map_json.hpp"
#include "distortion/witness.hpp"

namespace distortion {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // some verification failed
inline constexpr int kExitUsage = 2;   // bad arguments, input or parameters

struct RunConfig {
  std::string command;  // plan | witness | demo | fragment | verify
  std::string input;
  std::string out;    // main output; stdout when empty
  std::string words;  // words file (witness writes it, verify reads it)
  std::string csv;    // CSV summary for witness
  int dim = 2;
  int nmax = 6;
  Real lambda = 0.5L;
  Real tol = 1e-6L;
  int grid = 17;
  int samples = 1000;
  std::uint64_t seed = 1;
  std::string kind = "circle-rotation";  // demo: circle-rotation | sphere-rotation
  std::optional<Real> alpha;              // default: golden mean
  Real theta = 1;
  long scale = 0;
  bool recurrent = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

Json config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const Json& j);

/// Witness session: plan parameters and one target per slot.
struct Session {
  GeneratorParams params;
  int nmax = 0;
  std::vector<Target> targets;
};
Session session_from_json(const Json& j);
Json session_to_json(const Session& s);

/// Parses argv; throws ParseError on bad usage. `--help` sets command "help".
RunConfig parse_args(int argc, const char* const* argv);

/// Runs one command, writing files and diagnostics; returns the exit code.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Entry point of the command-line tool.
int cli_main(int argc, const char* const* argv);

}  // namespace distortion
