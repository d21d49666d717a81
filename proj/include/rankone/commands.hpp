#pragma once
// Experiment front end: each cmd_* reads a strict JSON config, writes its
// artifacts plus a resolved-config echo into an output directory, and maps
// outcomes to exit codes (0 success, 1 usage/config error, 2 not found).
// Re-running any command from its own echo reproduces the artifacts byte
// for byte.

#include <cstdint>
#include <iosfwd>
#include <string>

namespace rankone {

struct CommandOptions {
  std::string configPath;
  std::string outDir;
  int threads = 0;          // > 0 caps the OpenMP worker count
  std::uint64_t seed = 0;
  bool threadsFromFlag = false;  // flags override config-file values
  bool seedFromFlag = false;
  std::ostream* err = nullptr;  // defaults to std::cerr
};

int cmd_flat_search(const CommandOptions& opt);
int cmd_riesz(const CommandOptions& opt);
int cmd_flow(const CommandOptions& opt);
int cmd_planar(const CommandOptions& opt);
int cmd_torus(const CommandOptions& opt);

// argv-level entry point shared by the binary and the tests; returns the
// process exit code
int cli_main(int argc, const char* const* argv);

}  // namespace rankone
