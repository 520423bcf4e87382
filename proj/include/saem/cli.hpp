#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "saem/mesh_io.hpp"

namespace saem::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kInvalidInput = 2,
  kSolverAbort = 3,
};

struct RunConfig {
  std::filesystem::path input;
  MeshFormat format = MeshFormat::Auto;
  std::filesystem::path map;  // metrics / correct
  std::filesystem::path output;
  std::filesystem::path report;
  std::filesystem::path hist;
  std::filesystem::path trace;
  int max_iters = 100;
  double energy_tol = 1e-5;
  int fp_iters = 15;
  bool correct = true;
  std::uint64_t seed = 0;
  std::optional<std::array<int, 2>> fixed;
  bool omit_timing = false;
};

/// Stable 64-bit hash of the numeric settings (paths excluded), hex encoded.
std::string config_hash(const RunConfig& config);

int cmd_param(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_metrics(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_correct(const RunConfig& config, std::ostream& out, std::ostream& err);

struct GenConfig {
  std::string shape = "icosphere";  // icosphere, ellipsoid, bumpy, octahedron, icosahedron
  int level = 3;
  std::array<double, 3> axes = {1.0, 1.0, 1.5};
  double amplitude = 0.3;
  std::filesystem::path output;
};
int cmd_gen(const GenConfig& config, std::ostream& out, std::ostream& err);

/// Parses `args` (args[0] is the program name) and runs the chosen subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace saem::cli
