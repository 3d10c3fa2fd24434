#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "brth/breather.hpp"
#include "brth/params.hpp"
#include "brth/potentials.hpp"
#include "brth/types.hpp"

// Batch front end. A run is fully described by (config, seed): the same pair
// produces byte-identical CSV and binary outputs regardless of thread count;
// only the manifest carries a timestamp.
namespace brth::cli {

// Bad flags, malformed config files, impossible settings -> exit 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A verification run whose assertion failed (e.g. convergence order outside
// tolerance) -> exit 2.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;  // construct | verify | evolve | quantize | trajectory | scan

  // Solution selection (construct, verify, evolve).
  std::string solution = "rest-breather";  // rest-breather | boosted-breather | spinning
  double alpha = 0.5;
  int mode_l = 0;
  int mode_n = 0;
  Vec3 velocity{};
  std::optional<double> omega_override;
  double u0 = 0.0;  // uniform scalar potential
  Vec3 a0{};        // uniform vector potential

  PhysicalParams params{};  // natural units unless overridden

  // verify
  std::string equation = "both";  // kg | qhj | both
  std::vector<double> spacings{0.1, 0.05, 0.025};
  double order_target = 2.0;
  double order_tolerance = 0.2;

  // construct
  double box = 20.0;            // radial span / slice half-extent
  double sample_spacing = 0.05;

  // evolve
  double half_width = 40.0;
  double grid_spacing = 0.05;
  double dt = 0.02;
  int periods = 10;
  std::string boundary = "analytic";  // periodic | dirichlet | analytic
  double probe_radius = 2.0;
  int probe_stride = 5;

  // quantize
  std::string well = "harmonic";  // harmonic | quartic
  double omega0 = 1.0;
  double quartic_coefficient = 1.0;
  int n_min = 10;
  int n_max = 20;

  // trajectory
  std::optional<double> energy;  // on-shell from momentum when absent
  Vec3 momentum{1.0, 0.0, 0.0};
  Vec3 start{};
  double t_begin = 0.0;
  double t_end = 10.0;
  double trajectory_dt = 1e-3;

  // scan
  double separation = 6.283185307179586;
  double p_max = 3.5;
  int scan_samples = 512;

  // common plumbing
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 0;
  bool dump_fields = false;
  std::optional<std::filesystem::path> config_file;

  BreatherSpec breather() const;
  Potentials potentials() const;
  // Effective settings for this command, in a fixed order, with doubles
  // rendered losslessly. This is the manifest's config echo.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// argv-style tokens, program name excluded. Flags override config-file
// values; unknown flags and unknown config keys are rejected by name.
RunConfig parse_config(const std::vector<std::string>& args);

struct OutputRecord {
  std::string name;
  std::uint64_t bytes = 0;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::string version;
  std::string started_utc;
  double wall_clock_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<std::pair<std::string, std::string>> input_hashes;
  std::vector<OutputRecord> outputs;
};

// Runs the configured command, writes its reports plus run_manifest.json
// into config.out_dir, and returns the manifest. Throws VerificationFailure
// for assertion-style failures and UsageError for bad settings.
RunManifest execute(const RunConfig& config);

std::string sha256_hex_file(const std::filesystem::path& path);

// parse + execute with the exit-code contract: 0 ok, 1 usage/runtime error,
// 2 verification failure.
int run_main(const std::vector<std::string>& args);

}  // namespace brth::cli
