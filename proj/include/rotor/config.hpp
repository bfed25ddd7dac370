#pragma once

// Run configuration files.
//
//   # comment
//   [section]
//   key = value        # trailing comment
//
// Physical quantities carry units: temperatures in K, times in ps or T_rev,
// angles in deg or rad.  Lists are comma separated; a range is written
// `start : stop : step` with units on each part.  Unknown sections and keys are
// errors.  See README.md for the full key reference.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rotor/scenario.hpp"
#include "rotor/thermal.hpp"

namespace rotor {

enum class ScanKind { none, angle, strengths, budget, delay };
std::string to_string(ScanKind k);

struct ScanSpec {
  ScanKind kind = ScanKind::none;
  std::vector<double> angles;        // radians
  std::vector<double> p1_values;
  std::vector<double> p2_values;
  double budget = 0.0;               // P1 + P2
  std::vector<double> differences;   // P1 - P2
  double delay_center = 0.0;         // dimensionless
  double delay_halfwidth = 0.0;
  int delay_points = 0;
};

struct AnalysisSpec {
  bool density = false;
  int density_n_theta = 90;
  int density_n_phi = 180;
  std::vector<double> fractions;  // of T_rev, for the fractional-revival report
  bool compare_engines = false;   // fdtd runs also run the spectral engine
};

struct OutputSpec {
  std::filesystem::path directory = "out";
  std::string stem = "run";
  bool csv = true;
  bool json = true;
  bool svg = true;
  std::string title;
  std::optional<double> reference_line;  // horizontal line drawn on series plots
};

struct RunConfig {
  MoleculeSpec molecule;
  EnsembleSpec ensemble;  // molecule copied in by validate()
  DoublePulseProtocol protocol;
  RunOptions options;
  ScanSpec scan;
  AnalysisSpec analysis;
  OutputSpec output;

  bool is_scan() const noexcept { return scan.kind != ScanKind::none; }
  double revival_time_ps() const { return molecule.revival_time_ps(); }

  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// Molecule presets, keyed by name, read from a file with one section per molecule.
std::map<std::string, MoleculeSpec> parse_molecule_presets(const std::string& text, const std::string& origin);
std::map<std::string, MoleculeSpec> load_molecule_presets(const std::filesystem::path& path);

/// Directory searched for molecules.ini when a config names a preset.
std::filesystem::path default_preset_path();

/// Parses and validates.  `presets` resolves `[molecule] preset = NAME`.
/// `overrides` are `section.key=value` assignments applied over the file.
/// Errors are ConfigError with "origin:line:column: message".
RunConfig parse_config(const std::string& text, const std::string& origin,
                       const std::map<std::string, MoleculeSpec>& presets,
                       const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::filesystem::path& path, const std::map<std::string, MoleculeSpec>& presets,
                      const std::vector<std::string>& overrides = {});

/// The fully resolved configuration in the file format, sections and keys
/// sorted, every default spelled out, numbers with 17 significant digits.
/// output.directory is left out: where artifacts land is not part of a run's
/// identity.  Parsing the text back reproduces it.
std::string canonical_text(const RunConfig& config);

/// Quantity parsers, exposed for tests.  Each returns the dimensionless
/// internal value or throws ConfigError.
double parse_temperature(const std::string& text);
double parse_angle(const std::string& text);
double parse_time(const std::string& text, double revival_time_ps);

}  // namespace rotor
