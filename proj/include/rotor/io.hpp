#pragma once

// Tabular and JSON artifacts.  Every text artifact carries the SHA-256 of the
// resolved configuration: CSV and SVG in a leading comment, JSON in "meta".

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "rotor/config.hpp"
#include "rotor/scenario.hpp"
#include "rotor/series.hpp"

namespace rotor {

inline constexpr const char* kArtifactVersion = "1";

struct ArtifactContext {
  std::string config_hash;
  double revival_time_ps = 0.0;
  std::string molecule;
  double temperature_k = 0.0;
};

ArtifactContext make_context(const RunConfig& config);

std::string sha256_hex(std::string_view data);
std::string config_hash(const RunConfig& config);

/// Header `time_dimensionless,time_ps,value` after one hash comment line,
/// 12 significant digits, LF endings.
std::string series_to_csv(const ObservableSeries& series, const ArtifactContext& ctx);
ObservableSeries series_from_csv(const std::string& text, const std::string& name);

/// The series with its meta block merged with engine-independent context.
std::string series_to_json(const ObservableSeries& series, const ArtifactContext& ctx);
ObservableSeries series_from_json(const std::string& text);

/// `x_column,y_column` table; delay curves also get a delay_ps column.
std::string curve_to_csv(const Curve& curve, const std::string& y_name, const ArtifactContext& ctx);
std::string curve_to_json(const Curve& curve, const std::string& y_name, const ArtifactContext& ctx);

/// Long format: p1,p2,jy.
std::string surface_to_csv(const StrengthSurface& surface, const ArtifactContext& ctx);
std::string density_to_csv(const DensityGrid& grid, const ArtifactContext& ctx);

/// Arbitrary JSON object text with meta.config_hash and meta.artifact_version set.
std::string summary_to_json(const std::map<std::string, double>& values,
                            const std::map<std::string, std::string>& labels, const ArtifactContext& ctx);

/// Config hash embedded in an artifact, or an empty string.
std::string embedded_hash(const std::string& artifact_text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace rotor
