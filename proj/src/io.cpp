#include "rotor/io.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <cctype>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "rotor/errors.hpp"

namespace rotor {

namespace {

using nlohmann::json;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string g12(double v) { return fmt::format("{:.12g}", v); }

std::string hash_comment(const ArtifactContext& ctx) {
  return fmt::format("# config_sha256={} artifact_version={}\n", ctx.config_hash, kArtifactVersion);
}

json meta_block(const std::map<std::string, std::string>& base, const ArtifactContext& ctx) {
  json meta = json::object();
  for (const auto& [k, v] : base) meta[k] = v;
  meta["config_hash"] = ctx.config_hash;
  meta["artifact_version"] = kArtifactVersion;
  meta["molecule"] = ctx.molecule;
  meta["temperature_k"] = g12(ctx.temperature_k);
  meta["revival_time_ps"] = g12(ctx.revival_time_ps);
  return meta;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text, std::vector<std::string>& header) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      header = cells;
      have_header = true;
    } else {
      rows.push_back(cells);
    }
  }
  if (!have_header) throw IoError("csv: missing header");
  return rows;
}

std::string dump(const json& j) { return j.dump(1, ' ') + "\n"; }

}  // namespace

ArtifactContext make_context(const RunConfig& config) {
  return {config_hash(config), config.revival_time_ps(), config.molecule.name, config.ensemble.temperature_k};
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw IoError("sha256: digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string config_hash(const RunConfig& config) { return sha256_hex(canonical_text(config)); }

std::string series_to_csv(const ObservableSeries& series, const ArtifactContext& ctx) {
  series.validate();
  std::string out = hash_comment(ctx);
  out += "time_dimensionless,time_ps,value\n";
  const double scale = ctx.revival_time_ps / kTwoPi;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    out += fmt::format("{},{},{}\n", g12(series.times[i]), g12(series.times[i] * scale), g12(series.values[i]));
  }
  return out;
}

ObservableSeries series_from_csv(const std::string& text, const std::string& name) {
  std::vector<std::string> header;
  const auto rows = csv_rows(text, header);
  if (header != std::vector<std::string>{"time_dimensionless", "time_ps", "value"}) {
    throw IoError("csv: unexpected header for a series");
  }
  ObservableSeries s;
  s.name = name;
  for (const auto& r : rows) {
    if (r.size() != 3) throw IoError("csv: row does not have three columns");
    try {
      s.times.push_back(std::stod(r[0]));
      s.values.push_back(std::stod(r[2]));
    } catch (const std::exception&) {
      throw IoError("csv: malformed number");
    }
  }
  s.validate();
  return s;
}

std::string series_to_json(const ObservableSeries& series, const ArtifactContext& ctx) {
  series.validate();
  json j;
  j["name"] = series.name;
  j["times"] = series.times;
  j["values"] = series.values;
  j["series_meta"] = series.meta;
  j["meta"] = meta_block(series.meta, ctx);
  return dump(j);
}

ObservableSeries series_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ObservableSeries s;
    s.name = j.at("name").get<std::string>();
    s.times = j.at("times").get<std::vector<double>>();
    s.values = j.at("values").get<std::vector<double>>();
    s.meta = j.at("series_meta").get<std::map<std::string, std::string>>();
    if (s.times.size() != s.values.size()) throw IoError("json: times and values differ in length");
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("json: ") + e.what());
  }
}

std::string curve_to_csv(const Curve& curve, const std::string& y_name, const ArtifactContext& ctx) {
  const bool delay = curve.x_name == "delay";
  std::string out = hash_comment(ctx);
  out += curve.x_name + (delay ? ",delay_ps," : ",") + y_name + "\n";
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    if (delay) {
      out += fmt::format("{},{},{}\n", g12(curve.x[i]), g12(curve.x[i] * ctx.revival_time_ps / kTwoPi), g12(curve.y[i]));
    } else {
      out += fmt::format("{},{}\n", g12(curve.x[i]), g12(curve.y[i]));
    }
  }
  return out;
}

std::string curve_to_json(const Curve& curve, const std::string& y_name, const ArtifactContext& ctx) {
  json j;
  j["x_name"] = curve.x_name;
  j["y_name"] = y_name;
  j["x"] = curve.x;
  j["y"] = curve.y;
  j["meta"] = meta_block(curve.meta, ctx);
  return dump(j);
}

std::string surface_to_csv(const StrengthSurface& surface, const ArtifactContext& ctx) {
  std::string out = hash_comment(ctx);
  out += "p1,p2,jy\n";
  for (std::size_t i = 0; i < surface.p1.size(); ++i)
    for (std::size_t k = 0; k < surface.p2.size(); ++k)
      out += fmt::format("{},{},{}\n", g12(surface.p1[i]), g12(surface.p2[k]), g12(surface.jy[i][k]));
  return out;
}

std::string density_to_csv(const DensityGrid& grid, const ArtifactContext& ctx) {
  std::string out = hash_comment(ctx);
  out += "theta,phi,density\n";
  for (std::size_t i = 0; i < grid.theta.size(); ++i)
    for (std::size_t k = 0; k < grid.phi.size(); ++k)
      out += fmt::format("{},{},{}\n", g12(grid.theta[i]), g12(grid.phi[k]), g12(grid.at(i, k)));
  return out;
}

std::string summary_to_json(const std::map<std::string, double>& values,
                            const std::map<std::string, std::string>& labels, const ArtifactContext& ctx) {
  json j;
  j["values"] = json::object();
  for (const auto& [k, v] : values) j["values"][k] = v;
  j["meta"] = meta_block(labels, ctx);
  return dump(j);
}

std::string embedded_hash(const std::string& text) {
  if (const auto p = text.find("config_sha256="); p != std::string::npos) {
    const auto start = p + std::string("config_sha256=").size();
    auto end = start;
    while (end < text.size() && std::isxdigit(static_cast<unsigned char>(text[end]))) ++end;
    return text.substr(start, end - start);
  }
  try {
    const json j = json::parse(text);
    if (j.contains("meta") && j["meta"].contains("config_hash")) return j["meta"]["config_hash"].get<std::string>();
  } catch (const json::exception&) {
  }
  return {};
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

}  // namespace rotor
