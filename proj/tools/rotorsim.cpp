// rotorsim: run, scan, figures, check, verify.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical adequacy failure,
// 3 I/O error.

#include <fmt/format.h>

#include <algorithm>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "rotor/checks.hpp"
#include "rotor/config.hpp"
#include "rotor/errors.hpp"
#include "rotor/execution.hpp"
#include "rotor/runner.hpp"

namespace fs = std::filesystem;
using namespace rotor;

namespace {

constexpr int kOk = 0, kConfigFailure = 1, kNumericalFailure = 2, kIoFailure = 3;

struct Common {
  int threads = 0;
  bool serial = false;
  std::string presets;
  std::string output_dir;
  std::vector<std::string> overrides;

  Execution exec() const { return serial ? Execution::serial : Execution::parallel; }
  std::map<std::string, MoleculeSpec> load_presets() const {
    return load_molecule_presets(presets.empty() ? default_preset_path() : fs::path(presets));
  }
};

RunConfig load(const std::string& path, const Common& common) {
  auto overrides = common.overrides;
  if (!common.output_dir.empty()) overrides.push_back("output.directory=" + common.output_dir);
  return load_config(path, common.load_presets(), overrides);
}

void print_report(const RunConfig& c, const RunReport& r) {
  fmt::print("{}: config sha256 {}\n", c.output.stem, r.config_hash);
  for (const auto& [k, v] : r.values) fmt::print("  {:<36} {:.10g}\n", k, v);
  fmt::print("  wrote {} files to {}\n", r.files.size() + 1, c.output.directory.string());
}

int cmd_run(const std::string& path, const Common& common, bool want_scan) {
  const RunConfig c = load(path, common);
  if (c.is_scan() != want_scan) {
    throw ConfigError(path + (want_scan ? ": has no [scan] section, use 'run'" : ": describes a scan, use 'scan'"));
  }
  print_report(c, execute_config(c, common.exec()));
  return kOk;
}

int cmd_figures(const std::string& dir, const std::vector<std::string>& only, const Common& common) {
  std::vector<fs::path> configs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".cfg") configs.push_back(e.path());
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) throw IoError("no .cfg files in '" + dir + "'");
  int ran = 0;
  for (const auto& p : configs) {
    const auto stem = p.stem().string();
    if (!only.empty() && std::find(only.begin(), only.end(), stem) == only.end()) continue;
    RunConfig c = load(p.string(), common);
    if (common.output_dir.empty()) c.output.directory = fs::path("figures") / stem;
    print_report(c, execute_config(c, common.exec()));
    ++ran;
  }
  if (ran == 0) throw ConfigError("no figure config matched --only");
  return kOk;
}

int cmd_check(const Common& common) {
  int failed = 0;
  for (const auto& r : run_property_checks(common.exec())) {
    fmt::print("{} {:<52} measured {:.3e} limit {:.1e}{}\n", r.pass ? "PASS" : "FAIL", r.name, r.measured, r.limit,
               r.detail.empty() ? "" : "  (" + r.detail + ")");
    if (!r.pass) ++failed;
  }
  return failed ? kNumericalFailure : kOk;
}

int cmd_verify(const std::string& dir, const std::string& config_path, const Common& common) {
  std::optional<RunConfig> config;
  if (!config_path.empty()) config = load(config_path, common);
  const auto rep = verify_outputs(dir, config ? &*config : nullptr);
  for (const auto& p : rep.problems) fmt::print("problem: {}\n", p);
  fmt::print("{} manifests, {} files: {}\n", rep.manifests, rep.files, rep.ok() ? "verified" : "NOT verified");
  return rep.ok() ? kOk : kIoFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-pulse rotational dynamics of linear molecules"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_option("--threads", common.threads, "OpenMP worker count (0 = runtime default)")->check(CLI::NonNegativeNumber);
  app.add_flag("--serial", common.serial, "use the serial reference kernels");
  app.add_option("--presets", common.presets, "molecule preset file");

  std::string config_path;
  auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", common.output_dir, "override output.directory");
    sub->add_option("--set", common.overrides, "override a key, section.key=value (repeatable)");
  };
  auto* run = app.add_subcommand("run", "run one double-pulse protocol");
  add_run_options(run);
  auto* scan = app.add_subcommand("scan", "run a parameter sweep");
  add_run_options(scan);

  auto* figures = app.add_subcommand("figures", "run every figure configuration");
  std::string figure_dir = "configs";
  std::vector<std::string> only;
  figures->add_option("--configs", figure_dir, "directory of .cfg files")->check(CLI::ExistingDirectory);
  figures->add_option("--only", only, "run only these config stems (e.g. fig2)")->delimiter(',');
  figures->add_option("-o,--output-dir", common.output_dir, "write every figure here instead of figures/<stem>");
  figures->add_option("--set", common.overrides, "override a key in every config");

  auto* check = app.add_subcommand("check", "run the invariant and oracle suite at reduced scale");

  auto* verify = app.add_subcommand("verify", "re-check artifact hashes in an output directory");
  std::string verify_dir;
  std::string verify_config;
  verify->add_option("directory", verify_dir, "output directory")->required();
  verify->add_option("--config", verify_config, "also require this config's hash")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  set_thread_count(common.threads);
  try {
    if (*run) return cmd_run(config_path, common, false);
    if (*scan) return cmd_run(config_path, common, true);
    if (*figures) return cmd_figures(figure_dir, only, common);
    if (*check) return cmd_check(common);
    if (*verify) return cmd_verify(verify_dir, verify_config, common);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kConfigFailure;
  } catch (const DomainError& e) {
    fmt::print(stderr, "invalid input: {}\n", e.what());
    return kConfigFailure;
  } catch (const TruncationError& e) {
    fmt::print(stderr, "numerical adequacy failure: {}\n", e.what());
    return kNumericalFailure;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kNumericalFailure;
  } catch (const IoError& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kIoFailure;
  } catch (const fs::filesystem_error& e) {
    fmt::print(stderr, "I/O error: {}\n", e.what());
    return kIoFailure;
  }
  return kOk;
}
