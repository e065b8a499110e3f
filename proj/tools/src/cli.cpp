#include "ddc/cli.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddc/config.hpp"
#include "ddc/emit.hpp"
#include "ddc/errors.hpp"
#include "ddc/runner.hpp"

namespace ddc::experiment {

namespace {

constexpr std::size_t kMaxHistory = 100;

std::vector<double> thin(const std::vector<double>& h) {
  if (h.size() <= kMaxHistory) return h;
  std::vector<double> out;
  for (std::size_t k = 0; k < kMaxHistory; ++k) {
    out.push_back(h[k * (h.size() - 1) / (kMaxHistory - 1)]);
  }
  return out;
}

int report(std::ostream& err, const std::optional<std::string>& out_dir,
           int code, const std::string& kind, const std::string& message,
           const std::vector<double>& history = {}) {
  nlohmann::ordered_json record;
  record["schema_version"] = kSummarySchemaVersion;
  record["status"] = "error";
  record["exit_code"] = code;
  record["error"] = {{"kind", kind}, {"message", message}};
  if (!history.empty()) record["error"]["history"] = thin(history);
  err << record.dump() << '\n';
  if (out_dir) {
    try {
      write_text(*out_dir, "error.json", record.dump(2) + '\n');
    } catch (const ValidationError&) {
      // The stderr record is the fallback when the directory is unusable.
    }
  }
  return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Distributed data-driven Lyapunov and LQR experiments", "ddc"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "Run an experiment configuration");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<double> gamma;
  std::vector<std::string> overrides;
  run->add_option("config", config_path, "YAML experiment file")->required();
  run->add_option("--seed", seed, "Override the experiment seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--gamma", gamma, "Override the coupling gain");
  run->add_option("--override", overrides, "Dotted key=value override")
      ->allow_extra_args(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    return report(err, std::nullopt, kExitConfig, "usage", e.what());
  }

  if (seed) overrides.push_back("seed=" + std::to_string(*seed));
  if (out_dir) overrides.push_back("output=\"" + *out_dir + "\"");
  if (gamma) overrides.push_back("gamma=" + format_double(*gamma));

  std::optional<std::string> error_dir = out_dir;
  try {
    const ExperimentConfig config = load_config(config_path, overrides);
    error_dir = config.output_dir;
    const auto start = std::chrono::steady_clock::now();
    const RunOutput result = execute(config);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::error_code ec;
    std::filesystem::remove(std::filesystem::path(config.output_dir) / "error.json", ec);
    write_artifacts(config, result, wall);
    out << "ok " << to_string(config.kind) << " -> " << config.output_dir
        << '\n';
    return kExitOk;
  } catch (const ValidationError& e) {
    return report(err, error_dir, kExitConfig, "config", e.what());
  } catch (const NumericalError& e) {
    return report(err, error_dir, kExitNumerical, "numerical", e.what(),
                  e.history());
  }
}

}  // namespace ddc::experiment
