#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "crlab/runner.hpp"
#include "crlab/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"crlab - numerical laboratory for pseudohermitian geometry"};
  app.set_version_flag("--version", std::string("crlab ") + crlab::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  long seed = 0;
  bool have_seed = false;

  CLI::App* run = app.add_subcommand("run", "execute a JSON run configuration");
  run->add_option("config", config_path, "path to the config file")->required();
  run->add_option("--out", out_dir, "output directory (default: .)");
  run->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
    have_seed = true;
  });

  CLI11_PARSE(app, argc, argv);

  crlab::RunOutcome out = crlab::run_config_file(
      config_path, out_dir, have_seed ? std::optional<long>(seed) : std::nullopt);
  if (!out.error_json.empty()) std::fprintf(stderr, "%s\n", out.error_json.c_str());
  for (const auto& a : out.artifacts) std::printf("%s\n", a.c_str());
  return out.exit_code;
}
