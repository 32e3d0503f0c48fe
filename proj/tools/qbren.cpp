#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <utility>

#include "qbren/cli/config.hpp"
#include "qbren/cli/report.hpp"
#include "qbren/cli/studies.hpp"

namespace fs = std::filesystem;
using namespace qbren;

int main(int argc, char** argv) {
  CLI::App app{"quadratic boson Hamiltonians: rank-one diagonalization and renormalization studies"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path, out_dir = ".", format = "both";
  std::uint64_t seed = 1;
  bool fault = false;
  app.add_option("--config", config_path, "TOML scenario file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_option("--format", format, "json, csv or both")->check(CLI::IsMember({"json", "csv", "both"}));
  app.add_flag("--inject-fault", fault, "corrupt the regular resolvent family (self-test)");
  const std::pair<const char*, const char*> studies[] = {
      {"identities", "half-line integrals, rank-one resolvents, powers and traces"},
      {"diagonalize", "build xi, U, V and check the symplectic diagonalization"},
      {"flow", "cutoff flow of the coupling, energy and resolvent (writes flow.csv)"},
      {"shale-scan", "divergence probe of the pair-creation trace (writes probe.csv)"},
      {"fock", "truncated Fock-space comparison and operator bounds"},
      {"all", "every study above"}};
  for (auto [name, help] : studies) app.add_subcommand(name, help);
  CLI11_PARSE(app, argc, argv);
  const std::string study = app.get_subcommands().front()->get_name();

  try {
    cli::RunConfig cfg = config_path.empty() ? cli::default_config() : cli::load_config(config_path);
    cli::Options opt{seed, fault};
    auto out = cli::run_study(study, cfg, opt);
    fs::create_directories(out_dir);
    auto doc = out.report.to_json();
    doc["seed"] = seed;
    doc["config"] = config_path.empty() ? "default" : fs::path(config_path).filename().string();
    if (format != "csv") cli::write_text((fs::path(out_dir) / "report.json").string(), doc.dump(2) + "\n");
    if (format != "json") {
      if (out.flow) cli::write_text((fs::path(out_dir) / "flow.csv").string(), cli::to_csv(*out.flow));
      if (out.probe) cli::write_text((fs::path(out_dir) / "probe.csv").string(), cli::to_csv(*out.probe));
    }
    for (auto& c : out.report.checks())
      std::cout << c["status"].get<std::string>() << "  " << c["name"].get<std::string>() << "\n";
    std::cout << study << ": " << out.report.failures() << " failed\n";
    return out.report.failures() == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
