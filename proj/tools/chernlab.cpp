#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "chernlab/runner.hpp"

using namespace chernlab;

namespace {

int list_registry() {
  std::cout << Registry::instance().document().dump(2) << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chern curvature, Bochner identities and Schwarz-type estimates on registered examples."};
  std::string suite;
  std::string config_path, out_path, csv_path;
  std::uint64_t seed = 0;

  std::vector<std::string> choices = suite_names();
  choices.push_back("list-registry");
  app.add_option("suite", suite, "suite to run, or list-registry")->required()->check(CLI::IsMember(choices));
  app.add_option("--config", config_path, "run configuration (JSON)")->check(CLI::ExistingFile);
  app.add_option("--out", out_path, "write the JSON report here instead of stdout");
  app.add_option("--csv", csv_path, "write per-point values as CSV");
  auto* seed_opt = app.add_option("--seed", seed, "probe seed (overrides the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInvalid;
  }

  if (suite == "list-registry") return list_registry();
  if (config_path.empty()) {
    std::cerr << "error: --config is required for suite '" << suite << "'\n";
    return kExitInvalid;
  }

  std::ifstream in(config_path);
  std::stringstream text;
  text << in.rdbuf();
  std::optional<std::uint64_t> seed_override;
  if (*seed_opt) seed_override = seed;

  RunResult result = run(suite, text.str(), seed_override);
  const std::string report = result.report.dump(2) + "\n";
  try {
    if (out_path.empty()) std::cout << report;
    else write_atomically(out_path, report);
    if (!csv_path.empty()) write_atomically(csv_path, result.table.render());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  if (result.report.contains("error")) std::cerr << "chernlab: " << result.report["error"]["message"].get<std::string>() << "\n";
  return result.exit_code;
}
