#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chernlab/runner.hpp"

using namespace chernlab;

namespace {

const std::filesystem::path kSource = CHERNLAB_SOURCE_DIR;

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config(const std::string& name) { return slurp(kSource / "configs" / (name + ".json")); }

void expect_close(const json& got, const json& want, const std::string& where) {
  if (want.is_number() && got.is_number()) {
    const double a = got.get<double>(), b = want.get<double>();
    EXPECT_LE(std::abs(a - b), 1e-8 * (1.0 + std::abs(b))) << where;
    return;
  }
  ASSERT_EQ(got.type(), want.type()) << where;
  if (want.is_object()) {
    ASSERT_EQ(got.size(), want.size()) << where;
    for (auto it = want.begin(); it != want.end(); ++it) {
      ASSERT_TRUE(got.contains(it.key())) << where << "/" << it.key();
      expect_close(got.at(it.key()), it.value(), where + "/" + it.key());
    }
  } else if (want.is_array()) {
    ASSERT_EQ(got.size(), want.size()) << where;
    for (std::size_t i = 0; i < want.size(); ++i) expect_close(got[i], want[i], where + "/" + std::to_string(i));
  } else {
    EXPECT_EQ(got, want) << where;
  }
}

const JsonSchema& report_schema() {
  static const JsonSchema s(schemas::report);
  return s;
}

}  // namespace

TEST(Cli, BochnerPoincareMatchesGolden) {
  const RunResult r = run("bochner1", config("bochner1_poincare"));
  EXPECT_EQ(r.exit_code, kExitPass);
  EXPECT_LE(r.report["max_residual"].get<double>(), 1e-5);
  const json golden = json::parse(slurp(kSource / "tests" / "golden" / "bochner1_poincare.json"));
  expect_close(without_timing(r.report), golden, "");
}

TEST(Cli, ReportsFollowTheSchema) {
  for (const auto& [suite, name] : std::vector<std::pair<std::string, std::string>>{
           {"bochner1", "bochner1_poincare"},
           {"bochner2", "bochner2_fs_ball"},
           {"curvature", "curvature_flat"},
           {"schwarz-a", "schwarz_a_flat"},
           {"schwarz-a", "invalid_resolution"},
           {"bochner1", "breakdown_outside_disk"},
           {"integral", "integral_affine"},
           {"kahler", "kahler_hopf"},
           {"gauduchon", "gauduchon_conformal"}}) {
    const RunResult r = run(suite, config(name));
    const auto problem = report_schema().check(r.report.dump());
    EXPECT_FALSE(problem.has_value()) << name << ": " << problem.value_or("");
    for (const char* key : {"suite", "scene", "config", "results", "pass", "max_residual", "timing"})
      EXPECT_TRUE(r.report.contains(key)) << name << " lacks " << key;
  }
}

TEST(Cli, FlatCurvatureIsZero) {
  const RunResult r = run("curvature", config("curvature_flat"));
  EXPECT_EQ(r.exit_code, kExitPass);
  for (const auto& res : r.report["results"]) {
    EXPECT_EQ(res["max_abs_curvature"].get<double>(), 0.0);
    EXPECT_EQ(res["scalar_curvature"].get<double>(), 0.0);
  }
}

TEST(Cli, ExitCodeClasses) {
  const RunResult fail = run("schwarz-a", config("schwarz_a_flat"));
  EXPECT_EQ(fail.exit_code, kExitFail);
  EXPECT_TRUE(fail.report["results"][0]["hypothesis_fail"].get<bool>());

  EXPECT_EQ(run("schwarz-a", config("invalid_resolution")).exit_code, kExitInvalid);
  EXPECT_EQ(run("bochner1", "{not json").exit_code, kExitInvalid);
  EXPECT_EQ(run("bochner1", R"({"scene": {"domain": {"id": "poincare_disk"}}, "typo": 1})").exit_code, kExitInvalid);
  EXPECT_EQ(run("bochner1", R"({"scene": {"domain": {"id": "no_such_metric"}}})").exit_code, kExitInvalid);
  EXPECT_EQ(run("curvature", R"({"scene": {"domain": {"id": "flat_m"}}, "points": [[0, 0]]})").exit_code, kExitInvalid);
  EXPECT_EQ(run("frobnicate", config("curvature_flat")).exit_code, kExitInvalid);
  EXPECT_EQ(run("kahler", config("bochner1_poincare")).exit_code, kExitInvalid);  // suite mismatch

  const RunResult brk = run("bochner1", config("breakdown_outside_disk"));
  EXPECT_EQ(brk.exit_code, kExitBreakdown);
  EXPECT_EQ(brk.report["error"]["kind"], "DomainViolation");

  EXPECT_EQ(run("kahler", config("kahler_hopf")).exit_code, kExitFail);
  EXPECT_EQ(run("gauduchon", config("gauduchon_conformal")).exit_code, kExitFail);
}

TEST(Cli, SuitesNeedTheirInputs) {
  const std::string no_grid = R"({"scene": {"domain": {"id": "poincare_disk"}, "target": {"id": "poincare_disk"},
                                 "map": {"id": "identity"}}, "points": [[0.1]]})";
  EXPECT_EQ(run("schwarz-a", no_grid).exit_code, kExitInvalid);
  EXPECT_EQ(run("integral", no_grid).exit_code, kExitInvalid);
  const std::string no_map = R"({"scene": {"domain": {"id": "poincare_disk"}}, "points": [[0.1]]})";
  EXPECT_EQ(run("bochner2", no_map).exit_code, kExitInvalid);
  const RunResult all = run("all", no_map);
  EXPECT_EQ(all.exit_code, kExitPass);
  int skipped = 0;
  for (const auto& r : all.report["results"]) skipped += r.value("skipped", false) ? 1 : 0;
  EXPECT_EQ(skipped, 7);
}

TEST(Cli, DeterministicUpToTiming) {
  for (const auto& [suite, name] : std::vector<std::pair<std::string, std::string>>{
           {"schwarz-a", "schwarz_a_poincare"}, {"curvature", "curvature_fs"}, {"integral", "integral_affine"}}) {
    const RunResult a = run(suite, config(name));
    const RunResult b = run(suite, config(name));
    EXPECT_EQ(without_timing(a.report).dump(), without_timing(b.report).dump()) << name;
    EXPECT_EQ(a.table.render(), b.table.render()) << name;
  }
}

TEST(Cli, SeedOverrideIsEchoed) {
  const RunResult r = run("curvature", config("curvature_fs"), 11);
  EXPECT_EQ(r.report["config"]["seed"].get<std::uint64_t>(), 11u);
}

TEST(Cli, CsvLayout) {
  const RunResult r = run("bochner2", config("bochner2_fs_ball"));
  std::istringstream lines(r.table.render());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, "re_z1,im_z1,re_z2,im_z2,ell,residual,lhs_trace,rhs_trace,gram_min_eigenvalue");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 8);
  }
  EXPECT_EQ(rows, 4);  // two points, l = 1 and 2
}

TEST(Cli, AtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "chernlab_test_cli";
  std::filesystem::create_directories(dir);
  const auto path = dir / "report.json";
  write_atomically(path, "first");
  write_atomically(path, "second");
  EXPECT_EQ(slurp(path), "second");
  EXPECT_FALSE(std::filesystem::exists(dir / "report.json.tmp"));
  std::filesystem::remove_all(dir);
}

TEST(Cli, RegistryDocument) {
  const std::string doc = Registry::instance().document().dump();
  EXPECT_NE(doc.find("hopf_m"), std::string::npos);
  EXPECT_NE(doc.find("weierstrass_p"), std::string::npos);
}
