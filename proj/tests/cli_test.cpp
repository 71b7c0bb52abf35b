#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "fracherm/cli.hpp"
#include "fracherm/hermite.hpp"

using namespace fracherm;
using nlohmann::json;

namespace {

class TempConfig {
 public:
  explicit TempConfig(const std::string& body) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fracherm_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".json");
    std::ofstream(path_) << body;
  }
  ~TempConfig() { std::filesystem::remove(path_); }
  std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

struct Run {
  int code;
  std::string out;
  std::string err;
  std::vector<json> records() const {
    std::vector<json> r;
    std::istringstream in(out);
    for (std::string line; std::getline(in, line);) r.push_back(json::parse(line));
    return r;
  }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Cli, ShiftedLaplacianConstant) {
  TempConfig c(R"j({"operator": {"kind": "shifted_laplacian", "R": 2}, "sigma": 0.5, "function": "1"})j");
  const auto r = run({"frac", "--config", c.path()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = r.records();
  ASSERT_EQ(rec.size(), 1u);
  EXPECT_EQ(rec[0]["definition"], "bochner");
  EXPECT_EQ(rec[0]["status"], "converged");
  EXPECT_NEAR(rec[0]["value"].get<double>(), 1.41421356, 1e-8);
}

TEST(Cli, EigenfunctionAcrossDefinitions) {
  TempConfig c(R"j({"operator": {"kind": "hermite"}, "sigma": 0.5, "points": [[0.7]], "function": "h3",
                   "frac": {"extension": true, "spectral": true}})j");
  const auto r = run({"frac", "--config", c.path()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = r.records();
  ASSERT_EQ(rec.size(), 3u);
  const double want = std::sqrt(7.0) * hermite_function_1d(3, 0.7);
  for (const auto& x : rec) EXPECT_NEAR(x["value"].get<double>(), want, 1e-6) << x["definition"];
  EXPECT_EQ(rec[0]["definition"], "bochner");
  EXPECT_EQ(rec[1]["definition"], "extension");
  EXPECT_EQ(rec[2]["definition"], "spectral");
}

TEST(Cli, DivergenceExitsTwo) {
  TempConfig c(R"j({"operator": {"kind": "hermite"}, "sigma": 0.5, "points": [[0.3]],
                   "function": {"corpus": "abs_alpha_cutoff", "alpha": 1.0, "center": [0.3]}})j");
  const auto r = run({"frac", "--config", c.path()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.records().at(0)["status"], "diverged");
}

TEST(Cli, ConfigErrorsReportLineAndColumn) {
  TempConfig bad_json("{\"operator\": {\"kind\": \"hermite\"},\n  \"sigma\": 0.5,, \"function\": \"psi\"}");
  const auto a = run({"frac", "--config", bad_json.path()});
  EXPECT_EQ(a.code, 64);
  EXPECT_NE(a.err.find(bad_json.path() + ":2:16:"), std::string::npos) << a.err;

  TempConfig bad_sigma("{\"operator\": {\"kind\": \"hermite\"},\n \"sigma\": 1.5, \"function\": \"psi\"}");
  const auto b = run({"frac", "--config", bad_sigma.path()});
  EXPECT_EQ(b.code, 64);
  EXPECT_NE(b.err.find(":2:2:"), std::string::npos) << b.err;

  TempConfig bad_expr("{\"sigma\": 0.5,\n \"function\": \"exp(-x1^2) * (1 + \"}");
  const auto e = run({"frac", "--config", bad_expr.path()});
  EXPECT_EQ(e.code, 64);
  EXPECT_NE(e.err.find(":2:33:"), std::string::npos) << e.err;

  TempConfig unknown(R"j({"sigma": 0.5, "function": "psi", "colour": 1})j");
  EXPECT_EQ(run({"frac", "--config", unknown.path()}).code, 64);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 64);
  EXPECT_EQ(run({"frac"}).code, 64);
  EXPECT_EQ(run({"frac", "--config", "/nonexistent/config.json"}).code, 64);
  TempConfig c(R"j({"sigma": 0.5, "function": "psi"})j");
  EXPECT_EQ(run({"frac", "--config", c.path(), "--format", "xml"}).code, 64);
  TempConfig limited(R"j({"sigma": 0.5, "function": "psi", "outputs": ["smoothness"]})j");
  EXPECT_EQ(run({"frac", "--config", limited.path()}).code, 64);
}

TEST(Cli, DeterministicAcrossThreadCounts) {
  TempConfig c(R"j({"operator": {"kind": "hermite"}, "sigma": 0.25,
                   "points": [[0.0], [0.4], [-1.1], [2.0]], "function": "exp(-x1^2) * (1 + x1)"})j");
  ::setenv("FRACHERM_THREADS", "1", 1);
  const auto a = run({"frac", "--config", c.path()});
  ::setenv("FRACHERM_THREADS", "3", 1);
  const auto b = run({"frac", "--config", c.path()});
  ::unsetenv("FRACHERM_THREADS");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const auto rec = a.records();
  ASSERT_EQ(rec.size(), 4u);
  EXPECT_EQ(rec[2]["x0"][0].get<double>(), -1.1);
  const std::string hash = rec[0]["provenance"]["config_hash"];
  EXPECT_EQ(hash.rfind("fnv1a64:", 0), 0u);
  EXPECT_EQ(rec[0]["provenance"]["version"], cli::kVersion);
}

TEST(Cli, CsvAndOutFile) {
  TempConfig c(R"j({"sigma": 0.5, "function": "psi", "points": [[0.0], [0.5]]})j");
  const auto out = std::filesystem::temp_directory_path() / ("fracherm_cli_out_" + std::to_string(::getpid()));
  const auto r = run({"converge", "--config", c.path(), "--format", "csv", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_NE(header.find("/approximant"), std::string::npos);
  EXPECT_NE(header.find("/t"), std::string::npos);
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 2 * 8);  // seven trace rows and a summary per point
  std::filesystem::remove(out);
}

TEST(Cli, ConvergeTraceIsMonotone) {
  TempConfig c(R"j({"sigma": 0.5, "function": "psi", "points": [[0.8]]})j");
  const auto r = run({"converge", "--config", c.path()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = r.records();
  for (size_t j = 1; j + 1 < rec.size(); ++j) {
    EXPECT_GT(rec[j]["approximant"].get<double>(), rec[j - 1]["approximant"].get<double>());
  }
  EXPECT_NEAR(rec.back()["value"].get<double>(), std::exp(-0.32), 1e-8);
}

TEST(Cli, SmoothnessAndBoundsReports) {
  TempConfig s(R"j({"operator": {"kind": "hermite", "d": 3}, "sigma": 0.75, "alpha": 1.5,
                   "points": [[0, 0, 0]], "function": {"corpus": "gx"}, "quadrature": {"angular_points": 16}})j");
  const auto a = run({"smoothness", "--config", s.path()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.records()[0]["in_D_alpha"], "true");
  EXPECT_EQ(a.records()[0]["in_D_alpha_strict"], "false");

  TempConfig b(R"j({"sigma": 0.5, "function": "psi", "bounds": {"checks": ["elementary"], "samples": 10000}})j");
  const auto r = run({"bounds", "--config", b.path(), "--seed", "42"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.records()[0]["pass"].get<bool>());
  EXPECT_EQ(r.records()[0]["provenance"]["seed"], 42);
}

TEST(Cli, AdmissibilityVerdicts) {
  TempConfig c(R"j({"sigma": 0.5, "points": [[0.0]], "function": "abs(x1) * exp(-x1^2)"})j");
  const auto r = run({"admissibility", "--config", c.path()});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_EQ(r.records()[0]["verdict"], "not_admissible");
}

TEST(Cli, HashIsStableUnderKeyOrder) {
  const auto a = cli::RunConfig::parse(R"j({"sigma": 0.5, "function": "psi"})j");
  const auto b = cli::RunConfig::parse(R"j({"function": "psi",   "sigma": 0.5})j");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(cli::fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(cli::fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}
