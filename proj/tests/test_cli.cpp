#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "herglotz/errors.hpp"
#include "herglotz/lagrangian.hpp"
#include "herglotz/parse.hpp"
#include "herglotz_cli/commands.hpp"
#include "herglotz_cli/model_file.hpp"

using namespace herglotz;
using namespace herglotz::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "herglotz");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string bundled(const std::string& stem) { return (default_models_dir() / (stem + ".toml")).string(); }

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("herglotz_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name, const std::string& text = {}) const {
    const auto p = path_ / name;
    if (!text.empty()) std::ofstream(p) << text;
    return p;
  }

 private:
  fs::path path_;
};

int error_line(const std::string& text) {
  try {
    parse_model(text);
  } catch (const ModelError& e) {
    return e.line();
  }
  return -1;
}

const char* kMinimal = R"([model]
n = 1
k = 1
lagrangian = "q0_1^2/2 - q0_0^2/2"
)";

}  // namespace

TEST(ModelFile, ParsesBundledModels) {
  for (const char* stem : {"pais_uhlenbeck", "electron", "singular_az", "damped_oscillator"}) {
    const auto mf = load_model(bundled(stem));
    EXPECT_EQ(mf.name, stem);
    EXPECT_NO_THROW(mf.model());
  }
  const auto pu = load_model(bundled("pais_uhlenbeck"));
  EXPECT_EQ(pu.k, 2);
  ASSERT_TRUE(pu.simulate.has_value());
  EXPECT_EQ(pu.simulate->x0.size(), 5u);
}

TEST(ModelFile, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line(std::string(kMinimal) + "colour = 3\n"), 5);
  EXPECT_EQ(error_line("[model]\nn = 1\nk = 0\nlagrangian = \"q0_1\"\n"), 3);
  EXPECT_EQ(error_line("[model]\nn = 1\nk = 1\nlagrangian = \"q0_1 +\"\n"), 4);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[simulate]\nx0 = [1.0, 0.0]\n"), 6);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[simulate]\nx0 = [1.0, 0.0, 0.0]\nmethod = \"euler\"\n"), 7);
  EXPECT_EQ(error_line("[model\n"), 1);
  EXPECT_EQ(error_line("[model]\nn = 1\nk = 1\nlagrangian = \"q0_1^2 * c\"\n[params]\nc = \"x\"\n"), 6);
}

TEST(ModelFile, CurveSection) {
  const auto mf = parse_model(std::string(kMinimal) + "[curve]\nq = [\"sin(t)\"]\nz0 = 0.5\n");
  ASSERT_TRUE(mf.curve.has_value());
  EXPECT_FALSE(mf.curve->from_solution);
  EXPECT_EQ(mf.curve->z0, 0.5);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[curve]\nq = [\"q0_0\"]\n"), 6);
  EXPECT_EQ(error_line(std::string(kMinimal) + "[curve]\nsource = \"solution\"\n"), 5);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, kUsage);
  EXPECT_EQ(run_cli({"frobnicate"}).code, kUsage);
  EXPECT_EQ(run_cli({"derive"}).code, kUsage);
  EXPECT_EQ(run_cli({"derive", "/nonexistent/model.toml"}).code, kModelError);
  EXPECT_EQ(run_cli({"derive", bundled("pais_uhlenbeck")}).code, kOk);
  EXPECT_EQ(run_cli({"verify", bundled("damped_oscillator")}).code, kOk);
  EXPECT_EQ(run_cli({"verify", bundled("singular_az")}).code, kSingularSide);
  EXPECT_EQ(run_cli({"simulate", bundled("singular_az")}).code, kSingularSide);
}

TEST(Cli, ActionCriticality) {
  TempDir tmp;
  // an arbitrary curve is reported, not judged
  const auto f = tmp.file("f.toml", std::string(kMinimal) + "[curve]\nq = [\"t^2\"]\n");
  const auto rf = run_cli({"action", f.string(), "--json"});
  EXPECT_EQ(rf.code, kOk);
  EXPECT_FALSE(nlohmann::json::parse(rf.out)["critical"].get<bool>());
  const auto g = tmp.file("g.toml", std::string(kMinimal) + "[curve]\nq = [\"sin(t)\"]\n");
  EXPECT_TRUE(nlohmann::json::parse(run_cli({"action", g.string(), "--json"}).out)["critical"].get<bool>());
  // with no perturbation the control is the solution itself and cannot be told apart
  const auto h = tmp.file("h.toml", std::string(kMinimal) +
                                        "[simulate]\nx0 = [1.0, 0.0, 0.0]\nt1 = 1.0\n"
                                        "[curve]\nsource = \"solution\"\nperturb = 0.0\n");
  EXPECT_EQ(run_cli({"action", h.string()}).code, kVerifyFailed);
}

TEST(Cli, DeriveJsonRoundTrips) {
  const auto r = run_cli({"derive", bundled("pais_uhlenbeck"), "--json"});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  const auto m = load_model(bundled("pais_uhlenbeck")).model();
  const auto ctx = ParseContext::permissive();
  EXPECT_TRUE(equivalent(parse(j["herglotz_equations"][0].get<std::string>(), ctx), herglotz_equations(m)[0]));
  EXPECT_TRUE(equivalent(parse(j["energy"].get<std::string>(), ctx), energy(m)));
  EXPECT_EQ(j["regularity"]["verdict"], "Regular");
  EXPECT_EQ(j["momenta"].size(), 2u);
}

TEST(Cli, DeriveWritesFile) {
  TempDir tmp;
  const auto out = tmp.file("d.json");
  ASSERT_EQ(run_cli({"derive", bundled("damped_oscillator"), "--out", out.string()}).code, kOk);
  std::ifstream in(out);
  EXPECT_EQ(nlohmann::json::parse(in)["model"]["name"], "damped_oscillator");
}

TEST(Cli, HamiltonianCsvSatisfiesHamiltonEquations) {
  // H = p^2/2 + w^2 q^2/2 + gam z, checked by differencing the CSV columns
  const auto r = run_cli({"simulate", bundled("damped_oscillator"), "--side", "hamiltonian", "--method", "rk4",
                      "--step", "1e-3"});
  ASSERT_EQ(r.code, kOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,q0_0,p0_0,z");
  std::vector<std::array<double, 4>> rows;
  while (std::getline(in, line)) {
    std::array<double, 4> row{};
    std::istringstream ls(line);
    for (auto& v : row) {
      std::string cell;
      std::getline(ls, cell, ',');
      v = std::stod(cell);
    }
    rows.push_back(row);
  }
  ASSERT_GT(rows.size(), 100u);
  const double w = 1.0, gam = 0.1;
  double worst = 0.0;
  for (std::size_t j = 2; j + 2 < rows.size(); j += 97) {
    const double h = rows[j + 1][0] - rows[j][0];
    auto d = [&](int c) {
      return (rows[j - 2][c] - 8 * rows[j - 1][c] + 8 * rows[j + 1][c] - rows[j + 2][c]) / (12 * h);
    };
    const double q = rows[j][1], p = rows[j][2], z = rows[j][3];
    worst = std::max({worst, std::abs(d(1) - p), std::abs(d(2) + w * w * q + gam * p),
                      std::abs(d(3) - (p * p / 2 - w * w * q * q / 2 - gam * z))});
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Cli, UnifiedSingularReport) {
  const auto h = run_cli({"unified", bundled("singular_az"), "--json"});
  ASSERT_EQ(h.code, kOk) << h.err;
  const auto jh = nlohmann::json::parse(h.out);
  EXPECT_EQ(jh["status"], "Determined");
  EXPECT_EQ(jh["mode"], "holonomy");
  std::size_t count = 0;
  for (const auto& level : jh["levels"]) count += level["constraints"].size();
  EXPECT_EQ(count, 4u);

  const auto a = nlohmann::json::parse(run_cli({"unified", bundled("singular_az"), "--json", "--mode", "appendix-a"}).out);
  EXPECT_EQ(a["status"], "UnderDetermined");
  EXPECT_EQ(a["free_unknowns"], nlohmann::json::array({"F0_3"}));
}

TEST(Cli, ActionOnPaisUhlenbeck) {
  TempDir tmp;
  const auto csv = tmp.file("action.csv");
  const auto r = run_cli({"action", bundled("pais_uhlenbeck"), "--json", "--out", csv.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["critical"].get<bool>());
  EXPECT_TRUE(j["control_detected"].get<bool>());
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,sigma,Z");
}

TEST(Cli, ReproducePasses) {
  const auto r = run_cli({"reproduce"});
  EXPECT_EQ(r.code, kOk) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
}
