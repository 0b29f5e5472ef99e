#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "herglotz_cli/model_file.hpp"

namespace herglotz::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kModelError = 2,
  kVerifyFailed = 3,
  kSingularSide = 4,
};

struct Options {
  std::optional<std::filesystem::path> out;
  std::uint64_t seed = 0xC0FFEE;
  int samples = 20;
  std::optional<double> tol;
  std::string mode = "holonomy";
  std::string side = "lagrangian";
  std::optional<std::string> method;
  std::optional<double> step;
  bool json = false;
};

int cmd_derive(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream& err);
int cmd_unified(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream& err);
int cmd_verify(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream& err);
int cmd_action(const ModelFile& mf, const Options& opts, std::ostream& out, std::ostream& err);
/// Runs derive, unified and verify on the bundled models in `dir` and
/// compares against `dir/expected/<stem>.json`.
int cmd_reproduce(const std::filesystem::path& dir, const Options& opts, std::ostream& out, std::ostream& err);

/// Default location of the bundled models.
std::filesystem::path default_models_dir();

/// Parses the command line and dispatches. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace herglotz::cli
