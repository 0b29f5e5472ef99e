#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "herglotz/dynamics.hpp"
#include "herglotz/model.hpp"

namespace herglotz::cli {

struct SimulateSection {
  std::vector<double> x0;  // Lagrangian-side state, length 2kn + 1
  double t0 = 0.0;
  double t1 = 10.0;
  Method method = Method::RK4;
  double h = 1e-3;
  double rtol = 1e-9;
  double atol = 1e-12;
};

struct CurveSection {
  /// Per-dof expressions in t; empty when the curve is the integrated solution.
  std::vector<std::string> components;
  bool from_solution = false;
  double z0 = 0.0;
  int variations = 10;
  double eps = 1e-4;
  /// Amplitude of the t^k (1-t)^k bump added for the non-critical control.
  double perturb = 0.1;
};

struct ModelFile {
  std::filesystem::path path;
  std::string name;
  int n = 1;
  int k = 1;
  std::string lagrangian;
  ParamValues params;
  std::optional<SimulateSection> simulate;
  std::optional<CurveSection> curve;

  ContactLagrangian model() const;
};

/// Parses TOML text. Throws ModelError carrying the offending line.
ModelFile parse_model(std::string_view text, const std::filesystem::path& origin = "<string>");
/// Throws ModelError (line 0 when the file cannot be read).
ModelFile load_model(const std::filesystem::path& path);

}  // namespace herglotz::cli
