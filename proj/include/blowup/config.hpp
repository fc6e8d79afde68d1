#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blowup/curve.hpp"
#include "blowup/io.hpp"
#include "blowup/liouville.hpp"
#include "blowup/physical.hpp"
#include "blowup/profile.hpp"
#include "blowup/selfsim.hpp"
#include "blowup/stationary.hpp"

namespace blowup {

/// Physical initial data. type: zero | constant | gaussian | extended.
struct InitialSpec {
  std::string type = "constant";
  Cplx u0{1.4142135623730951, 0.0};
  Cplx u1{1.4142135623730951, 0.0};
  GaussianSpec gaussian;
  ExtendedSolution extended;
  Taper taper;
  /// Global rotation e^{i phase} applied last.
  double phase = 0.0;
};

/// Cylinder initial data. type: kappa | perturbed_kappa | scaled_kappa0 | connecting | zero.
struct CylinderSpec {
  std::string type = "kappa";
  double d = 0.0;
  double theta = 0.0;
  /// perturbed_kappa: kappa(d)(1 + eps (1 - y^2)).
  double eps = 0.05;
  /// scaled_kappa0: scale * kappa0.
  double scale = 1.0;
  Branch branch = Branch::plus;
  double s0 = 0.0;
  /// Tune the unstable-mode coefficient before evolving.
  bool prepare = false;
  std::string label;
};

struct RunConfig {
  PowerParam p{3.0};
  std::optional<Grid1D> grid;
  InitialSpec initial;
  EvolveOptions evolve;
  EstimateOptions estimate;
  std::vector<double> scan;
  double capture_cap = 1e4;
  double min_cone_cells = 32.0;
  std::size_t m = 256;
  double ds = 0.0;
  double s_end = 10.0;
  std::size_t stride = 16;
  CylinderSpec cylinder;
  FitOptions fit;
  double liouville_s_end = 20.0;
  std::vector<CylinderSpec> battery;
  std::vector<double> vanishing_times;
  VanishingOptions vanishing;
  std::string output_directory = "out";
  bool write_svg = true;
  ExecPolicy policy = ExecPolicy::parallel;
  /// The document after overrides; its hash tags every output file.
  io::Json document;
};

/// Validates and converts a JSON document. Errors are config errors naming the field.
RunConfig parse_config(const io::Json& doc);

io::Json load_json_file(const std::string& path);

/// Applies "a.b.c=value"; the value is parsed as JSON and taken as a string otherwise.
void apply_override(io::Json& doc, const std::string& assignment);

/// Requires the grid section (physical commands).
const Grid1D& require_grid(const RunConfig& cfg);

WaveState build_initial(const RunConfig& cfg);
SelfSimState build_cylinder(const CylinderSpec& spec, std::size_t m, const PowerParam& p, ExecPolicy policy);
std::string describe(const CylinderSpec& spec);

/// Trapping battery used when the config has none.
std::vector<CylinderSpec> default_battery();

}  // namespace blowup
