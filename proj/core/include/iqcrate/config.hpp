#pragma once

#include "iqcrate/certifier.hpp"
#include "iqcrate/methods.hpp"
#include "iqcrate/nonlinearity.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iqcrate {

inline constexpr int kConfigSchemaVersion = 1;

struct MatrixSystem {
  Matrix A, B, C, D;
};

struct GainSpec {
  std::string type = "constant";  // "constant" or "inverse_sqrt"
  double value = 1.0;             // constant
  double a = 2.0, b = 2.0, c = 1.0;  // a / sqrt(b rho^2 - c)
};

enum class DeltaKind { SlopeRestricted, GainBounded, TwoSidedFixedPi };

std::string_view to_string(DeltaKind kind);

struct DeltaSpec {
  DeltaKind kind = DeltaKind::SlopeRestricted;
  SectorBounds sector;          // slope_restricted
  GainSpec gain;                // gain_bounded
  double g_max = 1.0;
  Matrix pi;                    // two_sided_fixed_pi
  std::optional<MatrixSystem> validity_system;  // defaults to the plant
  double validity_floor = 2.0;
  double scan_step = 1e-3;
};

struct NonlinearitySpec {
  std::string kind = "none";  // quadratic, saturation, deadzone, gain, piecewise_linear, random_piecewise_linear, example8
  std::vector<double> curvatures;
  std::vector<double> optimum;
  double level = 1.0;
  double value = 1.0;
  std::vector<double> breakpoints;
  std::vector<double> slopes;
};

struct SimulationSpec {
  int horizon = 200;
  std::vector<double> x0;  // empty: all ones
  NonlinearitySpec nonlinearity;
  double disturbance_scale = 0.0;
  double disturbance_rate = 0.9;
  int burn_in = 0;
};

struct OutputSpec {
  std::string report;
  std::string fdi_csv;
  std::string trace_csv;
  std::string sdpa;
};

struct ProblemConfig {
  int schema_version = kConfigSchemaVersion;
  std::string name = "problem";
  std::optional<MatrixSystem> system;
  std::optional<MethodSpec> method;
  DeltaSpec delta;
  double rho_min = 0.01;
  double rho_max = 0.999;
  double tolerance = 1e-3;
  int grid = 1024;
  int order = 5;
  double epsilon = kDefaultMarginEpsilon;
  int refine = 8;
  std::vector<double> center_gains;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  SimulationSpec simulation;
  OutputSpec outputs;
};

/// Parses a config (comments allowed). Errors name the source, line and field.
ProblemConfig parse_config(const std::string& text, const std::string& source = "<config>");
ProblemConfig load_config(const std::filesystem::path& path);

/// Every field with its effective value; the exact echo embedded in reports.
nlohmann::json config_to_json(const ProblemConfig& cfg);

/// FNV-1a 64 of the canonical echo without outputs and threads, as 16 hex digits.
std::string config_hash(const ProblemConfig& cfg);

StateSpace build_plant(const ProblemConfig& cfg);
DeltaClass build_delta_class(const ProblemConfig& cfg);
CertifyConfig build_certify_config(const ProblemConfig& cfg);
NonlinearityDescriptor build_nonlinearity(const ProblemConfig& cfg);

}  // namespace iqcrate
