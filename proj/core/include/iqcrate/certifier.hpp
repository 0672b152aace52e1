#pragma once

#include "iqcrate/fdi.hpp"
#include "iqcrate/lti.hpp"
#include "iqcrate/multipliers.hpp"
#include "iqcrate/synthesis.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace iqcrate {

/// Slope-restricted repeated-scalar nonlinearities with slopes in [m, L].
struct SlopeRestricted {
  SectorBounds sector;
};

/// Operators whose weighted versions have gain at most gain(rho); the fixed
/// multiplier diag(g_max^2 I, -I) is admissible wherever gain(rho) <= g_max.
/// The gain function owns its domain and may return +inf outside it.
struct GainBounded {
  std::function<double(double)> gain;
  double g_max = 1.0;
  std::string description;
};

/// User class: a validity predicate over rho plus one fixed static
/// multiplier. Path-connectedness to the center cannot be checked, so
/// certificates carry homotopy_assumed = true.
struct CustomClass {
  std::function<bool(double)> valid;
  Matrix pi;
  std::string description;
};

using DeltaClass = std::variant<SlopeRestricted, GainBounded, CustomClass>;

/// g(rho) = a / sqrt(b rho^2 - c), +inf where the radicand is not positive.
std::function<double(double)> inverse_sqrt_gain(double a, double b, double c);

struct CertifyConfig {
  double rho_min = 0.01;
  double rho_max = 0.0;  // 0 selects 1 - tol
  double tol = 1e-3;
  SynthesisConfig synthesis;  // grid, order, epsilon, refinement, threads
  std::vector<double> center_gains;  // tried after the class defaults
};

/// A fixed constant multiplier (static gain or custom class).
struct StaticMultiplier {
  Matrix pi;
};

using CertifiedMultiplier = std::variant<ZamesFalbFir, StaticMultiplier>;

struct Certificate {
  double rho = 1.0;
  CertifiedMultiplier multiplier;
  double center_gain = 0.0;
  SchurReport schur_check;      // (a) on (A + c B C) / rho
  FdiReport fdi;                // (b) on the full plant
  bool multiplier_valid = true; // (c)
  std::size_t grid_points = 0;
  int kronecker_dim = 1;        // > 1 when the plant is G_scalar (x) I_d
  bool homotopy_assumed = false;
  std::string config_hash;
};

/// Which checks passed at one candidate rate.
struct RateCheck {
  double rho = 0.0;
  bool center_ok = false;
  bool validity_ok = false;
  bool fdi_ok = false;
  double center_gain = 0.0;
  SchurReport schur;
  std::optional<CertifiedMultiplier> multiplier;
  FdiReport fdi;
  std::string diagnosis;

  [[nodiscard]] bool passed() const { return center_ok && validity_ok && fdi_ok; }
};

struct CertifyOutcome {
  bool certified = false;
  std::optional<Certificate> certificate;
  RateCheck best_failure;       // at the smallest failing rate examined (or rho_max)
  bool robustly_stable = false; // the same checks at rho = 1
  int evaluations = 0;
};

/// Evaluates the three certificate conditions at a single rate.
RateCheck check_rate(const StateSpace& G, const DeltaClass& cls, double rho, const CertifyConfig& cfg);

/// Bisection on rho in [rho_min, rho_max] to resolution tol; returns the
/// smallest certified rate found. Requires D = 0.
CertifyOutcome certify_rate(const StateSpace& G, const DeltaClass& cls, const CertifyConfig& cfg = {});

/// Re-runs all three checks of a certificate from scratch.
bool reverify(const StateSpace& G, const DeltaClass& cls, const Certificate& cert, const CertifyConfig& cfg);

struct TwoSidedScan {
  bool certified = false;
  double rho = 1.0;          // smallest certified rate of the run starting at 1
  double fdi_only_rho = 1.0; // same scan ignoring the validity predicate
  int evaluations = 0;
  std::string diagnosis;
};

/// Scans rho descending from 1 in steps of `step` and stops at the first
/// rate where the constant-multiplier FDI or the class validity fails.
TwoSidedScan certify_fixed_pi_two_sided(const StateSpace& G, const Matrix& pi,
                                        const std::function<bool(double)>& delta_valid, double step = 1e-3,
                                        std::size_t grid_points = 1024, double epsilon = kDefaultMarginEpsilon,
                                        unsigned threads = 1);

/// min over the grid of |H(rho e^{jw})| for SISO H.
double min_gain_on_circle(const StateSpace& H, double rho, std::size_t grid_points = 1024);

struct WellPosedness {
  bool well_posed = false;
  std::string explanation;
};

WellPosedness check_well_posedness(const StateSpace& G, const DeltaClass& cls);

/// Detects G = G_scalar (x) I_d (every d x d block a multiple of I_d) and
/// returns the scalar realization and d.
std::optional<std::pair<StateSpace, int>> kronecker_factor(const StateSpace& G);

}  // namespace iqcrate
