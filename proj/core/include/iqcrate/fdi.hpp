#pragma once

#include "iqcrate/factorization.hpp"
#include "iqcrate/lti.hpp"
#include "iqcrate/multipliers.hpp"

#include <functional>
#include <iosfwd>
#include <vector>

namespace iqcrate {

/// Hermitian multiplier value Pi(e^{jw}) of size 2p x 2p.
using PiProvider = std::function<CMatrix(double omega)>;

/// Zames-Falb FIR multiplier in E-transformed form.
PiProvider zames_falb_provider(ZamesFalbFir zf, SectorBounds sector, int p = 1);
/// Frequency-independent multiplier.
PiProvider constant_provider(Matrix pi);

inline constexpr double kDefaultMarginEpsilon = 1e-7;

struct FdiPoint {
  double omega = 0.0;
  double lambda_max = 0.0;
};

struct FdiReport {
  double margin = 0.0;  // max over the grid of lambda_max(Phi(w))
  double argmax = 0.0;
  std::vector<FdiPoint> points;  // sorted by omega

  /// Grid certificate: margin <= -epsilon.
  [[nodiscard]] bool certified(double epsilon = kDefaultMarginEpsilon) const { return margin <= -epsilon; }
  [[nodiscard]] std::vector<double> grid() const;
};

/// Phi(w) = [N; M]^* Pi(w) [N; M] at one frequency.
CMatrix fdi_matrix(const StateSpace& stacked_pair, const PiProvider& pi, double omega);

/// Evaluates lambda_max(Phi) on every grid point; the max reduction is
/// independent of the number of worker threads.
FdiReport fdi_margin(const CoprimePair& pair, const PiProvider& pi, const FrequencyGrid& grid,
                     unsigned threads = 1);

/// Adds a `factor`-times finer local grid around the worst 5% of points.
/// The old points are kept, so the new margin is never smaller.
FdiReport refine_near_minimum(const FdiReport& report, const CoprimePair& pair, const PiProvider& pi,
                              int factor, unsigned threads = 1);

/// CSV with header "omega,lambda_max".
void write_fdi_csv(const FdiReport& report, std::ostream& os);

}  // namespace iqcrate
