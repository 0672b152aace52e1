#include "iqcrate/fdi.hpp"

#include "iqcrate/linalg.hpp"
#include "iqcrate/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace iqcrate {

PiProvider zames_falb_provider(ZamesFalbFir zf, SectorBounds sector, int p) {
  return [zf = std::move(zf), sector, p](double omega) { return assemble_pi(zf, sector, omega, p); };
}

PiProvider constant_provider(Matrix pi) {
  if (pi.rows() != pi.cols()) throw Error(ErrorCode::DimensionMismatch, "multiplier must be square");
  return [pi = pi.cast<Complex>().eval()](double) { return pi; };
}

std::vector<double> FdiReport::grid() const {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.omega);
  return out;
}

CMatrix fdi_matrix(const StateSpace& stacked_pair, const PiProvider& pi, double omega) {
  const CMatrix nm = freq_response(stacked_pair, omega);
  const CMatrix P = pi(omega);
  if (P.rows() != nm.rows() || P.cols() != nm.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "multiplier is " + std::to_string(P.rows()) + "x" +
                                                  std::to_string(P.cols()) + ", expected " +
                                                  std::to_string(nm.rows()));
  }
  CMatrix phi = nm.adjoint() * P * nm;
  return 0.5 * (phi + phi.adjoint());
}

namespace {

std::vector<FdiPoint> evaluate(const StateSpace& stacked, const PiProvider& pi, const std::vector<double>& omegas,
                               unsigned threads) {
  std::vector<FdiPoint> pts(omegas.size());
  parallel_for(omegas.size(), threads, [&](std::size_t i) {
    pts[i] = FdiPoint{omegas[i], linalg::lambda_max_hermitian(fdi_matrix(stacked, pi, omegas[i]))};
  });
  return pts;
}

void reduce(FdiReport& report) {
  report.margin = -std::numeric_limits<double>::infinity();
  for (const auto& p : report.points) {
    // Ties resolve to the smallest omega regardless of evaluation order.
    if (p.lambda_max > report.margin) {
      report.margin = p.lambda_max;
      report.argmax = p.omega;
    }
  }
}

}  // namespace

FdiReport fdi_margin(const CoprimePair& pair, const PiProvider& pi, const FrequencyGrid& grid, unsigned threads) {
  FdiReport report;
  report.points = evaluate(pair.stacked(), pi, grid.points(), threads);
  reduce(report);
  return report;
}

FdiReport refine_near_minimum(const FdiReport& report, const CoprimePair& pair, const PiProvider& pi, int factor,
                              unsigned threads) {
  if (factor <= 1 || report.points.size() < 2) return report;
  const auto& pts = report.points;
  const std::size_t count = pts.size();
  const std::size_t worst = std::max<std::size_t>(1, (count * 5 + 99) / 100);

  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(worst), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (pts[a].lambda_max != pts[b].lambda_max) return pts[a].lambda_max > pts[b].lambda_max;
                      return a < b;
                    });

  std::vector<double> extra;
  for (std::size_t r = 0; r < worst; ++r) {
    const std::size_t i = order[r];
    auto subdivide = [&](double lo, double hi) {
      for (int s = 1; s < factor; ++s) extra.push_back(lo + (hi - lo) * s / factor);
    };
    if (i > 0) subdivide(pts[i - 1].omega, pts[i].omega);
    if (i + 1 < count) subdivide(pts[i].omega, pts[i + 1].omega);
  }
  std::sort(extra.begin(), extra.end());
  extra.erase(std::unique(extra.begin(), extra.end()), extra.end());

  FdiReport out;
  out.points = pts;
  auto fresh = evaluate(pair.stacked(), pi, extra, threads);
  out.points.insert(out.points.end(), fresh.begin(), fresh.end());
  std::sort(out.points.begin(), out.points.end(), [](const FdiPoint& a, const FdiPoint& b) { return a.omega < b.omega; });
  out.points.erase(std::unique(out.points.begin(), out.points.end(),
                               [](const FdiPoint& a, const FdiPoint& b) { return a.omega == b.omega; }),
                   out.points.end());
  reduce(out);
  return out;
}

void write_fdi_csv(const FdiReport& report, std::ostream& os) {
  os << "omega,lambda_max\n";
  os << std::setprecision(17);
  for (const auto& p : report.points) os << p.omega << ',' << p.lambda_max << '\n';
}

}  // namespace iqcrate
