#pragma once

#include "iqcrate/factorization.hpp"
#include "iqcrate/multipliers.hpp"

#include <limits>

namespace iqcrate {

/// Pi(w) = Psi(w)^* M Psi(w) with Psi = [(e^{jw} I - A)^{-1} B; I].
struct PsiFactorization {
  Matrix A;  // Schur (nilpotent for FIR)
  Matrix B;
  Matrix M;  // symmetric

  [[nodiscard]] Eigen::Index states() const { return A.rows(); }
  [[nodiscard]] Eigen::Index channels() const { return B.cols(); }
  [[nodiscard]] CMatrix evaluate(double omega) const;
};

/// Two delay chains of length n carrying a = E_1 [y; u] and b = E_2 [y; u];
/// tap m_k (k > 0) couples b with z^{-k} a and m_{-k} couples a with z^{-k} b.
/// For p > 1 every block is taken Kronecker with I_p.
PsiFactorization psi_factorize_fir(const ZamesFalbFir& zf, const SectorBounds& sector, int p = 1);

/// Static multiplier: no states, M = Pi.
PsiFactorization psi_static(const Matrix& pi);

/// LMI(P) = [C D]' M [C D] + [A B]' P [A B] - diag(P, 0) for symmetric P of
/// size `states()`. Negative definiteness for some P is the continuum FDI.
struct KypLmi {
  Matrix A, B, C, D, M;

  [[nodiscard]] Eigen::Index states() const { return A.rows(); }
  [[nodiscard]] Eigen::Index inputs() const { return B.cols(); }
  [[nodiscard]] Eigen::Index dim() const { return A.rows() + B.cols(); }

  [[nodiscard]] Matrix constant_term() const;
  [[nodiscard]] Matrix linear_term(const Matrix& P) const;
  [[nodiscard]] Matrix assemble(const Matrix& P) const { return constant_term() + linear_term(P); }
  /// Psi-side KYP identity: [(zI - A)^{-1} B; I]^* LMI(0) [(zI - A)^{-1} B; I].
  [[nodiscard]] CMatrix transfer_form(double omega) const;
};

/// Blocks for the coprime pair of G_rho under feedback F:
///   A = [[A_Pi, B_Pi [C + D F; F]], [0, (A + B F)/rho]], B = [B_Pi [D; I]; B/rho],
///   C = [[I, 0], [0, [C + D F; F]]], D = [0; [D; I]].
KypLmi build_kyp_lmi(const StateSpace& G, const Matrix& F, Rate rho, const PsiFactorization& fact);
KypLmi build_kyp_lmi(const StateSpace& G, const CoprimePair& pair, const PsiFactorization& fact);

/// lambda_max of LMI(P); <= -epsilon certifies the FDI for every frequency.
double verify_candidate_p(const KypLmi& lmi, const Matrix& P);

struct SubgradientOptions {
  int iterations = 5000;
  double step_scale = 1.0;  // multiplies the calibrated c in c / sqrt(k)
  int epoch = 250;          // iterations between restarts from the best iterate
  double stop_below = -std::numeric_limits<double>::infinity();
};

struct SubgradientResult {
  Matrix P;
  double lambda_max = 0.0;
  double initial_lambda_max = 0.0;
  int iterations = 0;
};

inline constexpr Eigen::Index kSubgradientDimensionGuard = 50;

/// Heuristic descent on P -> lambda_max(LMI(P)) from P = 0 with normalized
/// subgradient steps c / sqrt(k), restarted from the best iterate every
/// epoch; returns the best iterate. Throws DimensionGuard above 50 total
/// dimensions.
SubgradientResult search_p_subgradient(const KypLmi& lmi, const SubgradientOptions& opts = {});

}  // namespace iqcrate
