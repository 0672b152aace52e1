#include "iqcrate/methods.hpp"

#include "iqcrate/linalg.hpp"

namespace iqcrate {

std::string_view to_string(MethodKind kind) {
  switch (kind) {
    case MethodKind::GradientDescent: return "gradient_descent";
    case MethodKind::HeavyBall: return "heavy_ball";
    case MethodKind::Nesterov: return "nesterov";
  }
  return "unknown";
}

void MethodSpec::validate() const {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "step size alpha must be positive");
  if (!(beta >= 0.0 && beta < 1.0)) throw Error(ErrorCode::InvalidArgument, "momentum beta must lie in [0, 1)");
  if (dimension < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be >= 1");
}

LuryeRealization method_to_lurye(const MethodSpec& spec) {
  spec.validate();
  const Matrix I = Matrix::Identity(spec.dimension, spec.dimension);
  const double a = spec.alpha;
  const double b = spec.beta;
  if (spec.kind == MethodKind::GradientDescent) {
    Matrix A(1, 1), B(1, 1), C(1, 1);
    A << 1.0;
    B << -a;
    C << 1.0;
    return {StateSpace(linalg::kron(A, I), linalg::kron(B, I), linalg::kron(C, I), Matrix::Zero(spec.dimension, spec.dimension)),
            "u = grad f(y) enters with B = -alpha I; the nonlinearity is the plain gradient"};
  }
  Matrix A(2, 2), B(2, 1), C(1, 2);
  A << 1.0 + b, -b, 1.0, 0.0;
  B << -a, 0.0;
  if (spec.kind == MethodKind::HeavyBall) C << 1.0, 0.0;
  else C << 1.0 + b, -b;
  return {StateSpace(linalg::kron(A, I), linalg::kron(B, I), linalg::kron(C, I), Matrix::Zero(spec.dimension, spec.dimension)),
          "state (x_k, x_{k-1}); u = grad f(y) enters with B = [-alpha I; 0]"};
}

FunctionOracle quadratic_oracle(const Vector& curvatures, const Vector& optimum) {
  if (curvatures.size() != optimum.size() || curvatures.size() == 0)
    throw Error(ErrorCode::DimensionMismatch, "curvatures and optimum must have the same positive length");
  FunctionOracle f;
  f.gradient = [h = curvatures, xs = optimum](const Vector& x) { return Vector(h.cwiseProduct(x - xs)); };
  f.sector = SectorBounds(curvatures.minCoeff(), curvatures.maxCoeff());
  f.optimum = optimum;
  f.name = "quadratic";
  return f;
}

MethodRun run_method(const MethodSpec& spec, const FunctionOracle& f, const Vector& x0, Eigen::Index steps,
                     Eigen::Index burn_in) {
  const LuryeRealization real = method_to_lurye(spec);
  const int d = spec.dimension;
  if (x0.size() != d) throw Error(ErrorCode::DimensionMismatch, "x0 must have the method dimension");
  const Eigen::Index copies = real.G.states() / d;
  Vector xi(real.G.states());
  for (Eigen::Index c = 0; c < copies; ++c) xi.segment(c * d, d) = x0;

  const NonlinearityDescriptor grad = NonlinearityDescriptor::from_callable(f.gradient, f.sector, "gradient");
  const LuryeTrace tr = simulate_lurye(real.G, grad, Signal(), Signal(), xi, steps);

  MethodRun run;
  run.overflow = tr.overflow;
  const Eigen::Index T = tr.overflow_step ? *tr.overflow_step + 1 : steps + 1;
  run.iterates = tr.states.topRows(d).leftCols(T);
  Matrix err(d, T);
  for (Eigen::Index k = 0; k < T; ++k) {
    err.col(k) = run.iterates.col(k) - f.optimum;
    run.errors.push_back(err.col(k).norm());
  }
  run.fit = empirical_decay_rate(Signal(err), burn_in);
  return run;
}

}  // namespace iqcrate
