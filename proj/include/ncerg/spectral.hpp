#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "ncerg/algebra.hpp"

namespace ncerg {

/// Eigenvalues closer than this are merged into one eigenprojection.
inline constexpr double kEigenClusterTol = 1e-8;
/// Eigenvalue threshold used to read off the kernel in projection_meet.
inline constexpr double kMeetKernelTol = 1e-8;

/// Raw per-block eigendata of a Hermitian operator (eigenvalues ascending).
struct BlockEigen {
  std::vector<Eigen::VectorXd> values;
  std::vector<Mat> vectors;
};

/// Per-block eigensolve of the Hermitian part of x. No clustering.
BlockEigen block_eigen(const Operator& x);

/// x = sum_k eigenvalues[k] * projections[k], eigenvalues ascending and
/// clustered at kEigenClusterTol.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<Projection> projections;

  [[nodiscard]] Operator reconstruct() const;
};

SpectralDecomposition eigh(const Operator& x, double tol = tolerance());

/// f(x) for Hermitian x.
Operator apply_function(const Operator& x, const std::function<double(double)>& f,
                        double tol = tolerance());

/// |x| = (x* x)^{1/2}, computed from the singular value decomposition of each block.
Operator abs_value(const Operator& x);

/// x^p for positive x (negative rounding noise in the spectrum is clipped to 0).
Operator positive_power(const Operator& x, double p, double tol = tolerance());

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool lo_closed = true;
  bool hi_closed = true;

  static Interval all() { return {}; }
  static Interval closed(double a, double b) { return {a, b, true, true}; }
  /// (a, +inf)
  static Interval above(double a) { return {a, std::numeric_limits<double>::infinity(), false, true}; }
  /// [0, b], the convention used for the mu-related projections.
  static Interval up_to(double b) { return {0.0, b, true, true}; }

  [[nodiscard]] bool contains(double v) const;
};

/// Spectral projection chi_I(x) for Hermitian x.
Projection spectral_projection(const Operator& x, const Interval& interval, double tol = tolerance());

struct CutoffResult {
  /// x_eps = int_0^eps lambda de_lambda.
  Operator x_eps;
  /// Largest eigenvalue of x - x_eps - eps^{1-p} x^p; the bound holds when <= tol.
  double residual_max_eig = 0.0;
  bool certified = false;
};

/// Splits positive x at level eps and certifies x <= x_eps + eps^{1-p} x^p.
CutoffResult spectral_cutoff(const Operator& x, double eps, double p, double tol = tolerance());

/// Projection onto range(e) intersected with range(f).
Projection projection_meet(const Projection& e, const Projection& f);
Projection projection_meet(const std::vector<Projection>& projections);
Projection projection_complement(const Projection& e);

}  // namespace ncerg
