#pragma once

#include <vector>

#include "ncerg/ncnorms.hpp"

namespace ncerg {

/// Complex step function on (0, inf): value values[k] on [t_{k-1}, t_k),
/// t_0 = 0, zero from t_m on. Stored in canonical form (no repeated
/// adjacent values, no trailing zero step).
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> ends, std::vector<cplx> values);

  /// chi_[0, a).
  static StepFunction indicator(double a);

  [[nodiscard]] const std::vector<double>& ends() const { return ends_; }
  [[nodiscard]] const std::vector<cplx>& values() const { return values_; }
  [[nodiscard]] cplx operator()(double t) const;
  [[nodiscard]] StepFunction abs() const;
  /// int_0^inf |f|.
  [[nodiscard]] double l1_norm() const;

 private:
  std::vector<double> ends_;
  std::vector<cplx> values_;
};

/// Non-increasing rearrangement of |f|.
SingularFunction rearrangement(const StepFunction& f);

/// (D_s f)(t) = f(t / s).
StepFunction dilation(const StepFunction& f, double s);

/// Norm of a step function in a rearrangement-invariant norm.
double function_norm(const StepFunction& f, const NormSpec& norm);

/// s = 2^k, k = -16..16.
std::vector<double> default_boyd_grid();
/// a = 2^k, k = -10..10: the chi_[0,a) test family.
std::vector<double> default_test_lengths();

struct BoydRow {
  double s = 0.0;
  /// max over the test family of ||D_s f|| / ||f||.
  double dilation_norm = 0.0;
};

struct BoydEstimate {
  /// log s / log ||D_s|| at the largest s of the grid.
  double p_index = 0.0;
  /// log s / log ||D_s|| at the smallest s of the grid.
  double q_index = 0.0;
  std::vector<BoydRow> rows;
};

/// Estimates ||D_s|| over the grid by maximizing ||D_s f||/||f|| over
/// characteristic functions chi_[0,a), then evaluates the Boyd limits at the
/// extreme grid points. The grid needs points above and below 1.
BoydEstimate boyd_estimate(const NormSpec& norm, const std::vector<double>& s_grid,
                           const std::vector<double>& test_lengths = default_test_lengths());

}  // namespace ncerg
