#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ncerg/algebra.hpp"

namespace ncerg {

/// Raised for (p, q) pairs outside the implemented Lorentz region.
class UnsupportedNorm : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Right-continuous non-increasing step function on (0, inf):
/// value v_k on [t_{k-1}, t_k), zero on [t_m, inf). t_0 = 0.
class SingularFunction {
 public:
  SingularFunction() = default;
  /// `ends` holds t_1 < ... < t_m, `values` holds v_1 >= ... >= v_m > 0.
  SingularFunction(std::vector<double> ends, std::vector<double> values);

  /// Builds the decreasing rearrangement of (value, length) pairs. Values are
  /// taken in absolute value; equal values are merged and zeros dropped.
  static SingularFunction rearrange(std::vector<std::pair<double, double>> value_lengths);

  [[nodiscard]] const std::vector<double>& ends() const { return ends_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] std::size_t steps() const { return values_.size(); }
  /// Breakpoints including t_0 = 0.
  [[nodiscard]] std::vector<double> breakpoints() const;
  /// t_m, the measure of the support.
  [[nodiscard]] double support() const { return ends_.empty() ? 0.0 : ends_.back(); }

  /// mu_t; at a breakpoint the right-hand value is returned.
  [[nodiscard]] double operator()(double t) const;
  /// int_0^s mu_t dt (exact, piecewise linear in s).
  [[nodiscard]] double integral(double s) const;
  /// int_0^inf mu_t^p dt.
  [[nodiscard]] double integral_power(double p) const;
  /// CSV rows "t_k,v_k", k = 1..m.
  [[nodiscard]] std::string to_csv() const;

 private:
  std::vector<double> ends_;
  std::vector<double> values_;
};

/// mu_t(x): singular values of x against the trace weights.
SingularFunction singular_function(const Operator& x);

/// A rearrangement-invariant norm evaluated on singular functions.
struct NormSpec {
  enum class Kind { Uniform, Lp, Lorentz };

  Kind kind = Kind::Lp;
  double p = 2.0;
  double q = 2.0;

  static NormSpec uniform() { return {Kind::Uniform, 0.0, 0.0}; }
  static NormSpec lp(double p);
  static NormSpec lorentz(double p, double q);

  [[nodiscard]] double evaluate(const SingularFunction& mu) const;
  [[nodiscard]] std::string label() const;
  /// True for norms (as opposed to the p < q Lorentz quasi-norms).
  [[nodiscard]] bool is_norm() const;
};

/// ||x||_p = tau(|x|^p)^{1/p}, via the trace of a functional calculus power.
/// p = inf gives the uniform norm.
double lp_norm(const Operator& x, double p);

/// ||x||_p = (int mu_t(x)^p dt)^{1/p}, via the singular function.
double lp_norm_mu(const Operator& x, double p);
double lp_norm(const SingularFunction& mu, double p);

enum class LorentzVariant {
  /// (int (t^{1/p} mu_t)^q dt/t)^{1/q}; a quasi-norm when p < q.
  QuasiNorm,
  /// The equivalent true norm ||.||_{(p,q)}; only available when q <= p,
  /// where it coincides with the quasi-norm.
  EquivalentNorm,
};

/// Closed-form Lorentz evaluation on step data:
/// int_a^b t^{q/p-1} dt = (p/q)(b^{q/p} - a^{q/p}).
double lorentz_norm(const SingularFunction& mu, double p, double q,
                    LorentzVariant variant = LorentzVariant::QuasiNorm);
double lorentz_norm(const Operator& x, double p, double q,
                    LorentzVariant variant = LorentzVariant::QuasiNorm);

/// ||e||_{p,q} = (p/q)^{1/q} tau(e)^{1/p} for a projection of trace tau(e).
double projection_lorentz_norm(double trace_of_projection, double p, double q);

/// Throws UnsupportedNorm when (p, q) is outside the supported region.
void check_lorentz_region(double p, double q);

double submajorization_integral(const Operator& x, double s);
double submajorization_integral(const SingularFunction& mu, double s);
/// True iff int_0^s mu(y) <= int_0^s mu(x) at every breakpoint of both.
bool submajorizes(const SingularFunction& x, const SingularFunction& y, double tol = 1e-12);
bool submajorizes(const Operator& x, const Operator& y, double tol = 1e-12);

struct NeighborhoodResult {
  bool member = false;
  /// mu_eps(x).
  double mu_at_eps = 0.0;
  /// chi_[0,delta](|x|); realizes ||x e||_inf <= delta with tau(e^perp) = measured defect.
  Projection witness;
  double witness_defect = 0.0;
  double witness_norm = 0.0;
};

/// Membership of x in V(eps, delta): some e with tau(e^perp) <= eps and ||x e|| <= delta.
NeighborhoodResult neighborhood_membership(const Operator& x, double eps, double delta);

/// Sufficient test for W(eps, delta) (two-sided ||e x e|| <= delta) using the
/// same spectral witness of |x|; witness_norm reports ||e x e||.
NeighborhoodResult bilateral_neighborhood_membership(const Operator& x, double eps, double delta);

/// d(x, y) = inf{eps > 0 : mu_eps(x - y) <= eps}, a metric for the measure topology.
double measure_distance(const SingularFunction& mu);
double measure_distance(const Operator& x, const Operator& y);

/// ||x|| in the given norm, via mu(x).
double norm(const Operator& x, const NormSpec& spec);

}  // namespace ncerg
