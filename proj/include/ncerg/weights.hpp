#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ncerg/algebra.hpp"

namespace ncerg {

/// P(k) = sum_j z_j lambda_j^k with unimodular frequencies.
class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  TrigPolynomial(std::vector<cplx> coefficients, std::vector<cplx> frequencies);

  static TrigPolynomial constant(cplx c);
  /// Exact discrete-Fourier representation of a period-m sequence:
  /// lambda_j = exp(2 pi i j/m), z_j = (1/m) sum_k b_k lambda_j^{-k}.
  static TrigPolynomial from_period(const std::vector<cplx>& period);

  [[nodiscard]] cplx operator()(std::size_t k) const;
  [[nodiscard]] std::size_t terms() const { return coefficients_.size(); }
  [[nodiscard]] const std::vector<cplx>& coefficients() const { return coefficients_; }
  [[nodiscard]] const std::vector<cplx>& frequencies() const { return frequencies_; }
  /// sum_j |z_j|, a bound for |P(k)|.
  [[nodiscard]] double coefficient_bound() const;

 private:
  std::vector<cplx> coefficients_;
  std::vector<cplx> frequencies_;
};

/// Bounded weight sequence beta_k, |beta_k| <= C for every k.
class WeightSequence {
 public:
  enum class Kind { Constant, Periodic, Trig, TrigPlusDecay };

  static WeightSequence constant(cplx c);
  static WeightSequence periodic(std::vector<cplx> period);
  static WeightSequence trig(TrigPolynomial p);
  /// beta_k = P(k) + amplitude / (k + 1).
  static WeightSequence trig_plus_decay(TrigPolynomial p, cplx amplitude);

  /// Replaces the certified bound by a declared C; throws if C is smaller
  /// than the certified bound.
  [[nodiscard]] WeightSequence with_bound(double c) const;

  [[nodiscard]] cplx operator()(std::size_t k) const;
  [[nodiscard]] double bound() const { return bound_; }
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool is_unit() const;
  /// Trig polynomial with sum |beta_k - P(k)| / (n+1) -> 0, when the generator has one.
  [[nodiscard]] std::optional<TrigPolynomial> trig_part() const;
  [[nodiscard]] std::string describe() const;

  [[nodiscard]] const std::vector<cplx>& period() const { return period_; }
  [[nodiscard]] const TrigPolynomial& polynomial() const { return poly_; }
  [[nodiscard]] cplx amplitude() const { return amplitude_; }

 private:
  WeightSequence(Kind kind, double bound) : kind_(kind), bound_(bound) {}

  Kind kind_;
  double bound_;
  cplx constant_{1.0, 0.0};
  std::vector<cplx> period_;
  TrigPolynomial poly_;
  cplx amplitude_{0.0, 0.0};
};

struct DeviationProfile {
  /// a_n = (1/(n+1)) sum_{k<=n} |beta_k - P(k)|, n = 0..horizon.
  std::vector<double> averages;
  /// sup_{n >= horizon/2} a_n.
  double limsup_estimate = 0.0;
  std::size_t horizon = 0;
};

DeviationProfile besicovitch_deviation(const WeightSequence& beta, const TrigPolynomial& p,
                                       std::size_t horizon);

struct BesicovitchEntry {
  double eps = 0.0;
  TrigPolynomial witness;
  double estimate = 0.0;
  bool passed = false;
};

/// Finite-horizon certificate of the bounded Besicovitch property: for each
/// eps of the grid, a trig-polynomial witness and its limsup estimate at the horizon.
struct BesicovitchCertificate {
  std::vector<BesicovitchEntry> entries;
  std::size_t horizon = 0;

  [[nodiscard]] bool passed() const;
};

std::vector<double> default_besicovitch_eps_grid();

BesicovitchCertificate certify_besicovitch(const WeightSequence& beta,
                                           const std::vector<double>& eps_grid = default_besicovitch_eps_grid(),
                                           std::size_t horizon = 4096);

}  // namespace ncerg
