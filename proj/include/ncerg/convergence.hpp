#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ncerg/algebra.hpp"
#include "ncerg/dynamics.hpp"
#include "ncerg/maximal.hpp"
#include "ncerg/ncnorms.hpp"
#include "ncerg/weights.hpp"

namespace ncerg {

inline constexpr std::size_t kDefaultConvergenceHorizon = 4096;

/// A distance between operators: a symmetric norm of the difference, or the
/// measure-topology distance d(x, y) = inf{eps : mu_eps(x - y) <= eps}.
struct Metric {
  bool measure = false;
  NormSpec norm = NormSpec::uniform();

  static Metric measure_metric() { return {true, NormSpec::uniform()}; }
  static Metric of(NormSpec spec) { return {false, spec}; }

  [[nodiscard]] double distance(const Operator& a, const Operator& b) const;
  [[nodiscard]] std::string label() const;
};

/// inf, L_1, L_2, L_3, L_{2,1}, L_{3,2} and the measure metric.
std::vector<Metric> default_metrics();

/// 1, 2, 4, ... up to horizon, with horizon itself appended when it is not a power of two.
std::vector<std::size_t> dyadic_schedule(std::size_t horizon);

enum class DsMode {
  /// The channel must be a verified positive Dunford-Schwartz map.
  Positive,
  /// No positivity requirement; the caller vouches for the contraction property.
  Contraction,
};

struct TrajectoryReport {
  Operator limit;
  std::vector<std::size_t> schedule;
  std::vector<Metric> metrics;
  /// residuals[i][j] = metrics[j].distance(limit, M_{schedule[i]}(x)).
  std::vector<std::vector<double>> residuals;
  DsMode mode = DsMode::Positive;
};

/// Residuals of the plain averages against the exact limit fixed_point(T, x).
TrajectoryReport trajectory(const Channel& t, const Operator& x, std::size_t horizon,
                            const std::vector<Metric>& metrics = default_metrics(), DsMode mode = DsMode::Positive);

/// Tail-uniform convergence witness.
struct TailWitness {
  explicit TailWitness(Projection e) : projection(std::move(e)) {}

  Projection projection;
  double trace_defect = 0.0;
  double eps = 0.0;
  Compression compression = Compression::OneSided;
  std::size_t horizon = 0;
  /// profile[i] = sup_{max(points[i], horizon/2) <= m <= horizon} ||(limit - M_m(x)) e|| (or e(.)e).
  std::vector<std::size_t> points;
  std::vector<double> profile;

  [[nodiscard]] double final_value() const { return profile.empty() ? 0.0 : profile.back(); }
  [[nodiscard]] bool non_increasing() const;
};

/// One-sided witness for almost uniform convergence to fixed_point(T, x):
/// greedy peeling of the deviations limit - M_m(x), m in [N/2, N], within tau(e^perp) <= eps.
TailWitness au_witness(const Channel& t, const Operator& x, double eps,
                       std::size_t horizon = kDefaultConvergenceHorizon);
/// Two-sided version (bilateral almost uniform).
TailWitness bau_witness(const Channel& t, const Operator& x, double eps,
                        std::size_t horizon = kDefaultConvergenceHorizon);

/// Tail witness against a given limit, for plain (beta == nullptr) or weighted averages.
TailWitness tail_witness(const Channel& t, const Operator& x, const WeightSequence* beta, const Operator& limit,
                         double eps, std::size_t horizon, Compression compression);

/// ||e||_{p,q} / tau(e) for one value of tau(e).
struct LorentzRatioRow {
  double trace = 0.0;
  double ratio = 0.0;
};

struct MeanErgodicReport {
  NormSpec norm;
  DsMode mode = DsMode::Positive;
  std::vector<std::size_t> schedule;
  std::vector<double> residuals;
  std::vector<double> uniform_residuals;
  /// residual at N <= residual at N/2 (+ tol).
  bool decays = false;
  /// residual_E <= 6 C residual_inf ||1||_E at every schedule point.
  bool consistent = false;
  /// L_{p,q} only: (p/q)^{1/q} tau(e)^{1/p - 1} over tau(e) in {1, 10, 100, 1000}.
  std::vector<LorentzRatioRow> lorentz_ratio;
  /// L_{p,q} only: the ratio tends to 0 as tau(e) -> inf, i.e. p > 1.
  std::optional<bool> ratio_vanishes;
};

/// Norm convergence of the plain averages to fixed_point(T, x) in L_p or L_{p,q}.
/// Throws UnsupportedNorm for the uniform norm.
MeanErgodicReport mean_ergodic_check(const Channel& t, const Operator& x, const NormSpec& norm,
                                     std::size_t horizon = kDefaultConvergenceHorizon,
                                     DsMode mode = DsMode::Positive);

struct BesicovitchReport {
  Operator limit;
  /// True when the limit is sum_j z_j P_{conj(lambda_j)}(x) from the trig part of beta;
  /// false when it is estimated by M_{beta,N}(x).
  bool limit_exact = false;
  std::vector<std::size_t> schedule;
  std::vector<Metric> metrics;
  /// cauchy[i][j] = distance(M_{beta,n}, M_{beta,2n}) for n = schedule[i]; only the
  /// leading schedule entries with 2n also on the schedule have a row.
  std::vector<std::vector<double>> cauchy;
  /// residuals[i][j] = distance(limit, M_{beta,schedule[i]}).
  std::vector<std::vector<double>> residuals;
  TailWitness witness;
};

BesicovitchReport besicovitch_experiment(const Channel& t, const Operator& x, const WeightSequence& beta,
                                         std::size_t horizon = kDefaultConvergenceHorizon,
                                         const std::vector<Metric>& metrics = default_metrics(), double eps = 0.05);

/// sum_j z_j P_{conj(lambda_j)}(x) for the trig polynomial p.
Operator weighted_limit(const Channel& t, const Operator& x, const TrigPolynomial& p);

}  // namespace ncerg
