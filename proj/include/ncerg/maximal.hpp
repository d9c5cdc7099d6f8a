#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ncerg/algebra.hpp"
#include "ncerg/dynamics.hpp"
#include "ncerg/weights.hpp"

namespace ncerg {

/// Default finite horizon for the sup over n.
inline constexpr std::size_t kDefaultHorizon = 512;

enum class Compression {
  /// ||e A e||_inf.
  TwoSided,
  /// ||A e||_inf.
  OneSided,
};

std::string to_string(Compression c);

/// A witness projection together with its measured and budgeted constants.
struct WitnessReport {
  explicit WitnessReport(Projection e) : projection(std::move(e)) {}

  /// The witness (or, when !found, the best infeasible candidate).
  Projection projection;
  /// False means NotFound: the search failed, which does not refute existence.
  bool found = false;
  double trace_defect = 0.0;
  double trace_budget = 0.0;
  /// sup_{n <= horizon} of the relevant compressed norm.
  double sup_compression = 0.0;
  double sup_budget = 0.0;
  std::size_t horizon = 0;
  Compression compression = Compression::TwoSided;
  std::string method;
  bool checker_passed = false;
  /// lp_witness only: sup ||e M_n(x_eps) e|| + eps^{1-p} sup ||e M_n(x^p) e||.
  std::optional<double> cutoff_bound;
  /// one_sided_witness only: max_n (||M_n(x) e||^2 - ||e M_n(x^2) e||), <= 0 up to rounding.
  std::optional<double> kadison_gap;

  [[nodiscard]] double trace_ratio() const { return trace_budget > 0 ? trace_defect / trace_budget : 0.0; }
  [[nodiscard]] double sup_ratio() const { return sup_budget > 0 ? sup_compression / sup_budget : 0.0; }
};

// --- independent checker ------------------------------------------------------

struct CheckResult {
  double trace_defect = 0.0;
  double sup_compression = 0.0;
  bool is_projection = false;
  bool passed = false;
};

/// Re-measures a witness from scratch: powers T^k(x) by a fresh loop over the
/// superoperator, every M_{beta,n}(x) by direct summation, the defect from the
/// trace of e. Shares no state with the constructors.
CheckResult check_witness(const Channel& t, const Operator& x, const WeightSequence* beta, const Operator& e,
                          Compression compression, double trace_budget, double sup_budget, std::size_t horizon,
                          double tol = tolerance());

/// Runs check_witness against the report's own budgets.
CheckResult recheck(const WitnessReport& report, const Channel& t, const Operator& x,
                    const WeightSequence* beta = nullptr, double tol = tolerance());

// --- Kadison ------------------------------------------------------------------

struct KadisonReport {
  /// min eigenvalue of S(x^2) - S(x)^2.
  double min_eig = 0.0;
  bool passed = false;
};

inline constexpr double kKadisonTol = 1e-10;

/// S(x)^2 <= S(x^2) for positive subunital S and Hermitian x.
KadisonReport kadison_check(const Channel& s, const Operator& x);

// --- L_1 witnesses --------------------------------------------------------------

enum class YeadonStrategy {
  /// Hopf indicator in the joint eigenbasis, when all M_n(x) commute.
  Hopf,
  /// Nested level sets chi_[0,t](B) of B = (1/(N+1)) sum M_n(x).
  LevelSet,
  /// Repeatedly strips the top eigenvector of the worst e M_n(x) e.
  GreedyPeel,
};

std::string to_string(YeadonStrategy s);
std::vector<YeadonStrategy> default_strategies();

/// Classical maximal-ergodic witness on a diagonal algebra:
/// e = indicator of {max_{n<=N} M_n(x) <= eps}. Budgets ||x||_1/eps and eps.
WitnessReport hopf_witness_commutative(const Channel& t, const Operator& x, double eps,
                                       std::size_t horizon = kDefaultHorizon);

/// Searches for e with tau(e^perp) <= ||x||_1/eps and sup ||e M_n(x) e|| <= eps.
/// Every listed strategy is tried; the feasible candidate with the smallest
/// defect wins (earliest strategy on ties).
WitnessReport yeadon_witness_search(const Channel& t, const Operator& x, double eps,
                                    std::size_t horizon = kDefaultHorizon,
                                    const std::vector<YeadonStrategy>& strategies = default_strategies());

struct PeelResult {
  Projection projection;
  double defect = 0.0;
  /// sup_n lambda_max(e A_n e) at the final e.
  double sup = 0.0;
  /// sup <= level was reached within the budget.
  bool feasible = false;
};

/// Greedy peeling on positive operators A_n: strips the top eigenvector of the
/// worst e A_n e while sup > level and the next removal fits in the budget.
PeelResult greedy_peel(const AlgebraPtr& algebra, const std::vector<Operator>& positives, double level,
                       double budget);

// --- L_p witnesses --------------------------------------------------------------

/// For positive x: e from the L_1 search on x^p at level eps^p; budgets
/// (||x||_p/eps)^p and 2 eps.
WitnessReport lp_witness(const Channel& t, const Operator& x, double p, double eps,
                         std::size_t horizon = kDefaultHorizon,
                         const std::vector<YeadonStrategy>& strategies = default_strategies());

/// Two-sided witness for the weighted averages: e = meet of lp_witness over the
/// positive parts of x. Budgets 4(||x||_p/eps)^p and 48 C eps; 2(.)^p and
/// 24 C eps for Hermitian x; (.)^p and 2 eps for positive x with beta = 1.
WitnessReport weighted_witness(const Channel& t, const Operator& x, double p, const WeightSequence& beta,
                               double eps, std::size_t horizon = kDefaultHorizon,
                               const std::vector<YeadonStrategy>& strategies = default_strategies());

struct OneSidedOptions {
  /// Exercise the spectral truncation x_m = int_{-m}^{m} lambda de_lambda
  /// (m = ||x||_inf, so x_m = x) and verify the compressed Kadison estimate
  /// on it. Without it the auxiliary projection is 1.
  bool truncation_path = false;
  std::vector<YeadonStrategy> strategies = default_strategies();
};

/// One-sided witness for p >= 2. Hermitian x with beta = 1: budgets
/// 2(||x||_p/eps)^p and sqrt(2) eps. Otherwise x = x_1 + i x_2 with budgets
/// 6(.)^p and 4 sqrt(C)(2 + sqrt(C)) eps. Throws for p < 2.
WitnessReport one_sided_witness(const Channel& t, const Operator& x, double p, const WeightSequence& beta,
                                double eps, std::size_t horizon = kDefaultHorizon,
                                const OneSidedOptions& options = {});

}  // namespace ncerg
