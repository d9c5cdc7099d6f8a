#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncerg/algebra.hpp"
#include "ncerg/weights.hpp"

namespace ncerg {

/// One Kraus term of a block-structured completely positive map: it adds
/// a* x_from a to output block `to_block`; `a` is dim(from) x dim(to).
struct KrausTerm {
  std::size_t from_block = 0;
  std::size_t to_block = 0;
  Mat a;
};

enum class PositivityMethod {
  /// Every block-pair Choi matrix is positive semidefinite (completely positive).
  Choi,
  /// Choi test failed, but every element of the positive test set is mapped to a positive operator.
  Sampled,
  Failed,
};

std::string to_string(PositivityMethod m);

/// Outcome of the Dunford-Schwartz checks (positivity, T(1) <= 1, T^dagger(1) <= 1).
struct DsReport {
  bool positive = false;
  PositivityMethod positivity_method = PositivityMethod::Failed;
  /// Smallest eigenvalue over all block-pair Choi matrices.
  double choi_min_eig = 0.0;
  /// ||T(1)||_inf.
  double unit_image_norm = 0.0;
  /// Largest eigenvalue of the tau-adjoint applied to 1.
  double adjoint_unit_max_eig = 0.0;
  bool subunital = false;
  bool trace_nonincreasing = false;

  [[nodiscard]] bool ds_plus() const { return positive && subunital && trace_nonincreasing; }
};

/// Linear map on the algebra, stored as a dense superoperator on vectorized
/// operators (Operator::vectorize layout). Immutable; the verification report
/// is computed at construction.
class Channel {
 public:
  Channel(AlgebraPtr algebra, Mat superop, std::string kind,
          std::optional<std::vector<KrausTerm>> kraus = std::nullopt);

  /// Tabulates a linear map by applying it to the matrix units.
  static Channel from_map(AlgebraPtr algebra, const std::function<Operator(const Operator&)>& map,
                          std::string kind);
  static Channel from_kraus(AlgebraPtr algebra, std::vector<KrausTerm> terms, std::string kind = "kraus");
  static Channel identity(AlgebraPtr algebra);

  [[nodiscard]] const AlgebraSpec& algebra() const { return *algebra_; }
  [[nodiscard]] const AlgebraPtr& algebra_ptr() const { return algebra_; }
  [[nodiscard]] const Mat& superoperator() const { return superop_; }
  [[nodiscard]] const std::optional<std::vector<KrausTerm>>& kraus() const { return kraus_; }
  [[nodiscard]] const std::string& kind() const { return kind_; }
  [[nodiscard]] const DsReport& report() const { return report_; }

  [[nodiscard]] bool verified_positive() const { return report_.positive; }
  [[nodiscard]] bool verified_subunital() const { return report_.subunital; }
  [[nodiscard]] bool verified_trace_nonincreasing() const { return report_.trace_nonincreasing; }
  [[nodiscard]] bool verified_ds_plus() const { return report_.ds_plus(); }

  [[nodiscard]] Operator operator()(const Operator& x) const;
  [[nodiscard]] Vec apply(const Vec& v) const { return superop_ * v; }

  /// Adjoint with respect to <x, y> = tau(x* y).
  [[nodiscard]] Channel tau_adjoint() const;

 private:
  AlgebraPtr algebra_;
  Mat superop_;
  std::string kind_;
  std::optional<std::vector<KrausTerm>> kraus_;
  DsReport report_;
};

/// Recomputes the Dunford-Schwartz checks from the superoperator.
DsReport verify_ds(const Channel& t, double tol = tolerance());

/// Applies Kraus terms directly: sum a* x_from a into the output blocks.
Operator apply_kraus(const AlgebraPtr& algebra, const std::vector<KrausTerm>& terms, const Operator& x);

/// The positive test set used by the sampled positivity check: rank-one
/// projections onto e_a, (e_a +- e_b)/sqrt2, (e_a +- i e_b)/sqrt2 in every block.
std::vector<Operator> positive_test_set(const AlgebraPtr& algebra);

// --- constructors -----------------------------------------------------------
// Each throws CertificateError when its precondition fails.

/// x -> u* x u, one unitary per block.
Channel make_unitary_conjugation(AlgebraPtr algebra, const std::vector<Mat>& u);
/// Keeps x_ab when labels[block][a] == labels[block][b], zeroes it otherwise.
Channel make_pinching(AlgebraPtr algebra, const std::vector<std::vector<int>>& labels);
/// Entrywise multiplication by a positive semidefinite m with diagonal <= 1, per block.
Channel make_schur(AlgebraPtr algebra, const std::vector<Mat>& m);
/// T(x)_i = sum_j P_ij x_j on a diagonal algebra; P >= 0, rows sum to <= 1 and
/// sum_i w_i P_ij <= w_j.
Channel make_substochastic(AlgebraPtr algebra, const Eigen::MatrixXd& p);
/// sum_k c_k T_k with c_k >= 0, sum c_k <= 1.
Channel convex_combine(const std::vector<std::pair<double, Channel>>& parts);
/// outer after inner: x -> outer(inner(x)).
Channel compose(const Channel& outer, const Channel& inner);
/// sum_k c_k T_k with complex coefficients; no positivity claim is made.
/// Used for the non-positive Dunford-Schwartz mode of the mean ergodic experiments.
Channel linear_combination(const std::vector<std::pair<cplx, Channel>>& parts);

// --- averages ---------------------------------------------------------------

/// Produces M_0(x), M_1(x), ... with one channel application per step.
class AverageIterator {
 public:
  AverageIterator(const Channel& t, const Operator& x);
  AverageIterator(const Channel& t, const Operator& x, WeightSequence beta);

  [[nodiscard]] std::size_t index() const { return n_; }
  /// M_n(x) (or M_{beta,n}(x)) for the current n.
  [[nodiscard]] Operator current() const;
  [[nodiscard]] Vec current_vector() const;
  void advance();

 private:
  const Channel* t_;
  AlgebraPtr algebra_;
  std::optional<WeightSequence> beta_;
  Vec power_;
  Vec sum_;
  std::size_t n_ = 0;
};

/// M_n(x) = (1/(n+1)) sum_{k<=n} T^k(x).
Operator ergodic_average(const Channel& t, const Operator& x, std::size_t n);
/// M_0(x), ..., M_N(x).
std::vector<Operator> average_trajectory(const Channel& t, const Operator& x, std::size_t horizon);

/// M_{beta,n}(x) = (1/(n+1)) sum_{k<=n} beta_k T^k(x). Throws when |beta_k| > C.
Operator weighted_average(const Channel& t, const Operator& x, const WeightSequence& beta, std::size_t n);
std::vector<Operator> weighted_trajectory(const Channel& t, const Operator& x, const WeightSequence& beta,
                                          std::size_t horizon);

/// The positive-coefficient split of a weighted average:
/// M_{beta,n} = M^(R) + i M^(I) - C(1+i) M_n with
/// M^(R) = (1/(n+1)) sum (Re beta_k + C) T^k and M^(I) likewise with Im beta_k.
struct WeightedComponents {
  Operator real_shift;
  Operator imag_shift;
  Operator plain;
  double bound = 1.0;

  [[nodiscard]] Operator assemble() const;
};

WeightedComponents weighted_components(const Channel& t, const Operator& x, const WeightSequence& beta,
                                       std::size_t n);

/// M_n as a channel: (1/(n+1)) sum_{k<=n} T^k.
Channel average_channel(const Channel& t, std::size_t n);

enum class ComponentPart { Real, Imag };

/// scale * M^(R)_{beta,n} (or M^(I)) as a channel.
Channel weighted_component_channel(const Channel& t, const WeightSequence& beta, std::size_t n, ComponentPart part,
                                   double scale);

// --- exact Cesaro limits ------------------------------------------------------

/// Raised when the eigenvalue cluster of the superoperator is not semisimple.
class SemisimplicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPeripheralClusterTol = 1e-8;
inline constexpr double kNilpotentTol = 1e-8;

/// Spectral projection of the superoperator onto the eigenspace at lambda,
/// along the sum of the other generalized eigenspaces.
class Eigenprojection {
 public:
  Eigenprojection(AlgebraPtr algebra, Mat matrix, std::size_t rank)
      : algebra_(std::move(algebra)), matrix_(std::move(matrix)), rank_(rank) {}

  [[nodiscard]] Operator operator()(const Operator& x) const;
  [[nodiscard]] const Mat& matrix() const { return matrix_; }
  [[nodiscard]] std::size_t rank() const { return rank_; }

 private:
  AlgebraPtr algebra_;
  Mat matrix_;
  std::size_t rank_;
};

/// Eigenprojection at lambda. Eigenvalues within cluster_tol of lambda form
/// the cluster; throws SemisimplicityError if it carries a nilpotent part.
Eigenprojection eigenprojection(const Channel& t, cplx lambda, double cluster_tol = kPeripheralClusterTol);

/// lim M_n(x) = P_1 x.
Operator fixed_point(const Channel& t, const Operator& x);

/// Superoperator eigenvalues.
Eigen::VectorXcd superoperator_spectrum(const Channel& t);

/// 1 - max |lambda| over eigenvalues not within kPeripheralClusterTol of 1.
double spectral_gap(const Channel& t);

}  // namespace ncerg
