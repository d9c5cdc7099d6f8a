#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ncerg {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Raised when operands live in different algebras or block shapes disagree.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an input fails a certificate (Hermitian, positive, projection, ...).
class CertificateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Global numeric tolerance for idempotency, self-adjointness and positivity
/// certificates. Defaults to 1e-9; the CLI overrides it from NCERG_TOL.
double tolerance();
void set_tolerance(double tol);

struct Block {
  int dim = 1;
  double weight = 1.0;

  friend bool operator==(const Block&, const Block&) = default;
};

/// The ambient tracial algebra: a finite direct sum of full matrix blocks
/// M_{d_1} + ... + M_{d_k} with trace tau(x) = sum_i w_i tr(x_i).
class AlgebraSpec {
 public:
  explicit AlgebraSpec(std::vector<Block> blocks);

  /// A single M_n block.
  static AlgebraSpec matrix(int n, double weight = 1.0);
  /// The commutative algebra of n atoms with the given weights.
  static AlgebraSpec diagonal(std::vector<double> weights);

  [[nodiscard]] const std::vector<Block>& blocks() const { return blocks_; }
  [[nodiscard]] std::size_t num_blocks() const { return blocks_.size(); }
  [[nodiscard]] int dim(std::size_t i) const { return blocks_[i].dim; }
  [[nodiscard]] double weight(std::size_t i) const { return blocks_[i].weight; }

  /// tau(1).
  [[nodiscard]] double total_trace() const;
  /// Sum of block dimensions (size of the underlying Hilbert space).
  [[nodiscard]] int total_dim() const;
  /// Sum of squared block dimensions (length of a vectorized operator).
  [[nodiscard]] int vec_size() const;
  /// Offset of block i inside a vectorized operator.
  [[nodiscard]] int vec_offset(std::size_t i) const;
  [[nodiscard]] bool is_diagonal() const;
  [[nodiscard]] double min_weight() const;

  /// Stable 64-bit FNV-1a hash of the block list.
  [[nodiscard]] std::uint64_t hash() const;
  [[nodiscard]] std::string describe() const;

  friend bool operator==(const AlgebraSpec&, const AlgebraSpec&) = default;

 private:
  std::vector<Block> blocks_;
};

using AlgebraPtr = std::shared_ptr<const AlgebraSpec>;

AlgebraPtr make_algebra(std::vector<Block> blocks);
AlgebraPtr make_algebra(const AlgebraSpec& spec);

/// Element of the algebra, stored as one dense complex matrix per block.
class Operator {
 public:
  Operator(AlgebraPtr algebra, std::vector<Mat> blocks);

  static Operator zero(AlgebraPtr algebra);
  static Operator identity(AlgebraPtr algebra);
  /// Diagonal operator from total_dim() real entries, block after block.
  static Operator diagonal(AlgebraPtr algebra, std::span<const double> entries);
  /// Inverse of vectorize().
  static Operator from_vector(AlgebraPtr algebra, const Vec& v);

  [[nodiscard]] const AlgebraSpec& algebra() const { return *algebra_; }
  [[nodiscard]] const AlgebraPtr& algebra_ptr() const { return algebra_; }
  [[nodiscard]] std::size_t num_blocks() const { return blocks_.size(); }
  [[nodiscard]] const Mat& block(std::size_t i) const { return blocks_[i]; }
  Mat& block(std::size_t i) { return blocks_[i]; }
  [[nodiscard]] const std::vector<Mat>& blocks() const { return blocks_; }

  /// Column-major concatenation of the blocks.
  [[nodiscard]] Vec vectorize() const;

  [[nodiscard]] Operator adjoint() const;
  /// (x + x*)/2 and (x - x*)/(2i); x = real_part() + i imag_part().
  [[nodiscard]] Operator real_part() const;
  [[nodiscard]] Operator imag_part() const;

  /// ||x - x*||_inf <= tol.
  [[nodiscard]] bool is_hermitian(double tol = tolerance()) const;
  /// Hermitian with spectrum >= -tol.
  [[nodiscard]] bool is_positive(double tol = tolerance()) const;
  /// Every block is a diagonal matrix (entries off the diagonal below tol).
  [[nodiscard]] bool is_diagonal(double tol = tolerance()) const;
  /// Smallest eigenvalue of the Hermitian part.
  [[nodiscard]] double min_eigenvalue() const;
  [[nodiscard]] double max_eigenvalue() const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, cplx s) { return lhs *= s; }
  friend Operator operator*(cplx s, Operator rhs) { return rhs *= s; }
  friend Operator operator*(double s, Operator rhs) { return rhs *= cplx(s, 0.0); }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);
  friend Operator operator-(Operator x) { return x *= cplx(-1.0, 0.0); }

 private:
  void require_same_algebra(const Operator& other) const;

  AlgebraPtr algebra_;
  std::vector<Mat> blocks_;
};

/// tau(x) = sum_i w_i tr(x_i).
cplx trace(const Operator& x);

/// Largest singular value.
double uniform_norm(const Operator& x);

/// tau(x* y), the inner product used for tau-adjoints.
cplx tau_inner(const Operator& x, const Operator& y);

struct HermitianParts {
  Operator re_pos;
  Operator re_neg;
  Operator im_pos;
  Operator im_neg;

  /// (re_pos - re_neg) + i (im_pos - im_neg).
  [[nodiscard]] Operator reassemble() const;
};

/// Splits x into four positive parts: the positive and negative parts of
/// Re x and of Im x.
HermitianParts hermitian_decompose(const Operator& x);

/// Idempotent self-adjoint operator. Construction certifies the invariants.
class Projection {
 public:
  explicit Projection(Operator e, double tol = tolerance());

  static Projection identity(AlgebraPtr algebra);
  static Projection zero(AlgebraPtr algebra);
  /// Orthogonal projection onto span of the given orthonormal columns, one
  /// column set per block (empty matrices allowed).
  static Projection from_ranges(AlgebraPtr algebra, const std::vector<Mat>& ranges);

  [[nodiscard]] const Operator& op() const { return e_; }
  [[nodiscard]] const AlgebraSpec& algebra() const { return e_.algebra(); }
  /// e^perp = 1 - e.
  [[nodiscard]] Projection complement() const;
  /// tau(e).
  [[nodiscard]] double trace_value() const;
  /// tau(e^perp).
  [[nodiscard]] double defect() const;
  /// Per-block ranks.
  [[nodiscard]] std::vector<int> ranks() const;

 private:
  struct Unchecked {};
  Projection(Operator e, Unchecked) : e_(std::move(e)) {}

  Operator e_;
};

}  // namespace ncerg
