#include "ncerg/algebra.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

namespace ncerg {

namespace {

std::atomic<double> g_tolerance{1e-9};

double spectral_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

Eigen::VectorXd hermitian_eigenvalues(const Mat& m) {
  Mat h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Positive part of a Hermitian block via its eigendecomposition.
Mat positive_part(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const Mat& v = es.eigenvectors();
  return v * lam.cast<cplx>().asDiagonal() * v.adjoint();
}

}  // namespace

double tolerance() { return g_tolerance.load(std::memory_order_relaxed); }

void set_tolerance(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  g_tolerance.store(tol, std::memory_order_relaxed);
}

// ---------------------------------------------------------------------------
// AlgebraSpec

AlgebraSpec::AlgebraSpec(std::vector<Block> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("algebra needs at least one block");
  for (const auto& b : blocks_) {
    if (b.dim < 1) throw std::invalid_argument("block dimension must be >= 1");
    if (!(b.weight > 0.0) || !std::isfinite(b.weight))
      throw std::invalid_argument("block weight must be finite and > 0");
  }
}

AlgebraSpec AlgebraSpec::matrix(int n, double weight) { return AlgebraSpec({{n, weight}}); }

AlgebraSpec AlgebraSpec::diagonal(std::vector<double> weights) {
  std::vector<Block> blocks;
  blocks.reserve(weights.size());
  for (double w : weights) blocks.push_back({1, w});
  return AlgebraSpec(std::move(blocks));
}

double AlgebraSpec::total_trace() const {
  double t = 0.0;
  for (const auto& b : blocks_) t += b.weight * b.dim;
  return t;
}

int AlgebraSpec::total_dim() const {
  int n = 0;
  for (const auto& b : blocks_) n += b.dim;
  return n;
}

int AlgebraSpec::vec_size() const {
  int n = 0;
  for (const auto& b : blocks_) n += b.dim * b.dim;
  return n;
}

int AlgebraSpec::vec_offset(std::size_t i) const {
  int n = 0;
  for (std::size_t k = 0; k < i; ++k) n += blocks_[k].dim * blocks_[k].dim;
  return n;
}

bool AlgebraSpec::is_diagonal() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const Block& b) { return b.dim == 1; });
}

double AlgebraSpec::min_weight() const {
  double w = blocks_.front().weight;
  for (const auto& b : blocks_) w = std::min(w, b.weight);
  return w;
}

std::uint64_t AlgebraSpec::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& b : blocks_) {
    const std::int64_t d = b.dim;
    mix(&d, sizeof d);
    mix(&b.weight, sizeof b.weight);
  }
  return h;
}

std::string AlgebraSpec::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i) os << "+";
    os << "M" << blocks_[i].dim << "@" << blocks_[i].weight;
  }
  return os.str();
}

AlgebraPtr make_algebra(std::vector<Block> blocks) {
  return std::make_shared<const AlgebraSpec>(std::move(blocks));
}

AlgebraPtr make_algebra(const AlgebraSpec& spec) { return std::make_shared<const AlgebraSpec>(spec); }

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(AlgebraPtr algebra, std::vector<Mat> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  if (!algebra_) throw ShapeError("operator without algebra");
  if (blocks_.size() != algebra_->num_blocks())
    throw ShapeError("operator has " + std::to_string(blocks_.size()) + " blocks, algebra has " +
                     std::to_string(algebra_->num_blocks()));
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    const int d = algebra_->dim(i);
    if (blocks_[i].rows() != d || blocks_[i].cols() != d)
      throw ShapeError("block " + std::to_string(i) + " is not " + std::to_string(d) + "x" +
                       std::to_string(d));
  }
}

Operator Operator::zero(AlgebraPtr algebra) {
  std::vector<Mat> blocks;
  for (const auto& b : algebra->blocks()) blocks.push_back(Mat::Zero(b.dim, b.dim));
  return Operator(std::move(algebra), std::move(blocks));
}

Operator Operator::identity(AlgebraPtr algebra) {
  std::vector<Mat> blocks;
  for (const auto& b : algebra->blocks()) blocks.push_back(Mat::Identity(b.dim, b.dim));
  return Operator(std::move(algebra), std::move(blocks));
}

Operator Operator::diagonal(AlgebraPtr algebra, std::span<const double> entries) {
  if (static_cast<int>(entries.size()) != algebra->total_dim())
    throw ShapeError("diagonal needs " + std::to_string(algebra->total_dim()) + " entries");
  std::vector<Mat> blocks;
  std::size_t k = 0;
  for (const auto& b : algebra->blocks()) {
    Mat m = Mat::Zero(b.dim, b.dim);
    for (int i = 0; i < b.dim; ++i) m(i, i) = entries[k++];
    blocks.push_back(std::move(m));
  }
  return Operator(std::move(algebra), std::move(blocks));
}

Operator Operator::from_vector(AlgebraPtr algebra, const Vec& v) {
  if (v.size() != algebra->vec_size()) throw ShapeError("vector length does not match algebra");
  std::vector<Mat> blocks;
  Eigen::Index off = 0;
  for (const auto& b : algebra->blocks()) {
    Mat m(b.dim, b.dim);
    std::copy(v.data() + off, v.data() + off + b.dim * b.dim, m.data());
    off += b.dim * b.dim;
    blocks.push_back(std::move(m));
  }
  return Operator(std::move(algebra), std::move(blocks));
}

Vec Operator::vectorize() const {
  Vec v(algebra_->vec_size());
  Eigen::Index off = 0;
  for (const auto& m : blocks_) {
    std::copy(m.data(), m.data() + m.size(), v.data() + off);
    off += m.size();
  }
  return v;
}

Operator Operator::adjoint() const {
  std::vector<Mat> out;
  out.reserve(blocks_.size());
  for (const auto& m : blocks_) out.push_back(m.adjoint());
  return Operator(algebra_, std::move(out));
}

Operator Operator::real_part() const {
  std::vector<Mat> out;
  for (const auto& m : blocks_) out.push_back(0.5 * (m + m.adjoint()));
  return Operator(algebra_, std::move(out));
}

Operator Operator::imag_part() const {
  std::vector<Mat> out;
  for (const auto& m : blocks_) out.push_back(cplx(0.0, -0.5) * (m - m.adjoint()));
  return Operator(algebra_, std::move(out));
}

bool Operator::is_hermitian(double tol) const {
  for (const auto& m : blocks_)
    if (spectral_norm(m - m.adjoint()) > tol) return false;
  return true;
}

bool Operator::is_positive(double tol) const {
  return is_hermitian(tol) && min_eigenvalue() >= -tol;
}

bool Operator::is_diagonal(double tol) const {
  for (const auto& m : blocks_)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (i != j && std::abs(m(i, j)) > tol) return false;
  return true;
}

double Operator::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& m : blocks_) lo = std::min(lo, hermitian_eigenvalues(m).minCoeff());
  return lo;
}

double Operator::max_eigenvalue() const {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& m : blocks_) hi = std::max(hi, hermitian_eigenvalues(m).maxCoeff());
  return hi;
}

void Operator::require_same_algebra(const Operator& other) const {
  if (algebra_ != other.algebra_ && !(*algebra_ == *other.algebra_))
    throw ShapeError("operators belong to different algebras (" + algebra_->describe() + " vs " +
                     other.algebra_->describe() + ")");
}

Operator& Operator::operator+=(const Operator& rhs) {
  require_same_algebra(rhs);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += rhs.blocks_[i];
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  require_same_algebra(rhs);
  for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] -= rhs.blocks_[i];
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  for (auto& m : blocks_) m *= s;
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  lhs.require_same_algebra(rhs);
  std::vector<Mat> out;
  out.reserve(lhs.blocks_.size());
  for (std::size_t i = 0; i < lhs.blocks_.size(); ++i) out.push_back(lhs.blocks_[i] * rhs.blocks_[i]);
  return Operator(lhs.algebra_, std::move(out));
}

cplx trace(const Operator& x) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < x.num_blocks(); ++i) t += x.algebra().weight(i) * x.block(i).trace();
  return t;
}

double uniform_norm(const Operator& x) {
  double n = 0.0;
  for (const auto& m : x.blocks()) n = std::max(n, spectral_norm(m));
  return n;
}

cplx tau_inner(const Operator& x, const Operator& y) {
  if (!(x.algebra() == y.algebra())) throw ShapeError("tau_inner across algebras");
  cplx t = 0.0;
  for (std::size_t i = 0; i < x.num_blocks(); ++i)
    t += x.algebra().weight(i) * (x.block(i).adjoint() * y.block(i)).trace();
  return t;
}

Operator HermitianParts::reassemble() const {
  return (re_pos - re_neg) + cplx(0.0, 1.0) * (im_pos - im_neg);
}

HermitianParts hermitian_decompose(const Operator& x) {
  const Operator re = x.real_part();
  const Operator im = x.imag_part();
  auto split = [](const Operator& h) {
    std::vector<Mat> pos, neg;
    for (const auto& m : h.blocks()) {
      Mat hm = 0.5 * (m + m.adjoint());
      pos.push_back(positive_part(hm));
      neg.push_back(positive_part(-hm));
    }
    return std::pair{Operator(h.algebra_ptr(), std::move(pos)), Operator(h.algebra_ptr(), std::move(neg))};
  };
  auto [rp, rn] = split(re);
  auto [ip, in] = split(im);
  return {std::move(rp), std::move(rn), std::move(ip), std::move(in)};
}

// ---------------------------------------------------------------------------
// Projection

Projection::Projection(Operator e, double tol) : e_(std::move(e)) {
  for (const auto& m : e_.blocks()) {
    if (spectral_norm(m - m.adjoint()) > tol) throw CertificateError("projection is not self-adjoint");
    if (spectral_norm(m * m - m) > tol) throw CertificateError("projection is not idempotent");
    const Eigen::VectorXd lam = hermitian_eigenvalues(m);
    for (double l : lam)
      if (std::min(std::abs(l), std::abs(l - 1.0)) > tol)
        throw CertificateError("projection eigenvalue away from {0,1}");
  }
}

Projection Projection::identity(AlgebraPtr algebra) {
  return Projection(Operator::identity(std::move(algebra)), Unchecked{});
}

Projection Projection::zero(AlgebraPtr algebra) {
  return Projection(Operator::zero(std::move(algebra)), Unchecked{});
}

Projection Projection::from_ranges(AlgebraPtr algebra, const std::vector<Mat>& ranges) {
  if (ranges.size() != algebra->num_blocks()) throw ShapeError("one range per block required");
  std::vector<Mat> blocks;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const int d = algebra->dim(i);
    if (ranges[i].cols() == 0) {
      blocks.push_back(Mat::Zero(d, d));
      continue;
    }
    if (ranges[i].rows() != d) throw ShapeError("range basis has wrong row count");
    blocks.push_back(ranges[i] * ranges[i].adjoint());
  }
  return Projection(Operator(std::move(algebra), std::move(blocks)));
}

Projection Projection::complement() const {
  return Projection(Operator::identity(e_.algebra_ptr()) - e_, Unchecked{});
}

// Certified projections have integer block traces, so tau(e) is computed from
// the ranks to keep defect comparisons exact.
double Projection::trace_value() const {
  const auto r = ranks();
  double t = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) t += algebra().weight(i) * r[i];
  return t;
}

double Projection::defect() const {
  const auto r = ranks();
  double t = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) t += algebra().weight(i) * (algebra().dim(i) - r[i]);
  return t;
}

std::vector<int> Projection::ranks() const {
  std::vector<int> r;
  for (const auto& m : e_.blocks()) r.push_back(static_cast<int>(std::lround(m.trace().real())));
  return r;
}

}  // namespace ncerg
