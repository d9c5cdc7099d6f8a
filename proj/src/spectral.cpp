#include "ncerg/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace ncerg {

namespace {

void require_hermitian(const Operator& x, double tol, const char* what) {
  if (!x.is_hermitian(tol)) throw CertificateError(std::string(what) + ": operator is not Hermitian");
}

struct Eigenpair {
  double value;
  std::size_t block;
  Eigen::Index column;
};

}  // namespace

BlockEigen block_eigen(const Operator& x) {
  BlockEigen out;
  for (const auto& m : x.blocks()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()));
    out.values.push_back(es.eigenvalues());
    out.vectors.push_back(es.eigenvectors());
  }
  return out;
}

Operator SpectralDecomposition::reconstruct() const {
  if (projections.empty()) throw std::logic_error("empty spectral decomposition");
  Operator sum = Operator::zero(projections.front().op().algebra_ptr());
  for (std::size_t k = 0; k < projections.size(); ++k) sum += eigenvalues[k] * projections[k].op();
  return sum;
}

SpectralDecomposition eigh(const Operator& x, double tol) {
  require_hermitian(x, tol, "eigh");
  const BlockEigen be = block_eigen(x);

  std::vector<Eigenpair> pairs;
  for (std::size_t b = 0; b < be.values.size(); ++b)
    for (Eigen::Index c = 0; c < be.values[b].size(); ++c) pairs.push_back({be.values[b](c), b, c});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Eigenpair& a, const Eigenpair& b) { return a.value < b.value; });

  SpectralDecomposition sd;
  const auto& alg = x.algebra_ptr();
  std::size_t start = 0;
  while (start < pairs.size()) {
    std::size_t end = start + 1;
    while (end < pairs.size() && pairs[end].value - pairs[end - 1].value < kEigenClusterTol) ++end;

    std::vector<Mat> blocks;
    for (const auto& b : alg->blocks()) blocks.push_back(Mat::Zero(b.dim, b.dim));
    double mean = 0.0;
    for (std::size_t k = start; k < end; ++k) {
      const auto& v = be.vectors[pairs[k].block].col(pairs[k].column);
      blocks[pairs[k].block] += v * v.adjoint();
      mean += pairs[k].value;
    }
    sd.eigenvalues.push_back(mean / static_cast<double>(end - start));
    sd.projections.emplace_back(Operator(alg, std::move(blocks)));
    start = end;
  }
  return sd;
}

Operator apply_function(const Operator& x, const std::function<double(double)>& f, double tol) {
  require_hermitian(x, tol, "apply_function");
  const BlockEigen be = block_eigen(x);
  std::vector<Mat> out;
  for (std::size_t b = 0; b < be.values.size(); ++b) {
    Eigen::VectorXcd fl(be.values[b].size());
    for (Eigen::Index i = 0; i < fl.size(); ++i) fl(i) = f(be.values[b](i));
    const Mat& v = be.vectors[b];
    out.push_back(v * fl.asDiagonal() * v.adjoint());
  }
  return Operator(x.algebra_ptr(), std::move(out));
}

Operator abs_value(const Operator& x) {
  std::vector<Mat> out;
  for (const auto& m : x.blocks()) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const Mat& v = svd.matrixV();
    out.push_back(v * svd.singularValues().cast<cplx>().asDiagonal() * v.adjoint());
  }
  return Operator(x.algebra_ptr(), std::move(out));
}

Operator positive_power(const Operator& x, double p, double tol) {
  if (!x.is_positive(tol)) throw CertificateError("positive_power: operator is not positive");
  return apply_function(x, [p](double l) { return l <= 0.0 ? 0.0 : std::pow(l, p); }, tol);
}

bool Interval::contains(double v) const {
  const bool lo_ok = lo_closed ? v >= lo : v > lo;
  const bool hi_ok = hi_closed ? v <= hi : v < hi;
  return lo_ok && hi_ok;
}

Projection spectral_projection(const Operator& x, const Interval& interval, double tol) {
  const SpectralDecomposition sd = eigh(x, tol);
  Operator sum = Operator::zero(x.algebra_ptr());
  for (std::size_t k = 0; k < sd.eigenvalues.size(); ++k)
    if (interval.contains(sd.eigenvalues[k])) sum += sd.projections[k].op();
  return Projection(std::move(sum));
}

CutoffResult spectral_cutoff(const Operator& x, double eps, double p, double tol) {
  if (!(eps > 0.0)) throw std::invalid_argument("spectral_cutoff: eps must be > 0");
  if (!(p >= 1.0)) throw std::invalid_argument("spectral_cutoff: p must be >= 1");
  if (!x.is_positive(tol)) throw CertificateError("spectral_cutoff: operator is not positive");

  Operator x_eps = apply_function(x, [eps](double l) { return (l >= 0.0 && l <= eps) ? l : 0.0; }, tol);
  const Operator xp = positive_power(x, p, tol);
  const Operator residual = x - x_eps - std::pow(eps, 1.0 - p) * xp;
  CutoffResult r{std::move(x_eps), residual.max_eigenvalue(), false};
  r.certified = r.residual_max_eig <= tol && uniform_norm(r.x_eps) <= eps + tol;
  return r;
}

Projection projection_meet(const Projection& e, const Projection& f) {
  if (!(e.algebra() == f.algebra())) throw ShapeError("projection_meet across algebras");
  const auto& alg = e.op().algebra_ptr();
  std::vector<Mat> ranges;
  for (std::size_t b = 0; b < alg->num_blocks(); ++b) {
    const int d = alg->dim(b);
    const Mat k = 2.0 * Mat::Identity(d, d) - e.op().block(b) - f.op().block(b);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (k + k.adjoint()));
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < d; ++i)
      if (es.eigenvalues()(i) <= kMeetKernelTol) keep.push_back(i);
    Mat basis(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j) basis.col(static_cast<Eigen::Index>(j)) = es.eigenvectors().col(keep[j]);
    ranges.push_back(std::move(basis));
  }
  return Projection::from_ranges(alg, ranges);
}

Projection projection_meet(const std::vector<Projection>& projections) {
  if (projections.empty()) throw std::invalid_argument("projection_meet of an empty family");
  Projection acc = projections.front();
  for (std::size_t i = 1; i < projections.size(); ++i) acc = projection_meet(acc, projections[i]);
  return acc;
}

Projection projection_complement(const Projection& e) { return e.complement(); }

}  // namespace ncerg
