#include "ncerg/random.hpp"

#include <algorithm>
#include <cmath>

namespace ncerg {

Mat random_gaussian(int rows, int cols, CounterRng& rng) {
  Mat g(rows, cols);
  const double s = std::sqrt(0.5);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = cplx(s * rng.normal(), s * rng.normal());
  return g;
}

Mat random_unitary(int d, CounterRng& rng) {
  const Mat g = random_gaussian(d, d, rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

Operator random_operator(const AlgebraPtr& algebra, CounterRng& rng) {
  std::vector<Mat> blocks;
  for (const auto& b : algebra->blocks()) blocks.push_back(random_gaussian(b.dim, b.dim, rng));
  return Operator(algebra, std::move(blocks));
}

Operator random_hermitian(const AlgebraPtr& algebra, CounterRng& rng) {
  return random_operator(algebra, rng).real_part();
}

Operator random_positive(const AlgebraPtr& algebra, CounterRng& rng) {
  std::vector<Mat> blocks;
  for (const auto& b : algebra->blocks()) {
    const Mat g = random_gaussian(b.dim, b.dim, rng);
    Mat p = g.adjoint() * g / static_cast<double>(b.dim);
    blocks.push_back(0.5 * (p + p.adjoint()));
  }
  return Operator(algebra, std::move(blocks));
}

Operator random_diagonal_positive(const AlgebraPtr& algebra, CounterRng& rng) {
  std::vector<double> d(static_cast<std::size_t>(algebra->total_dim()));
  for (double& v : d) v = rng.uniform();
  return Operator::diagonal(algebra, d);
}

Channel random_kraus_channel(const AlgebraPtr& algebra, CounterRng& rng, int terms_per_pair, double margin) {
  std::vector<KrausTerm> terms;
  for (std::size_t j = 0; j < algebra->num_blocks(); ++j)
    for (std::size_t i = 0; i < algebra->num_blocks(); ++i) {
      const int k = terms_per_pair > 0 ? terms_per_pair : std::max(algebra->dim(j), algebra->dim(i));
      for (int t = 0; t < k; ++t) terms.push_back({j, i, random_gaussian(algebra->dim(j), algebra->dim(i), rng)});
    }
  const Channel raw = Channel::from_kraus(algebra, terms, "kraus");
  const double scale = std::max(raw.report().unit_image_norm, raw.report().adjoint_unit_max_eig);
  const double c = std::sqrt((1.0 - margin) / scale);
  for (auto& t : terms) t.a *= c;
  return Channel::from_kraus(algebra, std::move(terms), "kraus");
}

Channel random_substochastic(const AlgebraPtr& algebra, CounterRng& rng, double margin) {
  if (!algebra->is_diagonal()) throw CertificateError("random_substochastic needs a diagonal algebra");
  const auto n = static_cast<Eigen::Index>(algebra->num_blocks());
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) p(i, j) = rng.uniform();
  double worst = p.rowwise().sum().maxCoeff();
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) col += algebra->weight(static_cast<std::size_t>(i)) * p(i, j);
    worst = std::max(worst, col / algebra->weight(static_cast<std::size_t>(j)));
  }
  p *= (1.0 - margin) / worst;
  return make_substochastic(algebra, p);
}

Channel random_mixed_unitary(const AlgebraPtr& algebra, CounterRng& rng, int terms) {
  std::vector<std::pair<double, Channel>> parts;
  std::vector<double> w(static_cast<std::size_t>(terms));
  double total = 0.0;
  for (double& v : w) total += (v = rng.uniform(0.1, 1.0));
  for (int k = 0; k < terms; ++k) {
    std::vector<Mat> u;
    for (const auto& b : algebra->blocks()) u.push_back(random_unitary(b.dim, rng));
    parts.emplace_back(w[static_cast<std::size_t>(k)] / total, make_unitary_conjugation(algebra, u));
  }
  return convex_combine(parts);
}

}  // namespace ncerg
