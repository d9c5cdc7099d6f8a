#include "ncerg/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ncerg/rng.hpp"

namespace ncerg {

namespace {

// Matrix unit E_ab of block b as an operator.
Operator matrix_unit(const AlgebraPtr& alg, std::size_t block, int a, int b) {
  Operator e = Operator::zero(alg);
  e.block(block)(a, b) = 1.0;
  return e;
}

double lambda_max(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double lambda_min(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Smallest eigenvalue over the Choi matrices sum_ab E_ab (x) T(E_ab)_i of
// every (input block j, output block i) pair.
double choi_min_eigenvalue(const Channel& t) {
  const auto& alg = t.algebra_ptr();
  const Mat& s = t.superoperator();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < alg->num_blocks(); ++j) {
    const int dj = alg->dim(j);
    const int in_off = alg->vec_offset(j);
    for (std::size_t i = 0; i < alg->num_blocks(); ++i) {
      const int di = alg->dim(i);
      const int out_off = alg->vec_offset(i);
      Mat choi = Mat::Zero(dj * di, dj * di);
      for (int a = 0; a < dj; ++a)
        for (int b = 0; b < dj; ++b) {
          const int col = in_off + a + b * dj;  // column-major index of E_ab
          for (int r = 0; r < di; ++r)
            for (int c = 0; c < di; ++c) choi(a * di + r, b * di + c) = s(out_off + r + c * di, col);
        }
      // A Choi matrix that is not Hermitian means T does not preserve adjoints.
      const double skew = (0.5 * (choi - choi.adjoint())).cwiseAbs().maxCoeff();
      lo = std::min({lo, lambda_min(choi), -skew});
    }
  }
  return lo;
}

bool is_unitary(const Mat& u, double tol) {
  if (u.rows() != u.cols()) return false;
  return (u.adjoint() * u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

Mat identity_superop(const AlgebraSpec& alg) { return Mat::Identity(alg.vec_size(), alg.vec_size()); }

Mat tabulate(const AlgebraPtr& algebra, const std::function<Operator(const Operator&)>& map) {
  const int n = algebra->vec_size();
  Mat s(n, n);
  for (std::size_t b = 0; b < algebra->num_blocks(); ++b) {
    const int d = algebra->dim(b);
    const int off = algebra->vec_offset(b);
    for (int col = 0; col < d; ++col)
      for (int row = 0; row < d; ++row) s.col(off + row + col * d) = map(matrix_unit(algebra, b, row, col)).vectorize();
  }
  return s;
}

// W^{-1} S^H W with W the diagonal of trace weights on vectorized operators.
Mat tau_adjoint_superop(const AlgebraSpec& alg, const Mat& s) {
  Eigen::VectorXd w(alg.vec_size());
  for (std::size_t b = 0; b < alg.num_blocks(); ++b)
    w.segment(alg.vec_offset(b), alg.dim(b) * alg.dim(b)).setConstant(alg.weight(b));
  return w.cwiseInverse().cast<cplx>().asDiagonal() * s.adjoint() * w.cast<cplx>().asDiagonal();
}

}  // namespace

std::string to_string(PositivityMethod m) {
  switch (m) {
    case PositivityMethod::Choi:
      return "choi";
    case PositivityMethod::Sampled:
      return "sampled";
    case PositivityMethod::Failed:
      return "failed";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Channel

Channel::Channel(AlgebraPtr algebra, Mat superop, std::string kind, std::optional<std::vector<KrausTerm>> kraus)
    : algebra_(std::move(algebra)), superop_(std::move(superop)), kind_(std::move(kind)), kraus_(std::move(kraus)) {
  const int n = algebra_->vec_size();
  if (superop_.rows() != n || superop_.cols() != n)
    throw ShapeError("superoperator must be " + std::to_string(n) + "x" + std::to_string(n));
  report_ = verify_ds(*this);
}

Channel Channel::from_map(AlgebraPtr algebra, const std::function<Operator(const Operator&)>& map,
                          std::string kind) {
  Mat s = tabulate(algebra, map);
  return Channel(std::move(algebra), std::move(s), std::move(kind));
}

Channel Channel::from_kraus(AlgebraPtr algebra, std::vector<KrausTerm> terms, std::string kind) {
  for (const auto& t : terms) {
    if (t.from_block >= algebra->num_blocks() || t.to_block >= algebra->num_blocks())
      throw ShapeError("Kraus term refers to a missing block");
    if (t.a.rows() != algebra->dim(t.from_block) || t.a.cols() != algebra->dim(t.to_block))
      throw ShapeError("Kraus term must be dim(from) x dim(to)");
  }
  Mat s = tabulate(algebra, [&](const Operator& x) { return apply_kraus(algebra, terms, x); });
  return Channel(std::move(algebra), std::move(s), std::move(kind), std::move(terms));
}

Channel Channel::identity(AlgebraPtr algebra) {
  std::vector<KrausTerm> terms;
  for (std::size_t b = 0; b < algebra->num_blocks(); ++b)
    terms.push_back({b, b, Mat::Identity(algebra->dim(b), algebra->dim(b))});
  Mat s = identity_superop(*algebra);
  return Channel(std::move(algebra), std::move(s), "identity", std::move(terms));
}

Operator Channel::operator()(const Operator& x) const {
  if (!(x.algebra() == *algebra_)) throw ShapeError("channel applied to an operator of another algebra");
  return Operator::from_vector(algebra_, superop_ * x.vectorize());
}

Channel Channel::tau_adjoint() const {
  return Channel(algebra_, tau_adjoint_superop(*algebra_, superop_), kind_ + "^dagger");
}

Operator apply_kraus(const AlgebraPtr& algebra, const std::vector<KrausTerm>& terms, const Operator& x) {
  Operator out = Operator::zero(algebra);
  for (const auto& t : terms) out.block(t.to_block) += t.a.adjoint() * x.block(t.from_block) * t.a;
  return out;
}

std::vector<Operator> positive_test_set(const AlgebraPtr& algebra) {
  std::vector<Operator> set;
  auto rank_one = [&](std::size_t b, const Vec& v) {
    Operator e = Operator::zero(algebra);
    e.block(b) = v * v.adjoint();
    set.push_back(std::move(e));
  };
  const double r = 1.0 / std::sqrt(2.0);
  for (std::size_t b = 0; b < algebra->num_blocks(); ++b) {
    const int d = algebra->dim(b);
    for (int a = 0; a < d; ++a) {
      rank_one(b, Vec::Unit(d, a));
      for (int c = a + 1; c < d; ++c) {
        for (cplx phase : {cplx(1, 0), cplx(-1, 0), cplx(0, 1), cplx(0, -1)}) {
          Vec v = Vec::Zero(d);
          v(a) = r;
          v(c) = r * phase;
          rank_one(b, v);
        }
      }
    }
    // a fixed batch of pseudo-random pure states
    CounterRng rng = CounterRng::for_cell(0x5eed, "positive_test_set");
    for (int k = 0; k < 16 && d > 1; ++k) {
      Vec v(d);
      for (int i = 0; i < d; ++i) v(i) = cplx(rng.normal(), rng.normal());
      rank_one(b, v / v.norm());
    }
  }
  return set;
}

DsReport verify_ds(const Channel& t, double tol) {
  DsReport r;
  const auto& alg = t.algebra_ptr();
  r.choi_min_eig = choi_min_eigenvalue(t);
  if (r.choi_min_eig >= -tol) {
    r.positive = true;
    r.positivity_method = PositivityMethod::Choi;
  } else {
    bool ok = true;
    for (const auto& e : positive_test_set(alg)) {
      const Operator y = t(e);
      if (!y.is_hermitian(tol) || y.min_eigenvalue() < -tol) {
        ok = false;
        break;
      }
    }
    r.positive = ok;
    r.positivity_method = ok ? PositivityMethod::Sampled : PositivityMethod::Failed;
  }

  const Operator one = Operator::identity(alg);
  const Operator t1 = t(one);
  r.unit_image_norm = uniform_norm(t1);
  r.subunital = r.unit_image_norm <= 1.0 + tol && t1.is_hermitian(tol);

  const Operator adj1 =
      Operator::from_vector(alg, tau_adjoint_superop(*alg, t.superoperator()) * one.vectorize());
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& m : adj1.blocks()) hi = std::max(hi, lambda_max(m));
  r.adjoint_unit_max_eig = hi;
  r.trace_nonincreasing = hi <= 1.0 + tol && adj1.is_hermitian(tol);
  return r;
}

// ---------------------------------------------------------------------------
// constructors

Channel make_unitary_conjugation(AlgebraPtr algebra, const std::vector<Mat>& u) {
  if (u.size() != algebra->num_blocks()) throw ShapeError("one unitary per block required");
  std::vector<KrausTerm> terms;
  for (std::size_t b = 0; b < u.size(); ++b) {
    if (u[b].rows() != algebra->dim(b)) throw ShapeError("unitary has the wrong size");
    if (!is_unitary(u[b], tolerance())) throw CertificateError("make_unitary_conjugation: matrix is not unitary");
    terms.push_back({b, b, u[b]});
  }
  return Channel::from_kraus(std::move(algebra), std::move(terms), "unitary");
}

Channel make_pinching(AlgebraPtr algebra, const std::vector<std::vector<int>>& labels) {
  if (labels.size() != algebra->num_blocks()) throw ShapeError("one label list per block required");
  std::vector<KrausTerm> terms;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const int d = algebra->dim(b);
    if (static_cast<int>(labels[b].size()) != d) throw ShapeError("pinching labels must cover the block");
    std::vector<int> distinct = labels[b];
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (int lab : distinct) {
      Mat p = Mat::Zero(d, d);
      for (int i = 0; i < d; ++i)
        if (labels[b][static_cast<std::size_t>(i)] == lab) p(i, i) = 1.0;
      terms.push_back({b, b, std::move(p)});
    }
  }
  return Channel::from_kraus(std::move(algebra), std::move(terms), "pinching");
}

Channel make_schur(AlgebraPtr algebra, const std::vector<Mat>& m) {
  if (m.size() != algebra->num_blocks()) throw ShapeError("one multiplier per block required");
  const double tol = tolerance();
  std::vector<KrausTerm> terms;
  for (std::size_t b = 0; b < m.size(); ++b) {
    const int d = algebra->dim(b);
    if (m[b].rows() != d || m[b].cols() != d) throw ShapeError("Schur multiplier has the wrong size");
    if ((m[b] - m[b].adjoint()).cwiseAbs().maxCoeff() > tol)
      throw CertificateError("make_schur: multiplier is not Hermitian");
    for (int i = 0; i < d; ++i)
      if (m[b](i, i).real() > 1.0 + tol) throw CertificateError("make_schur: diagonal entry exceeds 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m[b] + m[b].adjoint()));
    if (es.eigenvalues().minCoeff() < -tol) throw CertificateError("make_schur: multiplier is not positive semidefinite");
    // m = sum_k l_k v_k v_k*, and m o x = sum_k l_k diag(v_k) x diag(v_k)*.
    for (int k = 0; k < d; ++k) {
      const double l = es.eigenvalues()(k);
      if (l <= 0.0) continue;
      const Vec v = es.eigenvectors().col(k);
      terms.push_back({b, b, std::sqrt(l) * Mat(v.conjugate().asDiagonal())});
    }
  }
  return Channel::from_kraus(std::move(algebra), std::move(terms), "schur");
}

Channel make_substochastic(AlgebraPtr algebra, const Eigen::MatrixXd& p) {
  if (!algebra->is_diagonal()) throw CertificateError("make_substochastic needs a diagonal algebra");
  const auto n = static_cast<Eigen::Index>(algebra->num_blocks());
  if (p.rows() != n || p.cols() != n) throw ShapeError("transition matrix has the wrong size");
  const double tol = tolerance();
  if ((p.array() < 0.0).any()) throw CertificateError("make_substochastic: negative entry");
  for (Eigen::Index i = 0; i < n; ++i)
    if (p.row(i).sum() > 1.0 + tol) throw CertificateError("make_substochastic: row sum exceeds 1");
  for (Eigen::Index j = 0; j < n; ++j) {
    double col = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) col += algebra->weight(static_cast<std::size_t>(i)) * p(i, j);
    if (col > algebra->weight(static_cast<std::size_t>(j)) * (1.0 + tol))
      throw CertificateError("make_substochastic: weighted column sum exceeds the atom weight");
  }
  std::vector<KrausTerm> terms;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (p(i, j) > 0.0)
        terms.push_back({static_cast<std::size_t>(j), static_cast<std::size_t>(i), Mat::Constant(1, 1, std::sqrt(p(i, j)))});
  return Channel::from_kraus(std::move(algebra), std::move(terms), "substochastic");
}

Channel convex_combine(const std::vector<std::pair<double, Channel>>& parts) {
  if (parts.empty()) throw std::invalid_argument("convex_combine of nothing");
  const auto& alg = parts.front().second.algebra_ptr();
  double total = 0.0;
  Mat s = Mat::Zero(alg->vec_size(), alg->vec_size());
  bool all_kraus = true;
  std::vector<KrausTerm> terms;
  for (const auto& [c, ch] : parts) {
    if (!(ch.algebra() == *alg)) throw ShapeError("convex_combine across algebras");
    if (c < 0.0) throw CertificateError("convex_combine: negative coefficient");
    total += c;
    s += c * ch.superoperator();
    if (ch.kraus()) {
      for (const auto& k : *ch.kraus()) terms.push_back({k.from_block, k.to_block, std::sqrt(c) * k.a});
    } else {
      all_kraus = false;
    }
  }
  if (total > 1.0 + tolerance()) throw CertificateError("convex_combine: coefficients sum above 1");
  std::optional<std::vector<KrausTerm>> kraus;
  if (all_kraus) kraus = std::move(terms);
  return Channel(alg, std::move(s), "convex", std::move(kraus));
}

Channel compose(const Channel& outer, const Channel& inner) {
  if (!(outer.algebra() == inner.algebra())) throw ShapeError("compose across algebras");
  std::optional<std::vector<KrausTerm>> kraus;
  if (outer.kraus() && inner.kraus()) {
    // outer(inner(x)) = sum (b a)* x (b a) for inner term b (j -> k) and outer term a (k -> i).
    std::vector<KrausTerm> terms;
    for (const auto& b : *inner.kraus())
      for (const auto& a : *outer.kraus())
        if (a.from_block == b.to_block) terms.push_back({b.from_block, a.to_block, b.a * a.a});
    kraus = std::move(terms);
  }
  return Channel(outer.algebra_ptr(), outer.superoperator() * inner.superoperator(), "compose", std::move(kraus));
}

Channel linear_combination(const std::vector<std::pair<cplx, Channel>>& parts) {
  if (parts.empty()) throw std::invalid_argument("linear_combination of nothing");
  const auto& alg = parts.front().second.algebra_ptr();
  Mat s = Mat::Zero(alg->vec_size(), alg->vec_size());
  for (const auto& [c, ch] : parts) {
    if (!(ch.algebra() == *alg)) throw ShapeError("linear_combination across algebras");
    s += c * ch.superoperator();
  }
  return Channel(alg, std::move(s), "combination");
}

// ---------------------------------------------------------------------------
// averages

AverageIterator::AverageIterator(const Channel& t, const Operator& x)
    : t_(&t), algebra_(t.algebra_ptr()), power_(x.vectorize()), sum_(power_) {
  if (!(x.algebra() == t.algebra())) throw ShapeError("average of an operator from another algebra");
}

AverageIterator::AverageIterator(const Channel& t, const Operator& x, WeightSequence beta)
    : t_(&t), algebra_(t.algebra_ptr()), beta_(std::move(beta)), power_(x.vectorize()) {
  if (!(x.algebra() == t.algebra())) throw ShapeError("average of an operator from another algebra");
  const cplx b0 = (*beta_)(0);
  if (std::abs(b0) > beta_->bound() * (1.0 + 1e-12)) throw std::invalid_argument("weight bound violated at k = 0");
  sum_ = b0 * power_;
}

Vec AverageIterator::current_vector() const { return sum_ / static_cast<double>(n_ + 1); }

Operator AverageIterator::current() const { return Operator::from_vector(algebra_, current_vector()); }

void AverageIterator::advance() {
  power_ = t_->apply(power_);
  ++n_;
  if (beta_) {
    const cplx b = (*beta_)(n_);
    if (std::abs(b) > beta_->bound() * (1.0 + 1e-12))
      throw std::invalid_argument("weight bound violated at k = " + std::to_string(n_));
    sum_ += b * power_;
  } else {
    sum_ += power_;
  }
}

Operator ergodic_average(const Channel& t, const Operator& x, std::size_t n) {
  AverageIterator it(t, x);
  while (it.index() < n) it.advance();
  return it.current();
}

std::vector<Operator> average_trajectory(const Channel& t, const Operator& x, std::size_t horizon) {
  std::vector<Operator> out;
  out.reserve(horizon + 1);
  AverageIterator it(t, x);
  out.push_back(it.current());
  while (it.index() < horizon) {
    it.advance();
    out.push_back(it.current());
  }
  return out;
}

Operator weighted_average(const Channel& t, const Operator& x, const WeightSequence& beta, std::size_t n) {
  AverageIterator it(t, x, beta);
  while (it.index() < n) it.advance();
  return it.current();
}

std::vector<Operator> weighted_trajectory(const Channel& t, const Operator& x, const WeightSequence& beta,
                                          std::size_t horizon) {
  std::vector<Operator> out;
  out.reserve(horizon + 1);
  AverageIterator it(t, x, beta);
  out.push_back(it.current());
  while (it.index() < horizon) {
    it.advance();
    out.push_back(it.current());
  }
  return out;
}

Operator WeightedComponents::assemble() const {
  return real_shift + cplx(0.0, 1.0) * imag_shift - cplx(bound, bound) * plain;
}

WeightedComponents weighted_components(const Channel& t, const Operator& x, const WeightSequence& beta,
                                       std::size_t n) {
  const double c = beta.bound();
  Vec power = x.vectorize();
  Vec re = Vec::Zero(power.size()), im = Vec::Zero(power.size()), plain = Vec::Zero(power.size());
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) power = t.apply(power);
    const cplx b = beta(k);
    if (std::abs(b) > c * (1.0 + 1e-12)) throw std::invalid_argument("weight bound violated");
    re += (b.real() + c) * power;
    im += (b.imag() + c) * power;
    plain += power;
  }
  const double inv = 1.0 / static_cast<double>(n + 1);
  const auto& alg = t.algebra_ptr();
  return {Operator::from_vector(alg, re * inv), Operator::from_vector(alg, im * inv),
          Operator::from_vector(alg, plain * inv), c};
}

Channel average_channel(const Channel& t, std::size_t n) {
  const Mat& s = t.superoperator();
  Mat power = identity_superop(t.algebra());
  Mat sum = power;
  for (std::size_t k = 1; k <= n; ++k) {
    power = s * power;
    sum += power;
  }
  return Channel(t.algebra_ptr(), sum / static_cast<double>(n + 1), "average" + std::to_string(n));
}

Channel weighted_component_channel(const Channel& t, const WeightSequence& beta, std::size_t n, ComponentPart part,
                                   double scale) {
  const Mat& s = t.superoperator();
  const double c = beta.bound();
  Mat power = identity_superop(t.algebra());
  Mat sum = Mat::Zero(s.rows(), s.cols());
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) power = s * power;
    const cplx b = beta(k);
    const double coef = (part == ComponentPart::Real ? b.real() : b.imag()) + c;
    sum += coef * power;
  }
  return Channel(t.algebra_ptr(), sum * (scale / static_cast<double>(n + 1)),
                 std::string(part == ComponentPart::Real ? "MR" : "MI") + std::to_string(n));
}

// ---------------------------------------------------------------------------
// exact limits

Operator Eigenprojection::operator()(const Operator& x) const {
  return Operator::from_vector(algebra_, matrix_ * x.vectorize());
}

Eigen::VectorXcd superoperator_spectrum(const Channel& t) {
  Eigen::ComplexEigenSolver<Mat> es(t.superoperator(), false);
  return es.eigenvalues();
}

Eigenprojection eigenprojection(const Channel& t, cplx lambda, double cluster_tol) {
  const Mat& s = t.superoperator();
  const Eigen::Index n = s.rows();
  const Eigen::VectorXcd spec = superoperator_spectrum(t);
  Eigen::Index m = 0;
  for (Eigen::Index i = 0; i < spec.size(); ++i)
    if (std::abs(spec(i) - lambda) <= cluster_tol) ++m;
  if (m == 0) return Eigenprojection(t.algebra_ptr(), Mat::Zero(n, n), 0);

  const Mat a = s - lambda * Mat::Identity(n, n);
  // Right and left null spaces of S - lambda: trailing singular vectors.
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat right = svd.matrixV().rightCols(m);
  const Mat left = svd.matrixU().rightCols(m);

  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  const double nilpotent = (a * right).norm();
  if (nilpotent > kNilpotentTol * scale)
    throw SemisimplicityError("eigenvalue cluster is not semisimple (nilpotent part " + std::to_string(nilpotent) +
                              ")");
  const Mat gram = left.adjoint() * right;
  Eigen::JacobiSVD<Mat> gsvd(gram);
  const double smin = gsvd.singularValues()(m - 1);
  if (smin <= kNilpotentTol)
    throw SemisimplicityError("left and right eigenspaces are degenerate; cluster is not semisimple");
  Mat p = right * gram.inverse() * left.adjoint();
  return Eigenprojection(t.algebra_ptr(), std::move(p), static_cast<std::size_t>(m));
}

Operator fixed_point(const Channel& t, const Operator& x) { return eigenprojection(t, 1.0)(x); }

double spectral_gap(const Channel& t) {
  const Eigen::VectorXcd spec = superoperator_spectrum(t);
  double r = 0.0;
  for (Eigen::Index i = 0; i < spec.size(); ++i)
    if (std::abs(spec(i) - cplx(1.0, 0.0)) > kPeripheralClusterTol) r = std::max(r, std::abs(spec(i)));
  return std::max(0.0, 1.0 - r);
}

}  // namespace ncerg
