#include "ncerg/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ncerg/ncnorms.hpp"
#include "ncerg/spectral.hpp"

namespace ncerg {

namespace {

using Eigen::SelfAdjointEigenSolver;

/// Orthonormal columns spanning the range of e, one matrix per block.
using Basis = std::vector<Mat>;

struct Candidate {
  Basis basis;
  double defect = 0.0;
  /// sup_n ||e A_n e|| over the search trajectory.
  double sup = 0.0;
  bool feasible = false;
  YeadonStrategy strategy = YeadonStrategy::GreedyPeel;
};

double slack(double v) { return 1e-12 * std::max(1.0, std::abs(v)); }

Mat hermitian(const Mat& m) { return 0.5 * (m + m.adjoint()); }

Basis full_basis(const AlgebraSpec& alg) {
  Basis q;
  for (const auto& b : alg.blocks()) q.push_back(Mat::Identity(b.dim, b.dim));
  return q;
}

double basis_defect(const AlgebraSpec& alg, const Basis& q) {
  double d = 0.0;
  for (std::size_t b = 0; b < q.size(); ++b) d += alg.weight(b) * (alg.dim(b) - q[b].cols());
  return d;
}

double compressed_max(const Operator& a, const Basis& q) {
  double worst = 0.0;
  for (std::size_t b = 0; b < q.size(); ++b) {
    if (q[b].cols() == 0) continue;
    const Mat c = hermitian(q[b].adjoint() * a.block(b) * q[b]);
    SelfAdjointEigenSolver<Mat> es(c, Eigen::EigenvaluesOnly);
    worst = std::max(worst, es.eigenvalues().maxCoeff());
  }
  return worst;
}

double sup_over(const std::vector<Operator>& traj, const Basis& q) {
  double s = 0.0;
  for (const auto& a : traj) s = std::max(s, compressed_max(a, q));
  return s;
}

std::optional<Candidate> hopf_core(const AlgebraSpec& alg, const std::vector<Operator>& traj, double level,
                                   double budget) {
  Basis q;
  double defect = 0.0;
  for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
    const int d = alg.dim(b);
    Mat g = Mat::Zero(d, d);
    for (std::size_t n = 0; n < traj.size(); ++n)
      g += hermitian(traj[n].block(b)) / (1.0 + 0.6180339887498949 * static_cast<double>(n));
    SelfAdjointEigenSolver<Mat> es(g);
    const Mat& v = es.eigenvectors();
    Eigen::VectorXd peak = Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
    for (const auto& a : traj) {
      const Mat c = v.adjoint() * a.block(b) * v;
      const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
      Mat off = c;
      off.diagonal().setZero();
      if (d > 1 && off.cwiseAbs().maxCoeff() > 1e-9 * scale) return std::nullopt;
      for (int i = 0; i < d; ++i) peak(i) = std::max(peak(i), c(i, i).real());
    }
    std::vector<int> keep;
    for (int i = 0; i < d; ++i) {
      if (peak(i) <= level + slack(level)) keep.push_back(i);
      else defect += alg.weight(b);
    }
    Mat qb(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) qb.col(static_cast<Eigen::Index>(k)) = v.col(keep[k]);
    q.push_back(std::move(qb));
  }
  Candidate c{q, defect, sup_over(traj, q), false, YeadonStrategy::Hopf};
  c.feasible = c.defect <= budget + slack(budget) && c.sup <= level + slack(level);
  return c;
}

Candidate level_set_core(const AlgebraSpec& alg, const std::vector<Operator>& traj, double level, double budget) {
  struct Dir {
    double value;
    std::size_t block;
    int index;
  };
  std::vector<Mat> vectors;
  std::vector<Dir> dirs;
  for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
    const int d = alg.dim(b);
    Mat mean = Mat::Zero(d, d);
    for (const auto& a : traj) mean += hermitian(a.block(b));
    mean /= static_cast<double>(traj.size());
    SelfAdjointEigenSolver<Mat> es(mean);
    vectors.push_back(es.eigenvectors());
    for (int i = 0; i < d; ++i) dirs.push_back({es.eigenvalues()(i), b, i});
  }
  std::stable_sort(dirs.begin(), dirs.end(), [](const Dir& l, const Dir& r) { return l.value > r.value; });

  std::size_t kmax = 0;
  double used = 0.0;
  while (kmax < dirs.size() && used + alg.weight(dirs[kmax].block) <= budget + slack(budget))
    used += alg.weight(dirs[kmax++].block);

  auto basis_after = [&](std::size_t k) {
    std::vector<std::vector<bool>> removed;
    for (std::size_t b = 0; b < alg.num_blocks(); ++b) removed.emplace_back(alg.dim(b), false);
    for (std::size_t i = 0; i < k; ++i) removed[dirs[i].block][dirs[i].index] = true;
    Basis q;
    for (std::size_t b = 0; b < alg.num_blocks(); ++b) {
      std::vector<int> keep;
      for (int i = 0; i < alg.dim(b); ++i)
        if (!removed[b][i]) keep.push_back(i);
      Mat qb(alg.dim(b), static_cast<Eigen::Index>(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) qb.col(static_cast<Eigen::Index>(j)) = vectors[b].col(keep[j]);
      q.push_back(std::move(qb));
    }
    return q;
  };
  auto feasible = [&](const Basis& q) { return sup_over(traj, q) <= level + slack(level); };

  Basis widest = basis_after(kmax);
  if (!feasible(widest)) return {widest, basis_defect(alg, widest), sup_over(traj, widest), false,
                                 YeadonStrategy::LevelSet};
  std::size_t lo = 0, hi = kmax;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(basis_after(mid))) hi = mid;
    else lo = mid + 1;
  }
  Basis q = basis_after(lo);
  return {q, basis_defect(alg, q), sup_over(traj, q), true, YeadonStrategy::LevelSet};
}

Candidate greedy_core(const AlgebraSpec& alg, const std::vector<Operator>& traj, double level, double budget) {
  Basis q = full_basis(alg);
  double defect = 0.0;
  for (;;) {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t worst_block = 0;
    Mat worst_vectors;
    for (const auto& a : traj)
      for (std::size_t b = 0; b < q.size(); ++b) {
        if (q[b].cols() == 0) continue;
        SelfAdjointEigenSolver<Mat> es(hermitian(q[b].adjoint() * a.block(b) * q[b]));
        const double top = es.eigenvalues()(es.eigenvalues().size() - 1);
        if (top > worst) {
          worst = top;
          worst_block = b;
          worst_vectors = es.eigenvectors();
        }
      }
    const double sup = std::max(worst, 0.0);
    if (worst <= level + slack(level)) return {q, defect, sup, true, YeadonStrategy::GreedyPeel};
    if (defect + alg.weight(worst_block) > budget + slack(budget))
      return {q, defect, sup, false, YeadonStrategy::GreedyPeel};
    const auto r = worst_vectors.cols();
    q[worst_block] = (q[worst_block] * worst_vectors.leftCols(r - 1)).eval();
    defect += alg.weight(worst_block);
  }
}

struct Selection {
  Candidate best;
  bool found = false;
};

/// Runs every strategy; the feasible candidate with the smallest defect wins,
/// otherwise the infeasible one with the smallest sup.
Selection select_candidate(const AlgebraSpec& alg, const std::vector<Operator>& traj, double level, double budget,
                           const std::vector<YeadonStrategy>& strategies) {
  if (strategies.empty()) throw std::invalid_argument("witness search needs at least one strategy");
  std::optional<Candidate> feasible, fallback;
  for (const auto s : strategies) {
    std::optional<Candidate> c;
    switch (s) {
      case YeadonStrategy::Hopf: c = hopf_core(alg, traj, level, budget); break;
      case YeadonStrategy::LevelSet: c = level_set_core(alg, traj, level, budget); break;
      case YeadonStrategy::GreedyPeel: c = greedy_core(alg, traj, level, budget); break;
    }
    if (!c) continue;
    if (c->feasible) {
      if (!feasible || c->defect < feasible->defect - slack(feasible->defect)) feasible = c;
    } else if (!fallback || c->sup < fallback->sup) {
      fallback = c;
    }
  }
  if (feasible) return {*feasible, true};
  if (fallback) return {*fallback, false};
  return {Candidate{full_basis(alg), 0.0, sup_over(traj, full_basis(alg)), false, strategies.front()}, false};
}

double measure_sup(const std::vector<Operator>& traj, const Operator& e, Compression c) {
  double s = 0.0;
  for (const auto& a : traj) s = std::max(s, uniform_norm(c == Compression::TwoSided ? e * a * e : a * e));
  return s;
}

void require_ds_plus(const Channel& t) {
  if (!t.verified_ds_plus()) throw CertificateError("channel is not a certified positive Dunford-Schwartz operator");
}

void require_positive(const Operator& x) {
  if (!x.is_positive()) throw CertificateError("witness construction needs a positive operator");
}

void require_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive and finite");
}

void finish(WitnessReport& r, const Channel& t, const Operator& x, const WeightSequence* beta) {
  r.checker_passed = r.found && recheck(r, t, x, beta).passed;
}

}  // namespace

std::string to_string(Compression c) { return c == Compression::TwoSided ? "two-sided" : "one-sided"; }

std::string to_string(YeadonStrategy s) {
  switch (s) {
    case YeadonStrategy::Hopf: return "hopf";
    case YeadonStrategy::LevelSet: return "level-set";
    case YeadonStrategy::GreedyPeel: return "greedy-peel";
  }
  return "unknown";
}

std::vector<YeadonStrategy> default_strategies() {
  return {YeadonStrategy::Hopf, YeadonStrategy::LevelSet, YeadonStrategy::GreedyPeel};
}

PeelResult greedy_peel(const AlgebraPtr& algebra, const std::vector<Operator>& positives, double level,
                       double budget) {
  const Candidate c = greedy_core(*algebra, positives, level, budget);
  return {Projection::from_ranges(algebra, c.basis), c.defect, c.sup, c.feasible};
}

CheckResult check_witness(const Channel& t, const Operator& x, const WeightSequence* beta, const Operator& e,
                          Compression compression, double trace_budget, double sup_budget, std::size_t horizon,
                          double tol) {
  CheckResult out;
  try {
    Projection certified(e, tol);
    out.is_projection = true;
  } catch (const CertificateError&) {
    out.is_projection = false;
  }
  const AlgebraPtr& alg = x.algebra_ptr();
  std::vector<Vec> powers;
  powers.reserve(horizon + 1);
  Vec v = x.vectorize();
  const Mat& s = t.superoperator();
  for (std::size_t k = 0; k <= horizon; ++k) {
    powers.push_back(v);
    Vec next = Vec::Zero(v.size());
    for (Eigen::Index j = 0; j < s.cols(); ++j)
      if (v(j) != cplx(0.0, 0.0)) next += s.col(j) * v(j);
    v = std::move(next);
  }
  std::vector<cplx> weights(horizon + 1, cplx(1.0, 0.0));
  if (beta)
    for (std::size_t k = 0; k <= horizon; ++k) weights[k] = (*beta)(k);

  double sup = 0.0;
  for (std::size_t n = 0; n <= horizon; ++n) {
    Vec m = Vec::Zero(v.size());
    for (std::size_t k = 0; k <= n; ++k) m += weights[k] * powers[k];
    m /= static_cast<double>(n + 1);
    const Operator mn = Operator::from_vector(alg, m);
    sup = std::max(sup, uniform_norm(compression == Compression::TwoSided ? e * mn * e : mn * e));
  }
  out.sup_compression = sup;
  out.trace_defect = alg->total_trace() - trace(e).real();
  out.passed = out.is_projection && out.trace_defect <= trace_budget + tol * std::max(1.0, trace_budget) &&
               out.sup_compression <= sup_budget + tol * std::max(1.0, sup_budget);
  return out;
}

CheckResult recheck(const WitnessReport& report, const Channel& t, const Operator& x, const WeightSequence* beta,
                    double tol) {
  return check_witness(t, x, beta, report.projection.op(), report.compression, report.trace_budget,
                       report.sup_budget, report.horizon, tol);
}

KadisonReport kadison_check(const Channel& s, const Operator& x) {
  if (!s.verified_positive() || !s.verified_subunital())
    throw CertificateError("Kadison check needs a positive subunital map");
  if (!x.is_hermitian()) throw CertificateError("Kadison check needs a Hermitian operator");
  const Operator h = x.real_part();
  const Operator sx = s(h);
  const Operator residual = s(h * h) - sx * sx;
  KadisonReport r;
  r.min_eig = residual.min_eigenvalue();
  r.passed = r.min_eig >= -kKadisonTol;
  return r;
}

WitnessReport hopf_witness_commutative(const Channel& t, const Operator& x, double eps, std::size_t horizon) {
  require_eps(eps);
  require_ds_plus(t);
  if (!t.algebra().is_diagonal()) throw CertificateError("hopf_witness_commutative needs a diagonal algebra");
  require_positive(x);
  const auto traj = average_trajectory(t, x, horizon);
  const double budget = trace(x).real() / eps;
  auto c = hopf_core(t.algebra(), traj, eps, budget);
  WitnessReport r(Projection::from_ranges(t.algebra_ptr(), c->basis));
  r.found = c->feasible;
  r.trace_defect = c->defect;
  r.trace_budget = budget;
  r.sup_compression = measure_sup(traj, r.projection.op(), Compression::TwoSided);
  r.sup_budget = eps;
  r.horizon = horizon;
  r.method = "hopf";
  finish(r, t, x, nullptr);
  return r;
}

WitnessReport yeadon_witness_search(const Channel& t, const Operator& x, double eps, std::size_t horizon,
                                    const std::vector<YeadonStrategy>& strategies) {
  require_eps(eps);
  require_ds_plus(t);
  require_positive(x);
  const auto traj = average_trajectory(t, x, horizon);
  const double budget = trace(x).real() / eps;
  const auto sel = select_candidate(t.algebra(), traj, eps, budget, strategies);
  WitnessReport r(Projection::from_ranges(t.algebra_ptr(), sel.best.basis));
  r.found = sel.found;
  r.trace_defect = sel.best.defect;
  r.trace_budget = budget;
  r.sup_compression = measure_sup(traj, r.projection.op(), Compression::TwoSided);
  r.sup_budget = eps;
  r.horizon = horizon;
  r.method = to_string(sel.best.strategy);
  finish(r, t, x, nullptr);
  return r;
}

WitnessReport lp_witness(const Channel& t, const Operator& x, double p, double eps, std::size_t horizon,
                         const std::vector<YeadonStrategy>& strategies) {
  require_eps(eps);
  if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("lp_witness needs 1 <= p < inf");
  require_ds_plus(t);
  require_positive(x);
  const Operator y = positive_power(x, p);
  const auto traj_y = average_trajectory(t, y, horizon);
  const double level = std::pow(eps, p);
  const double budget = trace(y).real() / level;
  const auto sel = select_candidate(t.algebra(), traj_y, level, budget, strategies);

  WitnessReport r(Projection::from_ranges(t.algebra_ptr(), sel.best.basis));
  const Operator& e = r.projection.op();
  const auto traj_x = average_trajectory(t, x, horizon);
  const Operator x_eps = spectral_cutoff(x, eps, p).x_eps;
  r.found = sel.found;
  r.trace_defect = sel.best.defect;
  r.trace_budget = budget;
  r.sup_compression = measure_sup(traj_x, e, Compression::TwoSided);
  r.sup_budget = 2.0 * eps;
  r.horizon = horizon;
  r.method = "lp:" + to_string(sel.best.strategy);
  r.cutoff_bound = measure_sup(average_trajectory(t, x_eps, horizon), e, Compression::TwoSided) +
                   std::pow(eps, 1.0 - p) * measure_sup(traj_y, e, Compression::TwoSided);
  finish(r, t, x, nullptr);
  return r;
}

WitnessReport weighted_witness(const Channel& t, const Operator& x, double p, const WeightSequence& beta,
                               double eps, std::size_t horizon, const std::vector<YeadonStrategy>& strategies) {
  require_eps(eps);
  require_ds_plus(t);
  if (beta.is_unit() && x.is_positive()) {
    WitnessReport r = lp_witness(t, x.real_part(), p, eps, horizon, strategies);
    r.method = "weighted[1]/" + r.method;
    return r;
  }
  const HermitianParts parts = hermitian_decompose(x);
  const bool herm = x.is_hermitian();
  std::vector<const Operator*> used{&parts.re_pos, &parts.re_neg};
  if (!herm) {
    used.push_back(&parts.im_pos);
    used.push_back(&parts.im_neg);
  }
  std::vector<Projection> pieces;
  bool found = true;
  std::string method = "weighted[" + std::to_string(used.size()) + "]";
  for (const Operator* part : used) {
    if (uniform_norm(*part) == 0.0) {
      pieces.push_back(Projection::identity(t.algebra_ptr()));
      continue;
    }
    const WitnessReport sub = lp_witness(t, *part, p, eps, horizon, strategies);
    found = found && sub.found;
    method += "/" + sub.method;
    pieces.push_back(sub.projection);
  }
  const double c = beta.bound();
  const double mult = static_cast<double>(used.size());
  WitnessReport r(projection_meet(pieces));
  r.found = found;
  r.trace_defect = r.projection.defect();
  r.trace_budget = mult * std::pow(lp_norm(x, p) / eps, p);
  r.sup_compression = measure_sup(weighted_trajectory(t, x, beta, horizon), r.projection.op(),
                                  Compression::TwoSided);
  r.sup_budget = 12.0 * mult * c * eps;
  r.horizon = horizon;
  r.method = method;
  finish(r, t, x, &beta);
  return r;
}

WitnessReport one_sided_witness(const Channel& t, const Operator& x, double p, const WeightSequence& beta,
                                double eps, std::size_t horizon, const OneSidedOptions& options) {
  if (!(p >= 2.0) || !std::isfinite(p)) throw std::invalid_argument("one_sided_witness needs 2 <= p < inf");
  require_eps(eps);
  require_ds_plus(t);

  bool found = true;
  double kadison_gap = -std::numeric_limits<double>::infinity();
  std::string method;
  auto core = [&](const Operator& h) {
    const Operator h2 = h * h;
    const WitnessReport e1 = lp_witness(t, h2.real_part(), p / 2.0, eps * eps, horizon, options.strategies);
    found = found && e1.found;
    method += (method.empty() ? "" : "/") + e1.method;
    Operator hm = h;
    if (options.truncation_path) {
      const double m = uniform_norm(h);
      hm = apply_function(h, [m](double l) { return std::abs(l) <= m ? l : 0.0; });
    }
    const Projection& e = e1.projection;
    const auto traj = average_trajectory(t, hm, horizon);
    const auto traj2 = average_trajectory(t, (hm * hm).real_part(), horizon);
    for (std::size_t n = 0; n <= horizon; ++n) {
      const double lhs = uniform_norm(traj[n] * e.op());
      kadison_gap = std::max(kadison_gap, lhs * lhs - uniform_norm(e.op() * traj2[n] * e.op()));
    }
    return e;
  };

  const bool simple = x.is_hermitian() && beta.is_unit();
  WitnessReport r(Projection::identity(t.algebra_ptr()));
  if (simple) {
    r.projection = core(x.real_part());
    r.trace_budget = 2.0 * std::pow(lp_norm(x, p) / eps, p);
    r.sup_budget = std::sqrt(2.0) * eps;
  } else {
    const Operator x1 = x.real_part();
    const Operator x2 = x.imag_part();
    std::vector<Projection> pieces{core(x1)};
    if (uniform_norm(x2) > 0.0) pieces.push_back(core(x2));
    r.projection = projection_meet(pieces);
    const double c = beta.bound();
    r.trace_budget = 6.0 * std::pow(lp_norm(x, p) / eps, p);
    r.sup_budget = 4.0 * std::sqrt(c) * (2.0 + std::sqrt(c)) * eps;
  }
  r.found = found;
  r.trace_defect = r.projection.defect();
  r.sup_compression = measure_sup(weighted_trajectory(t, x, beta, horizon), r.projection.op(), Compression::OneSided);
  r.horizon = horizon;
  r.compression = Compression::OneSided;
  r.method = "one-sided" + std::string(options.truncation_path ? "+trunc" : "") + "/" + method;
  r.kadison_gap = kadison_gap;
  finish(r, t, x, &beta);
  return r;
}

}  // namespace ncerg
