#include "ncerg/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ncerg {

namespace {

void require_mode(const Channel& t, DsMode mode) {
  if (mode == DsMode::Positive && !t.verified_ds_plus())
    throw CertificateError("channel is not a certified positive Dunford-Schwartz operator");
}

AverageIterator make_iterator(const Channel& t, const Operator& x, const WeightSequence* beta) {
  return beta ? AverageIterator(t, x, *beta) : AverageIterator(t, x);
}

/// Runs the averages up to the last requested index and hands each requested M_n to f.
template <class F>
void walk(const Channel& t, const Operator& x, const WeightSequence* beta, const std::vector<std::size_t>& at, F f) {
  if (at.empty()) return;
  AverageIterator it = make_iterator(t, x, beta);
  std::size_t i = 0;
  for (std::size_t n = 0; n <= at.back(); ++n) {
    while (i < at.size() && at[i] == n) f(i++, it.current());
    if (n < at.back()) it.advance();
  }
}

}  // namespace

double Metric::distance(const Operator& a, const Operator& b) const {
  return measure ? measure_distance(a, b) : ncerg::norm(a - b, norm);
}

std::string Metric::label() const { return measure ? "measure" : norm.label(); }

std::vector<Metric> default_metrics() {
  return {Metric::of(NormSpec::uniform()),      Metric::of(NormSpec::lp(1.0)),
          Metric::of(NormSpec::lp(2.0)),        Metric::of(NormSpec::lp(3.0)),
          Metric::of(NormSpec::lorentz(2, 1)),  Metric::of(NormSpec::lorentz(3, 2)),
          Metric::measure_metric()};
}

std::vector<std::size_t> dyadic_schedule(std::size_t horizon) {
  std::vector<std::size_t> s;
  for (std::size_t n = 1; n <= horizon; n *= 2) s.push_back(n);
  if (horizon > 0 && s.back() != horizon) s.push_back(horizon);
  return s;
}

TrajectoryReport trajectory(const Channel& t, const Operator& x, std::size_t horizon,
                            const std::vector<Metric>& metrics, DsMode mode) {
  require_mode(t, mode);
  TrajectoryReport r{fixed_point(t, x), dyadic_schedule(horizon), metrics, {}, mode};
  r.residuals.resize(r.schedule.size());
  walk(t, x, nullptr, r.schedule, [&](std::size_t i, const Operator& m) {
    for (const auto& metric : metrics) r.residuals[i].push_back(metric.distance(r.limit, m));
  });
  return r;
}

bool TailWitness::non_increasing() const {
  for (std::size_t i = 1; i < profile.size(); ++i)
    if (profile[i] > profile[i - 1]) return false;
  return true;
}

TailWitness tail_witness(const Channel& t, const Operator& x, const WeightSequence* beta, const Operator& limit,
                         double eps, std::size_t horizon, Compression compression) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  if (horizon == 0) throw std::invalid_argument("horizon must be positive");
  const std::size_t half = horizon / 2;
  const std::size_t step = std::max<std::size_t>(1, (horizon - half) / 64);

  std::vector<std::size_t> sample;
  for (std::size_t m = half; m <= horizon; m += step) sample.push_back(m);
  if (sample.back() != horizon) sample.push_back(horizon);
  std::vector<Operator> positives;
  walk(t, x, beta, sample, [&](std::size_t, const Operator& m) {
    const Operator d = limit - m;
    positives.push_back((d.adjoint() * d).real_part());
  });
  const PeelResult peel = greedy_peel(x.algebra_ptr(), positives, 0.0, eps);
  const Operator& e = peel.projection.op();

  std::vector<std::size_t> tail;
  for (std::size_t m = half; m <= horizon; ++m) tail.push_back(m);
  std::vector<double> value(tail.size());
  walk(t, x, beta, tail, [&](std::size_t i, const Operator& m) {
    const Operator d = limit - m;
    value[i] = uniform_norm(compression == Compression::OneSided ? d * e : e * d * e);
  });
  for (std::size_t i = value.size() - 1; i-- > 0;) value[i] = std::max(value[i], value[i + 1]);

  std::set<std::size_t> pts;
  for (const auto n : dyadic_schedule(horizon)) pts.insert(n);
  for (std::size_t k = 0; k <= 16; ++k) pts.insert(half + k * (horizon - half) / 16);
  TailWitness w(peel.projection);
  w.trace_defect = peel.defect;
  w.eps = eps;
  w.compression = compression;
  w.horizon = horizon;
  for (const auto n : pts) {
    w.points.push_back(n);
    w.profile.push_back(value[std::max(n, half) - half]);
  }
  return w;
}

TailWitness au_witness(const Channel& t, const Operator& x, double eps, std::size_t horizon) {
  return tail_witness(t, x, nullptr, fixed_point(t, x), eps, horizon, Compression::OneSided);
}

TailWitness bau_witness(const Channel& t, const Operator& x, double eps, std::size_t horizon) {
  return tail_witness(t, x, nullptr, fixed_point(t, x), eps, horizon, Compression::TwoSided);
}

MeanErgodicReport mean_ergodic_check(const Channel& t, const Operator& x, const NormSpec& norm, std::size_t horizon,
                                     DsMode mode) {
  if (norm.kind == NormSpec::Kind::Uniform)
    throw UnsupportedNorm("mean ergodic check needs an L_p or L_{p,q} norm");
  require_mode(t, mode);
  const Operator limit = fixed_point(t, x);
  MeanErgodicReport r;
  r.norm = norm;
  r.mode = mode;
  r.schedule = dyadic_schedule(horizon);
  walk(t, x, nullptr, r.schedule, [&](std::size_t, const Operator& m) {
    const Operator d = limit - m;
    r.residuals.push_back(ncerg::norm(d, norm));
    r.uniform_residuals.push_back(uniform_norm(d));
  });
  if (!r.schedule.empty()) {
    std::size_t mid = 0;
    for (std::size_t i = 0; i < r.schedule.size(); ++i)
      if (r.schedule[i] <= horizon / 2) mid = i;
    r.decays = r.residuals.back() <= r.residuals[mid] + 1e-12;
  }
  const double unit = ncerg::norm(Operator::identity(x.algebra_ptr()), norm);
  r.consistent = true;
  for (std::size_t i = 0; i < r.residuals.size(); ++i)
    r.consistent = r.consistent && r.residuals[i] <= 6.0 * r.uniform_residuals[i] * unit + 1e-12;
  if (norm.kind == NormSpec::Kind::Lorentz) {
    for (const double tau : {1.0, 10.0, 100.0, 1000.0})
      r.lorentz_ratio.push_back({tau, projection_lorentz_norm(tau, norm.p, norm.q) / tau});
    r.ratio_vanishes = norm.p > 1.0;
  }
  return r;
}

Operator weighted_limit(const Channel& t, const Operator& x, const TrigPolynomial& p) {
  Operator out = Operator::zero(x.algebra_ptr());
  for (std::size_t j = 0; j < p.terms(); ++j)
    out += p.coefficients()[j] * eigenprojection(t, std::conj(p.frequencies()[j]))(x);
  return out;
}

BesicovitchReport besicovitch_experiment(const Channel& t, const Operator& x, const WeightSequence& beta,
                                         std::size_t horizon, const std::vector<Metric>& metrics, double eps) {
  BesicovitchReport r{Operator::zero(x.algebra_ptr()), false, dyadic_schedule(horizon), metrics, {}, {},
                      TailWitness(Projection::identity(x.algebra_ptr()))};
  std::map<std::size_t, Operator> at;
  walk(t, x, &beta, r.schedule, [&](std::size_t i, const Operator& m) { at.emplace(r.schedule[i], m); });

  if (const auto trig = beta.trig_part()) {
    try {
      r.limit = weighted_limit(t, x, *trig);
      r.limit_exact = true;
    } catch (const SemisimplicityError&) {
      r.limit_exact = false;
    }
  }
  if (!r.limit_exact && !at.empty()) r.limit = at.rbegin()->second;

  for (const auto n : r.schedule) {
    std::vector<double> row;
    for (const auto& metric : metrics) row.push_back(metric.distance(r.limit, at.at(n)));
    r.residuals.push_back(std::move(row));
    const auto twice = at.find(2 * n);
    if (twice == at.end()) continue;
    std::vector<double> c;
    for (const auto& metric : metrics) c.push_back(metric.distance(at.at(n), twice->second));
    r.cauchy.push_back(std::move(c));
  }
  r.witness = tail_witness(t, x, &beta, r.limit, eps, horizon, Compression::TwoSided);
  return r;
}

}  // namespace ncerg
