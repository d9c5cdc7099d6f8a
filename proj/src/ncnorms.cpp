#include "ncerg/ncnorms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ncerg/spectral.hpp"

namespace ncerg {

namespace {

// Values within this relative distance are merged into one step; values
// below kZeroRel * (largest value) are treated as zero.
constexpr double kMergeRel = 1e-13;
constexpr double kZeroRel = 1e-14;

}  // namespace

SingularFunction::SingularFunction(std::vector<double> ends, std::vector<double> values)
    : ends_(std::move(ends)), values_(std::move(values)) {
  if (ends_.size() != values_.size()) throw std::invalid_argument("SingularFunction: size mismatch");
  double prev_t = 0.0;
  double prev_v = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ends_.size(); ++k) {
    if (!(ends_[k] > prev_t)) throw std::invalid_argument("SingularFunction: breakpoints must increase");
    if (!(values_[k] > 0.0) || values_[k] > prev_v)
      throw std::invalid_argument("SingularFunction: values must be positive and non-increasing");
    prev_t = ends_[k];
    prev_v = values_[k];
  }
}

SingularFunction SingularFunction::rearrange(std::vector<std::pair<double, double>> value_lengths) {
  double vmax = 0.0;
  for (auto& [v, len] : value_lengths) {
    v = std::abs(v);
    if (len < 0.0) throw std::invalid_argument("rearrange: negative length");
    vmax = std::max(vmax, v);
  }
  std::stable_sort(value_lengths.begin(), value_lengths.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<double> ends, values;
  double t = 0.0;
  double run_value = 0.0, run_length = 0.0;
  auto flush = [&] {
    if (run_length <= 0.0) return;
    t += run_length;
    ends.push_back(t);
    values.push_back(run_value);
    run_length = 0.0;
  };
  for (const auto& [v, len] : value_lengths) {
    if (v <= kZeroRel * vmax || v == 0.0 || len == 0.0) continue;
    if (run_length > 0.0 && std::abs(run_value - v) <= kMergeRel * run_value) {
      // length-weighted mean keeps int mu^1 exact
      run_value = (run_value * run_length + v * len) / (run_length + len);
      run_length += len;
    } else {
      flush();
      run_value = v;
      run_length = len;
    }
  }
  flush();
  return SingularFunction(std::move(ends), std::move(values));
}

std::vector<double> SingularFunction::breakpoints() const {
  std::vector<double> b{0.0};
  b.insert(b.end(), ends_.begin(), ends_.end());
  return b;
}

double SingularFunction::operator()(double t) const {
  if (t < 0.0) throw std::invalid_argument("mu_t needs t >= 0");
  auto it = std::upper_bound(ends_.begin(), ends_.end(), t);
  if (it == ends_.end()) return 0.0;
  return values_[static_cast<std::size_t>(it - ends_.begin())];
}

double SingularFunction::integral(double s) const {
  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < ends_.size(); ++k) {
    if (s <= prev) break;
    acc += values_[k] * (std::min(s, ends_[k]) - prev);
    prev = ends_[k];
  }
  return acc;
}

double SingularFunction::integral_power(double p) const {
  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < ends_.size(); ++k) {
    acc += std::pow(values_[k], p) * (ends_[k] - prev);
    prev = ends_[k];
  }
  return acc;
}

std::string SingularFunction::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "t,mu\n";
  for (std::size_t k = 0; k < ends_.size(); ++k) os << ends_[k] << "," << values_[k] << "\n";
  return os.str();
}

SingularFunction singular_function(const Operator& x) {
  std::vector<std::pair<double, double>> vl;
  for (std::size_t b = 0; b < x.num_blocks(); ++b) {
    const Mat& m = x.block(b);
    const double w = x.algebra().weight(b);
    if (m.rows() == 1) {
      vl.emplace_back(std::abs(m(0, 0)), w);
      continue;
    }
    Eigen::JacobiSVD<Mat> svd(m);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) vl.emplace_back(svd.singularValues()(i), w);
  }
  return SingularFunction::rearrange(std::move(vl));
}

// ---------------------------------------------------------------------------
// norms

NormSpec NormSpec::lp(double p) {
  if (!(p >= 1.0)) throw UnsupportedNorm("L_p needs p >= 1");
  if (std::isinf(p)) return uniform();
  return {Kind::Lp, p, p};
}

NormSpec NormSpec::lorentz(double p, double q) {
  check_lorentz_region(p, q);
  return {Kind::Lorentz, p, q};
}

double NormSpec::evaluate(const SingularFunction& mu) const {
  switch (kind) {
    case Kind::Uniform:
      return mu.steps() ? mu.values().front() : 0.0;
    case Kind::Lp:
      return lp_norm(mu, p);
    case Kind::Lorentz:
      return lorentz_norm(mu, p, q);
  }
  return 0.0;
}

std::string NormSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Uniform:
      return "Linf";
    case Kind::Lp:
      os << "L" << p;
      break;
    case Kind::Lorentz:
      os << "L" << p << "_" << q;
      break;
  }
  return os.str();
}

bool NormSpec::is_norm() const { return kind != Kind::Lorentz || q <= p; }

double lp_norm(const Operator& x, double p) {
  if (!(p >= 1.0)) throw UnsupportedNorm("lp_norm needs p >= 1");
  if (std::isinf(p)) return uniform_norm(x);
  const Operator ax = abs_value(x);
  const Operator axp = apply_function(ax, [p](double l) { return l <= 0.0 ? 0.0 : std::pow(l, p); });
  return std::pow(std::max(0.0, trace(axp).real()), 1.0 / p);
}

double lp_norm(const SingularFunction& mu, double p) {
  if (!(p >= 1.0)) throw UnsupportedNorm("lp_norm needs p >= 1");
  if (std::isinf(p)) return mu.steps() ? mu.values().front() : 0.0;
  return std::pow(mu.integral_power(p), 1.0 / p);
}

double lp_norm_mu(const Operator& x, double p) { return lp_norm(singular_function(x), p); }

void check_lorentz_region(double p, double q) {
  if (!std::isfinite(p) || !std::isfinite(q)) throw UnsupportedNorm("Lorentz norm needs finite p, q");
  if (!(q >= 1.0)) throw UnsupportedNorm("Lorentz norm needs q >= 1");
  if (!(p >= 1.0)) throw UnsupportedNorm("Lorentz norm needs p >= 1");
  if (q > p && !(p > 1.0)) throw UnsupportedNorm("Lorentz quasi-norm with q > p needs p > 1");
}

double lorentz_norm(const SingularFunction& mu, double p, double q, LorentzVariant variant) {
  check_lorentz_region(p, q);
  if (variant == LorentzVariant::EquivalentNorm && q > p)
    throw UnsupportedNorm("the equivalent norm ||.||_(p,q) for p < q has no closed form; only the quasi-norm is available");
  const double r = q / p;
  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < mu.steps(); ++k) {
    const double t = mu.ends()[k];
    acc += std::pow(mu.values()[k], q) * (p / q) * (std::pow(t, r) - std::pow(prev, r));
    prev = t;
  }
  return std::pow(acc, 1.0 / q);
}

double lorentz_norm(const Operator& x, double p, double q, LorentzVariant variant) {
  return lorentz_norm(singular_function(x), p, q, variant);
}

double projection_lorentz_norm(double trace_of_projection, double p, double q) {
  check_lorentz_region(p, q);
  if (trace_of_projection < 0.0) throw std::invalid_argument("projection trace must be >= 0");
  return std::pow(p / q, 1.0 / q) * std::pow(trace_of_projection, 1.0 / p);
}

double norm(const Operator& x, const NormSpec& spec) { return spec.evaluate(singular_function(x)); }

// ---------------------------------------------------------------------------
// submajorization

double submajorization_integral(const SingularFunction& mu, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("submajorization_integral needs s > 0");
  return mu.integral(s);
}

double submajorization_integral(const Operator& x, double s) {
  return submajorization_integral(singular_function(x), s);
}

bool submajorizes(const SingularFunction& x, const SingularFunction& y, double tol) {
  // Both integrals are piecewise linear, so the breakpoints of both suffice.
  std::vector<double> pts = x.ends();
  pts.insert(pts.end(), y.ends().begin(), y.ends().end());
  for (double s : pts) {
    const double ix = x.integral(s), iy = y.integral(s);
    if (iy > ix + tol * std::max(1.0, std::abs(ix))) return false;
  }
  return true;
}

bool submajorizes(const Operator& x, const Operator& y, double tol) {
  return submajorizes(singular_function(x), singular_function(y), tol);
}

// ---------------------------------------------------------------------------
// measure topology

namespace {

NeighborhoodResult neighborhood_impl(const Operator& x, double eps, double delta, bool bilateral) {
  if (!(eps > 0.0) || !(delta > 0.0)) throw std::invalid_argument("neighborhood needs eps, delta > 0");
  const SingularFunction mu = singular_function(x);
  const Operator ax = abs_value(x);
  Projection e = spectral_projection(ax, Interval::up_to(delta));
  const double defect = e.defect();
  const double wnorm = bilateral ? uniform_norm(e.op() * x * e.op()) : uniform_norm(x * e.op());
  const double mu_eps = mu(eps);
  return NeighborhoodResult{mu_eps <= delta, mu_eps, std::move(e), defect, wnorm};
}

}  // namespace

NeighborhoodResult neighborhood_membership(const Operator& x, double eps, double delta) {
  return neighborhood_impl(x, eps, delta, false);
}

NeighborhoodResult bilateral_neighborhood_membership(const Operator& x, double eps, double delta) {
  return neighborhood_impl(x, eps, delta, true);
}

double measure_distance(const SingularFunction& mu) {
  if (mu.steps() == 0) return 0.0;
  double best = mu.support();
  double prev = 0.0;
  for (std::size_t k = 0; k < mu.steps(); ++k) {
    const double c = std::max(prev, mu.values()[k]);
    if (c < mu.ends()[k]) best = std::min(best, c);
    prev = mu.ends()[k];
  }
  return best;
}

double measure_distance(const Operator& x, const Operator& y) {
  return measure_distance(singular_function(x - y));
}

}  // namespace ncerg
