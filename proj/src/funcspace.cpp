#include "ncerg/funcspace.hpp"

#include <algorithm>
#include <cmath>

namespace ncerg {

StepFunction::StepFunction(std::vector<double> ends, std::vector<cplx> values) {
  if (ends.size() != values.size()) throw std::invalid_argument("StepFunction: size mismatch");
  double prev = 0.0;
  for (std::size_t k = 0; k < ends.size(); ++k) {
    if (!(ends[k] > prev) || !std::isfinite(ends[k]))
      throw std::invalid_argument("StepFunction: breakpoints must increase and stay finite");
    prev = ends[k];
    if (!values_.empty() && values_.back() == values[k]) {
      ends_.back() = ends[k];
    } else {
      ends_.push_back(ends[k]);
      values_.push_back(values[k]);
    }
  }
  while (!values_.empty() && values_.back() == cplx(0.0, 0.0)) {
    values_.pop_back();
    ends_.pop_back();
  }
}

StepFunction StepFunction::indicator(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("indicator needs a > 0");
  return StepFunction({a}, {cplx(1.0, 0.0)});
}

cplx StepFunction::operator()(double t) const {
  auto it = std::upper_bound(ends_.begin(), ends_.end(), t);
  if (it == ends_.end()) return 0.0;
  return values_[static_cast<std::size_t>(it - ends_.begin())];
}

StepFunction StepFunction::abs() const {
  std::vector<cplx> a;
  for (const auto& v : values_) a.emplace_back(std::abs(v), 0.0);
  return StepFunction(ends_, std::move(a));
}

double StepFunction::l1_norm() const {
  double acc = 0.0, prev = 0.0;
  for (std::size_t k = 0; k < ends_.size(); ++k) {
    acc += std::abs(values_[k]) * (ends_[k] - prev);
    prev = ends_[k];
  }
  return acc;
}

SingularFunction rearrangement(const StepFunction& f) {
  std::vector<std::pair<double, double>> vl;
  double prev = 0.0;
  for (std::size_t k = 0; k < f.ends().size(); ++k) {
    vl.emplace_back(std::abs(f.values()[k]), f.ends()[k] - prev);
    prev = f.ends()[k];
  }
  return SingularFunction::rearrange(std::move(vl));
}

StepFunction dilation(const StepFunction& f, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("dilation needs s > 0");
  std::vector<double> ends = f.ends();
  for (double& t : ends) t *= s;
  return StepFunction(std::move(ends), f.values());
}

double function_norm(const StepFunction& f, const NormSpec& norm) { return norm.evaluate(rearrangement(f)); }

std::vector<double> default_boyd_grid() {
  std::vector<double> g;
  for (int k = -16; k <= 16; ++k) g.push_back(std::ldexp(1.0, k));
  return g;
}

std::vector<double> default_test_lengths() {
  std::vector<double> g;
  for (int k = -10; k <= 10; ++k) g.push_back(std::ldexp(1.0, k));
  return g;
}

BoydEstimate boyd_estimate(const NormSpec& norm, const std::vector<double>& s_grid,
                           const std::vector<double>& test_lengths) {
  if (s_grid.empty()) throw std::invalid_argument("boyd_estimate: empty grid");
  if (test_lengths.empty()) throw std::invalid_argument("boyd_estimate: empty test family");
  BoydEstimate est;
  for (double s : s_grid) {
    if (!(s > 0.0)) throw std::invalid_argument("boyd_estimate: grid points must be > 0");
    double best = 0.0;
    for (double a : test_lengths) {
      const StepFunction f = StepFunction::indicator(a);
      best = std::max(best, function_norm(dilation(f, s), norm) / function_norm(f, norm));
    }
    est.rows.push_back({s, best});
  }
  const auto [lo, hi] = std::minmax_element(s_grid.begin(), s_grid.end());
  if (!(*hi > 1.0) || !(*lo < 1.0)) throw std::invalid_argument("boyd_estimate: grid must straddle 1");
  auto index_at = [&](double s) {
    const auto it = std::find_if(est.rows.begin(), est.rows.end(), [s](const BoydRow& r) { return r.s == s; });
    return std::log(s) / std::log(it->dilation_norm);
  };
  est.p_index = index_at(*hi);
  est.q_index = index_at(*lo);
  return est;
}

}  // namespace ncerg
