#include "ncerg/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ncerg {

namespace {
constexpr double kUnimodularTol = 1e-12;
}

TrigPolynomial::TrigPolynomial(std::vector<cplx> coefficients, std::vector<cplx> frequencies)
    : coefficients_(std::move(coefficients)), frequencies_(std::move(frequencies)) {
  if (coefficients_.size() != frequencies_.size())
    throw std::invalid_argument("TrigPolynomial: coefficient/frequency count mismatch");
  for (const auto& l : frequencies_)
    if (std::abs(std::abs(l) - 1.0) > kUnimodularTol)
      throw std::invalid_argument("TrigPolynomial: frequencies must be unimodular");
}

TrigPolynomial TrigPolynomial::constant(cplx c) { return TrigPolynomial({c}, {cplx(1.0, 0.0)}); }

TrigPolynomial TrigPolynomial::from_period(const std::vector<cplx>& period) {
  if (period.empty()) throw std::invalid_argument("from_period: empty period");
  const std::size_t m = period.size();
  std::vector<cplx> z, lambda;
  for (std::size_t j = 0; j < m; ++j) {
    cplx c = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      c += period[k] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((j * k) % m) / m);
    z.push_back(c / static_cast<double>(m));
    lambda.push_back(std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / m));
  }
  return TrigPolynomial(std::move(z), std::move(lambda));
}

cplx TrigPolynomial::operator()(std::size_t k) const {
  cplx acc = 0.0;
  const double kd = static_cast<double>(k);
  for (std::size_t j = 0; j < coefficients_.size(); ++j) {
    const cplx l = frequencies_[j];
    acc += coefficients_[j] * std::polar(std::pow(std::abs(l), kd), kd * std::arg(l));
  }
  return acc;
}

double TrigPolynomial::coefficient_bound() const {
  double b = 0.0;
  for (const auto& z : coefficients_) b += std::abs(z);
  return b;
}

// ---------------------------------------------------------------------------

WeightSequence WeightSequence::constant(cplx c) {
  WeightSequence w(Kind::Constant, std::abs(c));
  w.constant_ = c;
  return w;
}

WeightSequence WeightSequence::periodic(std::vector<cplx> period) {
  if (period.empty()) throw std::invalid_argument("periodic weights need a non-empty period");
  double c = 0.0;
  for (const auto& v : period) c = std::max(c, std::abs(v));
  WeightSequence w(Kind::Periodic, c);
  w.poly_ = TrigPolynomial::from_period(period);
  w.period_ = std::move(period);
  return w;
}

WeightSequence WeightSequence::trig(TrigPolynomial p) {
  WeightSequence w(Kind::Trig, p.coefficient_bound());
  w.poly_ = std::move(p);
  return w;
}

WeightSequence WeightSequence::trig_plus_decay(TrigPolynomial p, cplx amplitude) {
  WeightSequence w(Kind::TrigPlusDecay, p.coefficient_bound() + std::abs(amplitude));
  w.poly_ = std::move(p);
  w.amplitude_ = amplitude;
  return w;
}

WeightSequence WeightSequence::with_bound(double c) const {
  if (!(c >= bound_) || !std::isfinite(c))
    throw std::invalid_argument("declared bound C is below the certified bound of the generator");
  WeightSequence w = *this;
  w.bound_ = c;
  return w;
}

cplx WeightSequence::operator()(std::size_t k) const {
  switch (kind_) {
    case Kind::Constant:
      return constant_;
    case Kind::Periodic:
      return period_[k % period_.size()];
    case Kind::Trig:
      return poly_(k);
    case Kind::TrigPlusDecay:
      return poly_(k) + amplitude_ / static_cast<double>(k + 1);
  }
  return 0.0;
}

bool WeightSequence::is_unit() const { return kind_ == Kind::Constant && constant_ == cplx(1.0, 0.0); }

std::optional<TrigPolynomial> WeightSequence::trig_part() const {
  switch (kind_) {
    case Kind::Constant:
      return TrigPolynomial::constant(constant_);
    case Kind::Periodic:
    case Kind::Trig:
    case Kind::TrigPlusDecay:
      return poly_;
  }
  return std::nullopt;
}

std::string WeightSequence::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Constant:
      os << "constant";
      break;
    case Kind::Periodic:
      os << "periodic" << period_.size();
      break;
    case Kind::Trig:
      os << "trig" << poly_.terms();
      break;
    case Kind::TrigPlusDecay:
      os << "trig" << poly_.terms() << "+decay";
      break;
  }
  return os.str();
}

DeviationProfile besicovitch_deviation(const WeightSequence& beta, const TrigPolynomial& p, std::size_t horizon) {
  if (horizon < 1) throw std::invalid_argument("besicovitch_deviation needs horizon >= 1");
  DeviationProfile prof;
  prof.horizon = horizon;
  prof.averages.reserve(horizon + 1);
  double sum = 0.0;
  for (std::size_t n = 0; n <= horizon; ++n) {
    sum += std::abs(beta(n) - p(n));
    prof.averages.push_back(sum / static_cast<double>(n + 1));
  }
  prof.limsup_estimate = *std::max_element(prof.averages.begin() + static_cast<std::ptrdiff_t>(horizon / 2),
                                           prof.averages.end());
  return prof;
}

bool BesicovitchCertificate::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const BesicovitchEntry& e) { return e.passed; });
}

std::vector<double> default_besicovitch_eps_grid() { return {0.1, 0.05, 0.01}; }

BesicovitchCertificate certify_besicovitch(const WeightSequence& beta, const std::vector<double>& eps_grid,
                                           std::size_t horizon) {
  BesicovitchCertificate cert;
  cert.horizon = horizon;
  const auto witness = beta.trig_part();
  for (double eps : eps_grid) {
    BesicovitchEntry e;
    e.eps = eps;
    if (witness) {
      e.witness = *witness;
      e.estimate = besicovitch_deviation(beta, *witness, horizon).limsup_estimate;
      e.passed = e.estimate < eps;
    }
    cert.entries.push_back(std::move(e));
  }
  return cert;
}

}  // namespace ncerg
