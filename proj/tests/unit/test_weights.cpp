#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ncerg/rng.hpp"
#include "ncerg/weights.hpp"

using namespace ncerg;

namespace {

const cplx I(0.0, 1.0);

cplx unit(double theta) { return std::polar(1.0, 2.0 * std::numbers::pi * theta); }

}  // namespace

TEST_CASE("trig polynomial evaluation") {
  const TrigPolynomial alt({1.0}, {-1.0});
  for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(alt(k) - std::pow(-1.0, static_cast<double>(k))) < 1e-12);

  const double theta = 0.1234;
  const TrigPolynomial cosine({1.0, 1.0}, {unit(theta), unit(-theta)});
  CHECK(cosine.coefficient_bound() == 2.0);
  for (std::size_t k = 0; k < 1000; ++k) {
    const cplx v = cosine(k);
    CHECK(std::abs(v.real() - 2.0 * std::cos(2.0 * std::numbers::pi * theta * static_cast<double>(k))) < 1e-12);
    CHECK(std::abs(v) <= 2.0 + 1e-12);
  }

  CHECK_THROWS(TrigPolynomial({1.0}, {1.1}));
  CHECK_THROWS(TrigPolynomial({1.0, 2.0}, {1.0}));
  CHECK(TrigPolynomial::constant(3.0)(17) == cplx(3.0));
}

TEST_CASE("periodic weights") {
  const auto beta = WeightSequence::periodic({1.0, I, -1.0, -I});
  CHECK(beta(5) == I);
  CHECK(beta(0) == cplx(1.0));
  CHECK(beta.bound() == 1.0);
  CHECK_FALSE(beta.is_unit());
  CHECK(WeightSequence::constant(1.0).is_unit());
  CHECK_THROWS(WeightSequence::periodic({}));
}

TEST_CASE("discrete Fourier representation is exact") {
  auto rng = CounterRng::for_cell(51, "periodic");
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + static_cast<int>(rng.uniform() * 9);
    std::vector<cplx> period;
    for (int i = 0; i < m; ++i) period.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const auto beta = WeightSequence::periodic(period);
    const auto p = beta.trig_part();
    REQUIRE(p.has_value());
    CHECK(p->terms() == static_cast<std::size_t>(m));
    const auto dev = besicovitch_deviation(beta, *p, 500);
    for (const double a : dev.averages) CHECK(a <= 1e-10);
  }
}

TEST_CASE("besicovitch deviation examples") {
  const TrigPolynomial alt({1.0}, {-1.0});
  const auto same = besicovitch_deviation(WeightSequence::trig(alt), alt, 100);
  for (const double a : same.averages) CHECK(a == 0.0);
  CHECK_THROWS(besicovitch_deviation(WeightSequence::trig(alt), alt, 0));

  const auto decay = WeightSequence::trig_plus_decay(alt, 1.0);
  const auto dev = besicovitch_deviation(decay, alt, 1000);
  REQUIRE(dev.averages.size() == 1001);
  double harmonic = 0.0;
  for (int k = 1; k <= 1001; ++k) harmonic += 1.0 / k;
  CHECK(std::abs(dev.averages[1000] - harmonic / 1001.0) < 1e-12);
  CHECK(dev.limsup_estimate == doctest::Approx(dev.averages[500]));

  const auto half = WeightSequence::periodic({1.0, 0.0});
  const TrigPolynomial p({0.5, 0.5}, {1.0, -1.0});
  for (const double a : besicovitch_deviation(half, p, 200).averages) CHECK(a < 1e-12);
}

TEST_CASE("weight bounds hold on sampled indices") {
  auto rng = CounterRng::for_cell(52, "bounds");
  const std::vector<WeightSequence> family{
      WeightSequence::constant(cplx(0.6, 0.8)),
      WeightSequence::periodic({2.0, -1.0, cplx(0, 1.5)}),
      WeightSequence::trig(TrigPolynomial({1.0, cplx(0, 0.5)}, {unit(0.3), unit(std::numbers::sqrt2)})),
      WeightSequence::trig_plus_decay(TrigPolynomial({0.7}, {unit(1.0 / 7.0)}), cplx(0.2, -0.1)),
  };
  for (const auto& beta : family) {
    for (std::size_t k = 0; k < 2000; ++k) CHECK(std::abs(beta(k)) <= beta.bound() + 1e-12);
    for (int i = 0; i < 2000; ++i) {
      const auto k = static_cast<std::size_t>(rng.uniform() * 1e6);
      CHECK(std::abs(beta(k)) <= beta.bound() + 1e-12);
    }
  }
  CHECK(family[1].with_bound(5.0).bound() == 5.0);
  CHECK_THROWS((void)family[1].with_bound(1.0));
}

TEST_CASE("besicovitch certificate") {
  const auto cert = certify_besicovitch(WeightSequence::periodic({1.0, 0.0, 0.5}));
  CHECK(cert.passed());
  CHECK(cert.entries.size() == default_besicovitch_eps_grid().size());
  const auto decay = certify_besicovitch(WeightSequence::trig_plus_decay(TrigPolynomial({1.0}, {-1.0}), 1.0),
                                         {0.1, 0.05, 0.01}, 4096);
  CHECK(decay.passed());
  for (const auto& e : decay.entries) CHECK(e.estimate < e.eps);
}
