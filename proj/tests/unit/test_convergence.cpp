#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ncerg/convergence.hpp"
#include "ncerg/random.hpp"
#include "support.hpp"

using namespace ncerg;
using testing::distance;

namespace {

Channel period_two(const AlgebraPtr& m2) {
  Mat u = Mat::Identity(2, 2);
  u(1, 1) = -1.0;
  return make_unitary_conjugation(m2, {u});
}

std::size_t index_of(const std::vector<Metric>& metrics, const std::string& label) {
  for (std::size_t j = 0; j < metrics.size(); ++j)
    if (metrics[j].label() == label) return j;
  FAIL("missing metric " << label);
  return 0;
}

}  // namespace

TEST_CASE("dyadic schedule") {
  CHECK(dyadic_schedule(8) == std::vector<std::size_t>{1, 2, 4, 8});
  CHECK(dyadic_schedule(10) == std::vector<std::size_t>{1, 2, 4, 8, 10});
  CHECK(dyadic_schedule(1) == std::vector<std::size_t>{1});
}

TEST_CASE("default metrics") {
  const auto m = default_metrics();
  REQUIRE(m.size() == 7);
  std::vector<std::string> labels;
  for (const auto& x : m) labels.push_back(x.label());
  CHECK(labels == std::vector<std::string>{"Linf", "L1", "L2", "L3", "L2_1", "L3_2", "measure"});
}

TEST_CASE("measure metric") {
  const auto alg = make_algebra(AlgebraSpec::diagonal({1, 1, 1, 1}));
  const Metric m = Metric::measure_metric();
  const Operator zero = Operator::zero(alg);
  CHECK(m.distance(zero, zero) == 0.0);
  // mu_t of (3, 0, 0, 0) is 3 on [0, 1) and 0 after: the crossing is at eps = 1.
  CHECK(m.distance(Operator::diagonal(alg, std::vector<double>{3, 0, 0, 0}), zero) == doctest::Approx(1.0));
  // A flat 0.5 never exceeds eps once eps >= 0.5.
  CHECK(m.distance(0.5 * Operator::identity(alg), zero) == doctest::Approx(0.5));
  auto rng = CounterRng::for_cell(91, "measure");
  for (int i = 0; i < 10; ++i) {
    const Operator a = random_operator(alg, rng), b = random_operator(alg, rng), c = random_operator(alg, rng);
    CHECK(m.distance(a, b) == doctest::Approx(m.distance(b, a)));
    CHECK(m.distance(a, c) <= m.distance(a, b) + m.distance(b, c) + 1e-12);
  }
}

TEST_CASE("period two trajectory") {
  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  const Operator flip = testing::from_rows(m2, {{0, 1}, {1, 0}});
  const auto r = trajectory(period_two(m2), flip, 64);
  CHECK(testing::max_abs(r.limit) < 1e-12);
  const auto inf = index_of(r.metrics, "Linf"), l1 = index_of(r.metrics, "L1");
  for (std::size_t i = 0; i < r.schedule.size(); ++i) {
    const std::size_t n = r.schedule[i];
    const double expect = n % 2 == 0 ? 1.0 / static_cast<double>(n + 1) : 0.0;
    CHECK(r.residuals[i][inf] == doctest::Approx(expect));
    CHECK(r.residuals[i][l1] == doctest::Approx(2.0 * expect));
  }
}

TEST_CASE("identity trajectory is stationary") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(92, alg->describe());
    const auto r = trajectory(Channel::identity(alg), random_operator(alg, rng), 32);
    for (const auto& row : r.residuals)
      for (const double v : row) CHECK(v < 1e-10);
  }
}

TEST_CASE("substochastic trajectory matches the Neumann partial sums") {
  const auto two = make_algebra(AlgebraSpec::diagonal({1, 1}));
  Eigen::MatrixXd p(2, 2);
  p << 0.5, 0.5, 0.25, 0.25;
  const Channel t = make_substochastic(two, p);
  const Eigen::Vector2d x0(1.0, -2.0);
  const auto r = trajectory(t, Operator::diagonal(two, std::vector<double>{1.0, -2.0}), 256,
                            {Metric::of(NormSpec::uniform())});
  const Eigen::Matrix2d resolvent = (Eigen::Matrix2d::Identity() - p).inverse();
  Eigen::Matrix2d power = Eigen::Matrix2d::Identity();
  std::size_t k = 0;
  for (std::size_t i = 0; i < r.schedule.size(); ++i) {
    while (k <= r.schedule[i]) {
      power = power * p;
      ++k;
    }
    const Eigen::Vector2d sum = resolvent * (Eigen::Matrix2d::Identity() - power) * x0;
    CHECK(r.residuals[i][0] == doctest::Approx(sum.cwiseAbs().maxCoeff() / static_cast<double>(k)).epsilon(1e-10));
  }
}

TEST_CASE("positive mode demands a certified channel") {
  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  const Channel rotated = linear_combination({{std::polar(1.0, 0.7), period_two(m2)}});
  auto rng = CounterRng::for_cell(93, "rotated");
  const Operator x = random_operator(m2, rng);
  CHECK_THROWS_AS(trajectory(rotated, x, 16), CertificateError);
  const auto r = trajectory(rotated, x, 256, default_metrics(), DsMode::Contraction);
  CHECK(r.mode == DsMode::Contraction);
  CHECK(testing::max_abs(r.limit) < 1e-9);
  CHECK(r.residuals.back()[0] < 0.1);
  const auto me = mean_ergodic_check(rotated, x, NormSpec::lp(2), 256, DsMode::Contraction);
  CHECK(me.decays);
  CHECK(me.consistent);
}

TEST_CASE("tail witnesses") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(94, alg->describe());
    const Channel t = random_mixed_unitary(alg, rng);
    const Operator x = random_operator(alg, rng);
    for (const auto& w : {au_witness(t, x, 0.1, 512), bau_witness(t, x, 0.1, 512)}) {
      CHECK(w.trace_defect <= 0.1 + 1e-12);
      CHECK(w.non_increasing());
      CHECK(w.points.size() == w.profile.size());
      CHECK(w.points.back() == 512);
    }
    CHECK(au_witness(t, x, 0.1, 512).compression == Compression::OneSided);
    CHECK(bau_witness(t, x, 0.1, 512).compression == Compression::TwoSided);
    CHECK_THROWS(au_witness(t, x, 0.0, 512));
  }
  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  const Operator flip = testing::from_rows(m2, {{0, 1}, {1, 0}});
  const auto w = au_witness(period_two(m2), flip, 0.5, 1024);
  CHECK(w.final_value() <= 1.0 / 513.0 + 1e-12);
}

TEST_CASE("mean ergodic check") {
  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  const Operator flip = testing::from_rows(m2, {{0, 1}, {1, 0}});
  const Channel t = period_two(m2);
  CHECK_THROWS_AS(mean_ergodic_check(t, flip, NormSpec::uniform(), 64), UnsupportedNorm);

  const auto l32 = mean_ergodic_check(t, flip, NormSpec::lorentz(3, 2), 99);
  CHECK(l32.schedule.back() == 99);
  CHECK(l32.residuals.back() == 0.0);
  CHECK(l32.decays);
  CHECK(l32.consistent);

  const auto l21 = mean_ergodic_check(t, flip, NormSpec::lorentz(2, 1), 64);
  REQUIRE(l21.lorentz_ratio.size() == 4);
  CHECK(l21.lorentz_ratio[0].ratio == doctest::Approx(2.0));
  CHECK(l21.lorentz_ratio[1].ratio == doctest::Approx(2.0 / std::sqrt(10.0)));
  CHECK(l21.lorentz_ratio[2].ratio == doctest::Approx(0.2));
  REQUIRE(l21.ratio_vanishes.has_value());
  CHECK(*l21.ratio_vanishes);

  const auto l1 = mean_ergodic_check(t, flip, NormSpec::lp(1), 64);
  CHECK(l1.lorentz_ratio.empty());
  CHECK_FALSE(l1.ratio_vanishes.has_value());

  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(95, alg->describe());
    const Channel k = random_kraus_channel(alg, rng);
    const Operator x = random_operator(alg, rng);
    for (const auto& spec : {NormSpec::lp(1), NormSpec::lp(2), NormSpec::lorentz(2, 1)}) {
      const auto r = mean_ergodic_check(k, x, spec, 256);
      CHECK(r.decays);
      CHECK(r.consistent);
      CHECK(r.residuals.size() == r.schedule.size());
    }
  }
}

TEST_CASE("besicovitch experiments") {
  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  auto rng = CounterRng::for_cell(96, "besicovitch");
  const Operator x = random_operator(m2, rng);

  const auto half = besicovitch_experiment(Channel::identity(m2), x, WeightSequence::periodic({1.0, 0.0}), 128);
  CHECK(half.limit_exact);
  CHECK(distance(half.limit, 0.5 * x) < 1e-12);
  CHECK(half.witness.trace_defect <= 0.05 + 1e-12);
  CHECK(half.witness.compression == Compression::TwoSided);

  const Channel t = period_two(m2);
  const auto alt = besicovitch_experiment(t, x, WeightSequence::periodic({1.0, -1.0}), 256);
  CHECK(alt.limit_exact);
  Operator off = x;
  off.block(0)(0, 0) = 0.0;
  off.block(0)(1, 1) = 0.0;
  CHECK(distance(alt.limit, off) < 1e-10);

  const cplx lambda = std::polar(1.0, 2.0 * std::numbers::pi * 0.1234);
  const auto beta = WeightSequence::trig(TrigPolynomial({1.0}, {lambda}));
  const auto rot = besicovitch_experiment(t, x, beta, 1024);
  CHECK(rot.limit_exact);
  CHECK(testing::max_abs(rot.limit) < 1e-9);
  for (std::size_t i = 0; i < rot.schedule.size(); ++i) {
    const double n1 = static_cast<double>(rot.schedule[i] + 1);
    const double bound = 2.0 * uniform_norm(x) / (n1 * std::abs(1.0 - lambda)) + 1e-12;
    CHECK(rot.residuals[i][0] <= bound);
  }
  REQUIRE_FALSE(rot.cauchy.empty());
  for (std::size_t i = 0; i < rot.cauchy.size(); ++i) CHECK(2 * rot.schedule[i] <= rot.schedule.back());

  const auto decay = WeightSequence::trig_plus_decay(TrigPolynomial({1.0}, {-1.0}), 0.5);
  const auto d = besicovitch_experiment(t, x, decay, 512);
  CHECK(d.limit_exact);
  CHECK(distance(d.limit, alt.limit) < 1e-10);
  CHECK(d.residuals.back()[0] < d.residuals.front()[0]);
}

TEST_CASE("weighted limit on random channels") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(97, alg->describe());
    const Channel t = random_mixed_unitary(alg, rng);
    const Operator x = random_operator(alg, rng);
    CHECK(distance(weighted_limit(t, x, TrigPolynomial::constant(1.0)), fixed_point(t, x)) < 1e-9);
  }
}
