#include <cmath>
#include <numbers>

#include "doctest.h"
#include "ncerg/maximal.hpp"
#include "ncerg/ncnorms.hpp"
#include "ncerg/random.hpp"
#include "ncerg/spectral.hpp"
#include "support.hpp"

using namespace ncerg;
using testing::distance;

namespace {

Channel cycle4() {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) p(i, (i + 1) % 4) = 1.0;
  return make_substochastic(make_algebra(AlgebraSpec::diagonal({1, 1, 1, 1})), p);
}

Operator point_mass(const AlgebraPtr& alg, double v) { return Operator::diagonal(alg, std::vector<double>{v, 0, 0, 0}); }

// Brute-force Hopf set: points whose running maximum of averages stays <= eps.
std::vector<bool> hopf_oracle(const Eigen::MatrixXd& p, const Eigen::VectorXd& x, double eps, int horizon) {
  const auto n = x.size();
  std::vector<bool> keep(static_cast<std::size_t>(n), true);
  Eigen::VectorXd power = x, sum = Eigen::VectorXd::Zero(n);
  for (int k = 0; k <= horizon; ++k) {
    sum += power;
    for (Eigen::Index i = 0; i < n; ++i)
      if (sum(i) / (k + 1) > eps + 1e-12) keep[static_cast<std::size_t>(i)] = false;
    power = p * power;
  }
  return keep;
}

}  // namespace

TEST_CASE("cycle example") {
  const Channel t = cycle4();
  const Operator x = point_mass(t.algebra_ptr(), 4.0);
  const auto r = hopf_witness_commutative(t, x, 2.0, 8);
  CHECK(r.found);
  CHECK(r.trace_defect == doctest::Approx(1.0));
  CHECK(r.trace_budget == doctest::Approx(2.0));
  CHECK(r.sup_compression == doctest::Approx(2.0));
  CHECK(r.checker_passed);
  CHECK(distance(r.projection.op(), Operator::diagonal(t.algebra_ptr(), std::vector<double>{0, 1, 1, 1})) < 1e-12);

  const auto s = yeadon_witness_search(t, x, 2.0, 8);
  CHECK(s.found);
  CHECK(s.trace_defect <= 1.0 + 1e-12);
  CHECK(s.sup_compression <= 2.0 + 1e-9);
  CHECK(recheck(s, t, x).passed);
}

TEST_CASE("hopf witness agrees with the brute-force maximal function") {
  auto rng = CounterRng::for_cell(81, "hopf");
  const auto alg = make_algebra(AlgebraSpec::diagonal(std::vector<double>(6, 1.0)));
  for (int trial = 0; trial < 10; ++trial) {
    const Channel t = random_substochastic(alg, rng);
    Eigen::MatrixXd p(6, 6);
    for (int i = 0; i < 6; ++i) {
      std::vector<double> e(6, 0.0);
      e[static_cast<std::size_t>(i)] = 1.0;
      const Operator col = t(Operator::diagonal(alg, e));
      for (int j = 0; j < 6; ++j) p(j, i) = col.block(static_cast<std::size_t>(j))(0, 0).real();
    }
    Eigen::VectorXd xv(6);
    std::vector<double> xs(6);
    for (int i = 0; i < 6; ++i) xs[static_cast<std::size_t>(i)] = xv(i) = 3.0 * rng.uniform();
    const Operator x = Operator::diagonal(alg, xs);
    const double eps = rng.uniform(0.3, 2.0);
    const auto r = hopf_witness_commutative(t, x, eps, 40);
    const auto keep = hopf_oracle(p, xv, eps, 40);
    for (std::size_t i = 0; i < 6; ++i) CHECK((r.projection.op().block(i)(0, 0).real() > 0.5) == keep[i]);
    CHECK(r.trace_defect <= trace(x).real() / eps + 1e-12);
    CHECK(r.checker_passed);
  }
  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  CHECK_THROWS(hopf_witness_commutative(Channel::identity(m2), Operator::identity(m2), 1.0));
}

TEST_CASE("lp witness example") {
  const Channel t = cycle4();
  const auto r = lp_witness(t, point_mass(t.algebra_ptr(), 2.0), 2.0, std::numbers::sqrt2, 8);
  CHECK(r.found);
  CHECK(r.trace_defect == doctest::Approx(1.0));
  CHECK(r.trace_budget == doctest::Approx(2.0));
  CHECK(r.sup_compression == doctest::Approx(1.0));
  CHECK(r.sup_budget == doctest::Approx(2.0 * std::numbers::sqrt2));
  CHECK(r.method.rfind("lp:", 0) == 0);
  REQUIRE(r.cutoff_bound.has_value());
  CHECK(*r.cutoff_bound <= r.sup_budget + 1e-9);
}

TEST_CASE("degenerate inputs") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(82, alg->describe());
    const Channel t = random_kraus_channel(alg, rng);
    const auto r = yeadon_witness_search(t, Operator::zero(alg), 0.5, 16);
    CHECK(r.found);
    CHECK(r.trace_defect == doctest::Approx(0.0));
    CHECK_THROWS(yeadon_witness_search(t, Operator::zero(alg), 0.0, 16));
    CHECK_THROWS(yeadon_witness_search(t, -Operator::identity(alg), 0.5, 16));
  }
}

TEST_CASE("identity map reduces to Chebyshev") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(83, alg->describe());
    const Operator x = random_positive(alg, rng);
    const Channel id = Channel::identity(alg);
    for (const double eps : {0.2, 0.7, 1.5}) {
      const auto r = yeadon_witness_search(id, x, eps, 8);
      CHECK(r.found);
      const Projection cheb = spectral_projection(x, Interval::above(eps));
      CHECK(r.trace_defect <= cheb.trace_value() + 1e-9);
      CHECK(r.trace_defect <= trace(x).real() / eps + 1e-9);
      CHECK(r.sup_compression <= eps + 1e-9);
    }
  }
}

TEST_CASE("random channels produce checked witnesses") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(84, alg->describe());
    const Channel t = random_kraus_channel(alg, rng);
    const Operator x = random_positive(alg, rng);
    const double eps = 0.5 * lp_norm(x, 1.0) / trace(Operator::identity(alg)).real();
    const auto r = yeadon_witness_search(t, x, eps, 64);
    CHECK(r.checker_passed == r.found);
    if (r.found) {
      CHECK(r.trace_defect <= r.trace_budget + 1e-9);
      CHECK(r.sup_compression <= r.sup_budget + 1e-9);
    }
    const auto lp = lp_witness(t, x, 3.0, 0.5, 64);
    CHECK(lp.checker_passed == lp.found);
    CHECK(lp.trace_budget == doctest::Approx(std::pow(lp_norm(x, 3.0) / 0.5, 3.0)));
  }
}

TEST_CASE("witness defects are monotone in eps") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(85, alg->describe());
    const Channel t = random_mixed_unitary(alg, rng);
    const Operator x = random_positive(alg, rng);
    double prev = INFINITY;
    for (const double eps : {0.1, 0.2, 0.4, 0.8, 1.6, 3.2}) {
      const auto r = yeadon_witness_search(t, x, eps, 32);
      if (!r.found) continue;
      CHECK(r.trace_defect <= prev + 1e-9);
      prev = r.trace_defect;
    }
  }
}

TEST_CASE("checker rejects bad witnesses") {
  const Channel t = cycle4();
  const auto& alg = t.algebra_ptr();
  const Operator x = point_mass(alg, 4.0);
  const auto zero = check_witness(t, x, nullptr, Operator::zero(alg), Compression::TwoSided, 2.0, 2.0, 8);
  CHECK(zero.is_projection);
  CHECK(zero.trace_defect == doctest::Approx(4.0));
  CHECK_FALSE(zero.passed);

  const auto one = check_witness(t, x, nullptr, Operator::identity(alg), Compression::TwoSided, 2.0, 2.0, 8);
  CHECK(one.sup_compression == doctest::Approx(4.0));
  CHECK_FALSE(one.passed);

  const auto half = check_witness(t, x, nullptr, 0.5 * Operator::identity(alg), Compression::TwoSided, 9.0, 9.0, 8);
  CHECK_FALSE(half.is_projection);
  CHECK_FALSE(half.passed);

  const auto good = check_witness(t, x, nullptr, Operator::diagonal(alg, std::vector<double>{0, 1, 1, 1}),
                                  Compression::TwoSided, 2.0, 2.0, 8);
  CHECK(good.passed);
  const auto one_sided = check_witness(t, x, nullptr, Operator::diagonal(alg, std::vector<double>{0, 1, 1, 1}),
                                       Compression::OneSided, 2.0, 2.0, 8);
  CHECK(one_sided.sup_compression >= good.sup_compression - 1e-12);
}

TEST_CASE("kadison inequality") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(86, alg->describe());
    const Channel t = random_kraus_channel(alg, rng);
    for (int i = 0; i < 5; ++i) {
      const auto k = kadison_check(t, random_hermitian(alg, rng));
      CHECK(k.passed);
      CHECK(k.min_eig >= -kKadisonTol);
    }
    CHECK_THROWS_AS(kadison_check(t, random_operator(alg, rng) + cplx(0, 1) * Operator::identity(alg)),
                    CertificateError);
  }
  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  const Channel twice = Channel::from_map(m2, [](const Operator& y) { return 2.0 * y; }, "twice");
  CHECK_THROWS_AS(kadison_check(twice, Operator::identity(m2)), CertificateError);
}

TEST_CASE("weighted witnesses") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(87, alg->describe());
    const Channel t = random_kraus_channel(alg, rng);
    const Operator pos = random_positive(alg, rng);
    const auto unit = WeightSequence::constant(1.0);
    const auto collapsed = weighted_witness(t, pos, 2.0, unit, 0.5, 32);
    const auto plain = lp_witness(t, pos, 2.0, 0.5, 32);
    CHECK(collapsed.trace_budget == doctest::Approx(plain.trace_budget));
    CHECK(collapsed.sup_budget == doctest::Approx(plain.sup_budget));
    CHECK(distance(collapsed.projection.op(), plain.projection.op()) < 1e-12);

    const auto beta = WeightSequence::periodic({1.0, cplx(0, 1), -1.0});
    const double c = beta.bound();
    const Operator x = random_operator(alg, rng);
    const auto general = weighted_witness(t, x, 2.0, beta, 0.5, 32);
    CHECK(general.trace_budget == doctest::Approx(4.0 * std::pow(lp_norm(x, 2.0) / 0.5, 2.0)));
    CHECK(general.sup_budget == doctest::Approx(48.0 * c * 0.5));
    CHECK(general.method.rfind("weighted", 0) == 0);
    if (general.found) CHECK(recheck(general, t, x, &beta).passed);

    const Operator h = random_hermitian(alg, rng);
    const auto herm = weighted_witness(t, h, 2.0, beta, 0.5, 32);
    CHECK(herm.trace_budget == doctest::Approx(2.0 * std::pow(lp_norm(h, 2.0) / 0.5, 2.0)));
    CHECK(herm.sup_budget == doctest::Approx(24.0 * c * 0.5));
  }
}

TEST_CASE("one-sided witnesses") {
  for (const auto& alg : testing::sample_algebras()) {
    auto rng = CounterRng::for_cell(88, alg->describe());
    const Channel t = random_kraus_channel(alg, rng);
    const auto unit = WeightSequence::constant(1.0);
    const Operator h = random_hermitian(alg, rng);
    const auto r = one_sided_witness(t, h, 2.0, unit, 0.5, 32);
    CHECK(r.compression == Compression::OneSided);
    CHECK(r.trace_budget == doctest::Approx(2.0 * std::pow(lp_norm(h, 2.0) / 0.5, 2.0)));
    CHECK(r.sup_budget == doctest::Approx(std::numbers::sqrt2 * 0.5));
    REQUIRE(r.kadison_gap.has_value());
    CHECK(*r.kadison_gap <= 1e-9);
    if (r.found) CHECK(recheck(r, t, h).passed);

    const auto beta = WeightSequence::periodic({1.0, -1.0, cplx(0.6, 0.8)});
    const double c = beta.bound();
    const Operator x = random_operator(alg, rng);
    OneSidedOptions opts;
    opts.truncation_path = true;
    const auto g = one_sided_witness(t, x, 3.0, beta, 0.7, 32, opts);
    CHECK(g.trace_budget == doctest::Approx(6.0 * std::pow(lp_norm(x, 3.0) / 0.7, 3.0)));
    CHECK(g.sup_budget == doctest::Approx(4.0 * std::sqrt(c) * (2.0 + std::sqrt(c)) * 0.7));
    CHECK(g.method.find("+trunc") != std::string::npos);
    if (g.found) CHECK(recheck(g, t, x, &beta).passed);

    CHECK_THROWS(one_sided_witness(t, h, 1.5, unit, 0.5, 32));
  }
}

TEST_CASE("greedy peel") {
  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  const Operator a = testing::from_rows(m2, {{2, 0}, {0, 0.5}});
  const auto r = greedy_peel(m2, {a}, 1.0, 1.0);
  CHECK(r.feasible);
  CHECK(r.defect == doctest::Approx(1.0));
  CHECK(r.sup == doctest::Approx(0.5));
  const auto tight = greedy_peel(m2, {a}, 0.1, 1.0);
  CHECK_FALSE(tight.feasible);
  CHECK(tight.defect <= 1.0 + 1e-12);
}
