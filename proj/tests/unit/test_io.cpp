#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "ncerg/io.hpp"
#include "ncerg/random.hpp"
#include "support.hpp"

using namespace ncerg;

TEST_CASE("fnv1a reference vectors") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("doubles survive formatting") {
  auto rng = CounterRng::for_cell(101, "format");
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.uniform(-60, 60)));
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(NAN) == "nan");
}

TEST_CASE("algebra and operator round trip") {
  for (const auto& alg : testing::sample_algebras()) {
    const json j = to_json(*alg);
    CHECK(algebra_from_json(j) == *alg);
    auto rng = CounterRng::for_cell(102, alg->describe());
    const Operator x = random_operator(alg, rng);
    const Operator y = operator_from_json(alg, json::parse(to_json(x).dump()));
    CHECK(testing::distance(x, y) == 0.0);
  }
  CHECK(to_json(AlgebraSpec::matrix(2, 0.5)).dump() == R"({"blocks":[[2,0.5]]})");
  CHECK_THROWS_AS(algebra_from_json(json::parse(R"({"blocks":[]})")), ConfigError);
  CHECK_THROWS_AS(algebra_from_json(json::parse(R"({"blocks":[[0,1]]})")), ConfigError);
  CHECK_THROWS_AS(algebra_from_json(json::parse(R"({"blocks":[[2,-1]]})")), ConfigError);

  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  const Operator x = operator_from_json(m2, json::parse(R"({"blocks":[[[1,[0,2]],[3,0]]]})"));
  CHECK(x.block(0)(0, 1) == cplx(0, 2));
  CHECK(x.block(0)(1, 0) == cplx(3, 0));
  CHECK_THROWS_AS(operator_from_json(m2, json::parse(R"({"blocks":[[[1,2,3],[3,0]]]})")), ConfigError);
}

TEST_CASE("channel specs") {
  const auto m2 = make_algebra(AlgebraSpec::matrix(2));
  const auto four = make_algebra(AlgebraSpec::diagonal({1, 1, 1, 1}));

  const Channel u = channel_from_json(m2, json::parse(R"({"kind":"unitary","blocks":[[[1,0],[0,[0,1]]]]})"), 0);
  CHECK(u.verified_ds_plus());
  const Operator flip = testing::from_rows(m2, {{0, 1}, {1, 0}});
  CHECK(testing::distance(u(flip), testing::from_rows(m2, {{0, cplx(0, 1)}, {cplx(0, -1), 0}})) < 1e-15);

  CHECK(channel_from_json(m2, json::parse(R"({"kind":"pinching","labels":[[0,1]]})"), 0).verified_ds_plus());
  CHECK(channel_from_json(m2, json::parse(R"({"kind":"schur","blocks":[[[1,0.5],[0.5,1]]]})"), 0).verified_ds_plus());
  CHECK_THROWS_AS(channel_from_json(m2, json::parse(R"({"kind":"schur","blocks":[[[1,2],[2,1]]]})"), 0),
                  ConfigError);
  CHECK_THROWS_AS(channel_from_json(m2, json::parse(R"({"kind":"teleport"})"), 0), ConfigError);
  CHECK_THROWS_AS(channel_from_json(m2, json::parse(R"({"kind":"substochastic"})"), 0), ConfigError);

  const json cycle = json::parse(R"({"kind":"substochastic","matrix":[[0,1,0,0],[0,0,1,0],[0,0,0,1],[1,0,0,0]]})");
  const Channel c = channel_from_json(four, cycle, 0);
  const Operator e0 = Operator::diagonal(four, std::vector<double>{0, 1, 0, 0});
  CHECK(c(e0).block(0)(0, 0) == cplx(1.0));

  const json random = json::parse(R"({"kind":"kraus","terms_per_pair":2})");
  const Channel a = channel_from_json(m2, random, 7), b = channel_from_json(m2, random, 7);
  const Channel d = channel_from_json(m2, random, 8);
  CHECK(a.superoperator() == b.superoperator());
  CHECK(a.superoperator() != d.superoperator());
  json pinned = random;
  pinned["seed"] = 7;
  CHECK(channel_from_json(m2, pinned, 99).superoperator() == a.superoperator());

  const json convex = json::parse(
      R"({"kind":"convex","parts":[{"weight":0.5,"channel":{"kind":"identity"}},{"weight":0.5,"channel":{"kind":"pinching","labels":[[0,1]]}}]})");
  const Channel half = channel_from_json(m2, convex, 0);
  CHECK(half(flip).block(0)(0, 1) == cplx(0.5));

  const json chain =
      json::parse(R"({"kind":"compose","channels":[{"kind":"pinching","labels":[[0,1]]},{"kind":"kraus"}]})");
  CHECK(channel_from_json(m2, chain, 3).verified_ds_plus());

  const json rotated = json::parse(
      R"({"kind":"combination","parts":[{"coefficient":[0,1],"channel":{"kind":"identity"}}]})");
  CHECK_FALSE(channel_from_json(m2, rotated, 0).verified_positive());
}

TEST_CASE("weight specs") {
  const auto alt = weights_from_json(json::parse(R"({"kind":"periodic","period":[1,-1]})"));
  CHECK(alt(3) == cplx(-1.0));
  const auto rot = weights_from_json(json::parse(R"({"kind":"trig","coefficients":[1],"frequencies":[0.25]})"));
  CHECK(std::abs(rot(1) - cplx(0, 1)) < 1e-15);
  const auto declared = weights_from_json(json::parse(R"({"kind":"constant","value":[0.6,0.8],"C":3})"));
  CHECK(declared.bound() == 3.0);
  CHECK_THROWS_AS(weights_from_json(json::parse(R"({"kind":"constant","value":2,"C":1})")), ConfigError);
  CHECK_THROWS_AS(weights_from_json(json::parse(R"({"kind":"periodic","period":[]})")), ConfigError);
  const auto decay = weights_from_json(
      json::parse(R"({"kind":"trig_plus_decay","coefficients":[1],"frequencies":[0.5],"amplitude":1})"));
  CHECK(std::abs(decay(1) - cplx(-0.5)) < 1e-12);
}

TEST_CASE("norm specs") {
  CHECK(norm_from_json(to_json(NormSpec::lorentz(3, 2))).label() == "L3_2");
  CHECK(norm_from_json(to_json(NormSpec::uniform())).kind == NormSpec::Kind::Uniform);
  CHECK(norm_from_json(to_json(NormSpec::lp(1.5))).p == 1.5);
  CHECK_THROWS_AS(norm_from_json(json::parse(R"({"kind":"lp","p":0.5})")), ConfigError);
}

TEST_CASE("config validation") {
  const json ok = json::parse(R"({"algebra":{"blocks":[[2,1]]},"channel":{"kind":"identity"},"seeds":[3,4]})");
  const auto c = load_config(ok);
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4});
  CHECK(c.horizon == kDefaultHorizon);
  CHECK(c.inputs.size() == 1);
  CHECK(c.weights.size() == 1);
  CHECK(c.hash == fnv1a(ok.dump()));
  CHECK(c.section("certify").empty());

  json extra = ok;
  extra["surprise"] = 1;
  CHECK_THROWS_AS(load_config(extra), ConfigError);
  json no_channel = ok;
  no_channel.erase("channel");
  CHECK_THROWS_AS(load_config(no_channel), ConfigError);
  json bad_seed = ok;
  bad_seed["seeds"] = json::array({-1});
  CHECK_THROWS_AS(load_config(bad_seed), ConfigError);
  json zero_horizon = ok;
  zero_horizon["horizon"] = 0;
  CHECK_THROWS_AS(load_config(zero_horizon), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("csv table") {
  CsvTable t({"a", "b", "c"});
  t.row().add(std::string("x,y")).add(1.5).add(true);
  t.row().add(std::string("say \"hi\"")).add_empty().add(std::uint64_t{7});
  std::ostringstream out;
  t.write(out);
  CHECK(out.str() == "a,b,c\n\"x,y\",1.5,1\n\"say \"\"hi\"\"\",,7\n");

  CsvTable empty({"only"});
  std::ostringstream e;
  empty.write(e);
  CHECK(e.str() == "only\n");

  CsvTable ragged({"a", "b"});
  ragged.row().add(1.0);
  std::ostringstream r;
  CHECK_THROWS(ragged.write(r));
}

TEST_CASE("inputs") {
  const auto alg = make_algebra({{2, 1.0}, {1, 0.5}});
  auto rng = CounterRng::for_cell(103, "inputs");
  CHECK(input_from_json(alg, json::parse(R"({"kind":"random","ensemble":"positive"})"), rng).is_positive());
  CHECK(input_from_json(alg, json::parse(R"({"kind":"random","ensemble":"hermitian"})"), rng).is_hermitian());
  const Operator d = input_from_json(alg, json::parse(R"({"kind":"diagonal","values":[1,2,3]})"), rng);
  CHECK(d.block(1)(0, 0) == cplx(3.0));
  CHECK_THROWS_AS(input_from_json(alg, json::parse(R"({"kind":"diagonal","values":[1]})"), rng), ConfigError);
  CHECK_THROWS_AS(input_from_json(alg, json::parse(R"({"kind":"random","ensemble":"odd"})"), rng), ConfigError);
}
