#include "ncerg/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ncerg/random.hpp"

namespace ncerg {

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

const json& need(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  fail("expected a number or [re, im], got " + j.dump());
}

json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

Mat matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) fail("expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) fail("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

json matrix_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<cplx> complex_list(const json& j, const char* what) {
  if (!j.is_array()) fail(std::string(what) + " must be an array");
  std::vector<cplx> out;
  for (const auto& v : j) out.push_back(complex_from_json(v));
  return out;
}

bool is_u64(const json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

CounterRng stream_for(const json& j, std::uint64_t seed, const std::string& label) {
  if (j.contains("seed")) {
    if (!is_u64(j["seed"])) fail("seed must be a non-negative integer");
    seed = j["seed"].get<std::uint64_t>();
  }
  return CounterRng::for_cell(seed, label);
}

std::vector<Mat> block_matrices(const AlgebraPtr& alg, const json& j, const char* what) {
  if (!j.is_array() || j.size() != alg->num_blocks())
    fail(std::string(what) + " needs one matrix per block");
  std::vector<Mat> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Mat m = matrix_from_json(j[i]);
    if (m.rows() != alg->dim(i) || m.cols() != alg->dim(i)) fail(std::string(what) + ": wrong block shape");
    out.push_back(std::move(m));
  }
  return out;
}

template <typename F>
auto certified(F&& build) {
  try {
    return build();
  } catch (const CertificateError& e) {
    fail(std::string("channel rejected: ") + e.what());
  } catch (const ShapeError& e) {
    fail(std::string("channel shape: ") + e.what());
  }
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json to_json(const AlgebraSpec& spec) {
  json blocks = json::array();
  for (const auto& b : spec.blocks()) blocks.push_back(json::array({b.dim, b.weight}));
  return {{"blocks", blocks}};
}

AlgebraSpec algebra_from_json(const json& j) {
  const json& blocks = need(j, "blocks");
  if (!blocks.is_array() || blocks.empty()) fail("algebra needs at least one block");
  std::vector<Block> out;
  for (const auto& b : blocks) {
    if (!b.is_array() || b.size() != 2 || !b[0].is_number_integer() || !b[1].is_number())
      fail("block must be [dim, weight]: " + b.dump());
    out.push_back({b[0].get<int>(), b[1].get<double>()});
  }
  try {
    return AlgebraSpec(std::move(out));
  } catch (const std::invalid_argument& e) {
    fail(std::string("algebra: ") + e.what());
  }
}

json to_json(const Operator& x) {
  json blocks = json::array();
  for (std::size_t i = 0; i < x.num_blocks(); ++i) blocks.push_back(matrix_to_json(x.block(i)));
  return {{"blocks", blocks}};
}

Operator operator_from_json(const AlgebraPtr& algebra, const json& j) {
  return Operator(algebra, block_matrices(algebra, need(j, "blocks"), "operator"));
}

json to_json(const DsReport& r) {
  return {{"positive", r.positive},
          {"positivity_method", to_string(r.positivity_method)},
          {"choi_min_eig", r.choi_min_eig},
          {"unit_image_norm", r.unit_image_norm},
          {"adjoint_unit_max_eig", r.adjoint_unit_max_eig},
          {"subunital", r.subunital},
          {"trace_nonincreasing", r.trace_nonincreasing},
          {"ds_plus", r.ds_plus()}};
}

json to_json(const WitnessReport& r) {
  json j{{"found", r.found},
         {"method", r.method},
         {"compression", to_string(r.compression)},
         {"horizon", r.horizon},
         {"trace_defect", r.trace_defect},
         {"trace_budget", r.trace_budget},
         {"trace_ratio", r.trace_ratio()},
         {"sup_compression", r.sup_compression},
         {"sup_budget", r.sup_budget},
         {"sup_ratio", r.sup_ratio()},
         {"checker_passed", r.checker_passed},
         {"projection", to_json(r.projection.op())}};
  if (r.cutoff_bound) j["cutoff_bound"] = *r.cutoff_bound;
  if (r.kadison_gap) j["kadison_gap"] = *r.kadison_gap;
  return j;
}

json to_json(const NormSpec& spec) {
  switch (spec.kind) {
    case NormSpec::Kind::Uniform:
      return {{"kind", "inf"}};
    case NormSpec::Kind::Lp:
      return {{"kind", "lp"}, {"p", spec.p}};
    case NormSpec::Kind::Lorentz:
      return {{"kind", "lorentz"}, {"p", spec.p}, {"q", spec.q}};
  }
  return {};
}

NormSpec norm_from_json(const json& j) {
  const std::string kind = need(j, "kind").get<std::string>();
  try {
    if (kind == "inf") return NormSpec::uniform();
    if (kind == "lp") return NormSpec::lp(need(j, "p").get<double>());
    if (kind == "lorentz") return NormSpec::lorentz(need(j, "p").get<double>(), need(j, "q").get<double>());
  } catch (const std::invalid_argument& e) {
    fail(std::string("norm: ") + e.what());
  }
  fail("unknown norm kind \"" + kind + "\"");
}

Channel channel_from_json(const AlgebraPtr& algebra, const json& j, std::uint64_t seed, const std::string& label) {
  if (!j.is_object()) fail("channel spec must be an object");
  const std::string kind = need(j, "kind").get<std::string>();
  auto rng = stream_for(j, seed, label);

  auto children = [&](const char* key, auto&& each) {
    const json& list = need(j, key);
    if (!list.is_array() || list.empty()) fail(std::string(key) + " must be a non-empty array");
    for (std::size_t i = 0; i < list.size(); ++i) each(list[i], label + "/" + std::to_string(i));
  };

  if (kind == "identity") return Channel::identity(algebra);
  if (kind == "unitary") {
    if (j.contains("blocks"))
      return certified([&] { return make_unitary_conjugation(algebra, block_matrices(algebra, j["blocks"], "unitary")); });
    if (j.contains("terms")) return random_mixed_unitary(algebra, rng, j["terms"].get<int>());
    std::vector<Mat> u;
    for (std::size_t i = 0; i < algebra->num_blocks(); ++i) u.push_back(random_unitary(algebra->dim(i), rng));
    return make_unitary_conjugation(algebra, u);
  }
  if (kind == "pinching") {
    const json& labels = need(j, "labels");
    if (!labels.is_array()) fail("labels must be an array");
    return certified([&] { return make_pinching(algebra, labels.get<std::vector<std::vector<int>>>()); });
  }
  if (kind == "schur") return certified([&] { return make_schur(algebra, block_matrices(algebra, need(j, "blocks"), "schur")); });
  if (kind == "substochastic") {
    if (!j.contains("matrix")) {
      if (!algebra->is_diagonal()) fail("substochastic channels need a diagonal algebra");
      return random_substochastic(algebra, rng);
    }
    const Mat m = matrix_from_json(j["matrix"]);
    if (m.imag().cwiseAbs().maxCoeff() > 0.0) fail("substochastic matrix must be real");
    return certified([&] { return make_substochastic(algebra, m.real()); });
  }
  if (kind == "kraus") {
    if (!j.contains("operators")) {
      const int terms = j.value("terms_per_pair", 0);
      return random_kraus_channel(algebra, rng, terms);
    }
    std::vector<KrausTerm> terms;
    for (const auto& t : j["operators"])
      terms.push_back({need(t, "from").get<std::size_t>(), need(t, "to").get<std::size_t>(), matrix_from_json(need(t, "a"))});
    return certified([&] {
      Channel c = Channel::from_kraus(algebra, std::move(terms));
      if (!c.verified_ds_plus()) throw CertificateError("Kraus map is not DS+");
      return c;
    });
  }
  if (kind == "convex") {
    std::vector<std::pair<double, Channel>> parts;
    children("parts", [&](const json& p, const std::string& sub) {
      parts.emplace_back(need(p, "weight").get<double>(), channel_from_json(algebra, need(p, "channel"), seed, sub));
    });
    return certified([&] { return convex_combine(parts); });
  }
  if (kind == "compose") {
    std::vector<Channel> chain;
    children("channels", [&](const json& c, const std::string& sub) { chain.push_back(channel_from_json(algebra, c, seed, sub)); });
    Channel out = chain.back();
    for (std::size_t i = chain.size() - 1; i-- > 0;) out = compose(chain[i], out);
    return out;
  }
  if (kind == "combination") {
    std::vector<std::pair<cplx, Channel>> parts;
    children("parts", [&](const json& p, const std::string& sub) {
      parts.emplace_back(complex_from_json(need(p, "coefficient")), channel_from_json(algebra, need(p, "channel"), seed, sub));
    });
    return certified([&] { return linear_combination(parts); });
  }
  fail("unknown channel kind \"" + kind + "\"");
}

WeightSequence weights_from_json(const json& j) {
  if (!j.is_object()) fail("weight spec must be an object");
  const std::string kind = need(j, "kind").get<std::string>();
  auto poly = [&] {
    const auto coeff = complex_list(need(j, "coefficients"), "coefficients");
    const json& freq = need(j, "frequencies");
    if (!freq.is_array() || freq.size() != coeff.size()) fail("frequencies must match coefficients");
    std::vector<cplx> lambda;
    for (const auto& f : freq) lambda.push_back(std::polar(1.0, 2.0 * std::numbers::pi * f.get<double>()));
    return TrigPolynomial(coeff, lambda);
  };
  try {
    std::optional<WeightSequence> w;
    if (kind == "constant")
      w = WeightSequence::constant(complex_from_json(need(j, "value")));
    else if (kind == "periodic")
      w = WeightSequence::periodic(complex_list(need(j, "period"), "period"));
    else if (kind == "trig")
      w = WeightSequence::trig(poly());
    else if (kind == "trig_plus_decay")
      w = WeightSequence::trig_plus_decay(poly(), complex_from_json(need(j, "amplitude")));
    else
      fail("unknown weight kind \"" + kind + "\"");
    if (j.contains("C")) w = w->with_bound(j["C"].get<double>());
    return *w;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    fail(std::string("weights: ") + e.what());
  }
}

Operator input_from_json(const AlgebraPtr& algebra, const json& j, CounterRng& rng) {
  const std::string kind = need(j, "kind").get<std::string>();
  if (kind == "explicit") return operator_from_json(algebra, j);
  if (kind == "diagonal") {
    const auto values = need(j, "values").get<std::vector<double>>();
    if (static_cast<int>(values.size()) != algebra->total_dim()) fail("diagonal input has the wrong length");
    return Operator::diagonal(algebra, values);
  }
  if (kind == "random") {
    const std::string ensemble = j.value("ensemble", "positive");
    const double scale = j.value("scale", 1.0);
    if (ensemble == "positive") return scale * random_positive(algebra, rng);
    if (ensemble == "hermitian") return scale * random_hermitian(algebra, rng);
    if (ensemble == "general") return scale * random_operator(algebra, rng);
    if (ensemble == "diagonal") return scale * random_diagonal_positive(algebra, rng);
    fail("unknown ensemble \"" + ensemble + "\"");
  }
  fail("unknown input kind \"" + kind + "\"");
}

json ExperimentConfig::section(const std::string& key) const {
  return raw.contains(key) ? raw.at(key) : json::object();
}

ExperimentConfig load_config(const json& doc) {
  if (!doc.is_object()) fail("config must be a JSON object");
  static const std::set<std::string> known{"name",       "description", "seed",     "seeds",       "horizon",
                                           "algebra",    "channel",     "inputs",   "weights",     "verify-channel",
                                           "certify",    "converge",    "besicovitch", "norms",    "boyd"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) fail("unknown top-level field \"" + key + "\"");

  ExperimentConfig c(algebra_from_json(need(doc, "algebra")));
  c.raw = doc;
  c.name = doc.value("name", "unnamed");
  if (doc.contains("seeds")) {
    if (!doc["seeds"].is_array()) fail("seeds must be an array");
    for (const auto& s : doc["seeds"]) {
      if (!is_u64(s)) fail("seeds must be non-negative integers");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    const json& s = doc.contains("seed") ? doc["seed"] : json(0);
    if (!is_u64(s)) fail("seed must be a non-negative integer");
    c.seeds.push_back(s.get<std::uint64_t>());
  }
  if (doc.contains("horizon")) {
    if (!is_u64(doc["horizon"]) || doc["horizon"].get<std::size_t>() == 0)
      fail("horizon must be a positive integer");
    c.horizon = doc["horizon"].get<std::size_t>();
  }
  c.channel = need(doc, "channel");
  if (!c.channel.is_object()) fail("channel must be an object");
  const json inputs = doc.value("inputs", json::array({{{"kind", "random"}, {"ensemble", "positive"}}}));
  const json weights = doc.value("weights", json::array({{{"kind", "constant"}, {"value", 1.0}}}));
  if (!inputs.is_array() || !weights.is_array()) fail("inputs and weights must be arrays");
  c.inputs.assign(inputs.begin(), inputs.end());
  c.weights.assign(weights.begin(), weights.end());
  for (const auto& w : c.weights) (void)weights_from_json(w);
  c.hash = fnv1a(doc.dump());
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  return load_config(doc);
}

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::add(const std::string& s) {
  if (rows_.empty()) row();
  if (s.find_first_of(",\"\n") == std::string::npos) {
    rows_.back().push_back(s);
  } else {
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    rows_.back().push_back(q + "\"");
  }
  return *this;
}

CsvTable& CsvTable::add(double v) { return add(format_double(v)); }
CsvTable& CsvTable::add(std::uint64_t v) { return add(std::to_string(v)); }
CsvTable& CsvTable::add(bool v) { return add(std::string(v ? "1" : "0")); }
CsvTable& CsvTable::add_empty() { return add(std::string()); }

void CsvTable::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) {
    if (r.size() != header_.size())
      throw std::logic_error("CSV row has " + std::to_string(r.size()) + " cells, header has " +
                             std::to_string(header_.size()));
    line(r);
  }
}

}  // namespace ncerg
