#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <thread>

#include "ncerg/convergence.hpp"
#include "ncerg/funcspace.hpp"
#include "ncerg/io.hpp"
#include "ncerg/random.hpp"
#include "ncerg/spectral.hpp"

namespace ncerg::cli {

namespace {

// Runs body(i) for i < n on up to `jobs` threads. Results are written by
// index, so scheduling never changes the output.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto k = static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(jobs, n)));
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < k; ++w) pool.emplace_back(worker);
    worker();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Cell {
  std::vector<std::vector<std::string>> rows;
  json summary;
  bool checker_failure = false;
};

struct Outcome {
  CsvTable table;
  json cells = json::array();
  int checker_failures = 0;
};

class Context {
 public:
  Context(const ExperimentConfig& config, const Options& options)
      : config_(config), options_(options), algebra_(make_algebra(config.algebra)) {
    seeds_ = options.seed ? std::vector<std::uint64_t>{*options.seed} : config.seeds;
    channel_kind_ = config.channel.at("kind").get<std::string>();
    algebra_hash_ = hex64(config.algebra.hash());
    for (const auto seed : seeds_) channels_.push_back(channel_from_json(algebra_, config.channel, seed));
  }

  [[nodiscard]] const ExperimentConfig& config() const { return config_; }
  [[nodiscard]] const AlgebraPtr& algebra() const { return algebra_; }
  [[nodiscard]] const std::vector<std::uint64_t>& seeds() const { return seeds_; }
  [[nodiscard]] const Channel& channel(std::size_t seed_index) const { return channels_[seed_index]; }
  [[nodiscard]] unsigned jobs() const { return std::max(1u, options_.jobs); }

  [[nodiscard]] Operator input(std::size_t seed_index, std::size_t i) const {
    auto rng = CounterRng::for_cell(seeds_[seed_index], "input/" + std::to_string(i));
    return input_from_json(algebra_, config_.inputs.at(i), rng);
  }

  [[nodiscard]] std::size_t horizon(const json& section, std::size_t fallback) const {
    if (options_.horizon) return *options_.horizon;
    if (section.contains("horizon")) return section["horizon"].get<std::size_t>();
    if (config_.raw.contains("horizon")) return config_.horizon;
    return fallback;
  }

  [[nodiscard]] std::vector<std::string> prefix(std::size_t seed_index) const {
    return {std::to_string(seeds_[seed_index]), algebra_hash_, channel_kind_};
  }

 private:
  const ExperimentConfig& config_;
  const Options& options_;
  AlgebraPtr algebra_;
  std::vector<std::uint64_t> seeds_;
  std::vector<Channel> channels_;
  std::string channel_kind_;
  std::string algebra_hash_;
};

const std::vector<std::string> kPrefixHeader{"seed", "algebra_hash", "channel_kind"};

std::vector<std::string> with_prefix(std::vector<std::string> rest) {
  std::vector<std::string> h = kPrefixHeader;
  h.insert(h.end(), rest.begin(), rest.end());
  return h;
}

// Row builder that formats values the same way CsvTable does.
class Row {
 public:
  explicit Row(std::vector<std::string> prefix) : cells_(std::move(prefix)) {}
  Row& add(const std::string& s) {
    cells_.push_back(s);
    return *this;
  }
  Row& add(const char* s) { return add(std::string(s)); }
  Row& add(double v) { return add(format_double(v)); }
  Row& add(std::size_t v) { return add(std::to_string(v)); }
  Row& add(bool v) { return add(std::string(v ? "1" : "0")); }
  Row& empty(std::size_t n = 1) {
    for (std::size_t i = 0; i < n; ++i) cells_.emplace_back();
    return *this;
  }
  std::vector<std::string> take() { return std::move(cells_); }

 private:
  std::vector<std::string> cells_;
};

Outcome collect(std::vector<std::string> header, std::vector<Cell> cells) {
  Outcome out{CsvTable(std::move(header))};
  for (auto& c : cells) {
    for (auto& r : c.rows) {
      out.table.row();
      for (auto& v : r) out.table.add(v);
    }
    out.cells.push_back(std::move(c.summary));
    if (c.checker_failure) ++out.checker_failures;
  }
  return out;
}

std::vector<double> number_list(const json& section, const char* key, std::vector<double> fallback) {
  if (!section.contains(key)) return fallback;
  if (!section[key].is_array()) throw ConfigError(std::string(key) + " must be an array");
  return section[key].get<std::vector<double>>();
}

std::vector<NormSpec> norm_list(const json& section, const char* key, std::vector<NormSpec> fallback) {
  if (!section.contains(key)) return fallback;
  std::vector<NormSpec> out;
  for (const auto& n : section[key]) out.push_back(norm_from_json(n));
  return out;
}

std::vector<Metric> metric_list(const json& section) {
  if (!section.contains("metrics")) return default_metrics();
  std::vector<Metric> out;
  for (const auto& m : section["metrics"]) {
    if (m.is_string() && m.get<std::string>() == "measure")
      out.push_back(Metric::measure_metric());
    else
      out.push_back(Metric::of(norm_from_json(m)));
  }
  return out;
}

json tail_json(const TailWitness& w) {
  return {{"compression", to_string(w.compression)},
          {"eps", w.eps},
          {"horizon", w.horizon},
          {"trace_defect", w.trace_defect},
          {"points", w.points},
          {"profile", w.profile},
          {"final_value", w.final_value()},
          {"non_increasing", w.non_increasing()}};
}

std::map<std::size_t, double> profile_map(const TailWitness& w) {
  std::map<std::size_t, double> m;
  for (std::size_t i = 0; i < w.points.size(); ++i) m[w.points[i]] = w.profile[i];
  return m;
}

// --- verify-channel -------------------------------------------------------------

Outcome verify_channel(const Context& ctx) {
  std::vector<Cell> cells(ctx.seeds().size());
  parallel_for(cells.size(), ctx.jobs(), [&](std::size_t s) {
    const Channel& t = ctx.channel(s);
    const DsReport& r = t.report();
    const double gap = spectral_gap(t);
    cells[s].rows.push_back(Row(ctx.prefix(s))
                                .add(to_string(r.positivity_method))
                                .add(r.choi_min_eig)
                                .add(r.unit_image_norm)
                                .add(r.adjoint_unit_max_eig)
                                .add(r.positive)
                                .add(r.subunital)
                                .add(r.trace_nonincreasing)
                                .add(r.ds_plus())
                                .add(gap)
                                .take());
    cells[s].summary = {{"seed", ctx.seeds()[s]}, {"kind", t.kind()}, {"report", to_json(r)}, {"spectral_gap", gap}};
  });
  return collect(with_prefix({"positivity_method", "choi_min_eig", "unit_image_norm", "adjoint_unit_max_eig",
                              "positive", "subunital", "trace_nonincreasing", "ds_plus", "spectral_gap"}),
                 std::move(cells));
}

// --- certify --------------------------------------------------------------------

struct CertifyKey {
  std::size_t seed = 0;
  std::size_t input = 0;
  std::string method;
  std::optional<std::size_t> weight;
  double p = 1.0;
  double eps = 1.0;
};

Outcome certify(const Context& ctx) {
  const json section = ctx.config().section("certify");
  const auto eps_grid = number_list(section, "eps", {0.5});
  const auto p_grid = number_list(section, "p", {2.0});
  std::vector<std::string> methods{"lp"};
  if (section.contains("methods")) methods = section["methods"].get<std::vector<std::string>>();
  for (const auto& m : methods)
    if (m != "hopf" && m != "yeadon" && m != "lp" && m != "weighted" && m != "one-sided")
      throw ConfigError("unknown certify method \"" + m + "\"");
  const bool truncation = section.value("truncation_path", false);
  const std::size_t horizon = ctx.horizon(section, kDefaultHorizon);

  std::vector<WeightSequence> weights;
  for (const auto& w : ctx.config().weights) weights.push_back(weights_from_json(w));

  std::vector<CertifyKey> keys;
  for (std::size_t s = 0; s < ctx.seeds().size(); ++s)
    for (std::size_t i = 0; i < ctx.config().inputs.size(); ++i)
      for (const auto& m : methods) {
        const bool weighted = m == "weighted" || m == "one-sided";
        const bool l1 = m == "hopf" || m == "yeadon";
        const std::vector<double> ps = l1 ? std::vector<double>{1.0} : p_grid;
        for (std::size_t w = 0; w < (weighted ? weights.size() : 1); ++w)
          for (const double p : ps)
            for (const double eps : eps_grid)
              keys.push_back({s, i, m, weighted ? std::optional<std::size_t>(w) : std::nullopt, p, eps});
      }
  if (p_grid.empty()) std::erase_if(keys, [](const CertifyKey& k) { return k.method != "hopf" && k.method != "yeadon"; });

  std::vector<Cell> cells(keys.size());
  parallel_for(keys.size(), ctx.jobs(), [&](std::size_t c) {
    const CertifyKey& k = keys[c];
    const Channel& t = ctx.channel(k.seed);
    const Operator x = ctx.input(k.seed, k.input);
    const WeightSequence* beta = k.weight ? &weights[*k.weight] : nullptr;
    Row row(ctx.prefix(k.seed));
    row.add(k.input).add(beta ? beta->describe() : std::string("1")).add(k.method).add(k.p).add(k.p).add(k.eps).add(
        horizon);
    json summary{{"seed", ctx.seeds()[k.seed]}, {"input", k.input}, {"method", k.method},
                 {"p", k.p},                    {"eps", k.eps},     {"horizon", horizon}};
    if (beta) summary["weights"] = beta->describe();

    if (k.method == "one-sided" && k.p < 2.0) {
      row.add("refused").empty(10);
      summary["status"] = "refused";
      cells[c].rows.push_back(row.take());
      cells[c].summary = std::move(summary);
      return;
    }
    std::optional<WitnessReport> report;
    try {
      if (k.method == "hopf")
        report = hopf_witness_commutative(t, x, k.eps, horizon);
      else if (k.method == "yeadon")
        report = yeadon_witness_search(t, x, k.eps, horizon);
      else if (k.method == "lp")
        report = lp_witness(t, x, k.p, k.eps, horizon);
      else if (k.method == "weighted")
        report = weighted_witness(t, x, k.p, *beta, k.eps, horizon);
      else
        report = one_sided_witness(t, x, k.p, *beta, k.eps, horizon, {.truncation_path = truncation});
    } catch (const std::invalid_argument& e) {
      row.add("rejected").empty(10);
      summary["status"] = "rejected";
      summary["reason"] = e.what();
      cells[c].rows.push_back(row.take());
      cells[c].summary = std::move(summary);
      return;
    }
    const CheckResult again = recheck(*report, t, x, beta);
    cells[c].checker_failure = report->checker_passed && !again.passed;
    const char* status = report->found ? "found" : "not-found";
    row.add(status)
        .add(report->found)
        .add(report->trace_defect)
        .add(report->trace_budget)
        .add(report->trace_ratio())
        .add(report->sup_compression)
        .add(report->sup_budget)
        .add(report->sup_ratio())
        .add(report->checker_passed)
        .add(again.passed)
        .add(report->method);
    summary["status"] = status;
    summary["report"] = to_json(*report);
    summary["recheck"] = {{"trace_defect", again.trace_defect},
                          {"sup_compression", again.sup_compression},
                          {"is_projection", again.is_projection},
                          {"passed", again.passed}};
    cells[c].rows.push_back(row.take());
    cells[c].summary = std::move(summary);
  });
  return collect(with_prefix({"input", "weights", "method", "p", "q", "eps", "N", "status", "found", "trace_defect",
                              "trace_budget", "trace_ratio", "sup_compression", "sup_budget", "sup_ratio",
                              "checker_passed", "recheck_passed", "strategy"}),
                 std::move(cells));
}

// --- converge -------------------------------------------------------------------

Outcome converge(const Context& ctx) {
  const json section = ctx.config().section("converge");
  const double eps = section.value("eps", 0.05);
  const std::size_t horizon = ctx.horizon(section, kDefaultConvergenceHorizon);
  const auto metrics = metric_list(section);
  const auto norms = norm_list(section, "norms", {NormSpec::lp(1), NormSpec::lp(2), NormSpec::lorentz(2, 1)});
  const std::string mode_name = section.value("mode", "positive");
  if (mode_name != "positive" && mode_name != "contraction") throw ConfigError("mode must be positive or contraction");
  const DsMode mode = mode_name == "positive" ? DsMode::Positive : DsMode::Contraction;

  std::vector<std::string> header{"input", "mode", "eps", "N", "n"};
  for (const auto& m : metrics) header.push_back("res_" + m.label());
  for (const char* h : {"au_profile", "bau_profile", "au_defect", "bau_defect", "au_pass", "bau_pass"})
    header.emplace_back(h);

  const std::size_t n_inputs = ctx.config().inputs.size();
  std::vector<Cell> cells(ctx.seeds().size() * n_inputs);
  parallel_for(cells.size(), ctx.jobs(), [&](std::size_t c) {
    const std::size_t s = c / n_inputs, i = c % n_inputs;
    const Channel& t = ctx.channel(s);
    const Operator x = ctx.input(s, i);
    const TrajectoryReport tr = trajectory(t, x, horizon, metrics, mode);
    const TailWitness au = tail_witness(t, x, nullptr, tr.limit, eps, horizon, Compression::OneSided);
    const TailWitness bau = tail_witness(t, x, nullptr, tr.limit, eps, horizon, Compression::TwoSided);
    const auto au_at = profile_map(au), bau_at = profile_map(bau);
    const bool au_pass = au.trace_defect <= eps && au.non_increasing();
    const bool bau_pass = bau.trace_defect <= eps && bau.non_increasing();

    for (std::size_t r = 0; r < tr.schedule.size(); ++r) {
      const std::size_t n = tr.schedule[r];
      Row row(ctx.prefix(s));
      row.add(i).add(mode_name).add(eps).add(horizon).add(n);
      for (const double v : tr.residuals[r]) row.add(v);
      au_at.count(n) ? row.add(au_at.at(n)) : row.empty();
      bau_at.count(n) ? row.add(bau_at.at(n)) : row.empty();
      row.add(au.trace_defect).add(bau.trace_defect).add(au_pass).add(bau_pass);
      cells[c].rows.push_back(row.take());
    }

    json limsup = json::object();
    for (std::size_t j = 0; j < metrics.size(); ++j) {
      double tail = 0.0;
      for (std::size_t r = 0; r < tr.schedule.size(); ++r)
        if (2 * tr.schedule[r] >= horizon) tail = std::max(tail, tr.residuals[r][j]);
      limsup[metrics[j].label()] = tail;
    }
    json mean = json::array();
    for (const auto& spec : norms) {
      const auto me = mean_ergodic_check(t, x, spec, horizon, mode);
      json entry{{"norm", spec.label()},           {"schedule", me.schedule}, {"residuals", me.residuals},
                 {"uniform_residuals", me.uniform_residuals}, {"decays", me.decays}, {"consistent", me.consistent}};
      if (!me.lorentz_ratio.empty()) {
        json rows = json::array();
        for (const auto& lr : me.lorentz_ratio) rows.push_back({{"trace", lr.trace}, {"ratio", lr.ratio}});
        entry["lorentz_ratio"] = rows;
      }
      if (me.ratio_vanishes) entry["ratio_vanishes"] = *me.ratio_vanishes;
      mean.push_back(std::move(entry));
    }
    cells[c].summary = {{"seed", ctx.seeds()[s]},
                        {"input", i},
                        {"spectral_gap", spectral_gap(t)},
                        {"limit", to_json(tr.limit)},
                        {"limsup_estimates", limsup},
                        {"au", tail_json(au)},
                        {"bau", tail_json(bau)},
                        {"mean_ergodic", mean}};
  });
  return collect(with_prefix(header), std::move(cells));
}

// --- besicovitch ----------------------------------------------------------------

Outcome besicovitch(const Context& ctx) {
  const json section = ctx.config().section("besicovitch");
  const double eps = section.value("eps", 0.05);
  const std::size_t horizon = ctx.horizon(section, kDefaultConvergenceHorizon);
  const auto metrics = metric_list(section);
  std::vector<WeightSequence> weights;
  for (const auto& w : ctx.config().weights) weights.push_back(weights_from_json(w));

  std::vector<std::string> header{"input", "weights", "C", "eps", "N", "n"};
  for (const auto& m : metrics) header.push_back("res_" + m.label());
  for (const auto& m : metrics) header.push_back("cauchy_" + m.label());
  for (const char* h : {"witness_profile", "witness_defect", "witness_pass", "limit_exact"}) header.emplace_back(h);

  const std::size_t n_inputs = ctx.config().inputs.size(), n_weights = weights.size();
  std::vector<Cell> cells(ctx.seeds().size() * n_inputs * n_weights);
  parallel_for(cells.size(), ctx.jobs(), [&](std::size_t c) {
    const std::size_t s = c / (n_inputs * n_weights), i = (c / n_weights) % n_inputs, w = c % n_weights;
    const Channel& t = ctx.channel(s);
    const Operator x = ctx.input(s, i);
    const WeightSequence& beta = weights[w];
    const BesicovitchReport r = besicovitch_experiment(t, x, beta, horizon, metrics, eps);
    const auto at = profile_map(r.witness);
    const bool pass = r.witness.trace_defect <= eps && r.witness.non_increasing();
    for (std::size_t k = 0; k < r.schedule.size(); ++k) {
      const std::size_t n = r.schedule[k];
      Row row(ctx.prefix(s));
      row.add(i).add(beta.describe()).add(beta.bound()).add(eps).add(horizon).add(n);
      for (const double v : r.residuals[k]) row.add(v);
      if (k < r.cauchy.size())
        for (const double v : r.cauchy[k]) row.add(v);
      else
        row.empty(metrics.size());
      at.count(n) ? row.add(at.at(n)) : row.empty();
      row.add(r.witness.trace_defect).add(pass).add(r.limit_exact);
      cells[c].rows.push_back(row.take());
    }
    const auto cert = certify_besicovitch(beta, default_besicovitch_eps_grid(), horizon);
    json entries = json::array();
    for (const auto& e : cert.entries) entries.push_back({{"eps", e.eps}, {"estimate", e.estimate}});
    cells[c].summary = {{"seed", ctx.seeds()[s]},
                        {"input", i},
                        {"weights", beta.describe()},
                        {"C", beta.bound()},
                        {"limit_exact", r.limit_exact},
                        {"limit", to_json(r.limit)},
                        {"witness", tail_json(r.witness)},
                        {"besicovitch_certificate",
                         {{"horizon", cert.horizon}, {"passed", cert.passed()}, {"entries", entries}}}};
  });
  return collect(with_prefix(header), std::move(cells));
}

// --- norms ------------------------------------------------------------------------

Outcome norms(const Context& ctx) {
  const json section = ctx.config().section("norms");
  const auto p_grid = number_list(section, "p", {1.0, 1.5, 2.0, 3.0});
  std::vector<std::pair<double, double>> pq{{2, 1}, {3, 2}, {1.5, 1}, {2, 4}};
  if (section.contains("lorentz")) pq = section["lorentz"].get<std::vector<std::pair<double, double>>>();
  const std::size_t extra = section.value("random", 10);
  const std::size_t average_n = section.value("average_n", 8);
  const auto contraction_norms =
      norm_list(section, "contraction_norms",
                {NormSpec::lp(1), NormSpec::lp(2), NormSpec::lp(3), NormSpec::uniform(), NormSpec::lorentz(2, 1),
                 NormSpec::lorentz(3, 2)});

  const std::size_t per_seed = ctx.config().inputs.size() + extra;
  std::vector<Cell> cells(ctx.seeds().size() * per_seed);
  parallel_for(cells.size(), ctx.jobs(), [&](std::size_t c) {
    const std::size_t s = c / per_seed, i = c % per_seed;
    const Channel& t = ctx.channel(s);
    Operator x = Operator::zero(ctx.algebra());
    if (i < ctx.config().inputs.size()) {
      x = ctx.input(s, i);
    } else {
      auto rng = CounterRng::for_cell(ctx.seeds()[s], "norms/" + std::to_string(i));
      x = random_operator(ctx.algebra(), rng);
    }
    int failures = 0;
    auto check = [&](const std::string& name, double p, double q, double lhs, double rhs, bool pass) {
      Row row(ctx.prefix(s));
      row.add(i).add(name).add(p).add(q).add(lhs).add(rhs).add(std::abs(lhs - rhs)).add(pass);
      cells[c].rows.push_back(row.take());
      failures += pass ? 0 : 1;
    };
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)); };

    for (const double p : p_grid) {
      const double by_trace = lp_norm(x, p), by_mu = lp_norm_mu(x, p);
      check("lp_trace_vs_mu", p, p, by_trace, by_mu, close(by_trace, by_mu));
      const double diag = lorentz_norm(x, p, p);
      check("lorentz_diagonal", p, p, diag, by_trace, close(diag, by_trace));
    }
    const Projection e = spectral_projection(abs_value(x), Interval::above(0.5 * uniform_norm(x)));
    for (const auto& [p, q] : pq) {
      const double direct = lorentz_norm(e.op(), p, q), closed = projection_lorentz_norm(e.trace_value(), p, q);
      check("projection_closed_form", p, q, direct, closed, close(direct, closed));
    }
    if (t.verified_ds_plus()) {
      const Operator m = ergodic_average(t, x, average_n);
      for (const auto& spec : contraction_norms) {
        const double lhs = norm(m, spec), rhs = norm(x, spec);
        check("average_contraction_" + spec.label(), spec.p, spec.q, lhs, rhs, lhs <= rhs + 1e-9);
      }
      const double half = 0.5 * ctx.algebra()->total_trace();
      check("submajorization", 1.0, 1.0, submajorization_integral(m, half), submajorization_integral(x, half),
            submajorizes(x, m, 1e-10));
    }
    cells[c].summary = {{"seed", ctx.seeds()[s]}, {"input", i}, {"checks", cells[c].rows.size()}, {"failures", failures}};
  });
  return collect(with_prefix({"input", "check", "p", "q", "lhs", "rhs", "error", "pass"}), std::move(cells));
}

// --- boyd -------------------------------------------------------------------------

Outcome boyd(const Context& ctx) {
  const json section = ctx.config().section("boyd");
  std::vector<NormSpec> fallback;
  for (const double p : {1.5, 2.0, 3.0}) {
    fallback.push_back(NormSpec::lp(p));
    for (const double q : {1.0, 2.0}) fallback.push_back(NormSpec::lorentz(p, q));
  }
  const auto specs = norm_list(section, "norms", fallback);
  const auto grid = number_list(section, "grid", default_boyd_grid());
  const double tolerance = section.value("relative_tolerance", 0.05);

  std::vector<Cell> cells(specs.size());
  parallel_for(cells.size(), ctx.jobs(), [&](std::size_t c) {
    const NormSpec& spec = specs[c];
    const BoydEstimate est = boyd_estimate(spec, grid);
    const double p_error = std::abs(est.p_index - spec.p) / spec.p;
    const double q_error = std::abs(est.q_index - spec.p) / spec.p;
    const bool pass = p_error <= tolerance && q_error <= tolerance;
    for (const auto& r : est.rows) {
      Row row(ctx.prefix(0));
      row.add(spec.label()).add(spec.p).add(spec.q).add(r.s).add(r.dilation_norm).add(est.p_index).add(est.q_index).add(
          p_error);
      row.add(pass);
      cells[c].rows.push_back(row.take());
    }
    cells[c].summary = {{"norm", to_json(spec)},     {"label", spec.label()}, {"p_index", est.p_index},
                        {"q_index", est.q_index},    {"p_error", p_error},    {"q_error", q_error},
                        {"pass", pass}};
  });
  return collect(with_prefix({"norm", "p", "q", "s", "dilation_norm", "p_index", "q_index", "p_error", "pass"}),
                 std::move(cells));
}

using Handler = Outcome (*)(const Context&);

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{{"verify-channel", verify_channel}, {"certify", certify},
                                                {"converge", converge},             {"besicovitch", besicovitch},
                                                {"norms", norms},                   {"boyd", boyd}};
  return h;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"verify-channel", "certify", "converge", "besicovitch", "norms", "boyd"};
  return names;
}

int run(const Options& options) {
  const auto handler = handlers().find(options.subcommand);
  if (handler == handlers().end()) {
    std::cerr << "unknown subcommand " << options.subcommand << '\n';
    return kExitInvalidConfig;
  }
  if (options.tolerance) set_tolerance(*options.tolerance);

  std::optional<ExperimentConfig> config;
  std::optional<Outcome> outcome;
  try {
    config.emplace(load_config_file(options.config));
    const Context ctx(*config, options);
    outcome.emplace(handler->second(ctx));
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const json::exception& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidConfig;
  }

  std::filesystem::create_directories(options.out);
  const std::filesystem::path base = std::filesystem::path(options.out) / options.subcommand;
  {
    std::ofstream csv(base.string() + ".csv", std::ios::binary);
    outcome->table.write(csv);
  }
  json summary{{"subcommand", options.subcommand},
               {"config", config->name},
               {"config_hash", hex64(config->hash)},
               {"seeds", options.seed ? std::vector<std::uint64_t>{*options.seed} : config->seeds},
               {"rng", "ctr-splitmix64"},
               {"tolerance", tolerance()},
               {"algebra", to_json(config->algebra)},
               {"algebra_hash", hex64(config->algebra.hash())},
               {"rows", outcome->table.rows()},
               {"checker_failures", outcome->checker_failures},
               {"cells", outcome->cells}};
  if (options.horizon) summary["horizon"] = *options.horizon;
  {
    std::ofstream js(base.string() + ".json", std::ios::binary);
    js << summary.dump(2) << '\n';
  }
  if (outcome->checker_failures > 0) {
    std::cerr << outcome->checker_failures << " witness report(s) failed re-verification\n";
    return kExitCheckerFailure;
  }
  return kExitOk;
}

}  // namespace ncerg::cli
