#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "ncerg/algebra.hpp"
#include "ncerg/dynamics.hpp"
#include "ncerg/maximal.hpp"
#include "ncerg/ncnorms.hpp"
#include "ncerg/rng.hpp"
#include "ncerg/weights.hpp"

namespace ncerg {

using json = nlohmann::json;

/// Malformed or schema-violating configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);
/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

/// %.17g, with "nan", "inf" and "-inf" spelled out.
std::string format_double(double v);

// --- JSON ---------------------------------------------------------------------

json to_json(const AlgebraSpec& spec);
AlgebraSpec algebra_from_json(const json& j);

/// {"blocks": [[[re, im], ...row-major...], ...]}.
json to_json(const Operator& x);
Operator operator_from_json(const AlgebraPtr& algebra, const json& j);

json to_json(const DsReport& r);
json to_json(const WitnessReport& r);
json to_json(const NormSpec& spec);
NormSpec norm_from_json(const json& j);

/// Channel from a ChannelSpec. Entries without explicit data are drawn from
/// the stream for (seed, label); an explicit "seed" in the spec wins.
Channel channel_from_json(const AlgebraPtr& algebra, const json& j, std::uint64_t seed,
                          const std::string& label = "channel");

/// WeightSequence from a WeightSpec; "C" declares a bound above the certified one.
WeightSequence weights_from_json(const json& j);

/// Operator spec: {"kind": "explicit", "blocks": ...}, {"kind": "diagonal", "values": [...]}
/// or {"kind": "random", "ensemble": "positive"|"hermitian"|"general"|"diagonal"}.
Operator input_from_json(const AlgebraPtr& algebra, const json& j, CounterRng& rng);

// --- configs --------------------------------------------------------------------

struct ExperimentConfig {
  explicit ExperimentConfig(AlgebraSpec spec) : algebra(std::move(spec)) {}

  json raw;
  std::string name;
  std::vector<std::uint64_t> seeds;
  std::size_t horizon = kDefaultHorizon;
  AlgebraSpec algebra;
  json channel;
  std::vector<json> inputs;
  std::vector<json> weights;
  /// FNV-1a of the compact dump of raw.
  std::uint64_t hash = 0;

  /// Section for a subcommand, or an empty object.
  [[nodiscard]] json section(const std::string& name) const;
};

/// Validates and unpacks a config document. Throws ConfigError.
ExperimentConfig load_config(const json& doc);
ExperimentConfig load_config_file(const std::string& path);

// --- CSV ----------------------------------------------------------------------

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  /// Starts a new row; values are appended with the add_* calls.
  CsvTable& row();
  CsvTable& add(const std::string& s);
  CsvTable& add(double v);
  CsvTable& add(std::uint64_t v);
  CsvTable& add(bool v);
  CsvTable& add_empty();

  [[nodiscard]] std::size_t rows() const { return rows_.size(); }
  [[nodiscard]] const std::vector<std::string>& header() const { return header_; }
  /// Throws when a row's width differs from the header.
  void write(std::ostream& out) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace ncerg
