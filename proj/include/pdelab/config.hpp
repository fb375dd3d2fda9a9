#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdelab/ann.hpp"
#include "pdelab/costs.hpp"
#include "pdelab/pde.hpp"
#include "pdelab/regress.hpp"
#include "pdelab/surrogate.hpp"

namespace pdelab {

struct LabeledProblem {
  PoissonProblem problem;
  std::string label;

  bool operator==(const LabeledProblem&) const = default;
};

struct RegressionSection {
  SyntheticSpec synthetic;
  /// Load `x,y` samples from this CSV instead of generating them.
  std::optional<std::string> data_csv;

  bool operator==(const RegressionSection&) const = default;
};

struct AnnSection {
  ArchSpec arch{{}, Transfer::tanh, Transfer::purelin};
  /// Explicit starting point for a single-neuron model.
  std::optional<LinearModel> initial;

  bool operator==(const AnnSection&) const = default;
};

struct SplitSection {
  SplitRatios ratios;
  std::uint64_t seed = 0;

  bool operator==(const SplitSection&) const = default;
};

struct DataCurveSection {
  std::vector<std::size_t> sample_counts;
  std::vector<std::uint64_t> seeds;

  bool operator==(const DataCurveSection&) const = default;
};

struct EvalSection {
  EvalOptions options;
  std::optional<DataCurveSection> data_curve;
  std::optional<std::vector<ArchSpec>> arch_sweep;

  bool operator==(const EvalSection&) const = default;
};

struct CostSection {
  std::size_t repetitions = 5;
  std::uint64_t n_predictions = 1000;

  bool operator==(const CostSection&) const = default;
};

struct OutputSection {
  std::string directory = "pdelab_out";
  bool csv = true;
  bool json = false;

  bool operator==(const OutputSection&) const = default;
};

/// One JSON document; every section is optional at parse time and each
/// command checks for the sections it needs. Unknown keys are errors.
struct ExperimentConfig {
  std::vector<LabeledProblem> problems;
  bool problem_present = false;
  std::size_t n_nodes = kDefaultNodes;
  std::optional<RegressionSection> regression;
  std::optional<AnnSection> ann;
  std::optional<ParameterSpace> space;
  std::optional<SplitSection> split;
  std::optional<ArchSpec> arch;
  std::optional<TrainConfig> train;
  std::optional<EvalSection> eval;
  std::optional<CostSection> cost;
  std::optional<CostLedger> ledger;
  OutputSection output;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError with the JSON pointer of the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a file; MissingInputError if it cannot be opened,
/// ConfigError (with line/column) for malformed JSON.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Fully expanded document; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& c);

/// Replaces every seed in the config with `seed`.
void override_seeds(ExperimentConfig& c, std::uint64_t seed);

}  // namespace pdelab
