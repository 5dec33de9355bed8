#ifndef BESOV_EXPERIMENT_HPP
#define BESOV_EXPERIMENT_HPP

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "besov/inference.hpp"
#include "besov/metrics.hpp"

namespace besov {

using Json = nlohmann::ordered_json;

/// Named experiments drive every module from one config tree. See
/// docs/config.md for the schema.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  Json raw;  // full parsed tree, canonical form

  static ExperimentConfig load(const std::filesystem::path& path);
  static ExperimentConfig from_json(Json j);

  /// Structural and admissibility checks; throws with the violated condition.
  void validate() const;

  PriorParams prior() const;
  EllipticProblem problem() const;

  std::uint64_t config_hash() const;
};

struct SyntheticData {
  std::vector<double> y;
  CoefVector truth_coefs;
  std::uint64_t noise_seed = 0;
};

/// Draw (or load) the truth, solve on a 2x finer grid with a 4x larger
/// truncation than the inversion uses, and add N(0, Gamma) noise.
SyntheticData generate_synthetic_data(const ExperimentConfig& cfg);

/// Execute the named experiment, writing CSV/JSON artifacts and a manifest
/// into output_dir. Returns the directory used.
std::filesystem::path run_experiment(const ExperimentConfig& cfg);

/// fnv-1a of a byte string (exposed for the manifest tests).
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace besov

#endif
