#pragma once

#include <string>
#include <vector>

#include "dpmix/csv.hpp"
#include "dpmix/dp.hpp"
#include "dpmix/hdp.hpp"

namespace dpmix {

/// Everything needed to reproduce a fit. Seed is mandatory: there is no
/// nondeterministic default.
struct FitConfig {
  std::string kernel_id = "normal";
  std::vector<double> g0_priors;  // empty keeps the kernel defaults
  std::vector<double> mh_step_sizes;
  double alpha_shape = 2.0;
  double alpha_rate = 4.0;
  int iterations = 1000;
  int thinning = 1;
  bool store_samples = true;
  bool update_prior = false;
  int m = 3;
  std::uint64_t seed = 0;
  bool has_seed = false;
  bool scale = false;
  bool fixed_alpha = false;  // pin alpha at alpha_value, skip its update
  double alpha_value = 1.0;
  int group_column = 0;  // hdp-fit only
  std::vector<int> columns;
  bool header = false;

  void validate() const;  // throws ConfigError
};

/// Versioned on-disk model: the config, the final sampler state and its
/// retained history, plus the ingestion transform.
struct ModelArtifact {
  int version = 1;
  FitConfig config;
  ColumnTransform transform;
  DpState state;
};

struct HdpModelArtifact {
  int version = 1;
  FitConfig config;
  ColumnTransform transform;
  HdpState state;
  std::vector<std::string> group_ids;
};

/// Reads a FitConfig from a JSON object; unknown keys are rejected. Used for
/// CLI --config files, whose values the flags override.
FitConfig fit_config_from_json_file(const std::string& path);

std::string artifact_to_json(const ModelArtifact& artifact);
ModelArtifact artifact_from_json(const std::string& text);

std::string hdp_artifact_to_json(const HdpModelArtifact& artifact);
HdpModelArtifact hdp_artifact_from_json(const std::string& text);

void save_artifact(const ModelArtifact& artifact, const std::string& path);
ModelArtifact load_artifact(const std::string& path);

void save_hdp_artifact(const HdpModelArtifact& artifact, const std::string& path);
HdpModelArtifact load_hdp_artifact(const std::string& path);

}  // namespace dpmix
