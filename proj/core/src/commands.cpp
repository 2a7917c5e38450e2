#include "dpmix/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "dpmix/errors.hpp"
#include "dpmix/measure.hpp"

namespace dpmix {

GridSpec GridSpec::linear(double min, double max, int count) {
  if (count < 1 || !(max > min)) {
    throw ConfigError("grid: need max > min and count >= 1");
  }
  GridSpec g;
  if (count == 1) {
    g.points = {min};
    return g;
  }
  double step = (max - min) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) {
    g.points.push_back(min + step * static_cast<double>(i));
  }
  return g;
}

GridSpec GridSpec::parse(const std::string& text) {
  char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::vector<double> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, sep)) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ConfigError("grid: malformed value '" + token + "'");
    }
  }
  if (sep == ':') {
    if (values.size() != 3) throw ConfigError("grid: spec is min:max:count");
    double count = values[2];
    if (count != std::floor(count)) throw ConfigError("grid: count must be an integer");
    return linear(values[0], values[1], static_cast<int>(count));
  }
  if (values.empty()) throw ConfigError("grid: empty point list");
  GridSpec g;
  g.points = std::move(values);
  return g;
}

namespace {

int run_guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const InsufficientSamplesError& e) {
    err << "insufficient-samples: " << e.what() << '\n';
    return kExitInsufficientSamples;
  } catch (const DataDomainError& e) {
    err << "data-error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const ConfigError& e) {
    err << "config-error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParameterError& e) {
    err << "config-error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const UnsupportedOperationError& e) {
    err << "config-error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

MixingDistribution mixing_from_config(const FitConfig& config,
                                      const Eigen::MatrixXd& data) {
  double support_bound = 1.0;
  if (config.kernel_id == "beta") {
    support_bound = std::max(1.0, data.maxCoeff());
  }
  MixingDistribution md = default_mixing(
      config.kernel_id, static_cast<int>(data.cols()), support_bound);
  if (!config.g0_priors.empty()) {
    if (config.g0_priors.size() != md.g0_priors.size()) {
      throw ConfigError("config: kernel '" + config.kernel_id + "' expects " +
                        std::to_string(md.g0_priors.size()) +
                        " base-measure parameters, got " +
                        std::to_string(config.g0_priors.size()));
    }
    md.g0_priors = config.g0_priors;
  }
  if (!config.mh_step_sizes.empty()) {
    if (config.mh_step_sizes.size() != md.mh_step_sizes.size()) {
      throw ConfigError("config: kernel '" + config.kernel_id + "' expects " +
                        std::to_string(md.mh_step_sizes.size()) +
                        " MH step sizes, got " +
                        std::to_string(config.mh_step_sizes.size()));
    }
    md.mh_step_sizes = config.mh_step_sizes;
  }
  return md;
}

CsvData ingest_for(const FitConfig& config, const std::string& data_path,
                   bool grouped) {
  CsvOptions opts;
  opts.columns = config.columns;
  opts.header = config.header;
  opts.standardize = config.scale;
  opts.group_column = grouped ? config.group_column : 0;
  if (grouped && config.group_column < 1) {
    throw ConfigError("config: hdp-fit requires --group-col");
  }
  return ingest_csv(data_path, opts);
}

void print_fit_diagnostics(const DpState& state, std::ostream& out) {
  out << "clusters: " << state.cluster_count() << '\n';
  out << "alpha: " << state.alpha << '\n';
  if (state.md.conjugacy == Conjugacy::NonConjugate) {
    out << "acceptance-rate: " << state.mh_stats.rate()
        << " (target 0.234)" << '\n';
  }
}

void write_summary_csv(const PosteriorSummaryTable& table,
                       const std::string& path) {
  write_csv(path, {"x", "Mean", "Median", "Lower", "Upper"},
            {table.x, table.mean, table.median, table.lower, table.upper});
}

std::string group_output_path(const std::string& output_path,
                              const std::string& group_id) {
  std::size_t dot = output_path.rfind('.');
  std::size_t slash = output_path.find_last_of('/');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash)) {
    return output_path + "_" + group_id;
  }
  return output_path.substr(0, dot) + "_" + group_id + output_path.substr(dot);
}

}  // namespace

int cmd_fit(const FitConfig& config, const std::string& data_path,
            const std::string& output_path, std::ostream& out,
            std::ostream& err) {
  return run_guarded(err, [&] {
    config.validate();
    CsvData csv = ingest_for(config, data_path, false);
    MixingDistribution md = mixing_from_config(config, csv.data);
    DpState state = initialise(csv.data, md, {config.alpha_shape, config.alpha_rate},
                               config.m, RandomSource(config.seed));
    if (config.fixed_alpha) {
      state.alpha = config.alpha_value;
      state.alpha_fixed = true;
    }
    FitOptions options;
    options.iterations = config.iterations;
    options.update_prior = config.update_prior;
    options.store_samples = config.store_samples;
    options.thinning = config.thinning;
    fit(state, options);
    print_fit_diagnostics(state, out);

    ModelArtifact artifact;
    artifact.config = config;
    artifact.transform = csv.transform;
    artifact.state = std::move(state);
    save_artifact(artifact, output_path);
  });
}

int cmd_summarize(const std::string& artifact_path, const GridSpec& grid,
                  int burnin, int thinning, double level,
                  const std::string& output_path, std::ostream& out,
                  std::ostream& err) {
  return run_guarded(err, [&] {
    ModelArtifact artifact = load_artifact(artifact_path);
    PosteriorSummaryTable table =
        posterior_summary(artifact.state, grid.points, burnin, thinning, level);
    write_summary_csv(table, output_path);
    out << "rows: " << table.x.size() << '\n';
  });
}

int cmd_predict(const std::string& artifact_path, const std::string& data_path,
                std::uint64_t seed, const std::string& output_path,
                std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    ModelArtifact artifact = load_artifact(artifact_path);
    CsvOptions opts;
    opts.columns = artifact.config.columns;
    opts.header = artifact.config.header;
    CsvData csv = ingest_csv(data_path, opts);
    Eigen::MatrixXd scaled = artifact.transform.apply(csv.data);
    artifact.state.kernel->check_support(artifact.state.md, scaled);

    RandomSource rng(seed);
    LabelPrediction pred = cluster_label_predict(artifact.state, scaled, rng);
    std::vector<double> row_index, label;
    for (std::size_t i = 0; i < pred.component_indexes.size(); ++i) {
      row_index.push_back(static_cast<double>(i + 1));
      label.push_back(static_cast<double>(pred.component_indexes[i] + 1));
    }
    write_csv(output_path, {"row", "label"}, {row_index, label});
    out << "numLabels: " << pred.num_labels << '\n';
  });
}

int cmd_hdp_fit(const FitConfig& config, const std::string& data_path,
                const std::string& output_path, std::ostream& out,
                std::ostream& err) {
  return run_guarded(err, [&] {
    config.validate();
    CsvData csv = ingest_for(config, data_path, true);
    std::vector<Eigen::MatrixXd> groups = split_groups(csv);
    MixingDistribution md = mixing_from_config(config, csv.data);
    HdpState state =
        hdp_initialise(groups, md, {config.alpha_shape, config.alpha_rate},
                       {config.alpha_shape, config.alpha_rate},
                       RandomSource(config.seed));
    state.aux_count = config.m;
    if (config.fixed_alpha) {
      state.concentrations_fixed = true;
      state.gamma = config.alpha_value;
      for (auto& group : state.groups) group.alpha = config.alpha_value;
    }
    hdp_fit(state, config.iterations);

    out << "groups: " << state.groups.size() << '\n';
    out << "dishes: " << state.dish_count() << '\n';
    out << "gamma: " << state.gamma << '\n';
    if (state.md.conjugacy == Conjugacy::NonConjugate) {
      out << "acceptance-rate: " << state.mh_stats.rate()
          << " (target 0.234)" << '\n';
    }

    HdpModelArtifact artifact;
    artifact.config = config;
    artifact.transform = csv.transform;
    artifact.group_ids = csv.group_ids;
    artifact.state = std::move(state);
    save_hdp_artifact(artifact, output_path);
  });
}

int cmd_hdp_summarize(const std::string& artifact_path, const GridSpec& grid,
                      int burnin, int thinning, double level,
                      const std::string& output_path, std::ostream& out,
                      std::ostream& err) {
  return run_guarded(err, [&] {
    HdpModelArtifact artifact = load_hdp_artifact(artifact_path);
    for (std::size_t g = 0; g < artifact.state.groups.size(); ++g) {
      PosteriorSummaryTable table = hdp_posterior_summary(
          artifact.state, static_cast<int>(g), grid.points, burnin, thinning, level);
      std::string path = group_output_path(output_path, artifact.group_ids[g]);
      write_summary_csv(table, path);
      out << "group " << artifact.group_ids[g] << ": " << path << '\n';
    }
  });
}

}  // namespace dpmix
