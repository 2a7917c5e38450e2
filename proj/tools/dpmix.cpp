#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dpmix/commands.hpp"
#include "dpmix/errors.hpp"

namespace {

struct FitCli {
  std::string data_path;
  std::string output_path;
  std::string config_path;
  std::string kernel;
  std::vector<double> g0_priors;
  std::vector<double> mh_steps;
  std::vector<double> alpha_prior;
  int iterations = -1;
  int thinning = -1;
  int m = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool update_prior = false;
  bool scale = false;
  bool header = false;
  double fixed_alpha = -1.0;
  int group_col = 0;
  std::vector<int> columns;
};

void add_fit_flags(CLI::App* cmd, FitCli& cli, bool grouped) {
  cmd->add_option("data", cli.data_path, "Input CSV")->required();
  cmd->add_option("output", cli.output_path, "Output model file")->required();
  cmd->add_option("--config", cli.config_path, "JSON config file");
  cmd->add_option("--kernel", cli.kernel,
                  "Kernel id (normal, mvnormal, mvnormal2, beta, weibull)");
  cmd->add_option("--iterations", cli.iterations, "Sampler iterations");
  cmd->add_option("--thinning", cli.thinning, "Retain every k-th iteration");
  cmd->add_option("--seed", cli.seed, "RNG seed (required)")
      ->each([&cli](const std::string&) { cli.seed_set = true; });
  cmd->add_flag("--update-prior", cli.update_prior,
                "Resample base-measure hyperparameters each iteration");
  cmd->add_option("--alpha-prior", cli.alpha_prior,
                  "Concentration Gamma prior: shape rate")
      ->expected(2);
  cmd->add_option("--g0-priors", cli.g0_priors, "Base-measure parameters");
  cmd->add_option("--mh-steps", cli.mh_steps,
                  "Random-walk step sizes (non-conjugate kernels)");
  cmd->add_option("--m", cli.m, "Auxiliary draws per reassignment");
  cmd->add_flag("--scale", cli.scale, "Standardize columns before fitting");
  cmd->add_flag("--header", cli.header, "Skip the first CSV line");
  cmd->add_option("--fixed-alpha", cli.fixed_alpha,
                  "Pin the concentration at this value");
  cmd->add_option("--columns", cli.columns, "1-based data columns");
  if (grouped) {
    cmd->add_option("--group-col", cli.group_col, "1-based group column");
  }
}

dpmix::FitConfig build_config(const FitCli& cli) {
  dpmix::FitConfig config;
  if (!cli.config_path.empty()) {
    config = dpmix::fit_config_from_json_file(cli.config_path);
  }
  if (!cli.kernel.empty()) config.kernel_id = cli.kernel;
  if (!cli.g0_priors.empty()) config.g0_priors = cli.g0_priors;
  if (!cli.mh_steps.empty()) config.mh_step_sizes = cli.mh_steps;
  if (!cli.alpha_prior.empty()) {
    config.alpha_shape = cli.alpha_prior[0];
    config.alpha_rate = cli.alpha_prior[1];
  }
  if (cli.iterations >= 0) config.iterations = cli.iterations;
  if (cli.thinning >= 0) config.thinning = cli.thinning;
  if (cli.m >= 0) config.m = cli.m;
  if (cli.seed_set) {
    config.seed = cli.seed;
    config.has_seed = true;
  }
  if (cli.update_prior) config.update_prior = true;
  if (cli.scale) config.scale = true;
  if (cli.header) config.header = true;
  if (cli.fixed_alpha >= 0.0) {
    config.fixed_alpha = true;
    config.alpha_value = cli.fixed_alpha;
  }
  if (!cli.columns.empty()) config.columns = cli.columns;
  if (cli.group_col > 0) config.group_column = cli.group_col;
  return config;
}

struct SummarizeCli {
  std::string artifact_path;
  std::string output_path;
  std::string grid = "0:1:101";
  int burnin = 0;
  int thinning = 1;
  double level = 0.95;
};

void add_summarize_flags(CLI::App* cmd, SummarizeCli& cli) {
  cmd->add_option("model", cli.artifact_path, "Fitted model file")->required();
  cmd->add_option("output", cli.output_path, "Output CSV")->required();
  cmd->add_option("--grid", cli.grid, "min:max:count or x1,x2,...");
  cmd->add_option("--burnin", cli.burnin, "Retained samples to discard");
  cmd->add_option("--thinning", cli.thinning, "Keep every k-th retained sample");
  cmd->add_option("--level", cli.level, "Credible-interval level");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet process mixture fitting and summaries"};
  app.require_subcommand(1);

  FitCli fit_cli;
  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit a DP mixture to a CSV");
  add_fit_flags(fit_cmd, fit_cli, false);

  SummarizeCli sum_cli;
  CLI::App* sum_cmd =
      app.add_subcommand("summarize", "Posterior density summary on a grid");
  add_summarize_flags(sum_cmd, sum_cli);

  std::string predict_model, predict_data, predict_out;
  std::uint64_t predict_seed = 0;
  bool predict_seed_set = false;
  CLI::App* predict_cmd =
      app.add_subcommand("predict", "Cluster labels for new data");
  predict_cmd->add_option("model", predict_model, "Fitted model file")->required();
  predict_cmd->add_option("data", predict_data, "New-data CSV")->required();
  predict_cmd->add_option("output", predict_out, "Output labels CSV")->required();
  predict_cmd->add_option("--seed", predict_seed, "RNG seed (required)")
      ->each([&predict_seed_set](const std::string&) { predict_seed_set = true; });

  FitCli hdp_cli;
  CLI::App* hdp_fit_cmd =
      app.add_subcommand("hdp-fit", "Fit a hierarchical DP to grouped data");
  add_fit_flags(hdp_fit_cmd, hdp_cli, true);

  SummarizeCli hdp_sum_cli;
  CLI::App* hdp_sum_cmd =
      app.add_subcommand("hdp-summarize", "Per-group posterior summaries");
  add_summarize_flags(hdp_sum_cmd, hdp_sum_cli);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) {
      return dpmix::cmd_fit(build_config(fit_cli), fit_cli.data_path,
                            fit_cli.output_path, std::cout, std::cerr);
    }
    if (sum_cmd->parsed()) {
      return dpmix::cmd_summarize(
          sum_cli.artifact_path, dpmix::GridSpec::parse(sum_cli.grid),
          sum_cli.burnin, sum_cli.thinning, sum_cli.level, sum_cli.output_path,
          std::cout, std::cerr);
    }
    if (predict_cmd->parsed()) {
      if (!predict_seed_set) {
        std::cerr << "config-error: predict requires --seed\n";
        return dpmix::kExitConfigError;
      }
      return dpmix::cmd_predict(predict_model, predict_data, predict_seed,
                                predict_out, std::cout, std::cerr);
    }
    if (hdp_fit_cmd->parsed()) {
      return dpmix::cmd_hdp_fit(build_config(hdp_cli), hdp_cli.data_path,
                                hdp_cli.output_path, std::cout, std::cerr);
    }
    if (hdp_sum_cmd->parsed()) {
      return dpmix::cmd_hdp_summarize(
          hdp_sum_cli.artifact_path, dpmix::GridSpec::parse(hdp_sum_cli.grid),
          hdp_sum_cli.burnin, hdp_sum_cli.thinning, hdp_sum_cli.level,
          hdp_sum_cli.output_path, std::cout, std::cerr);
    }
  } catch (const dpmix::ConfigError& e) {
    std::cerr << "config-error: " << e.what() << '\n';
    return dpmix::kExitConfigError;
  } catch (const dpmix::DataDomainError& e) {
    std::cerr << "data-error: " << e.what() << '\n';
    return dpmix::kExitDataError;
  }
  return dpmix::kExitConfigError;
}
