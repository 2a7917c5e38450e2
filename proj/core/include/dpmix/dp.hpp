#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dpmix/kernels.hpp"
#include "dpmix/random.hpp"

namespace dpmix {

/// Gamma(shape, rate) prior on a concentration parameter.
struct AlphaPrior {
  double shape = 2.0;
  double rate = 4.0;
};

/// One retained MCMC state: cluster parameters, empirical weights
/// (points per cluster / n), labels and alpha at a stored iteration.
struct RetainedSample {
  std::vector<ComponentParameters> cluster_params;
  Eigen::VectorXd weights;
  std::vector<int> labels;
  double alpha = 0.0;
  int iteration = 0;
};

/// Full sampler state of one DP mixture chain. Single-owner during updates;
/// parallel chains are independent DpState values with split RandomSources.
struct DpState {
  Eigen::MatrixXd data;  // n x d
  MixingDistribution md;
  std::shared_ptr<const Kernel> kernel;
  std::vector<int> labels;  // 0-based cluster indices
  std::vector<ComponentParameters> cluster_params;
  std::vector<int> points_per_cluster;
  double alpha = 1.0;
  AlphaPrior alpha_prior;
  bool alpha_fixed = false;
  int aux_count = 3;       // Algorithm-8 auxiliary draws m
  int mh_param_steps = 1;  // MH steps per cluster in the parameter update
  std::vector<RetainedSample> history;
  RandomSource rng{0};
  MhStats mh_stats;

  int n() const { return static_cast<int>(data.rows()); }
  int cluster_count() const { return static_cast<int>(cluster_params.size()); }
};

struct FitOptions {
  int iterations = 1;
  bool update_prior = false;
  bool store_samples = true;
  int thinning = 1;
  /// When set, one status line per 10% of iterations.
  std::function<void(const std::string&)> progress;
};

struct LabelPrediction {
  std::vector<int> component_indexes;  // 0-based
  std::vector<ComponentParameters> cluster_parameters;
  std::vector<int> points_per_cluster;
  int num_labels = 0;
};

/// All points start in one cluster; its parameter comes from the posterior
/// over the full data (conjugate) or a prior draw refined by 10 MH steps
/// (non-conjugate); alpha is drawn from its prior.
DpState initialise(const Eigen::MatrixXd& data, MixingDistribution md,
                   AlphaPrior alpha_prior, int m, RandomSource rng);

/// One full sweep of label reassignments in data order: Algorithm 4
/// (conjugate) or Algorithm 8 with m auxiliaries (non-conjugate).
void cluster_component_update(DpState& state);

/// Resample every distinct cluster parameter from its conditional posterior.
void cluster_parameter_update(DpState& state);

/// Auxiliary-variable concentration update under the Gamma(a, b) prior.
void update_alpha(DpState& state);

/// Mixture weight on the higher Gamma branch of the alpha posterior.
double alpha_posterior_mix_weight(double a, double b, int k, int n, double z);
/// Alpha draw for a given auxiliary z.
double draw_alpha_given_z(double a, double b, int k, int n, double z,
                          RandomSource& rng);

/// Runs component, parameter and alpha updates per iteration, retaining
/// iterations 1, 1+thinning, 1+2*thinning, ... of this call when
/// store_samples. Previously retained history is never re-thinned.
void fit(DpState& state, const FitOptions& options);

/// Replace the data; each new datum gets a label by one draw from the
/// prediction weights. Clusters receiving no data are dropped. History is
/// preserved.
void change_observations(DpState& state, const Eigen::MatrixXd& new_data);

/// Sequential label prediction for test points; the state is not mutated.
LabelPrediction cluster_label_predict(const DpState& state,
                                      const Eigen::MatrixXd& new_data,
                                      RandomSource& rng);

/// Label/count/table consistency checks; throws std::logic_error on breakage.
void check_invariants(const DpState& state);

}  // namespace dpmix
