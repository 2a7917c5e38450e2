#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "dpmix/distributions.hpp"
#include "dpmix/random.hpp"

namespace dpmix {

enum class Conjugacy { Conjugate, NonConjugate };

/// A kernel specification: which mixture kernel, its base-measure parameters,
/// Metropolis-Hastings step sizes (non-conjugate only), hyper-prior
/// parameters, and fixed constants such as the Beta support bound T.
/// Immutable after construction; hyper-updates return a new value.
struct MixingDistribution {
  std::string kernel_id;
  Conjugacy conjugacy = Conjugacy::Conjugate;
  std::vector<double> g0_priors;
  std::vector<double> mh_step_sizes;
  std::vector<double> hyper_prior_parameters;
  std::vector<double> fixed_constants;
};

/// Parameter vector of one mixture component: an ordered list of arrays, one
/// per kernel parameter. A scalar parameter is a 1x1 matrix. Equality across
/// components is identity-by-index in the cluster table, never a
/// floating-point comparison.
struct ComponentParameters {
  std::vector<Eigen::MatrixXd> values;

  double scalar(std::size_t i) const { return values.at(i)(0, 0); }

  static ComponentParameters from_scalars(std::initializer_list<double> v) {
    ComponentParameters out;
    for (double x : v) out.values.push_back(Eigen::MatrixXd::Constant(1, 1, x));
    return out;
  }
};

/// Accept/propose counters for random-walk updates.
struct MhStats {
  long long proposed = 0;
  long long accepted = 0;

  double rate() const {
    return proposed > 0 ? static_cast<double>(accepted) / proposed : 0.0;
  }
  MhStats& operator+=(const MhStats& o) {
    proposed += o.proposed;
    accepted += o.accepted;
    return *this;
  }
};

/// Behavioral interface every mixture kernel implements. Conjugate kernels
/// provide predictive() and exact posterior_draw(); non-conjugate kernels
/// provide log_prior_density() and mh_propose() and inherit the random-walk
/// posterior_draw() from this base.
class Kernel {
public:
  virtual ~Kernel() = default;

  /// Log kernel density log k(y | theta). Parameters outside their domain
  /// yield -infinity (zero density) rather than an error, so rejected MH
  /// proposals are handled uniformly.
  virtual double log_likelihood(const MixingDistribution& md,
                                const Eigen::RowVectorXd& y,
                                const ComponentParameters& theta) const = 0;

  /// One i.i.d. draw from the base measure G0.
  virtual ComponentParameters prior_draw(const MixingDistribution& md,
                                         RandomSource& rng) const = 0;

  /// n draws targeting G0(theta) prod_j k(y_j | theta). Conjugate kernels
  /// draw exactly from the closed-form posterior; the default implementation
  /// runs n Metropolis-Hastings steps from `start` (or a prior draw) and
  /// returns the chain states.
  virtual std::vector<ComponentParameters> posterior_draw(
      const MixingDistribution& md, const Eigen::MatrixXd& y, int n,
      RandomSource& rng, const ComponentParameters* start = nullptr,
      MhStats* stats = nullptr) const;

  /// Marginal density of y under the prior: integral of k(y|theta) dG0.
  /// Conjugate kernels only.
  virtual double predictive(const MixingDistribution& md,
                            const Eigen::RowVectorXd& y) const;
  virtual double log_predictive(const MixingDistribution& md,
                                const Eigen::RowVectorXd& y) const;

  /// Joint marginal likelihood of a data block under G0. Conjugate kernels
  /// only.
  virtual double log_marginal(const MixingDistribution& md,
                              const Eigen::MatrixXd& y) const;

  /// G0 log-density at theta. Non-conjugate kernels only.
  virtual double log_prior_density(const MixingDistribution& md,
                                   const ComponentParameters& theta) const;

  /// Random-walk candidate: each parameter perturbed by h N(0,1), with
  /// positive-domain parameters reflected by absolute value.
  virtual ComponentParameters mh_propose(const MixingDistribution& md,
                                         const ComponentParameters& old,
                                         RandomSource& rng) const;

  /// Resample base-measure hyperparameters given the distinct cluster
  /// parameters. Kernels without hyper-updates return md unchanged.
  virtual MixingDistribution prior_parameters_update(
      const MixingDistribution& md,
      const std::vector<ComponentParameters>& cluster_params,
      RandomSource& rng) const;

  /// Throws DataDomainError naming the offending row when a datum lies
  /// outside the kernel support.
  virtual void check_support(const MixingDistribution& md,
                             const Eigen::MatrixXd& data) const;
};

/// Linear-density convenience wrappers.
double likelihood(const Kernel& kernel, const MixingDistribution& md,
                  const Eigen::RowVectorXd& y, const ComponentParameters& theta);
double prior_density(const Kernel& kernel, const MixingDistribution& md,
                     const ComponentParameters& theta);

/// Kernel lookup by id. The CLI and user-defined extensions register and
/// select kernels by name; built-in kernels ("normal", "mvnormal",
/// "mvnormal2", "beta", "weibull") are registered on first access.
class KernelRegistry {
public:
  static KernelRegistry& instance();

  void add(const std::string& id, std::shared_ptr<const Kernel> kernel);
  std::shared_ptr<const Kernel> find(const std::string& id) const;
  bool contains(const std::string& id) const;

private:
  KernelRegistry();
  std::vector<std::pair<std::string, std::shared_ptr<const Kernel>>> entries_;
};

/// Default MixingDistribution for a built-in kernel. `dim` is the data
/// dimension (multivariate kernels), `support_bound` the Beta T.
MixingDistribution default_mixing(const std::string& kernel_id, int dim = 1,
                                  double support_bound = 1.0);

// --- Conjugate update formulas, exposed for direct checking. ---

/// Normal-inverse-gamma parameters (mu, kappa, alpha, beta). Gamma-type
/// parameters are shape-rate throughout.
struct NigParams {
  double mu, kappa, alpha, beta;
};
NigParams nig_posterior(const NigParams& prior, const Eigen::VectorXd& y);

/// Normal-inverse-Wishart parameters (mu, kappa, nu, phi).
struct NiwParams {
  Eigen::VectorXd mu;
  double kappa, nu;
  Eigen::MatrixXd phi;
};
NiwParams niw_posterior(const NiwParams& prior, const Eigen::MatrixXd& y);

/// Posterior hyper-parameters of the Weibull base measure given cluster
/// parameters: Pareto(xm', k') for the shape bound and Gamma(a', b') for the
/// inverse-gamma rate.
struct WeibullHyperPosteriors {
  double pareto_xm, pareto_k;
  double gamma_shape, gamma_rate;
};
WeibullHyperPosteriors weibull_hyper_posteriors(
    const MixingDistribution& md,
    const std::vector<ComponentParameters>& cluster_params);

}  // namespace dpmix
