#include "dpmix/kernels.hpp"

#include <cmath>
#include <limits>

#include "dpmix/errors.hpp"
#include "kernels_builtin.hpp"

namespace dpmix {

std::vector<ComponentParameters> Kernel::posterior_draw(
    const MixingDistribution& md, const Eigen::MatrixXd& y, int n,
    RandomSource& rng, const ComponentParameters* start, MhStats* stats) const {
  if (n < 1) throw ParameterError("posterior_draw: n must be >= 1");

  auto log_target = [&](const ComponentParameters& theta) {
    double lp = log_prior_density(md, theta);
    if (!std::isfinite(lp)) return -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      lp += log_likelihood(md, y.row(i), theta);
      if (!std::isfinite(lp)) return -std::numeric_limits<double>::infinity();
    }
    return lp;
  };

  ComponentParameters theta = start ? *start : prior_draw(md, rng);
  double lt = log_target(theta);
  std::vector<ComponentParameters> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int step = 0; step < n; ++step) {
    ComponentParameters cand = mh_propose(md, theta, rng);
    double lc = log_target(cand);
    double u = rng.uniform();
    if (stats) ++stats->proposed;
    if (std::log(u) < lc - lt) {
      theta = std::move(cand);
      lt = lc;
      if (stats) ++stats->accepted;
    }
    out.push_back(theta);
  }
  return out;
}

double Kernel::log_predictive(const MixingDistribution& md,
                              const Eigen::RowVectorXd& y) const {
  (void)md;
  (void)y;
  throw UnsupportedOperationError(
      "predictive: not available for a non-conjugate kernel");
}

double Kernel::predictive(const MixingDistribution& md,
                          const Eigen::RowVectorXd& y) const {
  return std::exp(log_predictive(md, y));
}

double Kernel::log_marginal(const MixingDistribution& md,
                            const Eigen::MatrixXd& y) const {
  (void)md;
  (void)y;
  throw UnsupportedOperationError(
      "log_marginal: not available for a non-conjugate kernel");
}

double Kernel::log_prior_density(const MixingDistribution& md,
                                 const ComponentParameters& theta) const {
  (void)md;
  (void)theta;
  throw UnsupportedOperationError(
      "prior_density: not available for a conjugate kernel");
}

ComponentParameters Kernel::mh_propose(const MixingDistribution& md,
                                       const ComponentParameters& old,
                                       RandomSource& rng) const {
  (void)md;
  (void)old;
  (void)rng;
  throw UnsupportedOperationError(
      "mh_propose: not available for a conjugate kernel");
}

MixingDistribution Kernel::prior_parameters_update(
    const MixingDistribution& md,
    const std::vector<ComponentParameters>& cluster_params,
    RandomSource& rng) const {
  (void)cluster_params;
  (void)rng;
  return md;
}

void Kernel::check_support(const MixingDistribution& md,
                           const Eigen::MatrixXd& data) const {
  (void)md;
  (void)data;
}

double likelihood(const Kernel& kernel, const MixingDistribution& md,
                  const Eigen::RowVectorXd& y, const ComponentParameters& theta) {
  double ll = kernel.log_likelihood(md, y, theta);
  return std::isfinite(ll) ? std::exp(ll) : 0.0;
}

double prior_density(const Kernel& kernel, const MixingDistribution& md,
                     const ComponentParameters& theta) {
  double lp = kernel.log_prior_density(md, theta);
  return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

KernelRegistry::KernelRegistry() {
  entries_.emplace_back("normal", std::make_shared<detail::GaussianKernel>());
  entries_.emplace_back("mvnormal", std::make_shared<detail::MvNormalKernel>());
  entries_.emplace_back("mvnormal2", std::make_shared<detail::MvNormalSemiKernel>());
  entries_.emplace_back("beta", std::make_shared<detail::BetaKernel>());
  entries_.emplace_back("weibull", std::make_shared<detail::WeibullKernel>());
}

KernelRegistry& KernelRegistry::instance() {
  static KernelRegistry registry;
  return registry;
}

void KernelRegistry::add(const std::string& id,
                         std::shared_ptr<const Kernel> kernel) {
  for (auto& [key, value] : entries_) {
    if (key == id) {
      value = std::move(kernel);
      return;
    }
  }
  entries_.emplace_back(id, std::move(kernel));
}

std::shared_ptr<const Kernel> KernelRegistry::find(const std::string& id) const {
  for (const auto& [key, value] : entries_) {
    if (key == id) return value;
  }
  throw ConfigError("unknown kernel id: " + id);
}

bool KernelRegistry::contains(const std::string& id) const {
  for (const auto& [key, value] : entries_) {
    if (key == id) return true;
  }
  return false;
}

MixingDistribution default_mixing(const std::string& kernel_id, int dim,
                                  double support_bound) {
  MixingDistribution md;
  md.kernel_id = kernel_id;
  if (kernel_id == "normal") {
    md.conjugacy = Conjugacy::Conjugate;
    md.g0_priors = {0.0, 1.0, 1.0, 1.0};  // mu0, kappa0, alpha0, beta0
    return md;
  }
  if (kernel_id == "mvnormal") {
    if (dim < 1) throw ConfigError("mvnormal: dimension must be >= 1");
    md.conjugacy = Conjugacy::Conjugate;
    md.fixed_constants = {static_cast<double>(dim)};
    // kappa0, nu0, mu0 (d entries), Phi0 (row-major d*d)
    md.g0_priors = {static_cast<double>(dim), static_cast<double>(dim)};
    for (int i = 0; i < dim; ++i) md.g0_priors.push_back(0.0);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) md.g0_priors.push_back(i == j ? 1.0 : 0.0);
    }
    return md;
  }
  if (kernel_id == "mvnormal2") {
    if (dim < 1) throw ConfigError("mvnormal2: dimension must be >= 1");
    md.conjugacy = Conjugacy::NonConjugate;
    md.fixed_constants = {static_cast<double>(dim)};
    // mu0 (d), Sigma0 (d*d), nu0, Phi0 (d*d)
    for (int i = 0; i < dim; ++i) md.g0_priors.push_back(0.0);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) md.g0_priors.push_back(i == j ? 1.0 : 0.0);
    }
    md.g0_priors.push_back(static_cast<double>(dim));
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) md.g0_priors.push_back(i == j ? 1.0 : 0.0);
    }
    md.mh_step_sizes = {0.1};
    return md;
  }
  if (kernel_id == "beta") {
    if (!(support_bound > 0.0)) throw ConfigError("beta: support bound T must be > 0");
    md.conjugacy = Conjugacy::NonConjugate;
    md.g0_priors = {2.0, 8.0};  // alpha0, beta0
    md.mh_step_sizes = {0.1, 0.1};
    md.hyper_prior_parameters = {1.0, 0.125};
    md.fixed_constants = {support_bound};
    return md;
  }
  if (kernel_id == "weibull") {
    md.conjugacy = Conjugacy::NonConjugate;
    md.g0_priors = {6.0, 2.0, 0.5};  // phi, alpha (fixed shape), beta
    md.mh_step_sizes = {0.1, 0.1};
    md.hyper_prior_parameters = {6.0, 2.0, 1.0, 0.5};  // xm, k, alpha0, beta0
    return md;
  }
  throw ConfigError("no default parameterization for kernel id: " + kernel_id);
}

WeibullHyperPosteriors weibull_hyper_posteriors(
    const MixingDistribution& md,
    const std::vector<ComponentParameters>& cluster_params) {
  if (md.hyper_prior_parameters.size() != 4) {
    throw ParameterError("weibull_hyper_posteriors: expected 4 hyper-prior parameters");
  }
  if (cluster_params.empty()) {
    throw ParameterError("weibull_hyper_posteriors: cluster parameters must be nonempty");
  }
  double xm = md.hyper_prior_parameters[0];
  double k = md.hyper_prior_parameters[1];
  double a0 = md.hyper_prior_parameters[2];
  double b0 = md.hyper_prior_parameters[3];
  double fixed_shape = md.g0_priors.at(1);

  double max_a = xm;
  double sum_inv_b = 0.0;
  for (const auto& theta : cluster_params) {
    max_a = std::max(max_a, theta.scalar(0));
    sum_inv_b += 1.0 / theta.scalar(1);
  }
  double nc = static_cast<double>(cluster_params.size());
  return {max_a, k + nc, a0 + nc * fixed_shape, b0 + sum_inv_b};
}

}  // namespace dpmix
