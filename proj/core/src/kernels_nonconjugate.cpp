// Beta and Weibull mixture kernels (non-conjugate, Metropolis-within-Gibbs).

#include <cmath>
#include <limits>
#include <string>

#include "dpmix/distributions.hpp"
#include "dpmix/errors.hpp"
#include "kernels_builtin.hpp"

namespace dpmix::detail {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kBoundaryClamp = 1e-10;

double beta_support_bound(const MixingDistribution& md) {
  if (md.fixed_constants.empty() || !(md.fixed_constants[0] > 0.0)) {
    throw ParameterError("beta kernel: support bound T missing from fixed_constants");
  }
  return md.fixed_constants[0];
}

double mh_step(const MixingDistribution& md, std::size_t i) {
  if (i >= md.mh_step_sizes.size()) {
    throw ParameterError("non-conjugate kernel: missing mh step size");
  }
  return md.mh_step_sizes[i];
}

}  // namespace

double BetaKernel::log_likelihood(const MixingDistribution& md,
                                  const Eigen::RowVectorXd& y,
                                  const ComponentParameters& theta) const {
  double T = beta_support_bound(md);
  double mu = theta.scalar(0);
  double nu = theta.scalar(1);
  if (!(mu >= 0.0 && mu <= T && nu > 0.0)) return kNegInf;
  double s1 = mu * nu / T;
  double s2 = nu * (1.0 - mu / T);
  if (!(s1 > 0.0 && s2 > 0.0)) return kNegInf;
  double x = y(0);
  if (x < 0.0 || x > T) return kNegInf;
  // Evaluation at the support edges is clamped slightly inside so boundary
  // grid points stay finite.
  x = std::min(std::max(x, kBoundaryClamp), T - kBoundaryClamp);
  return (s1 - 1.0) * std::log(x) + (s2 - 1.0) * std::log(T - x) -
         (std::lgamma(s1) + std::lgamma(s2) - std::lgamma(s1 + s2)) -
         (nu - 1.0) * std::log(T);
}

ComponentParameters BetaKernel::prior_draw(const MixingDistribution& md,
                                           RandomSource& rng) const {
  double T = beta_support_bound(md);
  double a0 = md.g0_priors.at(0);
  double b0 = md.g0_priors.at(1);
  double mu = rng.uniform(0.0, T);
  double nu = 1.0 / rng.gamma(a0, b0);
  return ComponentParameters::from_scalars({mu, nu});
}

double BetaKernel::log_prior_density(const MixingDistribution& md,
                                     const ComponentParameters& theta) const {
  double T = beta_support_bound(md);
  double mu = theta.scalar(0);
  double nu = theta.scalar(1);
  if (!(mu >= 0.0 && mu <= T) || !(nu > 0.0)) return kNegInf;
  return -std::log(T) +
         logpdf(DistSpec::inverse_gamma(md.g0_priors.at(0), md.g0_priors.at(1)), nu);
}

ComponentParameters BetaKernel::mh_propose(const MixingDistribution& md,
                                           const ComponentParameters& old,
                                           RandomSource& rng) const {
  // The mean walks freely; proposals outside [0, T] get zero prior density.
  // The precision is positive, so it reflects.
  double mu = old.scalar(0) + mh_step(md, 0) * rng.normal();
  double nu = std::abs(old.scalar(1) + mh_step(md, 1) * rng.normal());
  return ComponentParameters::from_scalars({mu, nu});
}

MixingDistribution BetaKernel::prior_parameters_update(
    const MixingDistribution& md,
    const std::vector<ComponentParameters>& cluster_params,
    RandomSource& rng) const {
  if (cluster_params.empty() || md.hyper_prior_parameters.size() != 2) return md;
  double a = md.hyper_prior_parameters[0];
  double b = md.hyper_prior_parameters[1];
  double a0 = md.g0_priors.at(0);
  double sum_inv_nu = 0.0;
  for (const auto& theta : cluster_params) sum_inv_nu += 1.0 / theta.scalar(1);
  double nc = static_cast<double>(cluster_params.size());
  MixingDistribution out = md;
  out.g0_priors[1] = rng.gamma(a + nc * a0, b + sum_inv_nu);
  return out;
}

void BetaKernel::check_support(const MixingDistribution& md,
                               const Eigen::MatrixXd& data) const {
  double T = beta_support_bound(md);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    double x = data(i, 0);
    if (!(x >= 0.0 && x <= T)) {
      throw DataDomainError("beta kernel: datum at row " + std::to_string(i) +
                            " lies outside [0, " + std::to_string(T) + "]");
    }
  }
}

double WeibullKernel::log_likelihood(const MixingDistribution& md,
                                     const Eigen::RowVectorXd& y,
                                     const ComponentParameters& theta) const {
  (void)md;
  double a = theta.scalar(0);
  double b = theta.scalar(1);
  double x = y(0);
  if (!(a > 0.0 && b > 0.0) || x <= 0.0) return kNegInf;
  return std::log(a) - std::log(b) + (a - 1.0) * std::log(x) - std::pow(x, a) / b;
}

ComponentParameters WeibullKernel::prior_draw(const MixingDistribution& md,
                                              RandomSource& rng) const {
  double phi = md.g0_priors.at(0);
  double alpha = md.g0_priors.at(1);
  double beta = md.g0_priors.at(2);
  double a = rng.uniform(0.0, phi);
  double b = 1.0 / rng.gamma(alpha, beta);
  return ComponentParameters::from_scalars({a, b});
}

double WeibullKernel::log_prior_density(const MixingDistribution& md,
                                        const ComponentParameters& theta) const {
  double phi = md.g0_priors.at(0);
  double a = theta.scalar(0);
  double b = theta.scalar(1);
  if (!(a > 0.0 && a <= phi) || !(b > 0.0)) return kNegInf;
  return -std::log(phi) +
         logpdf(DistSpec::inverse_gamma(md.g0_priors.at(1), md.g0_priors.at(2)), b);
}

ComponentParameters WeibullKernel::mh_propose(const MixingDistribution& md,
                                              const ComponentParameters& old,
                                              RandomSource& rng) const {
  double a = std::abs(old.scalar(0) + mh_step(md, 0) * rng.normal());
  double b = std::abs(old.scalar(1) + mh_step(md, 1) * rng.normal());
  return ComponentParameters::from_scalars({a, b});
}

MixingDistribution WeibullKernel::prior_parameters_update(
    const MixingDistribution& md,
    const std::vector<ComponentParameters>& cluster_params,
    RandomSource& rng) const {
  if (cluster_params.empty() || md.hyper_prior_parameters.size() != 4) return md;
  WeibullHyperPosteriors post = weibull_hyper_posteriors(md, cluster_params);
  MixingDistribution out = md;
  out.g0_priors[0] = sample(DistSpec::pareto(post.pareto_xm, post.pareto_k), rng);
  out.g0_priors[2] = rng.gamma(post.gamma_shape, post.gamma_rate);
  return out;
}

void WeibullKernel::check_support(const MixingDistribution& md,
                                  const Eigen::MatrixXd& data) const {
  (void)md;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (!(data(i, 0) > 0.0)) {
      throw DataDomainError("weibull kernel: datum at row " + std::to_string(i) +
                            " is not strictly positive");
    }
  }
}

}  // namespace dpmix::detail
