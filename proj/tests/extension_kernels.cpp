#include "extension_kernels.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dpmix/distributions.hpp"
#include "dpmix/errors.hpp"

namespace dpmix::test {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

bool is_count(double x) { return x >= 0.0 && x == std::floor(x); }

double step(const MixingDistribution& md, std::size_t i) {
  return md.mh_step_sizes.at(i);
}

}  // namespace

double PoissonKernel::log_likelihood(const MixingDistribution& md,
                                     const Eigen::RowVectorXd& y,
                                     const ComponentParameters& theta) const {
  (void)md;
  double lambda = theta.scalar(0);
  double x = y(0);
  if (!(lambda > 0.0) || !is_count(x)) return kNegInf;
  return x * std::log(lambda) - lambda - std::lgamma(x + 1.0);
}

ComponentParameters PoissonKernel::prior_draw(const MixingDistribution& md,
                                              RandomSource& rng) const {
  return ComponentParameters::from_scalars(
      {rng.gamma(md.g0_priors.at(0), md.g0_priors.at(1))});
}

std::vector<ComponentParameters> PoissonKernel::posterior_draw(
    const MixingDistribution& md, const Eigen::MatrixXd& y, int n,
    RandomSource& rng, const ComponentParameters* start, MhStats* stats) const {
  (void)start;
  (void)stats;
  double shape = md.g0_priors.at(0) + y.sum();
  double rate = md.g0_priors.at(1) + static_cast<double>(y.rows());
  std::vector<ComponentParameters> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(ComponentParameters::from_scalars({rng.gamma(shape, rate)}));
  }
  return out;
}

double PoissonKernel::log_predictive(const MixingDistribution& md,
                                     const Eigen::RowVectorXd& y) const {
  Eigen::MatrixXd block(1, 1);
  block(0, 0) = y(0);
  return log_marginal(md, block);
}

double PoissonKernel::log_marginal(const MixingDistribution& md,
                                   const Eigen::MatrixXd& y) const {
  double a0 = md.g0_priors.at(0);
  double b0 = md.g0_priors.at(1);
  double sum = 0.0;
  double log_fact = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    if (!is_count(y(i, 0))) return kNegInf;
    sum += y(i, 0);
    log_fact += std::lgamma(y(i, 0) + 1.0);
  }
  double n = static_cast<double>(y.rows());
  return a0 * std::log(b0) - std::lgamma(a0) + std::lgamma(a0 + sum) -
         (a0 + sum) * std::log(b0 + n) - log_fact;
}

void PoissonKernel::check_support(const MixingDistribution& md,
                                  const Eigen::MatrixXd& data) const {
  (void)md;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (!is_count(data(i, 0))) {
      throw DataDomainError("poisson kernel: datum at row " + std::to_string(i) +
                            " is not a nonnegative integer");
    }
  }
}

double GammaKernel::log_likelihood(const MixingDistribution& md,
                                   const Eigen::RowVectorXd& y,
                                   const ComponentParameters& theta) const {
  (void)md;
  double shape = theta.scalar(0);
  double rate = theta.scalar(1);
  double x = y(0);
  if (!(shape > 0.0 && rate > 0.0) || x <= 0.0) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

ComponentParameters GammaKernel::prior_draw(const MixingDistribution& md,
                                            RandomSource& rng) const {
  return ComponentParameters::from_scalars(
      {rng.exponential(md.g0_priors.at(0)), rng.exponential(md.g0_priors.at(1))});
}

double GammaKernel::log_prior_density(const MixingDistribution& md,
                                      const ComponentParameters& theta) const {
  double shape = theta.scalar(0);
  double rate = theta.scalar(1);
  if (!(shape > 0.0 && rate > 0.0)) return kNegInf;
  double r1 = md.g0_priors.at(0);
  double r2 = md.g0_priors.at(1);
  return std::log(r1) - r1 * shape + std::log(r2) - r2 * rate;
}

ComponentParameters GammaKernel::mh_propose(const MixingDistribution& md,
                                            const ComponentParameters& old,
                                            RandomSource& rng) const {
  return ComponentParameters::from_scalars(
      {std::abs(old.scalar(0) + step(md, 0) * rng.normal()),
       std::abs(old.scalar(1) + step(md, 1) * rng.normal())});
}

void GammaKernel::check_support(const MixingDistribution& md,
                                const Eigen::MatrixXd& data) const {
  (void)md;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (!(data(i, 0) > 0.0)) {
      throw DataDomainError("gamma kernel: datum at row " + std::to_string(i) +
                            " is not strictly positive");
    }
  }
}

double CensoredWeibullKernel::log_likelihood(const MixingDistribution& md,
                                             const Eigen::RowVectorXd& y,
                                             const ComponentParameters& theta) const {
  (void)md;
  double a = theta.scalar(0);
  double b = theta.scalar(1);
  double x = y(0);
  double event = y(1);
  if (!(a > 0.0 && b > 0.0) || x <= 0.0) return kNegInf;
  if (event != 0.0 && event != 1.0) return kNegInf;
  double log_survival = -std::pow(x, a) / b;
  if (event == 0.0) return log_survival;
  return std::log(a) - std::log(b) + (a - 1.0) * std::log(x) + log_survival;
}

ComponentParameters CensoredWeibullKernel::prior_draw(const MixingDistribution& md,
                                                      RandomSource& rng) const {
  double a = rng.uniform(0.0, md.g0_priors.at(0));
  double b = 1.0 / rng.gamma(md.g0_priors.at(1), md.g0_priors.at(2));
  return ComponentParameters::from_scalars({a, b});
}

double CensoredWeibullKernel::log_prior_density(
    const MixingDistribution& md, const ComponentParameters& theta) const {
  double phi = md.g0_priors.at(0);
  double a = theta.scalar(0);
  double b = theta.scalar(1);
  if (!(a > 0.0 && a <= phi) || !(b > 0.0)) return kNegInf;
  return -std::log(phi) +
         logpdf(DistSpec::inverse_gamma(md.g0_priors.at(1), md.g0_priors.at(2)), b);
}

ComponentParameters CensoredWeibullKernel::mh_propose(
    const MixingDistribution& md, const ComponentParameters& old,
    RandomSource& rng) const {
  return ComponentParameters::from_scalars(
      {std::abs(old.scalar(0) + step(md, 0) * rng.normal()),
       std::abs(old.scalar(1) + step(md, 1) * rng.normal())});
}

void CensoredWeibullKernel::check_support(const MixingDistribution& md,
                                          const Eigen::MatrixXd& data) const {
  (void)md;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    if (!(data(i, 0) > 0.0) || (data(i, 1) != 0.0 && data(i, 1) != 1.0)) {
      throw DataDomainError("censored weibull kernel: bad row " + std::to_string(i));
    }
  }
}

double NormalNonConjugateKernel::log_likelihood(
    const MixingDistribution& md, const Eigen::RowVectorXd& y,
    const ComponentParameters& theta) const {
  (void)md;
  double mu = theta.scalar(0);
  double s2 = theta.scalar(1);
  if (!(s2 > 0.0)) return kNegInf;
  double d = y(0) - mu;
  return -0.5 * std::log(2.0 * M_PI * s2) - 0.5 * d * d / s2;
}

ComponentParameters NormalNonConjugateKernel::prior_draw(
    const MixingDistribution& md, RandomSource& rng) const {
  double mu0 = md.g0_priors.at(0);
  double kappa0 = md.g0_priors.at(1);
  double s2 = 1.0 / rng.gamma(md.g0_priors.at(2), md.g0_priors.at(3));
  double mu = mu0 + std::sqrt(s2 / kappa0) * rng.normal();
  return ComponentParameters::from_scalars({mu, s2});
}

double NormalNonConjugateKernel::log_prior_density(
    const MixingDistribution& md, const ComponentParameters& theta) const {
  double mu0 = md.g0_priors.at(0);
  double kappa0 = md.g0_priors.at(1);
  double mu = theta.scalar(0);
  double s2 = theta.scalar(1);
  if (!(s2 > 0.0)) return kNegInf;
  double d = mu - mu0;
  return logpdf(DistSpec::inverse_gamma(md.g0_priors.at(2), md.g0_priors.at(3)), s2) -
         0.5 * std::log(2.0 * M_PI * s2 / kappa0) - 0.5 * kappa0 * d * d / s2;
}

ComponentParameters NormalNonConjugateKernel::mh_propose(
    const MixingDistribution& md, const ComponentParameters& old,
    RandomSource& rng) const {
  // The location walks freely, the variance reflects.
  return ComponentParameters::from_scalars(
      {old.scalar(0) + step(md, 0) * rng.normal(),
       std::abs(old.scalar(1) + step(md, 1) * rng.normal())});
}

void register_extension_kernels() {
  auto& registry = KernelRegistry::instance();
  registry.add("poisson", std::make_shared<PoissonKernel>());
  registry.add("gamma", std::make_shared<GammaKernel>());
  registry.add("weibull-censored", std::make_shared<CensoredWeibullKernel>());
  registry.add("normal-nc", std::make_shared<NormalNonConjugateKernel>());
}

MixingDistribution poisson_mixing(double alpha0, double beta0) {
  MixingDistribution md;
  md.kernel_id = "poisson";
  md.conjugacy = Conjugacy::Conjugate;
  md.g0_priors = {alpha0, beta0};
  return md;
}

MixingDistribution gamma_mixing() {
  MixingDistribution md;
  md.kernel_id = "gamma";
  md.conjugacy = Conjugacy::NonConjugate;
  md.g0_priors = {0.1, 0.1};
  md.mh_step_sizes = {0.1, 0.1};
  return md;
}

MixingDistribution censored_weibull_mixing() {
  MixingDistribution md;
  md.kernel_id = "weibull-censored";
  md.conjugacy = Conjugacy::NonConjugate;
  // Hyper-parameter order (phi, alpha, beta) assumed as for the uncensored
  // Weibull base measure; this fixture documents its own convention.
  md.g0_priors = {6.0, 2.0, 0.5};
  md.mh_step_sizes = {0.1, 0.1};
  return md;
}

MixingDistribution normal_nc_mixing(double step_mu, double step_s2) {
  MixingDistribution md;
  md.kernel_id = "normal-nc";
  md.conjugacy = Conjugacy::NonConjugate;
  md.g0_priors = {0.0, 1.0, 1.0, 1.0};
  md.mh_step_sizes = {step_mu, step_s2};
  return md;
}

}  // namespace dpmix::test
