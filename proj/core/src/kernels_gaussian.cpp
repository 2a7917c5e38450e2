#include <cmath>
#include <limits>
#include <numbers>

#include "dpmix/distributions.hpp"
#include "dpmix/errors.hpp"
#include "kernels_builtin.hpp"

namespace dpmix {

NigParams nig_posterior(const NigParams& prior, const Eigen::VectorXd& y) {
  double n = static_cast<double>(y.size());
  if (n == 0.0) return prior;
  double ybar = y.mean();
  double ss = (y.array() - ybar).square().sum();
  NigParams post;
  post.kappa = prior.kappa + n;
  post.mu = (prior.kappa * prior.mu + n * ybar) / post.kappa;
  post.alpha = prior.alpha + 0.5 * n;
  post.beta = prior.beta + 0.5 * ss +
              prior.kappa * n * (ybar - prior.mu) * (ybar - prior.mu) /
                  (2.0 * (prior.kappa + n));
  return post;
}

namespace detail {

namespace {

NigParams unpack_nig(const MixingDistribution& md) {
  if (md.g0_priors.size() != 4) {
    throw ParameterError("normal kernel: g0_priors must be (mu0, kappa0, alpha0, beta0)");
  }
  NigParams p{md.g0_priors[0], md.g0_priors[1], md.g0_priors[2], md.g0_priors[3]};
  if (!(p.kappa > 0.0 && p.alpha > 0.0 && p.beta > 0.0)) {
    throw ParameterError("normal kernel: kappa0, alpha0, beta0 must be > 0");
  }
  return p;
}

ComponentParameters draw_nig(const NigParams& p, RandomSource& rng) {
  double var = 1.0 / rng.gamma(p.alpha, p.beta);
  double mu = p.mu + std::sqrt(var / p.kappa) * rng.normal();
  return ComponentParameters::from_scalars({mu, var});
}

}  // namespace

double GaussianKernel::log_likelihood(const MixingDistribution& md,
                                      const Eigen::RowVectorXd& y,
                                      const ComponentParameters& theta) const {
  (void)md;
  double mu = theta.scalar(0);
  double var = theta.scalar(1);
  if (!(var > 0.0)) return -std::numeric_limits<double>::infinity();
  double d = y(0) - mu;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
}

ComponentParameters GaussianKernel::prior_draw(const MixingDistribution& md,
                                               RandomSource& rng) const {
  return draw_nig(unpack_nig(md), rng);
}

std::vector<ComponentParameters> GaussianKernel::posterior_draw(
    const MixingDistribution& md, const Eigen::MatrixXd& y, int n,
    RandomSource& rng, const ComponentParameters* start, MhStats* stats) const {
  (void)start;
  (void)stats;
  if (n < 1) throw ParameterError("posterior_draw: n must be >= 1");
  NigParams post = nig_posterior(unpack_nig(md), y.col(0));
  std::vector<ComponentParameters> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(draw_nig(post, rng));
  return out;
}

double GaussianKernel::log_predictive(const MixingDistribution& md,
                                      const Eigen::RowVectorXd& y) const {
  NigParams p = unpack_nig(md);
  double scale = std::sqrt(p.beta * (p.kappa + 1.0) / (p.alpha * p.kappa));
  return student_t_ls_logpdf(y(0), 2.0 * p.alpha, p.mu, scale);
}

double GaussianKernel::log_marginal(const MixingDistribution& md,
                                    const Eigen::MatrixXd& y) const {
  NigParams prior = unpack_nig(md);
  NigParams post = nig_posterior(prior, y.col(0));
  double n = static_cast<double>(y.rows());
  return -0.5 * n * std::log(2.0 * std::numbers::pi) +
         0.5 * (std::log(prior.kappa) - std::log(post.kappa)) +
         std::lgamma(post.alpha) - std::lgamma(prior.alpha) +
         prior.alpha * std::log(prior.beta) - post.alpha * std::log(post.beta);
}

}  // namespace detail
}  // namespace dpmix
