#include <cmath>
#include <limits>
#include <numbers>

#include "dpmix/distributions.hpp"
#include "dpmix/errors.hpp"
#include "kernels_builtin.hpp"

namespace dpmix {

NiwParams niw_posterior(const NiwParams& prior, const Eigen::MatrixXd& y) {
  double n = static_cast<double>(y.rows());
  if (n == 0.0) return prior;
  Eigen::VectorXd ybar = y.colwise().mean();
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(y.cols(), y.cols());
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    Eigen::VectorXd d = y.row(i).transpose() - ybar;
    scatter += d * d.transpose();
  }
  Eigen::VectorXd dm = ybar - prior.mu;
  NiwParams post;
  post.kappa = prior.kappa + n;
  post.nu = prior.nu + n;
  post.mu = (prior.kappa * prior.mu + n * ybar) / post.kappa;
  post.phi = prior.phi + scatter +
             (prior.kappa * n / (prior.kappa + n)) * (dm * dm.transpose());
  return post;
}

namespace detail {

int mv_dim(const MixingDistribution& md) {
  if (md.fixed_constants.empty()) {
    throw ParameterError("multivariate kernel: data dimension missing from fixed_constants");
  }
  int d = static_cast<int>(md.fixed_constants[0]);
  if (d < 1) throw ParameterError("multivariate kernel: dimension must be >= 1");
  return d;
}

NiwParams unpack_niw(const MixingDistribution& md) {
  int d = mv_dim(md);
  std::size_t expected = 2 + static_cast<std::size_t>(d) + static_cast<std::size_t>(d) * d;
  if (md.g0_priors.size() != expected) {
    throw ParameterError("mvnormal kernel: g0_priors must be (kappa0, nu0, mu0, Phi0)");
  }
  NiwParams p;
  p.kappa = md.g0_priors[0];
  p.nu = md.g0_priors[1];
  p.mu = Eigen::VectorXd(d);
  for (int i = 0; i < d; ++i) p.mu(i) = md.g0_priors[2 + i];
  p.phi = Eigen::MatrixXd(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) p.phi(i, j) = md.g0_priors[2 + d + i * d + j];
  }
  if (!(p.kappa > 0.0)) throw ParameterError("mvnormal kernel: kappa0 must be > 0");
  if (!(p.nu > d - 1.0)) throw ParameterError("mvnormal kernel: nu0 must exceed d - 1");
  return p;
}

namespace {

ComponentParameters draw_niw(const NiwParams& p, RandomSource& rng) {
  Eigen::MatrixXd sigma = sample_inverse_wishart(p.nu, p.phi, rng);
  Eigen::VectorXd mu = sample_mvnormal(p.mu, sigma / p.kappa, rng);
  ComponentParameters out;
  out.values.push_back(mu);
  out.values.push_back(sigma);
  return out;
}

double mv_log_likelihood(const Eigen::RowVectorXd& y,
                         const ComponentParameters& theta) {
  const Eigen::MatrixXd& mu = theta.values.at(0);
  const Eigen::MatrixXd& sigma = theta.values.at(1);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    return -std::numeric_limits<double>::infinity();
  }
  Eigen::VectorXd diff = y.transpose() - mu.col(0);
  double quad = llt.matrixL().solve(diff).squaredNorm();
  double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (diff.size() * std::log(2.0 * std::numbers::pi) + logdet + quad);
}

struct SemiParams {
  Eigen::VectorXd mu0;
  Eigen::MatrixXd sigma0;
  double nu0;
  Eigen::MatrixXd phi0;
};

SemiParams unpack_semi(const MixingDistribution& md) {
  int d = mv_dim(md);
  std::size_t dd = static_cast<std::size_t>(d) * d;
  if (md.g0_priors.size() != static_cast<std::size_t>(d) + 2 * dd + 1) {
    throw ParameterError("mvnormal2 kernel: g0_priors must be (mu0, Sigma0, nu0, Phi0)");
  }
  SemiParams p;
  p.mu0 = Eigen::VectorXd(d);
  for (int i = 0; i < d; ++i) p.mu0(i) = md.g0_priors[i];
  p.sigma0 = Eigen::MatrixXd(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) p.sigma0(i, j) = md.g0_priors[d + i * d + j];
  }
  p.nu0 = md.g0_priors[d + dd];
  p.phi0 = Eigen::MatrixXd(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) p.phi0(i, j) = md.g0_priors[d + dd + 1 + i * d + j];
  }
  if (!(p.nu0 > d - 1.0)) throw ParameterError("mvnormal2 kernel: nu0 must exceed d - 1");
  return p;
}

}  // namespace

double MvNormalKernel::log_likelihood(const MixingDistribution& md,
                                      const Eigen::RowVectorXd& y,
                                      const ComponentParameters& theta) const {
  (void)md;
  return mv_log_likelihood(y, theta);
}

ComponentParameters MvNormalKernel::prior_draw(const MixingDistribution& md,
                                               RandomSource& rng) const {
  return draw_niw(unpack_niw(md), rng);
}

std::vector<ComponentParameters> MvNormalKernel::posterior_draw(
    const MixingDistribution& md, const Eigen::MatrixXd& y, int n,
    RandomSource& rng, const ComponentParameters* start, MhStats* stats) const {
  (void)start;
  (void)stats;
  if (n < 1) throw ParameterError("posterior_draw: n must be >= 1");
  NiwParams post = niw_posterior(unpack_niw(md), y);
  std::vector<ComponentParameters> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(draw_niw(post, rng));
  return out;
}

double MvNormalKernel::log_predictive(const MixingDistribution& md,
                                      const Eigen::RowVectorXd& y) const {
  NiwParams p = unpack_niw(md);
  int d = static_cast<int>(p.mu.size());
  double df = p.nu - d + 1.0;
  Eigen::MatrixXd scale = p.phi * (p.kappa + 1.0) / (p.kappa * df);
  return mvt_logpdf(y.transpose(), p.mu, scale, df);
}

double MvNormalKernel::log_marginal(const MixingDistribution& md,
                                    const Eigen::MatrixXd& y) const {
  NiwParams prior = unpack_niw(md);
  NiwParams post = niw_posterior(prior, y);
  int d = static_cast<int>(prior.mu.size());
  double n = static_cast<double>(y.rows());
  double logdet_prior = cholesky_spd(prior.phi, "mvnormal Phi0")
                            .diagonal().array().log().sum() * 2.0;
  double logdet_post = cholesky_spd(post.phi, "mvnormal Phi_n")
                           .diagonal().array().log().sum() * 2.0;
  return -0.5 * n * d * std::log(std::numbers::pi) +
         0.5 * d * (std::log(prior.kappa) - std::log(post.kappa)) +
         log_multigamma(d, 0.5 * post.nu) - log_multigamma(d, 0.5 * prior.nu) +
         0.5 * prior.nu * logdet_prior - 0.5 * post.nu * logdet_post;
}

double MvNormalSemiKernel::log_likelihood(const MixingDistribution& md,
                                          const Eigen::RowVectorXd& y,
                                          const ComponentParameters& theta) const {
  (void)md;
  return mv_log_likelihood(y, theta);
}

ComponentParameters MvNormalSemiKernel::prior_draw(const MixingDistribution& md,
                                                   RandomSource& rng) const {
  SemiParams p = unpack_semi(md);
  ComponentParameters out;
  out.values.push_back(sample_mvnormal(p.mu0, p.sigma0, rng));
  out.values.push_back(sample_inverse_wishart(p.nu0, p.phi0, rng));
  return out;
}

std::vector<ComponentParameters> MvNormalSemiKernel::posterior_draw(
    const MixingDistribution& md, const Eigen::MatrixXd& y, int n,
    RandomSource& rng, const ComponentParameters* start, MhStats* stats) const {
  (void)stats;
  if (n < 1) throw ParameterError("posterior_draw: n must be >= 1");
  SemiParams p = unpack_semi(md);
  double nd = static_cast<double>(y.rows());
  if (nd == 0.0) {
    std::vector<ComponentParameters> out;
    for (int i = 0; i < n; ++i) out.push_back(prior_draw(md, rng));
    return out;
  }

  ComponentParameters theta = start ? *start : prior_draw(md, rng);
  Eigen::VectorXd ybar = y.colwise().mean();
  Eigen::MatrixXd sigma0_inv = p.sigma0.inverse();
  std::vector<ComponentParameters> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int cycle = 0; cycle < n; ++cycle) {
    // Sigma | mu
    Eigen::VectorXd mu = theta.values[0].col(0);
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(y.cols(), y.cols());
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      Eigen::VectorXd d = y.row(i).transpose() - mu;
      scatter += d * d.transpose();
    }
    Eigen::MatrixXd sigma = sample_inverse_wishart(p.nu0 + nd, p.phi0 + scatter, rng);
    // mu | Sigma
    Eigen::MatrixXd sigma_inv = sigma.inverse();
    Eigen::MatrixXd post_cov = (sigma0_inv + nd * sigma_inv).inverse();
    post_cov = 0.5 * (post_cov + post_cov.transpose());
    Eigen::VectorXd post_mean = post_cov * (sigma0_inv * p.mu0 + nd * sigma_inv * ybar);
    theta.values.clear();
    theta.values.push_back(sample_mvnormal(post_mean, post_cov, rng));
    theta.values.push_back(sigma);
    out.push_back(theta);
  }
  return out;
}

double MvNormalSemiKernel::log_prior_density(const MixingDistribution& md,
                                             const ComponentParameters& theta) const {
  SemiParams p = unpack_semi(md);
  Eigen::VectorXd mu = theta.values.at(0).col(0);
  const Eigen::MatrixXd& sigma = theta.values.at(1);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    return -std::numeric_limits<double>::infinity();
  }
  return mvnormal_logpdf(mu, p.mu0, p.sigma0) +
         inverse_wishart_logpdf(sigma, p.nu0, p.phi0);
}

ComponentParameters MvNormalSemiKernel::mh_propose(const MixingDistribution& md,
                                                   const ComponentParameters& old,
                                                   RandomSource& rng) const {
  double h = md.mh_step_sizes.empty() ? 0.1 : md.mh_step_sizes[0];
  ComponentParameters out = old;
  for (Eigen::Index i = 0; i < out.values[0].rows(); ++i) {
    out.values[0](i, 0) += h * rng.normal();
  }
  return out;
}

}  // namespace detail
}  // namespace dpmix
