#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dpmix/random.hpp"

namespace dpmix {

enum class DistFamily {
  Normal,
  MultivariateNormal,
  Gamma,
  InverseGamma,
  Beta,
  BetaMeanPrecision,
  Weibull,
  StudentTLocationScale,
  InverseWishart,
  Pareto,
  Uniform,
  Poisson,
};

/// A parameterized distribution. Scalar families keep their parameters in
/// `params`; the multivariate families use `mean` / `matrix`.
///
/// Conventions used throughout:
///  - Gamma is shape-rate: density proportional to x^(a-1) exp(-b x).
///  - InverseGamma(a, b) has density b^a / Gamma(a) x^(-a-1) exp(-b / x).
///  - Weibull uses the density (a/b) y^(a-1) exp(-y^a / b). Note b is NOT the
///    conventional scale parameter; the conventional scale is b^(1/a).
struct DistSpec {
  DistFamily family;
  std::vector<double> params;
  Eigen::VectorXd mean;
  Eigen::MatrixXd matrix;

  static DistSpec normal(double mu, double variance);
  static DistSpec gamma(double shape, double rate);
  static DistSpec inverse_gamma(double shape, double scale);
  static DistSpec beta(double a, double b);
  /// Beta on [0, T] parameterized by mean mu in [0, T] and precision nu > 0.
  static DistSpec beta_mean_precision(double mu, double nu, double T);
  static DistSpec weibull(double shape, double b);
  static DistSpec student_t_ls(double df, double loc, double scale);
  static DistSpec pareto(double xm, double k);
  static DistSpec uniform(double lo, double hi);
  static DistSpec poisson(double mean);
  static DistSpec multivariate_normal(Eigen::VectorXd mu, Eigen::MatrixXd cov);
  static DistSpec inverse_wishart(double df, Eigen::MatrixXd scale);
};

/// Log-density at x. Returns -infinity outside the support.
double logpdf(const DistSpec& spec, double x);
double logpdf(const DistSpec& spec, const Eigen::VectorXd& x);

double sample(const DistSpec& spec, RandomSource& rng);
std::vector<double> sample(const DistSpec& spec, RandomSource& rng, int n);
/// One draw from a MultivariateNormal spec.
Eigen::VectorXd sample_vector(const DistSpec& spec, RandomSource& rng);

/// Density of the location-scale Student-t: (1/scale) t_df((y - loc)/scale).
double student_t_ls_pdf(double y, double df, double loc, double scale);
double student_t_ls_logpdf(double y, double df, double loc, double scale);

/// Inverse-Wishart draw via the Bartlett decomposition of the Wishart at
/// (df, scale^-1), then inversion.
Eigen::MatrixXd sample_inverse_wishart(double df, const Eigen::MatrixXd& scale,
                                       RandomSource& rng);
double inverse_wishart_logpdf(const Eigen::MatrixXd& x, double df,
                              const Eigen::MatrixXd& scale);

double mvnormal_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                       const Eigen::MatrixXd& cov);
Eigen::VectorXd sample_mvnormal(const Eigen::VectorXd& mu,
                                const Eigen::MatrixXd& cov, RandomSource& rng);

/// Multivariate Student-t density with location mu, scale matrix S and df nu.
double mvt_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                  const Eigen::MatrixXd& scale, double df);

/// log of the multivariate gamma function Gamma_d(a).
double log_multigamma(int d, double a);

/// Cholesky factor with an SPD check; throws ParameterError when not SPD.
Eigen::MatrixXd cholesky_spd(const Eigen::MatrixXd& m, const char* what);

}  // namespace dpmix
