#include "dpmix/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dpmix/errors.hpp"

namespace dpmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

void require(bool ok, const char* msg) {
  if (!ok) throw ParameterError(msg);
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace

Eigen::MatrixXd cholesky_spd(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw ParameterError(std::string(what) + ": matrix not square");
  if (!m.isApprox(m.transpose(), 1e-10)) {
    throw ParameterError(std::string(what) + ": matrix not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw ParameterError(std::string(what) + ": matrix not positive definite");
  }
  return llt.matrixL();
}

DistSpec DistSpec::normal(double mu, double variance) {
  require(variance > 0.0, "Normal: variance must be > 0");
  return {DistFamily::Normal, {mu, variance}, {}, {}};
}

DistSpec DistSpec::gamma(double shape, double rate) {
  require(shape > 0.0 && rate > 0.0, "Gamma: shape and rate must be > 0");
  return {DistFamily::Gamma, {shape, rate}, {}, {}};
}

DistSpec DistSpec::inverse_gamma(double shape, double scale) {
  require(shape > 0.0 && scale > 0.0, "InverseGamma: parameters must be > 0");
  return {DistFamily::InverseGamma, {shape, scale}, {}, {}};
}

DistSpec DistSpec::beta(double a, double b) {
  require(a > 0.0 && b > 0.0, "Beta: shapes must be > 0");
  return {DistFamily::Beta, {a, b}, {}, {}};
}

DistSpec DistSpec::beta_mean_precision(double mu, double nu, double T) {
  require(T > 0.0, "BetaMeanPrecision: T must be > 0");
  require(mu >= 0.0 && mu <= T, "BetaMeanPrecision: mean must lie in [0, T]");
  require(nu > 0.0, "BetaMeanPrecision: precision must be > 0");
  return {DistFamily::BetaMeanPrecision, {mu, nu, T}, {}, {}};
}

DistSpec DistSpec::weibull(double shape, double b) {
  require(shape > 0.0 && b > 0.0, "Weibull: parameters must be > 0");
  return {DistFamily::Weibull, {shape, b}, {}, {}};
}

DistSpec DistSpec::student_t_ls(double df, double loc, double scale) {
  require(df > 0.0 && scale > 0.0, "StudentTLocationScale: df and scale must be > 0");
  return {DistFamily::StudentTLocationScale, {df, loc, scale}, {}, {}};
}

DistSpec DistSpec::pareto(double xm, double k) {
  require(xm > 0.0 && k > 0.0, "Pareto: x_m and k must be > 0");
  return {DistFamily::Pareto, {xm, k}, {}, {}};
}

DistSpec DistSpec::uniform(double lo, double hi) {
  require(lo < hi, "Uniform: lower bound must be below upper bound");
  return {DistFamily::Uniform, {lo, hi}, {}, {}};
}

DistSpec DistSpec::poisson(double mean) {
  require(mean > 0.0, "Poisson: mean must be > 0");
  return {DistFamily::Poisson, {mean}, {}, {}};
}

DistSpec DistSpec::multivariate_normal(Eigen::VectorXd mu, Eigen::MatrixXd cov) {
  require(mu.size() == cov.rows(), "MultivariateNormal: dimension mismatch");
  cholesky_spd(cov, "MultivariateNormal covariance");
  return {DistFamily::MultivariateNormal, {}, std::move(mu), std::move(cov)};
}

DistSpec DistSpec::inverse_wishart(double df, Eigen::MatrixXd scale) {
  require(df > static_cast<double>(scale.rows()) - 1.0,
          "InverseWishart: df must exceed d - 1");
  cholesky_spd(scale, "InverseWishart scale");
  return {DistFamily::InverseWishart, {df}, {}, std::move(scale)};
}

double student_t_ls_logpdf(double y, double df, double loc, double scale) {
  if (!(df > 0.0) || !(scale > 0.0)) {
    throw ParameterError("student_t_ls: df and scale must be > 0");
  }
  double z = (y - loc) / scale;
  return std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
         0.5 * std::log(df * std::numbers::pi) - std::log(scale) -
         0.5 * (df + 1.0) * std::log1p(z * z / df);
}

double student_t_ls_pdf(double y, double df, double loc, double scale) {
  return std::exp(student_t_ls_logpdf(y, df, loc, scale));
}

double logpdf(const DistSpec& spec, double x) {
  const auto& p = spec.params;
  switch (spec.family) {
    case DistFamily::Normal:
      return -0.5 * kLog2Pi - 0.5 * std::log(p[1]) - 0.5 * (x - p[0]) * (x - p[0]) / p[1];
    case DistFamily::Gamma:
      if (x <= 0.0) return kNegInf;
      return p[0] * std::log(p[1]) - std::lgamma(p[0]) + (p[0] - 1.0) * std::log(x) - p[1] * x;
    case DistFamily::InverseGamma:
      if (x <= 0.0) return kNegInf;
      return p[0] * std::log(p[1]) - std::lgamma(p[0]) - (p[0] + 1.0) * std::log(x) - p[1] / x;
    case DistFamily::Beta:
      if (x <= 0.0 || x >= 1.0) return kNegInf;
      return (p[0] - 1.0) * std::log(x) + (p[1] - 1.0) * std::log1p(-x) - log_beta_fn(p[0], p[1]);
    case DistFamily::BetaMeanPrecision: {
      double mu = p[0], nu = p[1], T = p[2];
      if (x <= 0.0 || x >= T) return kNegInf;
      double s1 = mu * nu / T;
      double s2 = nu * (1.0 - mu / T);
      if (!(s1 > 0.0) || !(s2 > 0.0)) return kNegInf;
      return (s1 - 1.0) * std::log(x) + (s2 - 1.0) * std::log(T - x) -
             log_beta_fn(s1, s2) - (nu - 1.0) * std::log(T);
    }
    case DistFamily::Weibull: {
      double a = p[0], b = p[1];
      if (x <= 0.0) return kNegInf;
      return std::log(a) - std::log(b) + (a - 1.0) * std::log(x) - std::pow(x, a) / b;
    }
    case DistFamily::StudentTLocationScale:
      return student_t_ls_logpdf(x, p[0], p[1], p[2]);
    case DistFamily::Pareto:
      if (x < p[0]) return kNegInf;
      return std::log(p[1]) + p[1] * std::log(p[0]) - (p[1] + 1.0) * std::log(x);
    case DistFamily::Uniform:
      if (x < p[0] || x > p[1]) return kNegInf;
      return -std::log(p[1] - p[0]);
    case DistFamily::Poisson: {
      double k = std::round(x);
      if (k < 0.0 || std::abs(k - x) > 1e-9) return kNegInf;
      return k * std::log(p[0]) - p[0] - std::lgamma(k + 1.0);
    }
    case DistFamily::MultivariateNormal:
    case DistFamily::InverseWishart:
      throw ParameterError("logpdf(double): scalar argument for a matrix-variate family");
  }
  throw ParameterError("logpdf: unknown family");
}

double logpdf(const DistSpec& spec, const Eigen::VectorXd& x) {
  if (spec.family == DistFamily::MultivariateNormal) {
    return mvnormal_logpdf(x, spec.mean, spec.matrix);
  }
  if (x.size() == 1) return logpdf(spec, x(0));
  throw ParameterError("logpdf(vector): vector argument for a scalar family");
}

double sample(const DistSpec& spec, RandomSource& rng) {
  const auto& p = spec.params;
  switch (spec.family) {
    case DistFamily::Normal:
      return p[0] + std::sqrt(p[1]) * rng.normal();
    case DistFamily::Gamma:
      return rng.gamma(p[0], p[1]);
    case DistFamily::InverseGamma:
      return 1.0 / rng.gamma(p[0], p[1]);
    case DistFamily::Beta:
      return rng.beta(p[0], p[1]);
    case DistFamily::BetaMeanPrecision: {
      double s1 = p[0] * p[1] / p[2];
      double s2 = p[1] * (1.0 - p[0] / p[2]);
      return p[2] * rng.beta(s1, s2);
    }
    case DistFamily::Weibull:
      // y^a is exponential with mean b.
      return std::pow(p[1] * rng.exponential(1.0), 1.0 / p[0]);
    case DistFamily::StudentTLocationScale:
      return p[1] + p[2] * rng.student_t(p[0]);
    case DistFamily::Pareto:
      return p[0] * std::pow(rng.uniform(), -1.0 / p[1]);
    case DistFamily::Uniform:
      return rng.uniform(p[0], p[1]);
    case DistFamily::Poisson:
      return static_cast<double>(rng.poisson(p[0]));
    case DistFamily::MultivariateNormal:
    case DistFamily::InverseWishart:
      throw ParameterError("sample(scalar): use the matrix-variate sampler");
  }
  throw ParameterError("sample: unknown family");
}

std::vector<double> sample(const DistSpec& spec, RandomSource& rng, int n) {
  if (n < 1) throw ParameterError("sample: n must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = sample(spec, rng);
  return out;
}

Eigen::VectorXd sample_vector(const DistSpec& spec, RandomSource& rng) {
  if (spec.family != DistFamily::MultivariateNormal) {
    throw ParameterError("sample_vector: only MultivariateNormal is vector-valued");
  }
  return sample_mvnormal(spec.mean, spec.matrix, rng);
}

Eigen::VectorXd sample_mvnormal(const Eigen::VectorXd& mu,
                                const Eigen::MatrixXd& cov, RandomSource& rng) {
  Eigen::MatrixXd L = cholesky_spd(cov, "sample_mvnormal covariance");
  Eigen::VectorXd z(mu.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mu + L * z;
}

double mvnormal_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                       const Eigen::MatrixXd& cov) {
  Eigen::Index d = mu.size();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw ParameterError("mvnormal_logpdf: covariance not positive definite");
  }
  Eigen::VectorXd diff = x - mu;
  double quad = llt.matrixL().solve(diff).squaredNorm();
  double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (d * kLog2Pi + logdet + quad);
}

double log_multigamma(int d, double a) {
  double out = 0.25 * d * (d - 1) * std::log(std::numbers::pi);
  for (int i = 0; i < d; ++i) out += std::lgamma(a - 0.5 * i);
  return out;
}

Eigen::MatrixXd sample_inverse_wishart(double df, const Eigen::MatrixXd& scale,
                                       RandomSource& rng) {
  int d = static_cast<int>(scale.rows());
  if (!(df > d - 1.0)) throw ParameterError("sample_inverse_wishart: df must exceed d - 1");
  cholesky_spd(scale, "sample_inverse_wishart scale");

  // Wishart(df, scale^-1) via Bartlett, then invert the draw.
  Eigen::MatrixXd inv_scale = scale.inverse();
  Eigen::MatrixXd L = cholesky_spd(inv_scale, "sample_inverse_wishart inverse scale");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    A(i, i) = std::sqrt(rng.chi_squared(df - i));
    for (int j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  Eigen::MatrixXd LA = L * A;
  Eigen::MatrixXd W = LA * LA.transpose();
  Eigen::MatrixXd out = W.inverse();
  return 0.5 * (out + out.transpose());  // symmetrize against roundoff
}

double inverse_wishart_logpdf(const Eigen::MatrixXd& x, double df,
                              const Eigen::MatrixXd& scale) {
  int d = static_cast<int>(scale.rows());
  Eigen::LLT<Eigen::MatrixXd> lltx(x);
  if (lltx.info() != Eigen::Success) return kNegInf;
  Eigen::MatrixXd Lpsi = cholesky_spd(scale, "inverse_wishart_logpdf scale");
  double logdet_psi = 2.0 * Lpsi.diagonal().array().log().sum();
  double logdet_x = 2.0 * lltx.matrixL().toDenseMatrix().diagonal().array().log().sum();
  double trace = lltx.solve(scale).trace();
  return 0.5 * df * logdet_psi - 0.5 * df * d * std::numbers::ln2 -
         log_multigamma(d, 0.5 * df) - 0.5 * (df + d + 1.0) * logdet_x - 0.5 * trace;
}

double mvt_logpdf(const Eigen::VectorXd& x, const Eigen::VectorXd& mu,
                  const Eigen::MatrixXd& scale, double df) {
  Eigen::Index d = mu.size();
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success) {
    throw ParameterError("mvt_logpdf: scale not positive definite");
  }
  double quad = llt.matrixL().solve(x - mu).squaredNorm();
  double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return std::lgamma(0.5 * (df + d)) - std::lgamma(0.5 * df) -
         0.5 * d * std::log(df * std::numbers::pi) - 0.5 * logdet -
         0.5 * (df + d) * std::log1p(quad / df);
}

}  // namespace dpmix
