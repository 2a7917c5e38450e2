#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>

#include "dpmix/distributions.hpp"
#include "dpmix/errors.hpp"

using namespace dpmix;

namespace {

double integrate(double lo, double hi, const std::function<double(double)>& f) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi,
                                                                       12, 1e-10);
}

struct Moments {
  double mean, sd;
};

Moments empirical(const std::vector<double>& xs) {
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (xs.size() - 1.0))};
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("logpdf hand values") {
  CHECK(logpdf(DistSpec::normal(0.0, 1.0), 0.0) ==
        doctest::Approx(-0.9189385).epsilon(1e-6));
  CHECK(logpdf(DistSpec::gamma(1.0, 1.0), 2.0) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(logpdf(DistSpec::inverse_gamma(1.0, 1.0), 1.0) ==
        doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("logpdf outside support is -infinity") {
  CHECK(logpdf(DistSpec::gamma(2.0, 1.0), -1.0) ==
        -std::numeric_limits<double>::infinity());
  CHECK(logpdf(DistSpec::beta(2.0, 3.0), 1.5) ==
        -std::numeric_limits<double>::infinity());
  CHECK(logpdf(DistSpec::pareto(6.0, 2.0), 5.0) ==
        -std::numeric_limits<double>::infinity());
  CHECK(logpdf(DistSpec::uniform(0.0, 2.0), 3.0) ==
        -std::numeric_limits<double>::infinity());
  CHECK(logpdf(DistSpec::weibull(2.0, 1.0), -0.5) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(DistSpec::normal(0.0, -1.0), ParameterError);
  CHECK_THROWS_AS(DistSpec::gamma(0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(DistSpec::pareto(-6.0, 2.0), ParameterError);
  CHECK_THROWS_AS(DistSpec::uniform(1.0, 1.0), ParameterError);
  CHECK_THROWS_AS(DistSpec::beta_mean_precision(1.5, 2.0, 1.0), ParameterError);
  CHECK_THROWS_AS(DistSpec::student_t_ls(-2.0, 0.0, 1.0), ParameterError);
}

TEST_CASE("pareto draws respect the lower bound") {
  RandomSource rng(11);
  DistSpec spec = DistSpec::pareto(6.0, 2.0);
  for (double x : sample(spec, rng, 1000)) CHECK(x >= 6.0);
}

TEST_CASE("beta(1, 4) sample mean") {
  RandomSource rng(12);
  auto xs = sample(DistSpec::beta(1.0, 4.0), rng, 100000);
  CHECK(empirical(xs).mean == doctest::Approx(0.2).epsilon(0.05));
  CHECK(std::abs(empirical(xs).mean - 0.2) < 0.01);
}

TEST_CASE("same seed reproduces the same draws") {
  RandomSource a(77), b(77);
  DistSpec spec = DistSpec::gamma(2.5, 1.5);
  for (int i = 0; i < 100; ++i) CHECK(sample(spec, a) == sample(spec, b));
  CHECK(a.uniform() == b.uniform());
  CHECK(a.normal() == b.normal());
}

TEST_CASE("split streams are deterministic and distinct") {
  RandomSource a(5), b(5);
  RandomSource ca = a.split();
  RandomSource cb = b.split();
  CHECK(ca.uniform() == cb.uniform());
  RandomSource other = a.split();
  CHECK(ca.uniform() != other.uniform());
}

TEST_CASE("state save/restore resumes the stream") {
  RandomSource rng(99);
  rng.normal();
  rng.gamma(2.0, 3.0);
  std::string saved = rng.save_state();
  double next = rng.uniform();
  RandomSource other(0);
  other.restore_state(saved);
  CHECK(other.uniform() == next);
}

TEST_CASE("categorical follows the weights") {
  RandomSource rng(3);
  for (int i = 0; i < 50; ++i) {
    CHECK(rng.categorical({0.0, 2.0, 0.0}) == 1);
  }
  CHECK_THROWS(rng.categorical({0.0, 0.0}));
  int hits = 0;
  for (int i = 0; i < 100000; ++i) {
    if (rng.categorical({1.0, 3.0}) == 1) ++hits;
  }
  CHECK(hits / 100000.0 == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("student t location-scale values") {
  CHECK(student_t_ls_pdf(0.0, 2.0, 0.0, std::sqrt(2.0)) ==
        doctest::Approx(0.25).epsilon(1e-12));
  for (double x : {0.3, 1.1, 4.5}) {
    CHECK(student_t_ls_pdf(2.0 + x, 3.0, 2.0, 1.5) ==
          doctest::Approx(student_t_ls_pdf(2.0 - x, 3.0, 2.0, 1.5)).epsilon(1e-14));
  }
  double normal_density = std::exp(logpdf(DistSpec::normal(1.0, 4.0), 1.0));
  CHECK(std::abs(student_t_ls_pdf(1.0, 1e6, 1.0, 2.0) - normal_density) < 1e-3);
  CHECK_THROWS_AS(student_t_ls_pdf(0.0, -1.0, 0.0, 1.0), ParameterError);
  CHECK_THROWS_AS(student_t_ls_pdf(0.0, 2.0, 0.0, 0.0), ParameterError);
}

TEST_CASE("inverse wishart draws are SPD") {
  RandomSource rng(21);
  Eigen::MatrixXd scale(3, 3);
  scale << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0;
  for (int i = 0; i < 200; ++i) {
    Eigen::MatrixXd draw = sample_inverse_wishart(5.0, scale, rng);
    CHECK((draw - draw.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(draw);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 0) = 1.0;
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(sample_inverse_wishart(5.0, bad, rng), ParameterError);
}

TEST_CASE("inverse wishart d=1 reduces to inverse gamma") {
  RandomSource rng(22);
  double nu = 7.0, phi = 3.0;
  Eigen::MatrixXd scale = Eigen::MatrixXd::Constant(1, 1, phi);
  std::vector<double> draws;
  for (int i = 0; i < 100000; ++i) {
    draws.push_back(sample_inverse_wishart(nu, scale, rng)(0, 0));
  }
  // InverseGamma(nu/2, phi/2): mean and second moment.
  double a = nu / 2.0, b = phi / 2.0;
  double mean = b / (a - 1.0);
  double second = b * b / ((a - 1.0) * (a - 2.0));
  Moments m = empirical(draws);
  CHECK(m.mean == doctest::Approx(mean).epsilon(0.02));
  double emp_second = m.sd * m.sd + m.mean * m.mean;
  CHECK(emp_second == doctest::Approx(second).epsilon(0.06));
}

TEST_CASE("inverse wishart d=2 Monte-Carlo mean") {
  RandomSource rng(23);
  Eigen::MatrixXd scale = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(2, 2);
  int n = 100000;
  for (int i = 0; i < n; ++i) total += sample_inverse_wishart(6.0, scale, rng);
  Eigen::MatrixXd mean = total / n;
  CHECK(mean(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(0.03));
  CHECK(mean(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(0.03));
  CHECK(std::abs(mean(0, 1)) < 0.01);
}

TEST_CASE("sampler means match analytic means") {
  struct Row {
    DistSpec spec;
    double mean, variance;
  };
  std::vector<Row> rows = {
      {DistSpec::normal(2.0, 4.0), 2.0, 4.0},
      {DistSpec::gamma(3.0, 2.0), 1.5, 0.75},
      {DistSpec::inverse_gamma(4.0, 6.0), 2.0, 2.0},
      {DistSpec::beta(2.0, 6.0), 0.25, 2.0 * 6.0 / (64.0 * 9.0)},
      {DistSpec::beta_mean_precision(0.3, 5.0, 1.0), 0.3, 0.3 * 0.7 / 6.0},
      {DistSpec::uniform(-1.0, 3.0), 1.0, 16.0 / 12.0},
      {DistSpec::poisson(4.5), 4.5, 4.5},
      {DistSpec::pareto(6.0, 3.0), 9.0, 27.0},
      {DistSpec::student_t_ls(5.0, 1.0, 2.0), 1.0, 4.0 * 5.0 / 3.0},
      // Weibull in (a, b) form, a=2, b=4: standard scale 2, mean 2*Gamma(1.5).
      {DistSpec::weibull(2.0, 4.0), 2.0 * std::tgamma(1.5),
       4.0 * (std::tgamma(2.0) - std::tgamma(1.5) * std::tgamma(1.5))},
  };
  RandomSource rng(31);
  const int n = 100000;
  for (const auto& row : rows) {
    auto xs = sample(row.spec, rng, n);
    double se = std::sqrt(row.variance / n);
    CHECK(std::abs(empirical(xs).mean - row.mean) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("densities integrate to one") {
  struct Row {
    DistSpec spec;
    double lo, hi;
  };
  std::vector<Row> rows = {
      {DistSpec::normal(0.5, 2.0), -20.0, 20.0},
      {DistSpec::gamma(2.5, 1.5), 0.0, 60.0},
      {DistSpec::inverse_gamma(2.0, 3.0), 0.0, 4000.0},
      {DistSpec::beta(2.0, 5.0), 0.0, 1.0},
      {DistSpec::beta_mean_precision(0.4, 3.0, 2.0), 0.0, 2.0},
      {DistSpec::weibull(2.0, 3.0), 0.0, 50.0},
      {DistSpec::student_t_ls(3.0, 0.0, 1.0), -500.0, 500.0},
      {DistSpec::pareto(2.0, 3.0), 2.0, 5000.0},
      {DistSpec::uniform(-1.0, 4.0), -1.0, 4.0},
  };
  for (const auto& row : rows) {
    double mass = integrate(row.lo, row.hi, [&](double x) {
      double lp = logpdf(row.spec, x);
      return std::isfinite(lp) ? std::exp(lp) : 0.0;
    });
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
  }
  // Poisson pmf sums to one.
  double pmf_sum = 0.0;
  for (int k = 0; k <= 60; ++k) {
    pmf_sum += std::exp(logpdf(DistSpec::poisson(4.5), static_cast<double>(k)));
  }
  CHECK(pmf_sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("multivariate normal density and sampling") {
  Eigen::VectorXd mu(2);
  mu << 1.0, -1.0;
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.5, 0.5, 1.0;
  // Density at the mode: 1 / (2 pi sqrt(det)).
  double det = cov.determinant();
  CHECK(mvnormal_logpdf(mu, mu, cov) ==
        doctest::Approx(-std::log(2.0 * M_PI) - 0.5 * std::log(det)).epsilon(1e-12));

  RandomSource rng(41);
  Eigen::VectorXd total = Eigen::VectorXd::Zero(2);
  Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(2, 2);
  int n = 100000;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x = sample_mvnormal(mu, cov, rng);
    total += x;
    ss += (x - mu) * (x - mu).transpose();
  }
  CHECK((total / n - mu).cwiseAbs().maxCoeff() < 0.02);
  CHECK((ss / n - cov).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("multivariate t matches univariate t at d=1") {
  Eigen::VectorXd mu(1);
  mu << 0.5;
  Eigen::MatrixXd scale = Eigen::MatrixXd::Constant(1, 1, 2.25);
  for (double x : {-1.0, 0.5, 2.0}) {
    Eigen::VectorXd v(1);
    v << x;
    CHECK(std::exp(mvt_logpdf(v, mu, scale, 4.0)) ==
          doctest::Approx(student_t_ls_pdf(x, 4.0, 0.5, 1.5)).epsilon(1e-12));
  }
}

}  // TEST_SUITE
