#pragma once

#include <vector>

#include "dpmix/dp.hpp"

namespace dpmix {

/// Truncated atomic measure from the stick-breaking construction: weights
/// w_k = z_k prod_{i<k}(1 - z_i) and their atoms. The truncation residual
/// prod(1 - z_i) satisfies sum(weights) + residual = 1 algebraically.
struct StickMeasure {
  std::vector<double> sticks;  // the z sequence
  std::vector<double> weights;
  std::vector<ComponentParameters> atoms;
  double truncation_residual = 1.0;
};

/// Per-grid-point posterior summary across retained MCMC density draws.
/// Serializes to CSV with header x,Mean,Median,Lower,Upper.
struct PosteriorSummaryTable {
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> median;
  std::vector<double> lower;
  std::vector<double> upper;
  double level = 0.95;
};

/// w_k = z_k prod_{i<k}(1 - z_i); every z_i must lie in (0, 1).
std::vector<double> stick_breaking_weights(const std::vector<double>& z);

/// Truncation length giving expected residual <= eps when z ~ Beta(1, c):
/// ceil(log eps / log(c / (c + 1))).
int stick_truncation_length(double concentration, double eps);

/// One truncated draw of a random measure conditional on concentration and
/// the per-datum parameters (counted with multiplicity; may be empty for a
/// prior measure). Each atom is a fresh G0 draw with probability
/// alpha / (alpha + n), otherwise a uniform pick among the point parameters.
StickMeasure sample_measure(const MixingDistribution& md, const Kernel& kernel,
                            double alpha,
                            const std::vector<ComponentParameters>& point_params,
                            double eps, RandomSource& rng);

/// Posterior random-measure draw conditional on the current fitted state.
StickMeasure posterior_clusters(const DpState& state, double eps,
                                RandomSource& rng);

/// A sampled mixture density y -> sum_k w_k k(y | phi_k).
class SampledDensity {
public:
  SampledDensity(MixingDistribution md, std::shared_ptr<const Kernel> kernel,
                 StickMeasure measure)
      : md_(std::move(md)), kernel_(std::move(kernel)), measure_(std::move(measure)) {}

  double operator()(double y) const;
  double operator()(const Eigen::RowVectorXd& y) const;

  const StickMeasure& measure() const { return measure_; }

private:
  MixingDistribution md_;
  std::shared_ptr<const Kernel> kernel_;
  StickMeasure measure_;
};

/// One draw from the posterior random mixture density conditional on the
/// current fitted state (not an MCMC average).
SampledDensity posterior_function(const DpState& state, RandomSource& rng);

/// Deterministic summary over retained snapshots: per grid point, the mean,
/// median and equal-tailed interval of the snapshot mixture densities
/// sum_c (n_c / n) k(x | theta_c). Quantiles use linear interpolation
/// between order statistics.
PosteriorSummaryTable summarize_snapshots(
    const std::vector<RetainedSample>& history, const MixingDistribution& md,
    const Kernel& kernel, const std::vector<double>& grid, int burnin,
    int thinning, double level);

PosteriorSummaryTable posterior_summary(const DpState& state,
                                        const std::vector<double>& grid,
                                        int burnin, int thinning, double level);

/// Interpolated quantile of a sample (type-7 rule). `values` need not be
/// sorted.
double interpolated_quantile(std::vector<double> values, double p);

}  // namespace dpmix
