#include "dpmix/measure.hpp"

#include <algorithm>
#include <cmath>

#include "dpmix/errors.hpp"

namespace dpmix {

std::vector<double> stick_breaking_weights(const std::vector<double>& z) {
  std::vector<double> w(z.size());
  double remaining = 1.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    if (!(z[k] > 0.0 && z[k] < 1.0)) {
      throw ParameterError("stick_breaking_weights: sticks must lie in (0, 1)");
    }
    w[k] = z[k] * remaining;
    remaining *= 1.0 - z[k];
  }
  return w;
}

int stick_truncation_length(double concentration, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw ParameterError("stick_truncation_length: eps must lie in (0, 1)");
  }
  if (!(concentration > 0.0)) {
    throw ParameterError("stick_truncation_length: concentration must be > 0");
  }
  double ratio = concentration / (concentration + 1.0);
  return std::max(1, static_cast<int>(std::ceil(std::log(eps) / std::log(ratio))));
}

StickMeasure sample_measure(const MixingDistribution& md, const Kernel& kernel,
                            double alpha,
                            const std::vector<ComponentParameters>& point_params,
                            double eps, RandomSource& rng) {
  double n = static_cast<double>(point_params.size());
  double concentration = alpha + n;
  int N = stick_truncation_length(concentration, eps);

  StickMeasure out;
  out.sticks.reserve(static_cast<std::size_t>(N));
  out.atoms.reserve(static_cast<std::size_t>(N));
  double fresh_prob = alpha / concentration;
  for (int k = 0; k < N; ++k) {
    out.sticks.push_back(rng.beta(1.0, concentration));
    if (point_params.empty() || rng.uniform() < fresh_prob) {
      out.atoms.push_back(kernel.prior_draw(md, rng));
    } else {
      std::size_t idx = static_cast<std::size_t>(
          std::min<double>(rng.uniform() * n, n - 1.0));
      out.atoms.push_back(point_params[idx]);
    }
  }
  out.weights = stick_breaking_weights(out.sticks);
  out.truncation_residual = 1.0;
  for (double z : out.sticks) out.truncation_residual *= 1.0 - z;
  return out;
}

StickMeasure posterior_clusters(const DpState& state, double eps,
                                RandomSource& rng) {
  std::vector<ComponentParameters> point_params;
  point_params.reserve(state.labels.size());
  for (int label : state.labels) {
    point_params.push_back(state.cluster_params[static_cast<std::size_t>(label)]);
  }
  return sample_measure(state.md, *state.kernel, state.alpha, point_params, eps, rng);
}

double SampledDensity::operator()(const Eigen::RowVectorXd& y) const {
  double total = 0.0;
  for (std::size_t k = 0; k < measure_.weights.size(); ++k) {
    total += measure_.weights[k] * likelihood(*kernel_, md_, y, measure_.atoms[k]);
  }
  return total;
}

double SampledDensity::operator()(double y) const {
  Eigen::RowVectorXd row(1);
  row(0) = y;
  return (*this)(row);
}

SampledDensity posterior_function(const DpState& state, RandomSource& rng) {
  return SampledDensity(state.md, state.kernel,
                        posterior_clusters(state, 1e-3, rng));
}

double interpolated_quantile(std::vector<double> values, double p) {
  if (values.empty()) throw ParameterError("interpolated_quantile: empty sample");
  std::sort(values.begin(), values.end());
  double h = p * static_cast<double>(values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  double frac = h - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

PosteriorSummaryTable summarize_snapshots(
    const std::vector<RetainedSample>& history, const MixingDistribution& md,
    const Kernel& kernel, const std::vector<double>& grid, int burnin,
    int thinning, double level) {
  if (grid.empty()) throw ConfigError("posterior_summary: grid must be nonempty");
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("posterior_summary: level must lie in (0, 1)");
  }
  if (burnin < 0 || thinning < 1) {
    throw ConfigError("posterior_summary: burnin must be >= 0 and thinning >= 1");
  }
  if (static_cast<std::size_t>(burnin) >= history.size()) {
    throw InsufficientSamplesError(
        "posterior_summary: burnin leaves no retained samples");
  }

  std::vector<std::size_t> kept;
  for (std::size_t i = static_cast<std::size_t>(burnin); i < history.size();
       i += static_cast<std::size_t>(thinning)) {
    kept.push_back(i);
  }

  PosteriorSummaryTable out;
  out.x = grid;
  out.level = level;
  out.mean.resize(grid.size());
  out.median.resize(grid.size());
  out.lower.resize(grid.size());
  out.upper.resize(grid.size());

  // curves[s][g]: snapshot s evaluated at grid point g.
  std::vector<std::vector<double>> curves(kept.size(),
                                          std::vector<double>(grid.size(), 0.0));
  Eigen::RowVectorXd row(1);
  for (std::size_t s = 0; s < kept.size(); ++s) {
    const RetainedSample& snap = history[kept[s]];
    for (std::size_t g = 0; g < grid.size(); ++g) {
      row(0) = grid[g];
      double total = 0.0;
      for (std::size_t c = 0; c < snap.cluster_params.size(); ++c) {
        total += snap.weights(static_cast<Eigen::Index>(c)) *
                 likelihood(kernel, md, row, snap.cluster_params[c]);
      }
      curves[s][g] = total;
    }
  }

  double tail = 0.5 * (1.0 - level);
  std::vector<double> column(kept.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double sum = 0.0;
    for (std::size_t s = 0; s < kept.size(); ++s) {
      column[s] = curves[s][g];
      sum += column[s];
    }
    out.mean[g] = sum / static_cast<double>(kept.size());
    out.median[g] = interpolated_quantile(column, 0.5);
    out.lower[g] = interpolated_quantile(column, tail);
    out.upper[g] = interpolated_quantile(column, 1.0 - tail);
  }
  return out;
}

PosteriorSummaryTable posterior_summary(const DpState& state,
                                        const std::vector<double>& grid,
                                        int burnin, int thinning, double level) {
  if (state.data.cols() != 1) {
    throw ConfigError("posterior_summary: grid summaries require univariate data");
  }
  return summarize_snapshots(state.history, state.md, *state.kernel, grid,
                             burnin, thinning, level);
}

}  // namespace dpmix
