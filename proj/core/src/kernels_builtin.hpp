#pragma once

// Built-in kernel classes, shared between the registry and their
// implementation files.

#include "dpmix/kernels.hpp"

namespace dpmix::detail {

class GaussianKernel final : public Kernel {
public:
  double log_likelihood(const MixingDistribution& md, const Eigen::RowVectorXd& y,
                        const ComponentParameters& theta) const override;
  ComponentParameters prior_draw(const MixingDistribution& md,
                                 RandomSource& rng) const override;
  std::vector<ComponentParameters> posterior_draw(
      const MixingDistribution& md, const Eigen::MatrixXd& y, int n,
      RandomSource& rng, const ComponentParameters* start,
      MhStats* stats) const override;
  double log_predictive(const MixingDistribution& md,
                        const Eigen::RowVectorXd& y) const override;
  double log_marginal(const MixingDistribution& md,
                      const Eigen::MatrixXd& y) const override;
};

class MvNormalKernel final : public Kernel {
public:
  double log_likelihood(const MixingDistribution& md, const Eigen::RowVectorXd& y,
                        const ComponentParameters& theta) const override;
  ComponentParameters prior_draw(const MixingDistribution& md,
                                 RandomSource& rng) const override;
  std::vector<ComponentParameters> posterior_draw(
      const MixingDistribution& md, const Eigen::MatrixXd& y, int n,
      RandomSource& rng, const ComponentParameters* start,
      MhStats* stats) const override;
  double log_predictive(const MixingDistribution& md,
                        const Eigen::RowVectorXd& y) const override;
  double log_marginal(const MixingDistribution& md,
                      const Eigen::MatrixXd& y) const override;
};

/// Semi-conjugate multivariate normal: independent Normal x inverse-Wishart
/// base measure, posterior draws via Gibbs cycles of the two conditionals.
class MvNormalSemiKernel final : public Kernel {
public:
  double log_likelihood(const MixingDistribution& md, const Eigen::RowVectorXd& y,
                        const ComponentParameters& theta) const override;
  ComponentParameters prior_draw(const MixingDistribution& md,
                                 RandomSource& rng) const override;
  std::vector<ComponentParameters> posterior_draw(
      const MixingDistribution& md, const Eigen::MatrixXd& y, int n,
      RandomSource& rng, const ComponentParameters* start,
      MhStats* stats) const override;
  double log_prior_density(const MixingDistribution& md,
                           const ComponentParameters& theta) const override;
  ComponentParameters mh_propose(const MixingDistribution& md,
                                 const ComponentParameters& old,
                                 RandomSource& rng) const override;
};

class BetaKernel final : public Kernel {
public:
  double log_likelihood(const MixingDistribution& md, const Eigen::RowVectorXd& y,
                        const ComponentParameters& theta) const override;
  ComponentParameters prior_draw(const MixingDistribution& md,
                                 RandomSource& rng) const override;
  double log_prior_density(const MixingDistribution& md,
                           const ComponentParameters& theta) const override;
  ComponentParameters mh_propose(const MixingDistribution& md,
                                 const ComponentParameters& old,
                                 RandomSource& rng) const override;
  MixingDistribution prior_parameters_update(
      const MixingDistribution& md,
      const std::vector<ComponentParameters>& cluster_params,
      RandomSource& rng) const override;
  void check_support(const MixingDistribution& md,
                     const Eigen::MatrixXd& data) const override;
};

class WeibullKernel final : public Kernel {
public:
  double log_likelihood(const MixingDistribution& md, const Eigen::RowVectorXd& y,
                        const ComponentParameters& theta) const override;
  ComponentParameters prior_draw(const MixingDistribution& md,
                                 RandomSource& rng) const override;
  double log_prior_density(const MixingDistribution& md,
                           const ComponentParameters& theta) const override;
  ComponentParameters mh_propose(const MixingDistribution& md,
                                 const ComponentParameters& old,
                                 RandomSource& rng) const override;
  MixingDistribution prior_parameters_update(
      const MixingDistribution& md,
      const std::vector<ComponentParameters>& cluster_params,
      RandomSource& rng) const override;
  void check_support(const MixingDistribution& md,
                     const Eigen::MatrixXd& data) const override;
};

/// Unpacked mvnormal / mvnormal2 base-measure parameters.
int mv_dim(const MixingDistribution& md);
NiwParams unpack_niw(const MixingDistribution& md);

}  // namespace dpmix::detail
