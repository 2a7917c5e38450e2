#pragma once

#include <Eigen/Dense>
#include <vector>

#include "dpmix/dp.hpp"
#include "dpmix/measure.hpp"

namespace dpmix {

/// One group of the franchise: its data, the local table of every datum, and
/// the global dish each table serves.
struct HdpGroup {
  Eigen::MatrixXd data;
  std::vector<int> table_of_datum;
  std::vector<int> dish_of_table;
  std::vector<int> table_counts;
  double alpha = 1.0;
  std::vector<RetainedSample> history;

  int n() const { return static_cast<int>(data.rows()); }
  int table_count() const { return static_cast<int>(dish_of_table.size()); }
};

/// Hierarchical DP state: group-local tables over globally shared dishes.
/// Single-owner; groups are updated sequentially within a sweep.
struct HdpState {
  std::vector<HdpGroup> groups;
  std::vector<ComponentParameters> dishes;
  std::vector<int> tables_per_dish;
  double gamma = 1.0;
  AlphaPrior alpha_prior;
  AlphaPrior gamma_prior;
  bool concentrations_fixed = false;
  MixingDistribution md;
  std::shared_ptr<const Kernel> kernel;
  int aux_count = 3;
  int mh_param_steps = 1;
  RandomSource rng{0};
  MhStats mh_stats;

  int dish_count() const { return static_cast<int>(dishes.size()); }
  int total_tables() const {
    int t = 0;
    for (const auto& g : groups) t += g.table_count();
    return t;
  }
};

/// Every group starts as one table and all tables share a single dish whose
/// parameter is fit to the pooled data; concentrations are drawn from their
/// priors.
HdpState hdp_initialise(const std::vector<Eigen::MatrixXd>& datasets,
                        MixingDistribution md, AlphaPrior gamma_prior,
                        AlphaPrior alpha_prior, RandomSource rng);

/// Franchise sweeps: customer-to-table reassignment, table-to-dish
/// reassignment, pooled dish-parameter updates, and concentration updates.
/// Appends one history snapshot per group per iteration.
void hdp_fit(HdpState& state, int iterations);

/// Group-level summary over that group's retained snapshots.
PosteriorSummaryTable hdp_posterior_summary(const HdpState& state,
                                            int group_index,
                                            const std::vector<double>& grid,
                                            int burnin, int thinning,
                                            double level);

void hdp_check_invariants(const HdpState& state);

}  // namespace dpmix
