#include "dpmix/hdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "dpmix/errors.hpp"

namespace dpmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
  double mx = kNegInf;
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return kNegInf;
  double s = 0.0;
  for (double x : v) {
    if (std::isfinite(x)) s += std::exp(x - mx);
  }
  return mx + std::log(s);
}

std::optional<std::size_t> sample_log_weights(const std::vector<double>& logw,
                                              RandomSource& rng) {
  double mx = kNegInf;
  for (double w : logw) mx = std::max(mx, w);
  if (!std::isfinite(mx)) return std::nullopt;
  std::vector<double> probs(logw.size());
  for (std::size_t i = 0; i < logw.size(); ++i) {
    probs[i] = std::isfinite(logw[i]) ? std::exp(logw[i] - mx) : 0.0;
  }
  return rng.categorical(probs);
}

void erase_dish(HdpState& state, int d) {
  state.dishes.erase(state.dishes.begin() + d);
  state.tables_per_dish.erase(state.tables_per_dish.begin() + d);
  for (auto& group : state.groups) {
    for (int& dish : group.dish_of_table) {
      if (dish > d) --dish;
    }
  }
}

void erase_table(HdpState& state, HdpGroup& group, int t) {
  int d = group.dish_of_table[static_cast<std::size_t>(t)];
  group.dish_of_table.erase(group.dish_of_table.begin() + t);
  group.table_counts.erase(group.table_counts.begin() + t);
  for (int& table : group.table_of_datum) {
    if (table > t) --table;
  }
  if (--state.tables_per_dish[static_cast<std::size_t>(d)] == 0) {
    erase_dish(state, d);
  }
}

/// Table data block.
Eigen::MatrixXd table_rows(const HdpGroup& group, int t) {
  int count = group.table_counts[static_cast<std::size_t>(t)];
  Eigen::MatrixXd out(count, group.data.cols());
  int row = 0;
  for (int i = 0; i < group.n(); ++i) {
    if (group.table_of_datum[static_cast<std::size_t>(i)] == t) {
      out.row(row++) = group.data.row(i);
    }
  }
  return out;
}

double block_log_likelihood(const HdpState& state, const Eigen::MatrixXd& y,
                            const ComponentParameters& theta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    total += state.kernel->log_likelihood(state.md, y.row(i), theta);
    if (!std::isfinite(total)) return kNegInf;
  }
  return total;
}

/// Joint base-measure weight of a data block for the "new dish" option:
/// exact marginal for conjugate kernels, auxiliary prior draws otherwise.
/// Fills `aux` with the auxiliary candidates in the non-conjugate case.
std::vector<double> new_dish_log_weights(HdpState& state, const Eigen::MatrixXd& y,
                                         const ComponentParameters* reuse,
                                         std::vector<ComponentParameters>& aux) {
  aux.clear();
  if (state.md.conjugacy == Conjugacy::Conjugate) {
    return {std::log(state.gamma) + state.kernel->log_marginal(state.md, y)};
  }
  int m = state.aux_count;
  if (reuse) aux.push_back(*reuse);
  while (static_cast<int>(aux.size()) < m) {
    aux.push_back(state.kernel->prior_draw(state.md, state.rng));
  }
  double log_gamma_m = std::log(state.gamma / static_cast<double>(m));
  std::vector<double> out;
  out.reserve(aux.size());
  for (const auto& phi : aux) {
    out.push_back(log_gamma_m + block_log_likelihood(state, y, phi));
  }
  return out;
}

ComponentParameters draw_new_dish(HdpState& state, const Eigen::MatrixXd& y,
                                  const std::vector<ComponentParameters>& aux,
                                  std::size_t aux_index) {
  if (state.md.conjugacy == Conjugacy::Conjugate) {
    return state.kernel->posterior_draw(state.md, y, 1, state.rng).front();
  }
  return aux[aux_index];
}

void customer_update(HdpState& state, HdpGroup& group) {
  for (int i = 0; i < group.n(); ++i) {
    Eigen::RowVectorXd y = group.data.row(i);
    int t = group.table_of_datum[static_cast<std::size_t>(i)];
    --group.table_counts[static_cast<std::size_t>(t)];
    group.table_of_datum[static_cast<std::size_t>(i)] = -1;
    if (group.table_counts[static_cast<std::size_t>(t)] == 0) {
      erase_table(state, group, t);
    }

    // Dish mixture seen by a fresh table.
    Eigen::MatrixXd point = y;
    std::vector<ComponentParameters> aux;
    std::vector<double> dish_logw;
    const int D = state.dish_count();
    for (int d = 0; d < D; ++d) {
      dish_logw.push_back(
          std::log(static_cast<double>(state.tables_per_dish[static_cast<std::size_t>(d)])) +
          state.kernel->log_likelihood(state.md, y, state.dishes[static_cast<std::size_t>(d)]));
    }
    for (double w : new_dish_log_weights(state, point, nullptr, aux)) {
      dish_logw.push_back(w);
    }
    double log_f = log_sum_exp(dish_logw) -
                   std::log(static_cast<double>(state.total_tables()) + state.gamma);

    const int T = group.table_count();
    std::vector<double> table_logw;
    for (int tt = 0; tt < T; ++tt) {
      table_logw.push_back(
          std::log(static_cast<double>(group.table_counts[static_cast<std::size_t>(tt)])) +
          state.kernel->log_likelihood(state.md, y,
                                       state.dishes[static_cast<std::size_t>(
                                           group.dish_of_table[static_cast<std::size_t>(tt)])]));
    }
    table_logw.push_back(std::log(group.alpha) + log_f);

    auto pick = sample_log_weights(table_logw, state.rng);
    std::size_t chosen = pick.value_or(static_cast<std::size_t>(T));
    if (static_cast<int>(chosen) < T) {
      group.table_of_datum[static_cast<std::size_t>(i)] = static_cast<int>(chosen);
      ++group.table_counts[chosen];
      continue;
    }

    // New table: pick its dish from the same mixture.
    auto dish_pick = sample_log_weights(dish_logw, state.rng);
    int dish;
    if (dish_pick.has_value() && static_cast<int>(*dish_pick) < D) {
      dish = static_cast<int>(*dish_pick);
    } else {
      std::size_t aux_index = dish_pick.has_value()
                                  ? *dish_pick - static_cast<std::size_t>(D)
                                  : 0;
      if (aux.empty() && state.md.conjugacy == Conjugacy::NonConjugate) {
        aux.push_back(state.kernel->prior_draw(state.md, state.rng));
        aux_index = 0;
      }
      state.dishes.push_back(draw_new_dish(state, point, aux, aux_index));
      state.tables_per_dish.push_back(0);
      dish = state.dish_count() - 1;
    }
    group.dish_of_table.push_back(dish);
    group.table_counts.push_back(1);
    ++state.tables_per_dish[static_cast<std::size_t>(dish)];
    group.table_of_datum[static_cast<std::size_t>(i)] = group.table_count() - 1;
  }
}

void table_dish_update(HdpState& state, HdpGroup& group) {
  for (int t = 0; t < group.table_count(); ++t) {
    Eigen::MatrixXd y = table_rows(group, t);
    int d_old = group.dish_of_table[static_cast<std::size_t>(t)];
    --state.tables_per_dish[static_cast<std::size_t>(d_old)];
    bool orphaned = state.tables_per_dish[static_cast<std::size_t>(d_old)] == 0;

    const int D = state.dish_count();
    std::vector<double> logw;
    for (int d = 0; d < D; ++d) {
      int count = state.tables_per_dish[static_cast<std::size_t>(d)];
      if (count == 0) {
        logw.push_back(kNegInf);
        continue;
      }
      logw.push_back(std::log(static_cast<double>(count)) +
                     block_log_likelihood(state, y, state.dishes[static_cast<std::size_t>(d)]));
    }
    // An orphaned dish parameter is recycled as the first fresh candidate.
    std::vector<ComponentParameters> aux;
    const ComponentParameters* reuse =
        orphaned ? &state.dishes[static_cast<std::size_t>(d_old)] : nullptr;
    for (double w : new_dish_log_weights(state, y, reuse, aux)) {
      logw.push_back(w);
    }

    auto pick = sample_log_weights(logw, state.rng);
    std::size_t chosen = pick.value_or(static_cast<std::size_t>(d_old));
    int dish;
    if (static_cast<int>(chosen) < D) {
      dish = static_cast<int>(chosen);
    } else {
      std::size_t aux_index = chosen - static_cast<std::size_t>(D);
      if (orphaned && state.md.conjugacy == Conjugacy::NonConjugate && aux_index == 0) {
        dish = d_old;  // kept its parameter
      } else {
        state.dishes.push_back(draw_new_dish(state, y, aux, aux_index));
        state.tables_per_dish.push_back(0);
        dish = state.dish_count() - 1;
      }
    }
    group.dish_of_table[static_cast<std::size_t>(t)] = dish;
    ++state.tables_per_dish[static_cast<std::size_t>(dish)];
    if (orphaned && dish != d_old) {
      erase_dish(state, d_old);
      if (group.dish_of_table[static_cast<std::size_t>(t)] > d_old) {
        // erase_dish already shifted this table's dish index.
      }
    }
  }
}

void dish_parameter_update(HdpState& state) {
  for (int d = 0; d < state.dish_count(); ++d) {
    // Pool the data of every table serving dish d across groups.
    std::vector<Eigen::RowVectorXd> rows;
    for (const auto& group : state.groups) {
      for (int i = 0; i < group.n(); ++i) {
        int t = group.table_of_datum[static_cast<std::size_t>(i)];
        if (group.dish_of_table[static_cast<std::size_t>(t)] == d) {
          rows.push_back(group.data.row(i));
        }
      }
    }
    Eigen::MatrixXd y(static_cast<Eigen::Index>(rows.size()),
                      state.groups.front().data.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      y.row(static_cast<Eigen::Index>(i)) = rows[i];
    }
    auto& theta = state.dishes[static_cast<std::size_t>(d)];
    if (state.md.conjugacy == Conjugacy::Conjugate) {
      theta = state.kernel->posterior_draw(state.md, y, 1, state.rng).front();
    } else {
      theta = state.kernel
                  ->posterior_draw(state.md, y, state.mh_param_steps, state.rng,
                                   &theta, &state.mh_stats)
                  .back();
    }
  }
}

void concentration_update(HdpState& state) {
  if (state.concentrations_fixed) return;
  for (auto& group : state.groups) {
    double z = state.rng.beta(group.alpha + 1.0, static_cast<double>(group.n()));
    group.alpha = draw_alpha_given_z(state.alpha_prior.shape, state.alpha_prior.rate,
                                     group.table_count(), group.n(), z, state.rng);
  }
  int total = state.total_tables();
  double z = state.rng.beta(state.gamma + 1.0, static_cast<double>(total));
  state.gamma = draw_alpha_given_z(state.gamma_prior.shape, state.gamma_prior.rate,
                                   state.dish_count(), total, z, state.rng);
}

void append_group_snapshots(HdpState& state, int iteration) {
  for (auto& group : state.groups) {
    // Dish weights within the group, over the dishes its tables serve.
    std::vector<int> dish_to_local(static_cast<std::size_t>(state.dish_count()), -1);
    RetainedSample snap;
    std::vector<double> weights;
    for (int i = 0; i < group.n(); ++i) {
      int t = group.table_of_datum[static_cast<std::size_t>(i)];
      int d = group.dish_of_table[static_cast<std::size_t>(t)];
      if (dish_to_local[static_cast<std::size_t>(d)] < 0) {
        dish_to_local[static_cast<std::size_t>(d)] =
            static_cast<int>(snap.cluster_params.size());
        snap.cluster_params.push_back(state.dishes[static_cast<std::size_t>(d)]);
        weights.push_back(0.0);
      }
      int local = dish_to_local[static_cast<std::size_t>(d)];
      weights[static_cast<std::size_t>(local)] += 1.0;
      snap.labels.push_back(local);
    }
    snap.weights = Eigen::Map<const Eigen::VectorXd>(
                       weights.data(), static_cast<Eigen::Index>(weights.size())) /
                   static_cast<double>(group.n());
    snap.alpha = group.alpha;
    snap.iteration = iteration;
    group.history.push_back(std::move(snap));
  }
}

}  // namespace

HdpState hdp_initialise(const std::vector<Eigen::MatrixXd>& datasets,
                        MixingDistribution md, AlphaPrior gamma_prior,
                        AlphaPrior alpha_prior, RandomSource rng) {
  if (datasets.empty()) throw DataDomainError("hdp_initialise: need at least one dataset");
  HdpState state;
  state.kernel = KernelRegistry::instance().find(md.kernel_id);
  Eigen::Index cols = datasets.front().cols();
  Eigen::Index total = 0;
  for (const auto& data : datasets) {
    if (data.rows() == 0) throw DataDomainError("hdp_initialise: empty dataset");
    if (data.cols() != cols) throw DataDomainError("hdp_initialise: dimension mismatch");
    state.kernel->check_support(md, data);
    total += data.rows();
  }
  Eigen::MatrixXd pooled(total, cols);
  Eigen::Index row = 0;
  for (const auto& data : datasets) {
    pooled.middleRows(row, data.rows()) = data;
    row += data.rows();
  }

  state.md = std::move(md);
  state.alpha_prior = alpha_prior;
  state.gamma_prior = gamma_prior;
  state.rng = rng;
  state.gamma = state.rng.gamma(gamma_prior.shape, gamma_prior.rate);
  if (state.md.conjugacy == Conjugacy::Conjugate) {
    state.dishes = state.kernel->posterior_draw(state.md, pooled, 1, state.rng);
  } else {
    state.dishes = {state.kernel->posterior_draw(state.md, pooled, 10, state.rng).back()};
  }
  state.tables_per_dish = {static_cast<int>(datasets.size())};
  for (const auto& data : datasets) {
    HdpGroup group;
    group.data = data;
    group.table_of_datum.assign(static_cast<std::size_t>(data.rows()), 0);
    group.dish_of_table = {0};
    group.table_counts = {static_cast<int>(data.rows())};
    group.alpha = state.rng.gamma(alpha_prior.shape, alpha_prior.rate);
    state.groups.push_back(std::move(group));
  }
  return state;
}

void hdp_fit(HdpState& state, int iterations) {
  if (iterations < 1) throw ConfigError("hdp_fit: iterations must be >= 1");
  for (int it = 1; it <= iterations; ++it) {
    for (auto& group : state.groups) customer_update(state, group);
    for (auto& group : state.groups) table_dish_update(state, group);
    dish_parameter_update(state);
    concentration_update(state);
    append_group_snapshots(state, it);
  }
}

PosteriorSummaryTable hdp_posterior_summary(const HdpState& state,
                                            int group_index,
                                            const std::vector<double>& grid,
                                            int burnin, int thinning,
                                            double level) {
  if (group_index < 0 || group_index >= static_cast<int>(state.groups.size())) {
    throw ConfigError("hdp_posterior_summary: group index out of range");
  }
  return summarize_snapshots(state.groups[static_cast<std::size_t>(group_index)].history,
                             state.md, *state.kernel, grid, burnin, thinning, level);
}

void hdp_check_invariants(const HdpState& state) {
  auto fail = [](const std::string& what) {
    throw std::logic_error("HdpState invariant: " + what);
  };
  std::vector<int> dish_tally(static_cast<std::size_t>(state.dish_count()), 0);
  for (const auto& group : state.groups) {
    if (group.dish_of_table.size() != group.table_counts.size()) {
      fail("table/dish maps differ in size");
    }
    std::vector<int> table_tally(group.dish_of_table.size(), 0);
    for (int t : group.table_of_datum) {
      if (t < 0 || t >= group.table_count()) fail("table index out of range");
      ++table_tally[static_cast<std::size_t>(t)];
    }
    for (std::size_t t = 0; t < table_tally.size(); ++t) {
      if (table_tally[t] == 0) fail("empty table persisted");
      if (table_tally[t] != group.table_counts[t]) fail("stale table count");
      int d = group.dish_of_table[t];
      if (d < 0 || d >= state.dish_count()) fail("dish index out of range");
      ++dish_tally[static_cast<std::size_t>(d)];
    }
    if (!(group.alpha > 0.0) || !std::isfinite(group.alpha)) fail("group alpha not positive");
  }
  for (std::size_t d = 0; d < dish_tally.size(); ++d) {
    if (dish_tally[d] == 0) fail("dish with no tables persisted");
    if (dish_tally[d] != state.tables_per_dish[d]) fail("stale dish table count");
  }
  if (state.dish_count() > state.total_tables()) fail("more dishes than tables");
  if (!(state.gamma > 0.0) || !std::isfinite(state.gamma)) fail("gamma not positive");
}

}  // namespace dpmix
