#include "dpmix/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpmix/errors.hpp"

namespace dpmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Normalizes log weights and samples an index with one uniform. Returns
/// nullopt when no weight carries positive mass.
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

/// Deletes cluster c (which must be empty) and compacts labels.
void erase_cluster(DpState& state, int c) {
  state.cluster_params.erase(state.cluster_params.begin() + c);
  state.points_per_cluster.erase(state.points_per_cluster.begin() + c);
  for (int& label : state.labels) {
    if (label > c) --label;
  }
}

Eigen::MatrixXd cluster_rows(const DpState& state, int c) {
  int count = state.points_per_cluster[static_cast<std::size_t>(c)];
  Eigen::MatrixXd out(count, state.data.cols());
  int row = 0;
  for (int i = 0; i < state.n(); ++i) {
    if (state.labels[static_cast<std::size_t>(i)] == c) {
      out.row(row++) = state.data.row(i);
    }
  }
  return out;
}

}  // namespace

DpState initialise(const Eigen::MatrixXd& data, MixingDistribution md,
                   AlphaPrior alpha_prior, int m, RandomSource rng) {
  if (data.rows() == 0) throw DataDomainError("initialise: data must be nonempty");
  if (!(alpha_prior.shape > 0.0 && alpha_prior.rate > 0.0)) {
    throw ParameterError("initialise: alpha prior parameters must be > 0");
  }
  if (m < 1) throw ParameterError("initialise: auxiliary count m must be >= 1");
  if (md.conjugacy == Conjugacy::NonConjugate) {
    if (md.mh_step_sizes.empty()) {
      throw ParameterError("initialise: non-conjugate kernel requires mh step sizes");
    }
    for (double h : md.mh_step_sizes) {
      if (h < 0.0) throw ParameterError("initialise: mh step sizes must be >= 0");
    }
  } else if (!md.mh_step_sizes.empty()) {
    throw ParameterError("initialise: conjugate kernel must not carry mh step sizes");
  }

  DpState state;
  state.kernel = KernelRegistry::instance().find(md.kernel_id);
  state.kernel->check_support(md, data);
  state.data = data;
  state.md = std::move(md);
  state.alpha_prior = alpha_prior;
  state.aux_count = m;
  state.rng = rng;
  state.alpha = state.rng.gamma(alpha_prior.shape, alpha_prior.rate);
  state.labels.assign(static_cast<std::size_t>(data.rows()), 0);
  state.points_per_cluster = {static_cast<int>(data.rows())};
  if (state.md.conjugacy == Conjugacy::Conjugate) {
    state.cluster_params = state.kernel->posterior_draw(state.md, data, 1, state.rng);
  } else {
    auto chain = state.kernel->posterior_draw(state.md, data, 10, state.rng);
    state.cluster_params = {chain.back()};
  }
  return state;
}

void cluster_component_update(DpState& state) {
  const Kernel& kernel = *state.kernel;
  const bool conjugate = state.md.conjugacy == Conjugacy::Conjugate;
  const int m = state.aux_count;

  for (int i = 0; i < state.n(); ++i) {
    Eigen::RowVectorXd y = state.data.row(i);
    int c = state.labels[static_cast<std::size_t>(i)];
    bool was_singleton = state.points_per_cluster[static_cast<std::size_t>(c)] == 1;
    ComponentParameters vacated;
    --state.points_per_cluster[static_cast<std::size_t>(c)];
    state.labels[static_cast<std::size_t>(i)] = -1;
    if (was_singleton) {
      vacated = state.cluster_params[static_cast<std::size_t>(c)];
      erase_cluster(state, c);
    }

    const int K = state.cluster_count();
    std::vector<double> logw;
    std::vector<ComponentParameters> aux;
    for (int j = 0; j < K; ++j) {
      logw.push_back(std::log(static_cast<double>(
                         state.points_per_cluster[static_cast<std::size_t>(j)])) +
                     kernel.log_likelihood(state.md, y,
                                           state.cluster_params[static_cast<std::size_t>(j)]));
    }
    if (state.alpha > 0.0) {
      if (conjugate) {
        logw.push_back(std::log(state.alpha) + kernel.log_predictive(state.md, y));
      } else {
        // Algorithm 8: the vacated parameter of a removed singleton occupies
        // auxiliary slot 1, the remaining slots are fresh prior draws.
        aux.reserve(static_cast<std::size_t>(m));
        if (was_singleton) aux.push_back(vacated);
        while (static_cast<int>(aux.size()) < m) {
          aux.push_back(kernel.prior_draw(state.md, state.rng));
        }
        double log_alpha_m = std::log(state.alpha / static_cast<double>(m));
        for (const auto& phi : aux) {
          logw.push_back(log_alpha_m + kernel.log_likelihood(state.md, y, phi));
        }
      }
    }

    auto pick = sample_log_weights(logw, state.rng);
    if (!pick.has_value() || static_cast<int>(*pick) >= K) {
      if (!pick.has_value() && state.alpha <= 0.0 && K > 0) {
        // No cluster carries mass and no new cluster is allowed; keep the
        // point where the prior partition structure puts it: largest cluster.
        int best = 0;
        for (int j = 1; j < K; ++j) {
          if (state.points_per_cluster[static_cast<std::size_t>(j)] >
              state.points_per_cluster[static_cast<std::size_t>(best)]) {
            best = j;
          }
        }
        state.labels[static_cast<std::size_t>(i)] = best;
        ++state.points_per_cluster[static_cast<std::size_t>(best)];
        continue;
      }
      ComponentParameters theta;
      if (conjugate) {
        theta = kernel.posterior_draw(state.md, y, 1, state.rng).front();
      } else if (pick.has_value()) {
        theta = aux[*pick - static_cast<std::size_t>(K)];
      } else {
        theta = was_singleton ? vacated : kernel.prior_draw(state.md, state.rng);
      }
      state.cluster_params.push_back(std::move(theta));
      state.points_per_cluster.push_back(1);
      state.labels[static_cast<std::size_t>(i)] = K;
    } else {
      state.labels[static_cast<std::size_t>(i)] = static_cast<int>(*pick);
      ++state.points_per_cluster[*pick];
    }
  }
}

void cluster_parameter_update(DpState& state) {
  const bool conjugate = state.md.conjugacy == Conjugacy::Conjugate;
  for (int c = 0; c < state.cluster_count(); ++c) {
    Eigen::MatrixXd y = cluster_rows(state, c);
    auto& theta = state.cluster_params[static_cast<std::size_t>(c)];
    if (conjugate) {
      theta = state.kernel->posterior_draw(state.md, y, 1, state.rng).front();
    } else {
      theta = state.kernel
                  ->posterior_draw(state.md, y, state.mh_param_steps, state.rng,
                                   &theta, &state.mh_stats)
                  .back();
    }
  }
}

double alpha_posterior_mix_weight(double a, double b, int k, int n, double z) {
  double pi1 = a + k - 1.0;
  double pi2 = n * (b - std::log(z));
  return pi1 / (pi1 + pi2);
}

double draw_alpha_given_z(double a, double b, int k, int n, double z,
                          RandomSource& rng) {
  double rate = b - std::log(z);
  double pi = alpha_posterior_mix_weight(a, b, k, n, z);
  if (rng.uniform() < pi) return rng.gamma(a + k, rate);
  return rng.gamma(a + k - 1.0, rate);
}

void update_alpha(DpState& state) {
  if (state.alpha_fixed) return;
  int k = state.cluster_count();
  int n = state.n();
  double z = state.rng.beta(state.alpha + 1.0, static_cast<double>(n));
  state.alpha = draw_alpha_given_z(state.alpha_prior.shape, state.alpha_prior.rate,
                                   k, n, z, state.rng);
}

void fit(DpState& state, const FitOptions& options) {
  if (options.iterations < 1) throw ConfigError("fit: iterations must be >= 1");
  if (options.thinning < 1) throw ConfigError("fit: thinning must be >= 1");

  int next_report = 1;
  for (int it = 1; it <= options.iterations; ++it) {
    cluster_component_update(state);
    cluster_parameter_update(state);
    update_alpha(state);
    if (options.update_prior) {
      state.md = state.kernel->prior_parameters_update(state.md,
                                                       state.cluster_params,
                                                       state.rng);
    }
    if (options.store_samples && (it - 1) % options.thinning == 0) {
      RetainedSample snap;
      snap.cluster_params = state.cluster_params;
      snap.weights = Eigen::Map<const Eigen::VectorXi>(
                         state.points_per_cluster.data(),
                         static_cast<Eigen::Index>(state.points_per_cluster.size()))
                         .cast<double>() /
                     static_cast<double>(state.n());
      snap.labels = state.labels;
      snap.alpha = state.alpha;
      snap.iteration = it;
      state.history.push_back(std::move(snap));
    }
    if (options.progress && it * 10 >= next_report * options.iterations) {
      options.progress("iteration " + std::to_string(it) + "/" +
                       std::to_string(options.iterations) + " (clusters: " +
                       std::to_string(state.cluster_count()) + ")");
      while (it * 10 >= next_report * options.iterations) ++next_report;
    }
  }
}

LabelPrediction cluster_label_predict(const DpState& state,
                                      const Eigen::MatrixXd& new_data,
                                      RandomSource& rng) {
  if (new_data.rows() == 0) {
    throw DataDomainError("cluster_label_predict: new data must be nonempty");
  }
  state.kernel->check_support(state.md, new_data);
  const Kernel& kernel = *state.kernel;
  const bool conjugate = state.md.conjugacy == Conjugacy::Conjugate;
  const int m = state.aux_count;

  LabelPrediction out;
  out.cluster_parameters = state.cluster_params;
  out.points_per_cluster = state.points_per_cluster;

  for (Eigen::Index i = 0; i < new_data.rows(); ++i) {
    Eigen::RowVectorXd y = new_data.row(i);
    const int K = static_cast<int>(out.cluster_parameters.size());
    std::vector<double> logw;
    std::vector<ComponentParameters> aux;
    for (int j = 0; j < K; ++j) {
      logw.push_back(std::log(static_cast<double>(
                         out.points_per_cluster[static_cast<std::size_t>(j)])) +
                     kernel.log_likelihood(state.md, y,
                                           out.cluster_parameters[static_cast<std::size_t>(j)]));
    }
    if (state.alpha > 0.0) {
      if (conjugate) {
        logw.push_back(std::log(state.alpha) + kernel.log_predictive(state.md, y));
      } else {
        for (int j = 0; j < m; ++j) aux.push_back(kernel.prior_draw(state.md, rng));
        double log_alpha_m = std::log(state.alpha / static_cast<double>(m));
        for (const auto& phi : aux) {
          logw.push_back(log_alpha_m + kernel.log_likelihood(state.md, y, phi));
        }
      }
    }

    auto pick = sample_log_weights(logw, rng);
    int label;
    if (pick.has_value() && static_cast<int>(*pick) < K) {
      label = static_cast<int>(*pick);
      ++out.points_per_cluster[*pick];
    } else if (pick.has_value() || state.alpha > 0.0) {
      ComponentParameters theta =
          conjugate ? kernel.posterior_draw(state.md, y, 1, rng).front()
                    : (pick.has_value() ? aux[*pick - static_cast<std::size_t>(K)]
                                        : kernel.prior_draw(state.md, rng));
      out.cluster_parameters.push_back(std::move(theta));
      out.points_per_cluster.push_back(1);
      label = K;
    } else {
      // alpha == 0 and no mass anywhere: fall back to the largest cluster.
      label = 0;
      for (int j = 1; j < K; ++j) {
        if (out.points_per_cluster[static_cast<std::size_t>(j)] >
            out.points_per_cluster[static_cast<std::size_t>(label)]) {
          label = j;
        }
      }
      ++out.points_per_cluster[static_cast<std::size_t>(label)];
    }
    out.component_indexes.push_back(label);
  }
  out.num_labels = static_cast<int>(out.cluster_parameters.size());
  return out;
}

void change_observations(DpState& state, const Eigen::MatrixXd& new_data) {
  LabelPrediction pred = cluster_label_predict(state, new_data, state.rng);
  state.data = new_data;
  state.labels = pred.component_indexes;
  state.cluster_params = std::move(pred.cluster_parameters);
  state.points_per_cluster.assign(state.cluster_params.size(), 0);
  for (int label : state.labels) {
    ++state.points_per_cluster[static_cast<std::size_t>(label)];
  }
  for (int c = state.cluster_count() - 1; c >= 0; --c) {
    if (state.points_per_cluster[static_cast<std::size_t>(c)] == 0) {
      erase_cluster(state, c);
    }
  }
}

void check_invariants(const DpState& state) {
  auto fail = [](const std::string& what) { throw std::logic_error("DpState invariant: " + what); };
  if (state.cluster_params.size() != state.points_per_cluster.size()) {
    fail("cluster table and count table differ in size");
  }
  if (static_cast<int>(state.labels.size()) != state.n()) fail("label count != n");
  std::vector<int> tally(state.cluster_params.size(), 0);
  for (int label : state.labels) {
    if (label < 0 || label >= state.cluster_count()) fail("label out of range");
    ++tally[static_cast<std::size_t>(label)];
  }
  int total = 0;
  for (std::size_t c = 0; c < tally.size(); ++c) {
    if (tally[c] != state.points_per_cluster[c]) fail("stale cluster count");
    if (tally[c] == 0) fail("empty cluster persisted");
    total += tally[c];
  }
  if (total != state.n()) fail("counts do not sum to n");
  if (!(state.alpha >= 0.0) || !std::isfinite(state.alpha)) fail("alpha not finite");
}

}  // namespace dpmix
