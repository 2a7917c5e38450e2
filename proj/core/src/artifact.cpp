#include "dpmix/artifact.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dpmix/errors.hpp"

namespace dpmix {

using nlohmann::json;

void FitConfig::validate() const {
  if (kernel_id.empty()) throw ConfigError("config: kernel_id is required");
  if (!KernelRegistry::instance().contains(kernel_id)) {
    throw ConfigError("config: unknown kernel '" + kernel_id + "'");
  }
  if (iterations < 1) throw ConfigError("config: iterations must be >= 1");
  if (thinning < 1) throw ConfigError("config: thinning must be >= 1");
  if (m < 1) throw ConfigError("config: m must be >= 1");
  if (!has_seed) throw ConfigError("config: seed is required");
  if (!(alpha_shape > 0.0) || !(alpha_rate > 0.0)) {
    throw ConfigError("config: alpha prior parameters must be positive");
  }
  if (fixed_alpha && alpha_value < 0.0) {
    throw ConfigError("config: fixed alpha must be >= 0");
  }
  for (int c : columns) {
    if (c < 1) throw ConfigError("config: column indexes are 1-based");
  }
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  Eigen::MatrixXd m(j.at("rows").get<Eigen::Index>(),
                    j.at("cols").get<Eigen::Index>());
  const json& rows = j.at("data");
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(i, c) = rows.at(static_cast<std::size_t>(i))
                    .at(static_cast<std::size_t>(c))
                    .get<double>();
    }
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
  }
  return v;
}

json params_to_json(const ComponentParameters& p) {
  json out = json::array();
  for (const auto& m : p.values) out.push_back(matrix_to_json(m));
  return out;
}

ComponentParameters params_from_json(const json& j) {
  ComponentParameters p;
  for (const auto& m : j) p.values.push_back(matrix_from_json(m));
  return p;
}

json params_list_to_json(const std::vector<ComponentParameters>& list) {
  json out = json::array();
  for (const auto& p : list) out.push_back(params_to_json(p));
  return out;
}

std::vector<ComponentParameters> params_list_from_json(const json& j) {
  std::vector<ComponentParameters> list;
  for (const auto& p : j) list.push_back(params_from_json(p));
  return list;
}

json sample_to_json(const RetainedSample& s) {
  return json{{"cluster_params", params_list_to_json(s.cluster_params)},
              {"weights", vector_to_json(s.weights)},
              {"labels", s.labels},
              {"alpha", s.alpha},
              {"iteration", s.iteration}};
}

RetainedSample sample_from_json(const json& j) {
  RetainedSample s;
  s.cluster_params = params_list_from_json(j.at("cluster_params"));
  s.weights = vector_from_json(j.at("weights"));
  s.labels = j.at("labels").get<std::vector<int>>();
  s.alpha = j.at("alpha").get<double>();
  s.iteration = j.at("iteration").get<int>();
  return s;
}

json history_to_json(const std::vector<RetainedSample>& history) {
  json out = json::array();
  for (const auto& s : history) out.push_back(sample_to_json(s));
  return out;
}

std::vector<RetainedSample> history_from_json(const json& j) {
  std::vector<RetainedSample> history;
  for (const auto& s : j) history.push_back(sample_from_json(s));
  return history;
}

json md_to_json(const MixingDistribution& md) {
  return json{{"kernel_id", md.kernel_id},
              {"conjugate", md.conjugacy == Conjugacy::Conjugate},
              {"g0_priors", md.g0_priors},
              {"mh_step_sizes", md.mh_step_sizes},
              {"hyper_prior_parameters", md.hyper_prior_parameters},
              {"fixed_constants", md.fixed_constants}};
}

MixingDistribution md_from_json(const json& j) {
  MixingDistribution md;
  md.kernel_id = j.at("kernel_id").get<std::string>();
  md.conjugacy = j.at("conjugate").get<bool>() ? Conjugacy::Conjugate
                                               : Conjugacy::NonConjugate;
  md.g0_priors = j.at("g0_priors").get<std::vector<double>>();
  md.mh_step_sizes = j.at("mh_step_sizes").get<std::vector<double>>();
  md.hyper_prior_parameters =
      j.at("hyper_prior_parameters").get<std::vector<double>>();
  md.fixed_constants = j.at("fixed_constants").get<std::vector<double>>();
  return md;
}

json config_to_json(const FitConfig& c) {
  return json{{"kernel", c.kernel_id},
              {"g0_priors", c.g0_priors},
              {"mh_step_sizes", c.mh_step_sizes},
              {"alpha_prior", {c.alpha_shape, c.alpha_rate}},
              {"iterations", c.iterations},
              {"thinning", c.thinning},
              {"store_samples", c.store_samples},
              {"update_prior", c.update_prior},
              {"m", c.m},
              {"seed", c.seed},
              {"scale", c.scale},
              {"fixed_alpha", c.fixed_alpha},
              {"alpha_value", c.alpha_value},
              {"group_col", c.group_column},
              {"columns", c.columns},
              {"header", c.header}};
}

FitConfig config_from_json(const json& j) {
  FitConfig c;
  c.kernel_id = j.value("kernel", c.kernel_id);
  c.g0_priors = j.value("g0_priors", std::vector<double>{});
  c.mh_step_sizes = j.value("mh_step_sizes", std::vector<double>{});
  if (j.contains("alpha_prior")) {
    c.alpha_shape = j.at("alpha_prior").at(0).get<double>();
    c.alpha_rate = j.at("alpha_prior").at(1).get<double>();
  }
  c.iterations = j.value("iterations", c.iterations);
  c.thinning = j.value("thinning", c.thinning);
  c.store_samples = j.value("store_samples", c.store_samples);
  c.update_prior = j.value("update_prior", c.update_prior);
  c.m = j.value("m", c.m);
  if (j.contains("seed")) {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.has_seed = true;
  }
  c.scale = j.value("scale", c.scale);
  c.fixed_alpha = j.value("fixed_alpha", c.fixed_alpha);
  c.alpha_value = j.value("alpha_value", c.alpha_value);
  c.group_column = j.value("group_col", c.group_column);
  c.columns = j.value("columns", std::vector<int>{});
  c.header = j.value("header", c.header);
  return c;
}

json transform_to_json(const ColumnTransform& t) {
  return json{{"shift", vector_to_json(t.shift)},
              {"scale", vector_to_json(t.scale)}};
}

ColumnTransform transform_from_json(const json& j) {
  ColumnTransform t;
  t.shift = vector_from_json(j.at("shift"));
  t.scale = vector_from_json(j.at("scale"));
  return t;
}

json state_to_json(const DpState& s) {
  return json{{"data", matrix_to_json(s.data)},
              {"md", md_to_json(s.md)},
              {"labels", s.labels},
              {"cluster_params", params_list_to_json(s.cluster_params)},
              {"points_per_cluster", s.points_per_cluster},
              {"alpha", s.alpha},
              {"alpha_prior", {s.alpha_prior.shape, s.alpha_prior.rate}},
              {"alpha_fixed", s.alpha_fixed},
              {"m", s.aux_count},
              {"mh_param_steps", s.mh_param_steps},
              {"history", history_to_json(s.history)},
              {"rng", s.rng.save_state()},
              {"seed", s.rng.seed()},
              {"mh_proposed", s.mh_stats.proposed},
              {"mh_accepted", s.mh_stats.accepted}};
}

DpState state_from_json(const json& j) {
  DpState s;
  s.data = matrix_from_json(j.at("data"));
  s.md = md_from_json(j.at("md"));
  s.kernel = KernelRegistry::instance().find(s.md.kernel_id);
  s.labels = j.at("labels").get<std::vector<int>>();
  s.cluster_params = params_list_from_json(j.at("cluster_params"));
  s.points_per_cluster = j.at("points_per_cluster").get<std::vector<int>>();
  s.alpha = j.at("alpha").get<double>();
  s.alpha_prior.shape = j.at("alpha_prior").at(0).get<double>();
  s.alpha_prior.rate = j.at("alpha_prior").at(1).get<double>();
  s.alpha_fixed = j.at("alpha_fixed").get<bool>();
  s.aux_count = j.at("m").get<int>();
  s.mh_param_steps = j.at("mh_param_steps").get<int>();
  s.history = history_from_json(j.at("history"));
  s.rng = RandomSource(j.at("seed").get<std::uint64_t>());
  s.rng.restore_state(j.at("rng").get<std::string>());
  s.mh_stats.proposed = j.at("mh_proposed").get<long long>();
  s.mh_stats.accepted = j.at("mh_accepted").get<long long>();
  return s;
}

json group_to_json(const HdpGroup& g) {
  return json{{"data", matrix_to_json(g.data)},
              {"table_of_datum", g.table_of_datum},
              {"dish_of_table", g.dish_of_table},
              {"table_counts", g.table_counts},
              {"alpha", g.alpha},
              {"history", history_to_json(g.history)}};
}

HdpGroup group_from_json(const json& j) {
  HdpGroup g;
  g.data = matrix_from_json(j.at("data"));
  g.table_of_datum = j.at("table_of_datum").get<std::vector<int>>();
  g.dish_of_table = j.at("dish_of_table").get<std::vector<int>>();
  g.table_counts = j.at("table_counts").get<std::vector<int>>();
  g.alpha = j.at("alpha").get<double>();
  g.history = history_from_json(j.at("history"));
  return g;
}

json hdp_state_to_json(const HdpState& s) {
  json groups = json::array();
  for (const auto& g : s.groups) groups.push_back(group_to_json(g));
  return json{{"groups", std::move(groups)},
              {"dishes", params_list_to_json(s.dishes)},
              {"tables_per_dish", s.tables_per_dish},
              {"gamma", s.gamma},
              {"alpha_prior", {s.alpha_prior.shape, s.alpha_prior.rate}},
              {"gamma_prior", {s.gamma_prior.shape, s.gamma_prior.rate}},
              {"concentrations_fixed", s.concentrations_fixed},
              {"md", md_to_json(s.md)},
              {"m", s.aux_count},
              {"mh_param_steps", s.mh_param_steps},
              {"rng", s.rng.save_state()},
              {"seed", s.rng.seed()},
              {"mh_proposed", s.mh_stats.proposed},
              {"mh_accepted", s.mh_stats.accepted}};
}

HdpState hdp_state_from_json(const json& j) {
  HdpState s;
  for (const auto& g : j.at("groups")) s.groups.push_back(group_from_json(g));
  s.dishes = params_list_from_json(j.at("dishes"));
  s.tables_per_dish = j.at("tables_per_dish").get<std::vector<int>>();
  s.gamma = j.at("gamma").get<double>();
  s.alpha_prior.shape = j.at("alpha_prior").at(0).get<double>();
  s.alpha_prior.rate = j.at("alpha_prior").at(1).get<double>();
  s.gamma_prior.shape = j.at("gamma_prior").at(0).get<double>();
  s.gamma_prior.rate = j.at("gamma_prior").at(1).get<double>();
  s.concentrations_fixed = j.at("concentrations_fixed").get<bool>();
  s.md = md_from_json(j.at("md"));
  s.kernel = KernelRegistry::instance().find(s.md.kernel_id);
  s.aux_count = j.at("m").get<int>();
  s.mh_param_steps = j.at("mh_param_steps").get<int>();
  s.rng = RandomSource(j.at("seed").get<std::uint64_t>());
  s.rng.restore_state(j.at("rng").get<std::string>());
  s.mh_stats.proposed = j.at("mh_proposed").get<long long>();
  s.mh_stats.accepted = j.at("mh_accepted").get<long long>();
  return s;
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("artifact: malformed JSON");
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("artifact: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ConfigError("artifact: cannot open " + path + " for writing");
  out << text;
}

void check_version(const json& j) {
  if (!j.contains("version") || j.at("version").get<int>() != 1) {
    throw ConfigError("artifact: unsupported format version");
  }
}

}  // namespace

FitConfig fit_config_from_json_file(const std::string& path) {
  json j = parse(read_file(path));
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  static const char* allowed[] = {
      "kernel",     "g0_priors",   "mh_step_sizes", "alpha_prior",
      "iterations", "thinning",    "store_samples", "update_prior",
      "m",          "seed",        "scale",         "fixed_alpha",
      "alpha_value", "group_col",  "columns",       "header"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || it.key() == key;
    if (!known) throw ConfigError("config: unknown key '" + it.key() + "'");
  }
  try {
    return config_from_json(j);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string artifact_to_json(const ModelArtifact& artifact) {
  json j{{"version", artifact.version},
         {"kind", "dp"},
         {"config", config_to_json(artifact.config)},
         {"transform", transform_to_json(artifact.transform)},
         {"state", state_to_json(artifact.state)}};
  return j.dump(1) + "\n";
}

ModelArtifact artifact_from_json(const std::string& text) {
  json j = parse(text);
  check_version(j);
  if (j.value("kind", "dp") != "dp") {
    throw ConfigError("artifact: expected a flat-model artifact");
  }
  try {
    ModelArtifact a;
    a.version = j.at("version").get<int>();
    a.config = config_from_json(j.at("config"));
    a.transform = transform_from_json(j.at("transform"));
    a.state = state_from_json(j.at("state"));
    return a;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("artifact: ") + e.what());
  }
}

std::string hdp_artifact_to_json(const HdpModelArtifact& artifact) {
  json j{{"version", artifact.version},
         {"kind", "hdp"},
         {"config", config_to_json(artifact.config)},
         {"transform", transform_to_json(artifact.transform)},
         {"group_ids", artifact.group_ids},
         {"state", hdp_state_to_json(artifact.state)}};
  return j.dump(1) + "\n";
}

HdpModelArtifact hdp_artifact_from_json(const std::string& text) {
  json j = parse(text);
  check_version(j);
  if (j.value("kind", "") != "hdp") {
    throw ConfigError("artifact: expected a grouped-model artifact");
  }
  try {
    HdpModelArtifact a;
    a.version = j.at("version").get<int>();
    a.config = config_from_json(j.at("config"));
    a.transform = transform_from_json(j.at("transform"));
    a.group_ids = j.at("group_ids").get<std::vector<std::string>>();
    a.state = hdp_state_from_json(j.at("state"));
    return a;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("artifact: ") + e.what());
  }
}

void save_artifact(const ModelArtifact& artifact, const std::string& path) {
  write_file(path, artifact_to_json(artifact));
}

ModelArtifact load_artifact(const std::string& path) {
  return artifact_from_json(read_file(path));
}

void save_hdp_artifact(const HdpModelArtifact& artifact, const std::string& path) {
  write_file(path, hdp_artifact_to_json(artifact));
}

HdpModelArtifact load_hdp_artifact(const std::string& path) {
  return hdp_artifact_from_json(read_file(path));
}

}  // namespace dpmix
