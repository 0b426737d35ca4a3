#include "infoval/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "infoval/errors.hpp"

namespace infoval {
namespace {

Json g_to_json(const MonotoneFunction& g) {
  switch (g.family()) {
    case MonotoneFunction::Family::Identity: return "identity";
    case MonotoneFunction::Family::Exp: return "exp";
    case MonotoneFunction::Family::Scaled: return Json{{"scale", g.factor()}};
    case MonotoneFunction::Family::Tabulated: return Json{{"x", g.table_x()}, {"y", g.table_y()}};
  }
  return nullptr;
}

MonotoneFunction g_from_json(const Json& j, double alpha) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "identity") return MonotoneFunction::identity();
    if (name == "exp") return MonotoneFunction::exponential();
    if (name == "x_over_alpha") return MonotoneFunction::scaled(1.0 / alpha);
    throw ConfigError("unknown transform '" + name + "'");
  }
  if (j.is_object() && j.contains("scale")) return MonotoneFunction::scaled(j.at("scale").get<double>());
  if (j.is_object() && j.contains("x") && j.contains("y")) {
    return MonotoneFunction::tabulated(j.at("x").get<std::vector<double>>(),
                                       j.at("y").get<std::vector<double>>());
  }
  throw ConfigError("transform must be a family name or an {x, y} table");
}

// Non-finite doubles have no JSON form; they are written as null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Sequence: {
      Json arr = Json::array();
      for (const auto& item : node) arr.push_back(yaml_to_json(item));
      return arr;
    }
    case YAML::NodeType::Map: {
      Json obj = Json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = node.Scalar();
      if (node.Tag() == "!") return s;  // quoted
      if (s == "true" || s == "True") return true;
      if (s == "false" || s == "False") return false;
      if (s == "null" || s == "~") return nullptr;
      {
        std::size_t pos = 0;
        try {
          const long long v = std::stoll(s, &pos);
          if (pos == s.size()) return v;
        } catch (const std::exception&) {
        }
        try {
          const double d = std::stod(s, &pos);
          if (pos == s.size()) return d;
        } catch (const std::exception&) {
        }
      }
      return s;
    }
  }
  return nullptr;
}

template <class T>
T get_as(const Json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::size_t get_size(const Json& j, const char* key) {
  const Json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items()) {
    if (!ok.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
  }
}

Json dgp_to_json(const Dgp& dgp) {
  return std::visit(
      [](const auto& d) -> Json {
        using T = std::decay_t<decltype(d)>;
        Json j = to_json(d);
        if constexpr (std::is_same_v<T, GarchParams>) {
          return Json{{"type", "garch"}, {"params", j}};
        } else if constexpr (std::is_same_v<T, DccParams>) {
          return Json{{"type", "dcc"}, {"params", j}};
        } else {
          Json out = {{"type", "mixture"}};
          out.update(j);
          return out;
        }
      },
      dgp);
}

Dgp dgp_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("dgp must be a mapping");
  const auto type = get_as<std::string>(j, "type");
  try {
    if (type == "garch") {
      reject_unknown(j, {"type", "preset", "params"}, "dgp");
      if (j.contains("preset")) return garch_preset(get_as<int>(j, "preset"));
      return garch_params_from_json(j.at("params"));
    }
    if (type == "dcc") {
      reject_unknown(j, {"type", "preset", "params"}, "dgp");
      if (j.contains("preset")) return dcc_preset(get_as<int>(j, "preset"));
      return dcc_params_from_json(j.at("params"));
    }
    if (type == "mixture") {
      reject_unknown(j, {"type", "alpha", "sigma"}, "dgp");
      MixtureSpec m;
      if (j.contains("alpha")) m.alpha = get_as<double>(j, "alpha");
      if (j.contains("sigma")) m.sigma = get_as<double>(j, "sigma");
      return m;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("dgp: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("dgp: ") + e.what());
  }
  throw ConfigError("dgp type must be garch, dcc or mixture, got '" + type + "'");
}

Json scorer_spec_to_json(const ScorerSpec& s) {
  if (s.form == QuantileScorer::Form::SStar) return Json{{"type", "quantile_sstar"}};
  Json j = {{"type", "quantile_general"}};
  if (s.g_family == "table") {
    j["g"] = Json{{"x", s.table_x}, {"y", s.table_y}};
  } else {
    j["g"] = s.g_family;
  }
  return j;
}

ScorerSpec scorer_spec_from_json(const Json& j) {
  ScorerSpec s;
  const Json& obj = j.is_string() ? Json{{"type", j}} : j;
  reject_unknown(obj, {"type", "g"}, "scorer");
  const auto type = get_as<std::string>(obj, "type");
  if (type == "quantile_sstar") {
    s.form = QuantileScorer::Form::SStar;
  } else if (type == "quantile_general") {
    s.form = QuantileScorer::Form::General;
    if (obj.contains("g")) {
      const Json& g = obj.at("g");
      if (g.is_string()) {
        s.g_family = g.get<std::string>();
      } else if (g.is_object() && g.contains("x") && g.contains("y")) {
        s.g_family = "table";
        s.table_x = g.at("x").get<std::vector<double>>();
        s.table_y = g.at("y").get<std::vector<double>>();
      } else {
        throw ConfigError("scorer g must be a family name or an {x, y} table");
      }
    }
  } else {
    throw ConfigError("experiment scorer must be quantile_sstar or quantile_general");
  }
  return s;
}

}  // namespace

Json scorer_to_json(const PointScorer& scorer) {
  if (const auto* q = std::get_if<QuantileScorer>(&scorer)) {
    if (q->form() == QuantileScorer::Form::SStar) {
      return Json{{"type", "quantile_sstar"}, {"alpha", q->alpha()}};
    }
    return Json{{"type", "quantile_general"}, {"alpha", q->alpha()}, {"g", g_to_json(q->g())}};
  }
  const auto& e = std::get<ExpectileScorer>(scorer);
  return Json{{"type", "expectile"}, {"alpha", e.alpha()}};
}

PointScorer scorer_from_json(const Json& j) {
  const auto type = get_as<std::string>(j, "type");
  const auto alpha = get_as<double>(j, "alpha");
  try {
    if (type == "quantile_sstar") return QuantileScorer::sstar(alpha);
    if (type == "quantile_general") {
      return QuantileScorer::general(alpha, j.contains("g") ? g_from_json(j.at("g"), alpha)
                                                            : MonotoneFunction::scaled(1.0 / alpha));
    }
    if (type == "expectile") return ExpectileScorer(alpha);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scorer: ") + e.what());
  }
  throw ConfigError("unknown scorer type '" + type + "'");
}

Json to_json(const GarchParams& p) {
  return Json{{"kappa", p.kappa}, {"phi", p.phi}, {"beta", p.beta}};
}

Json to_json(const DccParams& p) {
  return Json{{"garch_1", to_json(p.garch_1)}, {"garch_2", to_json(p.garch_2)},
              {"q_bar21", p.q_bar_offdiag},    {"gamma", p.gamma},
              {"eta", p.eta}};
}

Json to_json(const MixtureSpec& m) { return Json{{"alpha", m.alpha}, {"sigma", m.sigma}}; }

Json to_json(const DmTestResult& r) {
  return Json{{"m_n", num(r.m_n)},
              {"sigma_hat", num(r.sigma_hat)},
              {"t_stat", num(r.t_stat)},
              {"p_value", num(r.p_value)},
              {"n", r.n},
              {"truncation_lag", r.truncation_lag},
              {"fallback", r.fallback_flag},
              {"identical_forecasts", r.identical_forecasts}};
}

Json to_json(const BacktestReport& r) {
  return Json{{"n", r.n},
              {"empirical_rate", num(r.empirical_rate)},
              {"coverage_z", num(r.coverage_z)},
              {"coverage_p", num(r.coverage_p)},
              {"independence_lr", num(r.independence_lr)},
              {"independence_p", num(r.independence_p)},
              {"independence_degenerate", r.independence_degenerate}};
}

Json to_json(const MixtureReport& r) {
  auto stats = [](const ComparisonStats& c) {
    return Json{{"m_F", num(c.m_f)}, {"m_G", num(c.m_g)}, {"diff", num(c.diff)}, {"se", num(c.se)}};
  };
  return Json{{"spec", to_json(r.spec)},
              {"n", r.n},
              {"q_alpha", num(r.q_alpha)},
              {"forecast_F", num(r.forecast_f)},
              {"forecast_G_b1", num(r.forecast_g_b1)},
              {"forecast_G_b0", num(r.forecast_g_b0)},
              {"quantile_score", stats(r.quantile_score)},
              {"log_score", stats(r.log_score)},
              {"quantile_indistinguishable", r.quantile_indistinguishable},
              {"log_score_separates", r.log_score_separates}};
}

Json to_json(const ExperimentReport& r) {
  Json j = {{"kind", r.kind}, {"method_F", r.method_f}, {"method_G", r.method_g}};
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back(Json{{"h", row.h},
                        {"alpha", row.alpha},
                        {"n", row.n},
                        {"m_F", num(row.m_f)},
                        {"m_G", num(row.m_g)},
                        {"diff", num(row.diff)},
                        {"rel_diff", num(row.rel_diff)},
                        {"sigma_hat", num(row.sigma_hat)},
                        {"t_stat", num(row.t_stat)},
                        {"p_value", num(row.p_value)},
                        {"truncation_lag", row.truncation_lag},
                        {"fallback", row.fallback},
                        {"identical", row.identical}});
  }
  j["mean_scores"] = rows;
  Json power = Json::array();
  for (const auto& c : r.power) {
    power.push_back(Json{{"h", c.h},
                         {"alpha", c.alpha},
                         {"n", c.n},
                         {"level", c.level},
                         {"power", num(c.power)},
                         {"replications", c.replications},
                         {"failures", c.failures},
                         {"boundary_fits", c.boundary_fits},
                         {"total_fits", c.total_fits},
                         {"flagged", c.flagged}});
  }
  j["power"] = power;
  Json bt = Json::array();
  for (const auto& b : r.backtests) {
    Json row = {{"h", b.h}, {"alpha", b.alpha}, {"method", b.method}};
    row.update(to_json(b.report));
    bt.push_back(row);
  }
  j["backtests"] = bt;
  if (r.mixture) j["mixture"] = to_json(*r.mixture);
  j["provenance"] = Json{{"config_hash", r.provenance.config_hash},
                         {"seed", r.provenance.seed},
                         {"version", r.provenance.version},
                         {"notes", r.provenance.notes}};
  j["warnings"] = r.warnings;
  return j;
}

GarchParams garch_params_from_json(const Json& j) {
  reject_unknown(j, {"kappa", "phi", "beta"}, "GARCH parameters");
  GarchParams p{get_as<double>(j, "kappa"), get_as<double>(j, "phi"), get_as<double>(j, "beta")};
  p.validate();
  return p;
}

DccParams dcc_params_from_json(const Json& j) {
  reject_unknown(j, {"garch_1", "garch_2", "q_bar21", "gamma", "eta"}, "DCC parameters");
  DccParams p;
  p.garch_1 = garch_params_from_json(j.at("garch_1"));
  p.garch_2 = garch_params_from_json(j.at("garch_2"));
  p.q_bar_offdiag = get_as<double>(j, "q_bar21");
  p.gamma = get_as<double>(j, "gamma");
  p.eta = get_as<double>(j, "eta");
  p.validate();
  return p;
}

Json config_to_json(const ExperimentConfig& c) {
  Json j = {{"seed", c.seed},
            {"dgp", dgp_to_json(c.dgp)},
            {"horizons", c.horizons},
            {"alphas", c.alphas},
            {"n", c.n}};
  if (c.n_h1) j["n_h1"] = *c.n_h1;
  j["unconditional_sample"] = c.unconditional_sample;
  j["window"] = c.window;
  j["mc_size"] = c.mc_size;
  j["replications"] = c.replications;
  j["sample_sizes"] = c.sample_sizes;
  j["levels"] = c.levels;
  Json methods = Json::object();
  if (c.method_f) methods["f"] = std::string(to_string(*c.method_f));
  if (c.method_g) methods["g"] = std::string(to_string(*c.method_g));
  if (!methods.empty()) j["methods"] = methods;
  j["weights"] = c.weights;
  j["burn_in"] = c.burn_in;
  j["scorer"] = scorer_spec_to_json(c.scorer);
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("configuration must be a mapping");
  reject_unknown(j,
                 {"seed", "dgp", "horizons", "alphas", "n", "n_h1", "unconditional_sample", "window",
                  "mc_size", "replications", "sample_sizes", "levels", "methods", "weights",
                  "burn_in", "threads", "scorer"},
                 "configuration");
  ExperimentConfig c;
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_integer()) throw ConfigError("seed must be an integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (j.contains("dgp")) c.dgp = dgp_from_json(j.at("dgp"));
  if (j.contains("horizons")) c.horizons = get_as<std::vector<int>>(j, "horizons");
  if (j.contains("alphas")) c.alphas = get_as<std::vector<double>>(j, "alphas");
  if (j.contains("n")) c.n = get_size(j, "n");
  if (j.contains("n_h1") && !j.at("n_h1").is_null()) c.n_h1 = get_size(j, "n_h1");
  if (j.contains("unconditional_sample")) c.unconditional_sample = get_size(j, "unconditional_sample");
  if (j.contains("window")) c.window = get_size(j, "window");
  if (j.contains("mc_size")) c.mc_size = get_size(j, "mc_size");
  if (j.contains("replications")) c.replications = get_size(j, "replications");
  if (j.contains("sample_sizes")) c.sample_sizes = get_as<std::vector<std::size_t>>(j, "sample_sizes");
  if (j.contains("levels")) c.levels = get_as<std::vector<double>>(j, "levels");
  if (j.contains("methods")) {
    const Json& m = j.at("methods");
    reject_unknown(m, {"f", "g"}, "methods");
    if (m.contains("f")) c.method_f = method_from_string(get_as<std::string>(m, "f"));
    if (m.contains("g")) c.method_g = method_from_string(get_as<std::string>(m, "g"));
  }
  if (j.contains("weights")) {
    const auto w = get_as<std::vector<double>>(j, "weights");
    if (w.size() != 2) throw ConfigError("weights must hold two entries");
    c.weights = {w[0], w[1]};
  }
  if (j.contains("burn_in")) c.burn_in = get_size(j, "burn_in");
  if (j.contains("threads")) c.threads = static_cast<unsigned>(get_size(j, "threads"));
  if (j.contains("scorer")) c.scorer = scorer_spec_from_json(j.at("scorer"));
  c.validate();
  return c;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("cannot parse configuration: ") + e.what());
  }
  if (root.IsNull()) return ExperimentConfig{};
  return config_from_json(yaml_to_json(root));
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace infoval
