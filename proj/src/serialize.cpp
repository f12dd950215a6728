#include "qrse/serialize.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "qrse/csv.hpp"
#include "qrse/errors.hpp"
#include "qrse/version.hpp"

namespace qrse {
namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputNotFound("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
}

json to_json(const ArrayXd& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

ArrayXd array_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array() || arr.empty()) throw ParseError(where + ": expected non-empty array");
  ArrayXd v(static_cast<Index>(arr.size()));
  for (Index i = 0; i < v.size(); ++i) {
    if (!arr[static_cast<std::size_t>(i)].is_number()) {
      throw ParseError(where + ": expected numbers");
    }
    v[i] = arr[static_cast<std::size_t>(i)].get<double>();
  }
  return v;
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

RunConfig read_run_config(const std::string& path) {
  const json j = load_json(path);
  if (!j.is_object()) throw ParseError("'" + path + "': config must be a JSON object");
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "grid_points") {
        c.fit.grid_points = value.get<Index>();
      } else if (key == "grid_pad_iqr") {
        c.fit.grid_pad_iqr = value.get<double>();
      } else if (key == "bins") {
        c.fit.bins = value.get<Index>();
      } else if (key == "max_iters") {
        c.fit.optimizer.max_iters = value.get<Index>();
      } else if (key == "diameter_tol") {
        c.fit.optimizer.diameter_tol = value.get<double>();
      } else if (key == "utility") {
        const std::string kind = value.get<std::string>();
        if (kind == "binary") {
          c.fit.utility = UtilityKind::BinaryLinear;
        } else if (kind == "ternary") {
          c.fit.utility = UtilityKind::TernaryLinear;
        } else {
          throw ParseError("utility must be 'binary' or 'ternary'");
        }
      } else if (key == "entry_action") {
        c.fit.entry_action = value.get<Index>();
      } else if (key == "exit_action") {
        c.fit.exit_action = value.get<Index>();
      } else if (key == "support") {
        const std::string policy = value.get<std::string>();
        if (policy == "warn") {
          c.fit.support = SupportPolicy::Warn;
        } else if (policy == "throw") {
          c.fit.support = SupportPolicy::Throw;
        } else {
          throw ParseError("support must be 'warn' or 'throw'");
        }
      } else if (key == "schedule") {
        c.schedule = value.get<std::string>();
      } else if (key == "extreme_weight") {
        c.extreme_weight = value.get<double>();
      } else if (key == "lambda_e") {
        c.lambda_e = value.get<double>();
      } else if (key == "observed") {
        for (const auto& row : value) {
          c.observed.push_back(array_from_json(row, path + ": observed"));
        }
      } else if (key == "fixed_prior") {
        c.fixed_prior = array_from_json(value, path + ": fixed_prior");
      } else if (key == "median_window") {
        c.median_window = value.get<int>();
      } else if (key == "grouping") {
        c.grouping = value.get<std::string>();
      } else if (key == "terms") {
        for (const auto& t : value) {
          c.terms.push_back(TermWindow{t.at("label").get<std::string>(),
                                       Date::parse(t.at("start").get<std::string>()),
                                       Date::parse(t.at("end").get<std::string>())});
        }
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else {
        throw ParseError("'" + path + "': unknown config key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError("'" + path + "': key '" + key + "': " + e.what());
    }
  }
  return c;
}

PriorSchedule schedule_from_config(const RunConfig& config, Index n_actions) {
  const std::string& name = config.schedule;
  if (name == "uniform") return PriorSchedule::uniform(n_actions);
  if (name == "previous") return PriorSchedule::previous(n_actions);
  if (name == "mean") return PriorSchedule::mean(n_actions);
  if (name == "extreme-buy") {
    return PriorSchedule::extreme(0, config.extreme_weight, n_actions);
  }
  if (name == "extreme-sell") {
    return PriorSchedule::extreme(n_actions - 1, config.extreme_weight, n_actions);
  }
  if (name == "adaptive") {
    return PriorSchedule::adaptive(config.lambda_e, config.observed, n_actions);
  }
  if (name == "fixed") {
    if (config.fixed_prior.size() == 0) {
      throw ParseError("fixed schedule needs a fixed_prior config entry");
    }
    return PriorSchedule::fixed_prior(config.fixed_prior);
  }
  throw ParseError("unknown prior schedule '" + name + "'");
}

void write_manifest(const std::string& path, const RunManifest& m) {
  json j;
  j["subcommand"] = m.subcommand;
  j["config"] = m.config_path;
  j["inputs"] = m.inputs;
  j["out"] = m.out_dir;
  j["seed"] = m.seed;
  j["outputs"] = m.outputs;
  j["timestamp"] = utc_timestamp();
  j["version"] = kVersion;
  write_text(path, j.dump(2) + "\n");
}

std::string fit_result_to_json(const FitResult& r) {
  json j;
  j["params"]["T"] = r.params.T;
  j["params"]["mu"] = r.params.mu;
  if (r.params.mu2) {
    j["params"]["mu2"] = *r.params.mu2;
  }
  j["params"]["rho"] = r.params.rho;
  j["params"]["gamma"] = r.params.gamma;
  j["params"]["xi"] = r.params.xi;
  j["prior"] = to_json(r.prior_used);
  j["entry_action"] = r.entry_action;
  j["exit_action"] = r.exit_action;
  j["nll"] = r.nll;
  j["id"] = r.id;
  j["explained"] = r.explained;
  j["kl_model_vs_empirical"] = r.kl_model_vs_empirical;
  j["action_marginal"] = to_json(r.action_marginal);
  j["competition_gap"] = r.competition_gap;
  j["support_truncated"] = r.density.support_truncated;
  j["grid"]["lo"] = r.density.grid.lo();
  j["grid"]["hi"] = r.density.grid.hi();
  j["grid"]["points"] = r.density.grid.size();
  j["kl_from_prior_max"] = r.kl_profile.size() > 0 ? r.kl_profile.maxCoeff() : 0.0;
  j["trace"]["iterations"] = r.trace.iterations;
  j["trace"]["evaluations"] = r.trace.evaluations;
  j["trace"]["converged"] = r.trace.converged;
  j["trace"]["infinite_objective_hits"] = r.trace.infinite_objective_hits;
  j["trace"]["winning_start"] = r.trace.winning_start;
  return j.dump(2) + "\n";
}

void write_fit_result_json(const std::string& path, const FitResult& result) {
  write_text(path, fit_result_to_json(result));
}

void write_belief_history(const std::string& path, const BeliefHistory& history) {
  std::string text;
  for (const BeliefRecord& rec : history.records()) {
    json j;
    j["period"] = rec.period_label;
    j["prior"] = to_json(rec.prior);
    j["marginal"] = to_json(rec.fitted_marginal);
    text += j.dump() + "\n";
  }
  write_text(path, text);
}

BeliefHistory read_belief_history(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputNotFound("cannot open '" + path + "'");
  BeliefHistory history;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const std::string where = path + " line " + std::to_string(lineno);
    try {
      const json j = json::parse(line);
      history = append_period(std::move(history), array_from_json(j.at("prior"), where),
                              array_from_json(j.at("marginal"), where),
                              j.at("period").get<std::string>());
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return history;
}

void write_density_csv(const std::string& path, const DensityTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << "x,f_x\n";
  for (Index i = 0; i < table.grid.size(); ++i) {
    out << format_double(table.grid.points()[i]) << ',' << format_double(table.values[i]) << '\n';
  }
}

}  // namespace qrse
