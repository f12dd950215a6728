// Command-line front end: ingestion, fitting, rolling runs, synthetic data,
// plot-data export, and spot evaluation of the decision and RI solvers.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrse/csv.hpp"
#include "qrse/decision.hpp"
#include "qrse/empirical.hpp"
#include "qrse/equilibrium.hpp"
#include "qrse/errors.hpp"
#include "qrse/fitting.hpp"
#include "qrse/ingest.hpp"
#include "qrse/priors.hpp"
#include "qrse/ri.hpp"
#include "qrse/sampling.hpp"
#include "qrse/serialize.hpp"
#include "qrse/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes: 0 success, 1 partial/computation failure, 2 usage/input error.
constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kUsage = 2;

qrse::ProbabilityVector parse_prob_list(const std::string& text) {
  std::vector<double> vals;
  std::string field;
  std::stringstream ss(text);
  while (std::getline(ss, field, ',')) {
    vals.push_back(qrse::parse_double(field, "probability list"));
  }
  qrse::ProbabilityVector p(static_cast<qrse::Index>(vals.size()));
  for (qrse::Index i = 0; i < p.size(); ++i) p[i] = vals[static_cast<std::size_t>(i)];
  qrse::validate_probability_vector(p);
  return p;
}

qrse::Index resolve_action(const std::string& text, const qrse::ActionSet& actions) {
  for (qrse::Index a = 0; a < actions.size(); ++a) {
    if (actions.label(a) == text) return a;
  }
  try {
    const std::size_t idx = std::stoul(text);
    if (idx < static_cast<std::size_t>(actions.size())) return static_cast<qrse::Index>(idx);
  } catch (...) {
  }
  throw qrse::UnknownAction("no action named '" + text + "'");
}

std::string sanitize(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
  }
  return out;
}

json params_to_json(const qrse::EquilibriumParams& p) {
  json j;
  j["T"] = p.T;
  j["mu"] = p.mu;
  if (p.mu2) j["mu2"] = *p.mu2;
  j["rho"] = p.rho;
  j["gamma"] = p.gamma;
  j["xi"] = p.xi;
  return j;
}

json vector_to_json(const qrse::ArrayXd& v) {
  json arr = json::array();
  for (qrse::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qrse::Error("cannot write '" + path.string() + "'");
  out << text;
}

// Collects outputs for the manifest as they are written.
struct OutDir {
  fs::path root;
  std::vector<std::string> outputs;

  explicit OutDir(const std::string& dir) : root(dir) { fs::create_directories(root); }

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return root / name;
  }

  void finish(qrse::RunManifest manifest) {
    manifest.outputs = outputs;
    qrse::write_manifest((root / "manifest.json").string(), manifest);
  }
};

struct ScheduleChoice {
  std::vector<std::string> names;  // --prior values, in flag order
};

qrse::PriorSchedule named_schedule(const std::string& name, const qrse::RunConfig& config,
                                   qrse::Index n_actions) {
  qrse::RunConfig c = config;
  c.schedule = name;
  return qrse::schedule_from_config(c, n_actions);
}

qrse::Index fit_action_count(const qrse::FitConfig& f) {
  return f.utility == qrse::UtilityKind::TernaryLinear ? 3 : 2;
}

qrse::ActionSet fit_actions(const qrse::FitConfig& f) {
  return fit_action_count(f) == 3 ? qrse::ActionSet::ternary() : qrse::ActionSet::binary();
}

// ---------------------------------------------------------------- decide

int cmd_decide(double x, double T, double mu, std::optional<double> mu2,
               const std::string& prior_text) {
  const bool ternary = mu2.has_value();
  qrse::ActionSet actions = ternary ? qrse::ActionSet::ternary() : qrse::ActionSet::binary();
  qrse::ProbabilityVector prior = prior_text.empty()
                                      ? qrse::uniform_probabilities(actions.size())
                                      : parse_prob_list(prior_text);
  qrse::UtilityModel utility = ternary ? qrse::UtilityModel::ternary_linear(mu, *mu2)
                                       : qrse::UtilityModel::binary_linear(mu);
  qrse::DecisionContext ctx(actions, prior, utility, T);

  json j;
  j["x"] = x;
  j["T"] = T;
  j["actions"] = actions.labels();
  j["probabilities"] = vector_to_json(qrse::decision_probabilities(ctx, x));
  j["entropy"] = qrse::conditional_entropy(ctx, x);
  if ((prior > 0.0).all()) {
    j["kl_from_prior"] = qrse::kl_from_prior(ctx, x);
    j["shift_potential"] = vector_to_json(qrse::shift_potential(ctx));
    if (!ternary) j["mu_star"] = qrse::mu_star_equivalent(prior, mu, T);
  }
  std::cout << j.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- ingest

int cmd_ingest(const std::string& prices_path, const std::string& returns_path,
               const std::string& grouping_name, const std::string& config_path,
               const std::string& out_path) {
  qrse::RunConfig config =
      config_path.empty() ? qrse::RunConfig{} : qrse::read_run_config(config_path);
  const std::string grouping_kind = grouping_name.empty() ? config.grouping : grouping_name;

  OutDir out(out_path);
  std::vector<std::string> inputs;
  std::vector<std::string> warnings;

  std::vector<qrse::ReturnRecord> returns;
  if (!prices_path.empty()) {
    inputs.push_back(prices_path);
    qrse::ReturnsResult r =
        qrse::compute_returns(qrse::read_price_csv(prices_path), config.median_window);
    warnings = std::move(r.warnings);
    returns = std::move(r.returns);
    qrse::write_returns_csv(out.file("returns.csv").string(), returns);
  } else {
    inputs.push_back(returns_path);
    returns = qrse::read_returns_csv(returns_path);
  }

  qrse::PeriodGrouping grouping = qrse::PeriodGrouping::quarterly();
  if (grouping_kind == "annual") {
    grouping = qrse::PeriodGrouping::annual();
  } else if (grouping_kind == "terms") {
    grouping = config.terms.empty() ? qrse::PeriodGrouping::default_terms()
                                    : qrse::PeriodGrouping::with_terms(config.terms);
  } else if (grouping_kind != "quarterly") {
    throw qrse::ParseError("unknown grouping '" + grouping_kind + "'");
  }

  qrse::GroupedResult grouped = qrse::group_periods(returns, grouping);
  warnings.insert(warnings.end(), grouped.warnings.begin(), grouped.warnings.end());

  json report;
  report["grouping"] = grouping_kind;
  report["warnings"] = warnings;
  report["periods"] = json::array();
  for (const qrse::PeriodGroup& g : grouped.groups) {
    const std::string name = "samples_" + sanitize(g.label) + ".csv";
    qrse::write_samples_csv(out.file(name).string(), g.samples);
    report["periods"].push_back(
        {{"label", g.label}, {"count", g.samples.size()}, {"file", name}});
  }
  write_text_file(out.file("report.json"), report.dump(2) + "\n");

  for (const std::string& w : warnings) std::cerr << "W " << w << "\n";
  out.finish({"ingest", config_path, inputs, out_path, config.seed, {}});
  std::cout << grouped.groups.size() << " periods written to " << out_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------- fit

void apply_action_flags(qrse::FitConfig& f, const std::string& entry, const std::string& exit) {
  const qrse::ActionSet actions = fit_actions(f);
  if (!entry.empty()) f.entry_action = resolve_action(entry, actions);
  if (!exit.empty()) f.exit_action = resolve_action(exit, actions);
}

int cmd_fit(const std::string& samples_path, const std::string& prior_name,
            const std::string& config_path, const std::string& out_path,
            const std::string& utility_name, const std::string& entry, const std::string& exit) {
  qrse::RunConfig config =
      config_path.empty() ? qrse::RunConfig{} : qrse::read_run_config(config_path);
  if (!utility_name.empty()) {
    config.fit.utility = utility_name == "ternary" ? qrse::UtilityKind::TernaryLinear
                                                   : qrse::UtilityKind::BinaryLinear;
  }
  apply_action_flags(config.fit, entry, exit);

  const std::vector<double> samples = qrse::read_samples_csv(samples_path);
  const qrse::EmpiricalDistribution emp = qrse::build_empirical(samples, config.fit.bins);

  const qrse::Index n_actions = fit_action_count(config.fit);
  const std::string schedule_name = prior_name.empty() ? config.schedule : prior_name;
  const qrse::PriorSchedule schedule = named_schedule(schedule_name, config, n_actions);
  const qrse::ProbabilityVector prior =
      qrse::prior_for_period(schedule, qrse::BeliefHistory{}, 0);

  const qrse::FitResult result = qrse::fit(emp, prior, config.fit);

  OutDir out(out_path);
  qrse::write_fit_result_json(out.file("result.json").string(), result);
  qrse::write_density_csv(out.file("density.csv").string(), result.density);
  out.finish({"fit", config_path, {samples_path}, out_path, config.seed, {}});
  std::cout << "nll=" << qrse::format_double(result.nll)
            << " explained_pct=" << qrse::format_double(100.0 * result.explained) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- rolling

void write_marginals_csv(const fs::path& path, const qrse::BeliefHistory& history,
                         const qrse::ActionSet& actions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qrse::Error("cannot write '" + path.string() + "'");
  out << "period";
  for (qrse::Index a = 0; a < actions.size(); ++a) out << ",prior_" << actions.label(a);
  for (qrse::Index a = 0; a < actions.size(); ++a) out << ",f_" << actions.label(a);
  out << "\n";
  for (const qrse::BeliefRecord& rec : history.records()) {
    out << rec.period_label;
    for (qrse::Index a = 0; a < rec.prior.size(); ++a) {
      out << ',' << qrse::format_double(rec.prior[a]);
    }
    for (qrse::Index a = 0; a < rec.fitted_marginal.size(); ++a) {
      out << ',' << qrse::format_double(rec.fitted_marginal[a]);
    }
    out << "\n";
  }
}

int cmd_rolling(const std::string& prices_path, const std::string& returns_path,
                const std::string& grouping_name, const ScheduleChoice& schedules,
                const std::string& config_path, const std::string& out_path,
                const std::string& utility_name, const std::string& entry,
                const std::string& exit) {
  qrse::RunConfig config =
      config_path.empty() ? qrse::RunConfig{} : qrse::read_run_config(config_path);
  if (!utility_name.empty()) {
    config.fit.utility = utility_name == "ternary" ? qrse::UtilityKind::TernaryLinear
                                                   : qrse::UtilityKind::BinaryLinear;
  }
  apply_action_flags(config.fit, entry, exit);
  const std::string grouping_kind = grouping_name.empty() ? config.grouping : grouping_name;

  OutDir out(out_path);
  std::vector<std::string> inputs;

  std::vector<qrse::ReturnRecord> returns;
  if (!prices_path.empty()) {
    inputs.push_back(prices_path);
    qrse::ReturnsResult r =
        qrse::compute_returns(qrse::read_price_csv(prices_path), config.median_window);
    for (const std::string& w : r.warnings) std::cerr << "W " << w << "\n";
    returns = std::move(r.returns);
  } else {
    inputs.push_back(returns_path);
    returns = qrse::read_returns_csv(returns_path);
  }

  qrse::PeriodGrouping grouping = qrse::PeriodGrouping::quarterly();
  if (grouping_kind == "annual") {
    grouping = qrse::PeriodGrouping::annual();
  } else if (grouping_kind == "terms") {
    grouping = config.terms.empty() ? qrse::PeriodGrouping::default_terms()
                                    : qrse::PeriodGrouping::with_terms(config.terms);
  } else if (grouping_kind != "quarterly") {
    throw qrse::ParseError("unknown grouping '" + grouping_kind + "'");
  }
  qrse::GroupedResult grouped = qrse::group_periods(returns, grouping);
  for (const std::string& w : grouped.warnings) std::cerr << "W " << w << "\n";

  // Periods whose histograms cannot be built fail once, up front, for every
  // schedule; fit failures are recorded per schedule and the run continues
  // with the prior recursion indexed by successful fits.
  json failures = json::array();
  std::vector<std::pair<std::string, qrse::EmpiricalDistribution>> periods;
  for (const qrse::PeriodGroup& g : grouped.groups) {
    try {
      periods.emplace_back(g.label, qrse::build_empirical(g.samples, config.fit.bins));
    } catch (const qrse::Error& e) {
      failures.push_back({{"period", g.label}, {"error", e.what()}});
      std::cerr << "E_PERIOD " << g.label << ": " << e.what() << "\n";
    }
  }

  const qrse::Index n_actions = fit_action_count(config.fit);
  const qrse::ActionSet actions = fit_actions(config.fit);
  const std::vector<std::string> schedule_names =
      schedules.names.empty() ? std::vector<std::string>{"uniform"} : schedules.names;

  // summary.csv: one row per period, NLL and explained% per schedule.
  std::map<std::string, std::map<std::string, std::pair<double, double>>> summary;

  for (const std::string& schedule_name : schedule_names) {
    const qrse::PriorSchedule schedule = named_schedule(schedule_name, config, n_actions);
    qrse::BeliefHistory history;
    for (const auto& [label, emp] : periods) {
      try {
        const qrse::ProbabilityVector prior =
            qrse::prior_for_period(schedule, history, history.size());
        qrse::FitResult result = qrse::fit(emp, prior, config.fit);
        history = qrse::append_period(history, prior, result.action_marginal, label);
        summary[label][schedule_name] = {result.nll, 100.0 * result.explained};
        const std::string stem = sanitize(schedule_name) + "_" + sanitize(label);
        qrse::write_fit_result_json(out.file("fit_" + stem + ".json").string(), result);
        qrse::write_density_csv(out.file("density_" + stem + ".csv").string(), result.density);
      } catch (const qrse::Error& e) {
        failures.push_back(
            {{"period", label}, {"schedule", schedule_name}, {"error", e.what()}});
        std::cerr << "E_PERIOD " << label << " (" << schedule_name << "): " << e.what() << "\n";
      }
    }
    write_marginals_csv(out.file("marginals_" + sanitize(schedule_name) + ".csv"), history,
                        actions);
    qrse::write_belief_history(out.file("history_" + sanitize(schedule_name) + ".jsonl").string(),
                               history);
  }

  {
    std::ofstream sum(out.file("summary.csv"), std::ios::binary);
    sum << "period";
    for (const std::string& s : schedule_names) {
      sum << ",nll_" << sanitize(s) << ",explained_pct_" << sanitize(s);
    }
    sum << "\n";
    for (const auto& [label, emp] : periods) {
      sum << label;
      for (const std::string& s : schedule_names) {
        const auto it = summary[label].find(s);
        if (it == summary[label].end()) {
          sum << ",,";
        } else {
          sum << ',' << qrse::format_double(it->second.first) << ','
              << qrse::format_double(it->second.second);
        }
      }
      sum << "\n";
    }
  }
  if (!failures.empty()) {
    write_text_file(out.file("failures.json"), failures.dump(2) + "\n");
  }
  out.finish({"rolling", config_path, inputs, out_path, config.seed, {}});
  std::cout << periods.size() << " periods x " << schedule_names.size() << " schedules -> "
            << out_path << "\n";
  return failures.empty() ? kOk : kPartial;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(double T, double mu, std::optional<double> mu2, double rho, double gamma,
                 long long n, std::uint64_t seed, const std::string& prior_text,
                 std::optional<double> grid_lo, std::optional<double> grid_hi,
                 qrse::Index grid_points, const std::string& out_path) {
  if (!(T > 0.0) || !std::isfinite(T) || !std::isfinite(mu) || !std::isfinite(rho) ||
      !std::isfinite(gamma) || n < 0) {
    std::cerr << "E_USAGE invalid model parameters\n";
    return kUsage;
  }

  const bool ternary = mu2.has_value();
  qrse::ActionSet actions = ternary ? qrse::ActionSet::ternary() : qrse::ActionSet::binary();
  qrse::ProbabilityVector prior = prior_text.empty()
                                      ? qrse::uniform_probabilities(actions.size())
                                      : parse_prob_list(prior_text);

  qrse::EquilibriumParams params;
  params.T = T;
  params.mu = mu;
  if (ternary) params.mu2 = mu2;
  params.rho = rho;
  params.gamma = gamma;

  const double span = 10.0 * std::max(1.0, T);
  qrse::Grid grid = qrse::Grid::uniform(grid_lo.value_or(mu - span), grid_hi.value_or(mu + span),
                                        grid_points);
  qrse::UtilityModel utility = ternary ? qrse::UtilityModel::ternary_linear(mu, *mu2)
                                       : qrse::UtilityModel::binary_linear(mu);
  qrse::EquilibriumModel model(actions, prior, utility, params, grid);
  const qrse::DensityTable density = qrse::marginal_density(model);
  if (density.support_truncated) {
    std::cerr << "W grid endpoints carry non-negligible density mass\n";
  }
  params.xi = qrse::density_mean(density);

  const std::vector<double> samples =
      qrse::sample_from_density(density, static_cast<qrse::Index>(n), seed);

  OutDir out(out_path);
  qrse::write_samples_csv(out.file("samples.csv").string(), samples);
  json truth;
  truth["params"] = params_to_json(params);
  truth["prior"] = vector_to_json(prior);
  truth["n"] = n;
  truth["seed"] = seed;
  truth["grid"] = {{"lo", grid.lo()}, {"hi", grid.hi()}, {"points", grid.size()}};
  truth["quadrature_mean"] = params.xi;
  write_text_file(out.file("truth.json"), truth.dump(2) + "\n");
  out.finish({"simulate", "", {}, out_path, seed, {}});
  std::cout << samples.size() << " samples -> " << out_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------- plotdata

int cmd_plotdata(const std::string& result_path, const std::string& history_path,
                 const std::string& out_path) {
  std::ifstream in(result_path);
  if (!in) throw qrse::InputNotFound("cannot open '" + result_path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw qrse::ParseError("'" + result_path + "': " + e.what());
  }

  qrse::EquilibriumParams params;
  params.T = j.at("params").at("T").get<double>();
  params.mu = j.at("params").at("mu").get<double>();
  if (j.at("params").contains("mu2")) params.mu2 = j["params"]["mu2"].get<double>();
  params.rho = j.at("params").at("rho").get<double>();
  params.gamma = j.at("params").at("gamma").get<double>();
  params.xi = j.at("params").at("xi").get<double>();

  const json& jp = j.at("prior");
  qrse::ProbabilityVector prior(static_cast<qrse::Index>(jp.size()));
  for (qrse::Index i = 0; i < prior.size(); ++i) {
    prior[i] = jp[static_cast<std::size_t>(i)].get<double>();
  }
  const bool ternary = prior.size() == 3;
  qrse::ActionSet actions = ternary ? qrse::ActionSet::ternary() : qrse::ActionSet::binary();
  qrse::UtilityModel utility =
      ternary ? qrse::UtilityModel::ternary_linear(params.mu, params.mu2.value_or(params.mu))
              : qrse::UtilityModel::binary_linear(params.mu);
  qrse::Grid grid = qrse::Grid::uniform(j.at("grid").at("lo").get<double>(),
                                        j.at("grid").at("hi").get<double>(),
                                        j.at("grid").at("points").get<qrse::Index>());
  qrse::EquilibriumModel model(actions, prior, utility, params, grid,
                               j.at("entry_action").get<qrse::Index>(),
                               j.at("exit_action").get<qrse::Index>());

  const qrse::DensityTable density = qrse::marginal_density(model);
  const qrse::ArrayXXd conditional = qrse::decision_curve(model.ctx(), grid.points());

  OutDir out(out_path);
  qrse::write_density_csv(out.file("density.csv").string(), density);

  {
    std::ofstream csv(out.file("conditional.csv"), std::ios::binary);
    csv << "x";
    for (qrse::Index a = 0; a < actions.size(); ++a) {
      csv << ",f_" << actions.label(a) << "_given_x";
    }
    csv << "\n";
    for (qrse::Index i = 0; i < grid.size(); ++i) {
      csv << qrse::format_double(grid.points()[i]);
      for (qrse::Index a = 0; a < actions.size(); ++a) {
        csv << ',' << qrse::format_double(conditional(a, i));
      }
      csv << "\n";
    }
  }
  {
    std::ofstream csv(out.file("joint.csv"), std::ios::binary);
    csv << "x";
    for (qrse::Index a = 0; a < actions.size(); ++a) csv << ",f_joint_" << actions.label(a);
    csv << "\n";
    for (qrse::Index i = 0; i < grid.size(); ++i) {
      csv << qrse::format_double(grid.points()[i]);
      for (qrse::Index a = 0; a < actions.size(); ++a) {
        csv << ',' << qrse::format_double(conditional(a, i) * density.values[i]);
      }
      csv << "\n";
    }
  }

  qrse::BeliefHistory history;
  if (!history_path.empty()) {
    history = qrse::read_belief_history(history_path);
  } else {
    const json& jm = j.at("action_marginal");
    qrse::ProbabilityVector marginal(static_cast<qrse::Index>(jm.size()));
    for (qrse::Index i = 0; i < marginal.size(); ++i) {
      marginal[i] = jm[static_cast<std::size_t>(i)].get<double>();
    }
    history = qrse::append_period(std::move(history), prior, marginal, "0");
  }
  write_marginals_csv(out.file("marginals.csv"), history, actions);

  std::vector<std::string> inputs{result_path};
  if (!history_path.empty()) inputs.push_back(history_path);
  out.finish({"plotdata", "", inputs, out_path, 0, {}});
  std::cout << "4 plot tables -> " << out_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------- ri

int cmd_ri(double T, double mu, std::optional<double> mu2, const std::string& states_path,
           std::optional<double> grid_lo, std::optional<double> grid_hi, qrse::Index grid_points,
           double tol, qrse::Index max_iter, const std::string& out_path) {
  const bool ternary = mu2.has_value();
  qrse::ActionSet actions = ternary ? qrse::ActionSet::ternary() : qrse::ActionSet::binary();
  qrse::UtilityModel utility = ternary ? qrse::UtilityModel::ternary_linear(mu, *mu2)
                                       : qrse::UtilityModel::binary_linear(mu);

  qrse::ArrayXd states;
  qrse::ProbabilityVector weights;
  std::vector<std::string> inputs;
  if (!states_path.empty()) {
    inputs.push_back(states_path);
    const std::vector<double> samples = qrse::read_samples_csv(states_path);
    if (samples.empty()) throw qrse::ParseError("'" + states_path + "': no states");
    std::map<double, double> freq;
    for (double s : samples) freq[s] += 1.0;
    states.resize(static_cast<qrse::Index>(freq.size()));
    weights.resize(states.size());
    qrse::Index i = 0;
    for (const auto& [value, count] : freq) {
      states[i] = value;
      weights[i] = count / static_cast<double>(samples.size());
      ++i;
    }
  } else {
    if (!grid_lo || !grid_hi) {
      std::cerr << "E_USAGE ri needs --states or --grid-lo/--grid-hi\n";
      return kUsage;
    }
    states = qrse::ArrayXd::LinSpaced(grid_points, *grid_lo, *grid_hi);
    weights = qrse::uniform_probabilities(grid_points);
  }

  qrse::RiProblem problem(actions, states, weights, utility, T);
  const qrse::RiSolution sol = qrse::solve_ri(problem, tol, max_iter);

  json j;
  j["actions"] = actions.labels();
  j["f_a"] = vector_to_json(sol.f_a);
  j["converged"] = sol.converged;
  j["iterations"] = sol.iterations;
  j["objective"] = sol.objective;
  j["residual"] = qrse::ri_residual(problem, sol);
  j["states"] = vector_to_json(states);
  json cond = json::array();
  for (qrse::Index a = 0; a < actions.size(); ++a) {
    cond.push_back(vector_to_json(sol.f_a_given_x.row(a).transpose()));
  }
  j["f_a_given_x"] = cond;

  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    OutDir out(out_path);
    write_text_file(out.file("ri.json"), j.dump(2) + "\n");
    out.finish({"ri", "", inputs, out_path, 0, {}});
    std::cout << "ri fixed point -> " << out_path << "\n";
  }
  return sol.converged ? kOk : kPartial;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"statistical-equilibrium fitting of outcome distributions"};
  app.set_version_flag("--version", qrse::kVersion);
  app.require_subcommand(1);

  // decide
  double d_x = 0.0, d_T = 1.0, d_mu = 0.0;
  std::optional<double> d_mu2;
  std::string d_prior;
  auto* decide = app.add_subcommand("decide", "evaluate the choice distribution at one outcome");
  decide->add_option("--x", d_x, "outcome value")->required();
  decide->add_option("--T", d_T, "decision temperature");
  decide->add_option("--mu", d_mu, "indifference point");
  decide->add_option("--mu2", d_mu2, "second indifference point (ternary)");
  decide->add_option("--p", d_prior, "prior beliefs, comma-separated");

  // ingest
  std::string i_prices, i_returns, i_grouping, i_config, i_out;
  auto* ingest = app.add_subcommand("ingest", "prices/returns to per-period sample files");
  ingest->add_option("--prices", i_prices, "price CSV (date,area,price)");
  ingest->add_option("--returns", i_returns, "precomputed returns CSV (date,area,return)");
  ingest->add_option("--grouping", i_grouping, "quarterly|annual|terms");
  ingest->add_option("--config", i_config, "JSON config file");
  ingest->add_option("--out", i_out, "output directory")->required();

  // fit
  std::string f_samples, f_prior, f_config, f_out, f_utility, f_entry, f_exit;
  auto* fit = app.add_subcommand("fit", "fit one period of samples");
  fit->add_option("--samples", f_samples, "samples CSV (header x)")->required();
  fit->add_option("--prior", f_prior,
                  "uniform|previous|mean|extreme-buy|extreme-sell|adaptive|fixed");
  fit->add_option("--config", f_config, "JSON config file");
  fit->add_option("--out", f_out, "output directory")->required();
  fit->add_option("--utility", f_utility, "binary|ternary");
  fit->add_option("--entry", f_entry, "entry action (label or index)");
  fit->add_option("--exit", f_exit, "exit action (label or index)");

  // rolling
  std::string r_prices, r_returns, r_grouping, r_config, r_out, r_utility, r_entry, r_exit;
  ScheduleChoice r_schedules;
  auto* rolling = app.add_subcommand("rolling", "fit a period sequence under prior schedules");
  rolling->add_option("--prices", r_prices, "price CSV (date,area,price)");
  rolling->add_option("--returns", r_returns, "precomputed returns CSV (date,area,return)");
  rolling->add_option("--grouping", r_grouping, "quarterly|annual|terms");
  rolling->add_option("--prior", r_schedules.names,
                      "prior schedule, repeatable for a side-by-side summary");
  rolling->add_option("--config", r_config, "JSON config file");
  rolling->add_option("--out", r_out, "output directory")->required();
  rolling->add_option("--utility", r_utility, "binary|ternary");
  rolling->add_option("--entry", r_entry, "entry action (label or index)");
  rolling->add_option("--exit", r_exit, "exit action (label or index)");

  // simulate
  double s_T = 1.0, s_mu = 0.0, s_rho = 0.0, s_gamma = 0.0;
  std::optional<double> s_mu2, s_lo, s_hi;
  long long s_n = 0;
  std::uint64_t s_seed = 0;
  qrse::Index s_points = 2001;
  std::string s_prior, s_out;
  auto* simulate = app.add_subcommand("simulate", "draw synthetic samples from a model");
  simulate->add_option("--T", s_T, "decision temperature")->required();
  simulate->add_option("--mu", s_mu, "indifference point")->required();
  simulate->add_option("--mu2", s_mu2, "second indifference point (ternary)");
  simulate->add_option("--rho", s_rho, "feedback multiplier");
  simulate->add_option("--gamma", s_gamma, "skew multiplier");
  simulate->add_option("--n", s_n, "sample count")->required();
  simulate->add_option("--seed", s_seed, "RNG seed");
  simulate->add_option("--p", s_prior, "prior beliefs, comma-separated");
  simulate->add_option("--grid-lo", s_lo, "grid lower bound");
  simulate->add_option("--grid-hi", s_hi, "grid upper bound");
  simulate->add_option("--grid-points", s_points, "grid size");
  simulate->add_option("--out", s_out, "output directory")->required();

  // plotdata
  std::string p_result, p_history, p_out;
  auto* plotdata = app.add_subcommand("plotdata", "export plot tables from a fit result");
  plotdata->add_option("--result", p_result, "result.json from fit/rolling")->required();
  plotdata->add_option("--history", p_history, "history.jsonl from rolling");
  plotdata->add_option("--out", p_out, "output directory")->required();

  // ri
  double ri_T = 1.0, ri_mu = 0.0, ri_tol = 1e-12;
  std::optional<double> ri_mu2, ri_lo, ri_hi;
  qrse::Index ri_points = 101, ri_max_iter = 10000;
  std::string ri_states, ri_out;
  auto* ri = app.add_subcommand("ri", "endogenous-weighting fixed point");
  ri->add_option("--T", ri_T, "temperature");
  ri->add_option("--mu", ri_mu, "indifference point");
  ri->add_option("--mu2", ri_mu2, "second indifference point (ternary)");
  ri->add_option("--states", ri_states, "state samples CSV (header x)");
  ri->add_option("--grid-lo", ri_lo, "uniform state grid lower bound");
  ri->add_option("--grid-hi", ri_hi, "uniform state grid upper bound");
  ri->add_option("--grid-points", ri_points, "uniform state grid size");
  ri->add_option("--tol", ri_tol, "fixed-point tolerance");
  ri->add_option("--max-iter", ri_max_iter, "iteration cap");
  ri->add_option("--out", ri_out, "output directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "E_USAGE " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (decide->parsed()) return cmd_decide(d_x, d_T, d_mu, d_mu2, d_prior);
    if (ingest->parsed()) {
      if (i_prices.empty() == i_returns.empty()) {
        std::cerr << "E_USAGE ingest needs exactly one of --prices/--returns\n";
        return kUsage;
      }
      return cmd_ingest(i_prices, i_returns, i_grouping, i_config, i_out);
    }
    if (fit->parsed()) {
      return cmd_fit(f_samples, f_prior, f_config, f_out, f_utility, f_entry, f_exit);
    }
    if (rolling->parsed()) {
      if (r_prices.empty() == r_returns.empty()) {
        std::cerr << "E_USAGE rolling needs exactly one of --prices/--returns\n";
        return kUsage;
      }
      return cmd_rolling(r_prices, r_returns, r_grouping, r_schedules, r_config, r_out,
                         r_utility, r_entry, r_exit);
    }
    if (simulate->parsed()) {
      return cmd_simulate(s_T, s_mu, s_mu2, s_rho, s_gamma, s_n, s_seed, s_prior, s_lo, s_hi,
                          s_points, s_out);
    }
    if (plotdata->parsed()) return cmd_plotdata(p_result, p_history, p_out);
    if (ri->parsed()) {
      return cmd_ri(ri_T, ri_mu, ri_mu2, ri_states, ri_lo, ri_hi, ri_points, ri_tol,
                    ri_max_iter, ri_out);
    }
  } catch (const qrse::InputNotFound& e) {
    std::cerr << "E_INPUT_NOT_FOUND " << e.what() << "\n";
    return kUsage;
  } catch (const qrse::ParseError& e) {
    std::cerr << "E_PARSE " << e.what() << "\n";
    return kUsage;
  } catch (const qrse::Error& e) {
    std::cerr << "E_RUNTIME " << e.what() << "\n";
    return kPartial;
  } catch (const std::exception& e) {
    std::cerr << "E_INTERNAL " << e.what() << "\n";
    return kPartial;
  }
  return kUsage;
}
