#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qrse/fitting.hpp"
#include "qrse/ingest.hpp"
#include "qrse/priors.hpp"

namespace qrse {

/// Everything a run needs beyond the raw inputs. Read from a JSON config
/// file; command-line flags override individual fields.
struct RunConfig {
  FitConfig fit;
  std::string schedule = "uniform";
  double extreme_weight = 0.99;
  double lambda_e = 0.5;
  std::vector<ProbabilityVector> observed;  // adaptive schedule's known likelihoods
  ProbabilityVector fixed_prior;
  int median_window = 3;
  std::string grouping = "quarterly";
  std::vector<TermWindow> terms;  // empty: built-in default table
  std::uint64_t seed = 0;
};

RunConfig read_run_config(const std::string& path);

PriorSchedule schedule_from_config(const RunConfig& config, Index n_actions);

/// Provenance block written next to every subcommand's outputs. Paths are
/// recorded exactly as given on the command line, and the timestamp honors
/// SOURCE_DATE_EPOCH, so runs with identical arguments reproduce identical
/// trees.
struct RunManifest {
  std::string subcommand;
  std::string config_path;
  std::vector<std::string> inputs;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;  // out-dir-relative, excluding the manifest itself
};

void write_manifest(const std::string& path, const RunManifest& manifest);

std::string fit_result_to_json(const FitResult& result);
void write_fit_result_json(const std::string& path, const FitResult& result);

/// One JSON object per line: period label, prior, fitted marginal.
void write_belief_history(const std::string& path, const BeliefHistory& history);
BeliefHistory read_belief_history(const std::string& path);

void write_density_csv(const std::string& path, const DensityTable& table);

}  // namespace qrse
