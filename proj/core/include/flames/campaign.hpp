#pragma once

/**
 * Campaign orchestration: run one algorithm across a bug corpus under a
 * shared patch budget and memory cap, collect per-bug rows, aggregate, and
 * serialize a reproducible JSON report.
 *
 * Model specs name a model family, instantiated per bug:
 *   "table"         single-edit repair table model built around the buggy
 *                   program (dominant next-token on the buggy path, the
 *                   remaining mass on same-kind edits, deterministic suffix
 *                   completion after a deviation);
 *   "table:<path>"  one explicit table-model file shared by every bug;
 *   "ngram[:N]"     order-N counts trained per bug on the buggy program
 *                   plus a seeded background sample of grammar programs;
 *   "remote:<url>"  a shared HTTP endpoint (conditioning is server-side).
 *
 * Reports are byte-stable for a fixed (config, seed, corpus) apart from the
 * wall-clock fields (wall_ms, mean_time_to_plausible), which measure real
 * time.
 */

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flames/model.hpp"
#include "flames/reward.hpp"
#include "flames/search.hpp"

namespace flames::campaign {

using search::Algo;

struct CampaignConfig {
  Algo algo = Algo::Flames;
  std::string corpus_path;    // informational when entries supplied directly
  std::string model_spec = "table";
  int beam_size = 10;
  search::Policy policy = search::Policy::PucbVar;
  int expansion_k = 10;
  int max_patches = 200;
  double timeout_secs = 60.0;
  int max_new_tokens = 24;
  double temperature = 1.0;  // sample
  std::optional<std::int64_t> memory_cap;
  std::uint64_t seed = 0;
  int jobs = 1;  // parallel bug workers; rows stay in corpus order
  bool stop_on_plausible = true;
};

struct BugRow {
  std::string bug_id;
  bool plausible_found = false;
  double best_reward = 0.0;
  std::int64_t patches_validated = 0;
  double wall_ms = 0.0;
  std::int64_t peak_bytes = 0;
  bool oom = false;
  std::string error;  // per-bug algorithm error, empty when clean
};

struct CampaignReport {
  std::string algorithm;
  std::string model_spec;
  std::string corpus;
  std::uint64_t seed = 0;
  std::vector<BugRow> rows;
  // aggregates
  std::int64_t plausible_count = 0;
  double oom_rate = 0.0;
  double mean_time_to_plausible = 0.0;  // wall_ms mean over plausible rows; 0 when none
  double mean_peak_bytes = 0.0;
};

/** Algo <-> CLI spelling ("flames" | "beam" | "seqbeam" | "sample" | "greedy"). */
std::string algo_name(Algo algo);
Algo parse_algo(const std::string& name);  // throws ConfigError

/** Policy <-> CLI spelling ("ucb" | "pucb-fixed" | "pucb-var"). */
std::string policy_name(search::Policy policy);
search::Policy parse_policy(const std::string& name);  // throws ConfigError

/**
 * Builds the per-bug model for a model spec. Exposed so tests and tools can
 * inspect the same models the campaign runs against. Throws ConfigError on
 * an unknown spec, IoError when a table file is unreadable.
 */
std::unique_ptr<model::TokenModel> make_bug_model(
    const std::string& model_spec, const reward::CorpusEntry& entry,
    const model::Vocab& vocab, std::uint64_t seed);

/** Runs over in-memory entries (corpus order preserved in rows). */
CampaignReport run_campaign(const CampaignConfig& config,
                            const std::vector<reward::CorpusEntry>& entries);

/** Loads config.corpus_path (IoError on failure) and runs. */
CampaignReport run_campaign(const CampaignConfig& config);

/** Stable-key JSON per the report schema; written by the repair CLI. */
std::string report_to_json(const CampaignReport& report);

// ==== head-to-head comparison ===============================================

struct BugDiff {
  std::string bug_id;
  bool plausible_a = false;
  bool plausible_b = false;
  double wall_ms_delta = 0.0;   // a - b
  std::int64_t peak_delta = 0;  // a - b
};

struct ComparisonSummary {
  std::vector<BugDiff> per_bug;      // bugs present in both reports
  std::int64_t plausible_diff = 0;   // a.plausible_count - b.plausible_count
  std::int64_t oom_diff = 0;         // a oom rows - b oom rows (paired bugs)
};

/** Paired per-bug diffs. Throws PairingError if no bug id is shared. */
ComparisonSummary compare(const CampaignReport& a, const CampaignReport& b);

}  // namespace flames::campaign
