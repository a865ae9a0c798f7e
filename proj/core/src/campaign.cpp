#include "flames/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <thread>

#include "flames/costmodel.hpp"
#include "flames/decode.hpp"
#include "flames/errors.hpp"
#include "flames/expr.hpp"
#include "flames/remote_model.hpp"
#include "json.hpp"

namespace flames::campaign {

using model::TokenDist;
using model::TokenId;
using model::Vocab;

// ==== names ==================================================================

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::Flames: return "flames";
    case Algo::Beam: return "beam";
    case Algo::SeqBeam: return "seqbeam";
    case Algo::Sample: return "sample";
    case Algo::Greedy: return "greedy";
  }
  return "?";
}

Algo parse_algo(const std::string& name) {
  if (name == "flames") return Algo::Flames;
  if (name == "beam") return Algo::Beam;
  if (name == "seqbeam") return Algo::SeqBeam;
  if (name == "sample") return Algo::Sample;
  if (name == "greedy") return Algo::Greedy;
  throw ConfigError("unknown algorithm '" + name +
                    "' (expected flames|beam|seqbeam|sample|greedy)");
}

std::string policy_name(search::Policy policy) {
  switch (policy) {
    case search::Policy::Ucb: return "ucb";
    case search::Policy::PucbFixed: return "pucb-fixed";
    case search::Policy::PucbVar: return "pucb-var";
  }
  return "?";
}

search::Policy parse_policy(const std::string& name) {
  if (name == "ucb") return search::Policy::Ucb;
  if (name == "pucb-fixed") return search::Policy::PucbFixed;
  if (name == "pucb-var") return search::Policy::PucbVar;
  throw ConfigError("unknown policy '" + name +
                    "' (expected ucb|pucb-fixed|pucb-var)");
}

// ==== per-bug models =========================================================

namespace {

/** splitmix64: decorrelates per-bug seeds from the campaign seed. */
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/**
 * Single-edit repair model: the per-bug conditioning the "table" spec
 * builds. On the buggy program's own path the next buggy token dominates
 * (0.70); tokens of the same kind — the plausible one-token edits — share
 * 0.24; everything else (never sos) shares 0.06. Once a prefix deviates
 * from the buggy program the model completes the remaining buggy suffix
 * deterministically, so every reachable patch is the buggy program with
 * (at most) one token replaced, plus the unedited program itself.
 */
class SingleEditModel final : public model::TokenModel {
 public:
  SingleEditModel(Vocab vocab, std::vector<TokenId> buggy_tokens,
                  std::int64_t alpha = 1000)
      : TokenModel(std::move(vocab), alpha), bp_(std::move(buggy_tokens)) {
    if (bp_.size() < 2 || bp_.front() != this->vocab().sos() ||
        !this->vocab().is_terminal(bp_.back()))
      throw ConfigError("single-edit model: buggy_tokens must be a complete "
                        "sequence (sos ... terminal)");
  }

 protected:
  TokenDist compute_dist(std::span<const TokenId> prefix) const override {
    const std::size_t pos = prefix.size();
    if (pos >= bp_.size()) {
      // Ran past the buggy program (a deviation at its last slot): close.
      return TokenDist::from_probs({{bp_.back(), 1.0}});
    }
    const TokenId next = bp_[pos];
    if (!std::equal(prefix.begin(), prefix.end(), bp_.begin()))
      return TokenDist::from_probs({{next, 1.0}});

    // On the buggy path: dominant continuation, same-kind edits, long tail.
    std::vector<TokenId> alts;
    const auto kind = expr::classify(vocab(), next);
    std::vector<TokenDist::Entry> entries{{next, 0.70}};
    for (TokenId id = 0; id < vocab().size(); ++id) {
      if (id == next || id == vocab().sos()) continue;
      if (expr::classify(vocab(), id) == kind &&
          kind != expr::TokenKind::Terminal)
        alts.push_back(id);
    }
    double tail_mass = 0.30;
    if (!alts.empty()) {
      const double p_alt = 0.24 / static_cast<double>(alts.size());
      for (TokenId id : alts) entries.push_back({id, p_alt});
      tail_mass = 0.06;
    }
    std::size_t n_tail = 0;
    for (TokenId id = 0; id < vocab().size(); ++id) {
      if (id == next || id == vocab().sos()) continue;
      if (std::find(alts.begin(), alts.end(), id) != alts.end()) continue;
      ++n_tail;
    }
    const double p_tail = tail_mass / static_cast<double>(n_tail);
    for (TokenId id = 0; id < vocab().size(); ++id) {
      if (id == next || id == vocab().sos()) continue;
      if (std::find(alts.begin(), alts.end(), id) != alts.end()) continue;
      entries.push_back({id, p_tail});
    }
    return TokenDist::from_probs(std::move(entries));
  }

 private:
  std::vector<TokenId> bp_;
};

}  // namespace

std::unique_ptr<model::TokenModel> make_bug_model(
    const std::string& model_spec, const reward::CorpusEntry& entry,
    const Vocab& vocab, std::uint64_t seed) {
  if (model_spec == "table")
    return std::make_unique<SingleEditModel>(vocab, entry.bug.buggy_tokens);

  if (model_spec.rfind("table:", 0) == 0) {
    const std::string path = model_spec.substr(6);
    std::ifstream in(path);
    if (!in) throw IoError("model spec: cannot read table file " + path);
    return std::make_unique<model::TableModel>(
        model::TableModel::load_json(in));
  }

  if (model_spec == "ngram" || model_spec.rfind("ngram:", 0) == 0) {
    int order = 2;
    if (model_spec.size() > 6) {
      try {
        order = std::stoi(model_spec.substr(6));
      } catch (const std::exception&) {
        throw ConfigError("model spec: bad ngram order in '" + model_spec + "'");
      }
    }
    // The bug's own tokens plus a seeded background of grammar programs, so
    // unseen contexts are rare and the model has edit options to offer.
    std::vector<std::vector<TokenId>> corpus{entry.bug.buggy_tokens};
    for (const reward::CorpusEntry& bg :
         reward::generate_bug_corpus(mix_seed(seed, 0x6e6772616dULL), 16, vocab))
      corpus.push_back(bg.ground_truth);
    return std::make_unique<model::NgramModel>(vocab, corpus, order);
  }

  if (model_spec.rfind("remote:", 0) == 0) {
    model::RemoteConfig rc;
    rc.base_url = model_spec.substr(7);
    return std::make_unique<model::RemoteModel>(vocab, rc);
  }

  throw ConfigError("unknown model spec '" + model_spec +
                    "' (expected table | table:<path> | ngram[:N] | remote:<url>)");
}

// ==== per-bug dispatch =======================================================

namespace {

struct Validation {
  std::int64_t validated = 0;
  double best_reward = 0.0;
};

/**
 * Validates complete sequences in the given (model-score) order against the
 * suite, stopping at the patch budget — and, when stop_early is set, at the
 * first plausible patch.
 */
Validation validate_ranked(const std::vector<decode::ScoredSequence>& seqs,
                           const reward::TestSuite& suite, const Vocab& vocab,
                           std::int64_t max_patches, bool stop_early) {
  Validation v;
  for (const auto& seq : seqs) {
    if (!seq.complete) continue;
    if (v.validated >= max_patches) break;
    const double r = reward::evaluate_reward(seq.tokens, suite, vocab).reward;
    v.validated += 1;
    v.best_reward = std::max(v.best_reward, r);
    if (stop_early && r >= 1.0) break;
  }
  return v;
}

BugRow run_bug(const CampaignConfig& config, const reward::CorpusEntry& entry,
               std::uint64_t bug_seed) {
  BugRow row;
  row.bug_id = entry.bug.id;
  costmodel::MemoryMeter meter(config.memory_cap);
  const auto t_start = std::chrono::steady_clock::now();

  try {
    const auto m = make_bug_model(config.model_spec, entry,
                                  reward::default_vocab(), bug_seed);
    const Vocab& vocab = m->vocab();

    switch (config.algo) {
      case Algo::Flames: {
        search::SearchConfig sc;
        sc.policy = config.policy;
        sc.expansion_k = config.expansion_k;
        sc.max_patches = config.max_patches;
        sc.timeout_secs = config.timeout_secs;
        sc.max_sim_tokens = config.max_new_tokens;
        sc.stop_on_plausible = config.stop_on_plausible;
        sc.memory_cap = config.memory_cap;
        const auto result =
            search::flames_search(*m, entry.bug, entry.suite, sc, &meter);
        row.patches_validated = result.report.distinct_patches;
        if (!result.candidates.empty())
          row.best_reward = result.candidates.front().reward;
        break;
      }
      case Algo::Beam:
      case Algo::SeqBeam: {
        decode::DecodeConfig dc;
        dc.beam_size = config.beam_size;
        dc.max_new_tokens = config.max_new_tokens;
        dc.memory_cap = config.memory_cap;
        const auto seqs =
            config.algo == Algo::Beam
                ? decode::beam_search(*m, entry.bug.prompt_tokens, dc, &meter)
                : decode::sequential_beam_search(*m, entry.bug.prompt_tokens,
                                                 dc, &meter);
        const auto v = validate_ranked(seqs, entry.suite, vocab,
                                       config.max_patches,
                                       config.stop_on_plausible);
        row.patches_validated = v.validated;
        row.best_reward = v.best_reward;
        break;
      }
      case Algo::Sample: {
        decode::DecodeConfig dc;
        dc.max_new_tokens = config.max_new_tokens;
        dc.temperature = config.temperature;
        dc.rng_seed = bug_seed;
        dc.memory_cap = config.memory_cap;
        auto seqs = decode::multiple_sampling(*m, entry.bug.prompt_tokens, dc,
                                              config.max_patches, &meter);
        // Budget counts validated patches: dedupe, then rank by model score.
        std::sort(seqs.begin(), seqs.end(),
                  [](const decode::ScoredSequence& a,
                     const decode::ScoredSequence& b) {
                    if (a.logprob != b.logprob) return a.logprob > b.logprob;
                    return a.tokens < b.tokens;
                  });
        seqs.erase(std::unique(seqs.begin(), seqs.end(),
                               [](const decode::ScoredSequence& a,
                                  const decode::ScoredSequence& b) {
                                 return a.tokens == b.tokens;
                               }),
                   seqs.end());
        const auto v = validate_ranked(seqs, entry.suite, vocab,
                                       config.max_patches,
                                       config.stop_on_plausible);
        row.patches_validated = v.validated;
        row.best_reward = v.best_reward;
        break;
      }
      case Algo::Greedy: {
        decode::DecodeConfig dc;
        dc.max_new_tokens = config.max_new_tokens;
        dc.memory_cap = config.memory_cap;
        const auto seq =
            decode::greedy_decode(*m, entry.bug.prompt_tokens, dc, &meter);
        const auto v = validate_ranked({seq}, entry.suite, vocab,
                                       config.max_patches,
                                       config.stop_on_plausible);
        row.patches_validated = v.validated;
        row.best_reward = v.best_reward;
        break;
      }
    }
  } catch (const SimulatedOom&) {
    // The meter keeps the attempted peak; the row records the breach below.
    row.patches_validated = 0;
    row.best_reward = 0.0;
  } catch (const Error& e) {
    row.error = e.what();
  } catch (const std::exception& e) {
    row.error = e.what();
  }

  row.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t_start)
                    .count();
  const auto reading = meter.reading();
  row.peak_bytes = reading.peak_bytes;
  row.oom = reading.oom;
  row.plausible_found = row.best_reward >= 1.0;
  return row;
}

}  // namespace

// ==== campaign ===============================================================

CampaignReport run_campaign(const CampaignConfig& config,
                            const std::vector<reward::CorpusEntry>& entries) {
  if (config.beam_size < 1) throw ConfigError("campaign: beam_size must be >= 1");
  if (config.max_patches < 1)
    throw ConfigError("campaign: max_patches must be >= 1");

  CampaignReport report;
  report.algorithm = algo_name(config.algo);
  report.model_spec = config.model_spec;
  report.corpus = config.corpus_path;
  report.seed = config.seed;
  report.rows.resize(entries.size());

  const auto run_index = [&](std::size_t i) {
    report.rows[i] = run_bug(config, entries[i], mix_seed(config.seed, i));
  };

  const int jobs = std::max(
      1, std::min<int>(config.jobs, static_cast<int>(entries.size())));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < entries.size(); ++i) run_index(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = cursor.fetch_add(1); i < entries.size();
             i = cursor.fetch_add(1))
          run_index(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  // Aggregates (rows are already in corpus order).
  double peak_sum = 0.0;
  double plausible_ms_sum = 0.0;
  std::int64_t oom_rows = 0;
  for (const BugRow& row : report.rows) {
    if (row.plausible_found) {
      report.plausible_count += 1;
      plausible_ms_sum += row.wall_ms;
    }
    if (row.oom) oom_rows += 1;
    peak_sum += static_cast<double>(row.peak_bytes);
  }
  const auto n = static_cast<double>(report.rows.size());
  if (!report.rows.empty()) {
    report.oom_rate = static_cast<double>(oom_rows) / n;
    report.mean_peak_bytes = peak_sum / n;
  }
  if (report.plausible_count > 0)
    report.mean_time_to_plausible =
        plausible_ms_sum / static_cast<double>(report.plausible_count);
  return report;
}

CampaignReport run_campaign(const CampaignConfig& config) {
  return run_campaign(config, reward::load_corpus_file(config.corpus_path));
}

std::string report_to_json(const CampaignReport& report) {
  nlohmann::ordered_json doc;
  doc["algorithm"] = report.algorithm;
  doc["model_spec"] = report.model_spec;
  doc["corpus"] = report.corpus;
  doc["seed"] = report.seed;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const BugRow& row : report.rows) {
    rows.push_back({{"bug_id", row.bug_id},
                    {"plausible_found", row.plausible_found},
                    {"best_reward", row.best_reward},
                    {"patches_validated", row.patches_validated},
                    {"wall_ms", row.wall_ms},
                    {"peak_bytes", row.peak_bytes},
                    {"oom", row.oom},
                    {"error", row.error}});
  }
  doc["rows"] = std::move(rows);
  doc["plausible_count"] = report.plausible_count;
  doc["oom_rate"] = report.oom_rate;
  doc["mean_time_to_plausible"] = report.mean_time_to_plausible;
  doc["mean_peak_bytes"] = report.mean_peak_bytes;
  return doc.dump(2) + "\n";
}

// ==== comparison =============================================================

ComparisonSummary compare(const CampaignReport& a, const CampaignReport& b) {
  std::map<std::string, const BugRow*> b_rows;
  for (const BugRow& row : b.rows) b_rows.emplace(row.bug_id, &row);

  ComparisonSummary summary;
  std::int64_t oom_a = 0, oom_b = 0;
  for (const BugRow& ra : a.rows) {
    auto it = b_rows.find(ra.bug_id);
    if (it == b_rows.end()) continue;
    const BugRow& rb = *it->second;
    BugDiff diff;
    diff.bug_id = ra.bug_id;
    diff.plausible_a = ra.plausible_found;
    diff.plausible_b = rb.plausible_found;
    diff.wall_ms_delta = ra.wall_ms - rb.wall_ms;
    diff.peak_delta = ra.peak_bytes - rb.peak_bytes;
    summary.per_bug.push_back(std::move(diff));
    if (ra.oom) ++oom_a;
    if (rb.oom) ++oom_b;
  }
  if (summary.per_bug.empty())
    throw PairingError("compare: reports share no bug id");
  summary.plausible_diff = a.plausible_count - b.plausible_count;
  summary.oom_diff = oom_a - oom_b;
  return summary;
}

}  // namespace flames::campaign
