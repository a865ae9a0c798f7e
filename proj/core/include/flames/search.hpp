#pragma once

/**
 * The semantic-guided tree search: best-first token search with selection,
 * expansion, simulation, and backpropagation over partial patches.
 *
 * Shape of one iteration:
 *   select    descend from the root by argmax policy score (ties: lowest
 *             token id) until an unexpanded or terminal node;
 *   expand    attach the top expansion_k next tokens as children, priors =
 *             raw truncated model probabilities (not renormalized);
 *   simulate  greedily complete the node's sequence (through the shared
 *             top-k cache), validate it, memoizing rewards per complete
 *             sequence so duplicates never re-run tests;
 *   backprop  along root..node: Q <- max(Q, reward), N <- N + 1.
 *
 * Selection policies:
 *   UCB        Q + c_ucb * sqrt(ln(parent_N) / N), unvisited = +inf
 *   P-UCB      Q + c_puct * P * sqrt(parent_N) / (1 + N)
 *   var P-UCB  P-UCB with c = log((parent_N + c_base + 1)/c_base) + c_init
 *
 * The budget counts distinct complete patches (duplicate rollouts are free);
 * the run stops on budget, timeout (checked between iterations), a 1.0
 * reward when stop_on_plausible is set, or exhaustion of the reachable
 * tree. Every model forward charges the meter with the greedy (k=1) step
 * cost for the whole-problem sequence length, so the peak reading is a
 * constant function of the patch budget.
 */

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flames/costmodel.hpp"
#include "flames/decode.hpp"
#include "flames/model.hpp"
#include "flames/reward.hpp"

namespace flames::search {

using model::TokenDist;
using model::TokenId;

// ==== configuration ==========================================================

enum class Policy { Ucb, PucbFixed, PucbVar };

/** Algorithm tags, shared with campaign rows and candidate provenance. */
enum class Algo { Flames, Beam, SeqBeam, Sample, Greedy };

struct SearchConfig {
  Policy policy = Policy::PucbVar;
  int expansion_k = 10;
  double c_ucb = 1.414;
  double c_puct = 4.0;
  double c_base = 10.0;
  double c_init = 4.0;
  int max_patches = 200;
  double timeout_secs = 60.0;
  int max_sim_tokens = 24;  // new-token budget below the prompt
  bool stop_on_plausible = true;
  bool use_cache = true;
  std::optional<std::int64_t> memory_cap;
};

// ==== tree ===================================================================

struct SearchNode {
  std::vector<TokenId> state;  // full sequence from [sos]
  double q = 0.0;              // best reward seen through this node
  std::int64_t n = 0;          // visits
  double prior = 0.0;          // model probability of the action that made this node
  bool expanded = false;
  bool terminal = false;
  SearchNode* parent = nullptr;
  std::vector<std::unique_ptr<SearchNode>> children;  // ordered by creation (prior desc)
};

struct PatchCandidate {
  std::vector<TokenId> tokens;
  double reward = 0.0;
  bool complete = false;
  std::int64_t iteration = 0;  // iteration of first discovery
  Algo source = Algo::Flames;
};

struct SearchReport {
  std::int64_t iterations = 0;
  std::int64_t distinct_patches = 0;
  std::uint64_t forward_calls = 0;
  std::uint64_t cache_hits = 0;
  std::int64_t reward_errors = 0;  // reward_fn exceptions folded to reward 0
  double wall_ms = 0.0;
  costmodel::MemoryReading memory;
  std::string stop_reason;  // "plausible" | "budget" | "timeout" | "exhausted"
};

struct SearchResult {
  std::vector<PatchCandidate> candidates;  // reward desc, iteration asc
  SearchReport report;
};

// ==== policy scoring =========================================================

/**
 * Scores one child for selection. parent_n may be 0 for the prior-weighted
 * policies (the exploration term collapses); UCB returns +inf for an
 * unvisited child regardless of the parent count.
 */
double policy_score(Policy policy, double node_q, std::int64_t node_n,
                    double node_p, std::int64_t parent_n,
                    const SearchConfig& config);

// ==== top-k cache ============================================================

/**
 * Tree-structure cache: memoizes truncated next-token queries keyed by the
 * exact token prefix. Hits count on the model's stats; errors are never
 * cached. Thread-safe (shared read/write under a mutex).
 */
class TopKCache {
 public:
  explicit TopKCache(int k) : k_(k) {}
  int k() const { return k_; }
  std::size_t size() const;

 private:
  friend TokenDist cached_top_k(TopKCache&, const model::TokenModel&,
                                std::span<const TokenId>, int,
                                costmodel::MemoryMeter*, std::int64_t);
  int k_;
  mutable std::mutex mu_;
  std::map<std::vector<TokenId>, TokenDist> entries_;
};

/**
 * Memoized model.next_dist + top_k. On a miss the model forward runs (and
 * optionally charges `charge_bytes` against `meter` for its duration); on a
 * hit the stored result returns bit-identically and the model's cache_hits
 * counter increments. k must equal the cache's k.
 */
TokenDist cached_top_k(TopKCache& cache, const model::TokenModel& m,
                       std::span<const TokenId> prefix, int k,
                       costmodel::MemoryMeter* meter = nullptr,
                       std::int64_t charge_bytes = 0);

// ==== phase operations (exposed for testing; flames_search orchestrates) ====

/** Descends by argmax policy score; returns an unexpanded or terminal node. */
SearchNode* select(SearchNode& root, const SearchConfig& config);

/**
 * Attaches top expansion_k children with raw truncated priors.
 * Throws PrefixTerminalError on a terminal node; expanding an expanded node
 * is a no-op.
 */
void expand(SearchNode& node, TopKCache& cache, const model::TokenModel& m,
            const SearchConfig& config,
            costmodel::MemoryMeter* meter = nullptr,
            std::int64_t charge_bytes = 0);

/** Q <- max(Q, reward), N += 1 along root..leaf (inclusive). */
void backprop(SearchNode* leaf, double reward);

// ==== the search =============================================================

using RewardFn = std::function<double(std::span<const TokenId>)>;

/** Per-iteration hook for invariant tests: called after each backprop. */
using IterationObserver =
    std::function<void(const SearchNode& root, std::int64_t iteration)>;

/**
 * Core entry point: searches from `prompt`, validating complete sequences
 * with reward_fn (values clamped to [0,1]; exceptions count as reward 0 and
 * are tallied in the report).
 */
SearchResult flames_search(const model::TokenModel& m,
                           std::span<const TokenId> prompt,
                           const RewardFn& reward_fn,
                           const SearchConfig& config,
                           costmodel::MemoryMeter* meter = nullptr,
                           const IterationObserver& observer = {});

/** Repair-domain entry point: prompt from the bug, reward from the suite. */
SearchResult flames_search(const model::TokenModel& m, const reward::Bug& bug,
                           const reward::TestSuite& suite,
                           const SearchConfig& config,
                           costmodel::MemoryMeter* meter = nullptr,
                           const IterationObserver& observer = {});

}  // namespace flames::search
