#include "flames/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "flames/errors.hpp"

namespace flames::search {

// ==== policy scoring =========================================================

double policy_score(Policy policy, double node_q, std::int64_t node_n,
                    double node_p, std::int64_t parent_n,
                    const SearchConfig& config) {
  switch (policy) {
    case Policy::Ucb: {
      if (node_n == 0) return std::numeric_limits<double>::infinity();
      return node_q + config.c_ucb *
                          std::sqrt(std::log(static_cast<double>(parent_n)) /
                                    static_cast<double>(node_n));
    }
    case Policy::PucbFixed: {
      return node_q + config.c_puct * node_p *
                          std::sqrt(static_cast<double>(parent_n)) /
                          (1.0 + static_cast<double>(node_n));
    }
    case Policy::PucbVar: {
      // Exploration constant grows with how much the parent has been tried.
      const double c =
          std::log((static_cast<double>(parent_n) + config.c_base + 1.0) /
                   config.c_base) +
          config.c_init;
      return node_q + c * node_p * std::sqrt(static_cast<double>(parent_n)) /
                          (1.0 + static_cast<double>(node_n));
    }
  }
  return node_q;
}

// ==== top-k cache ============================================================

std::size_t TopKCache::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.size();
}

TokenDist cached_top_k(TopKCache& cache, const model::TokenModel& m,
                       std::span<const TokenId> prefix, int k,
                       costmodel::MemoryMeter* meter,
                       std::int64_t charge_bytes) {
  if (k != cache.k_)
    throw BadKError("cached_top_k: k " + std::to_string(k) +
                    " does not match cache k " + std::to_string(cache.k_));
  std::vector<TokenId> key(prefix.begin(), prefix.end());
  {
    std::lock_guard<std::mutex> lock(cache.mu_);
    auto it = cache.entries_.find(key);
    if (it != cache.entries_.end()) {
      m.stats().record_cache_hit();
      return it->second;
    }
  }
  // Miss: the real forward runs (and is charged) outside the lock; a racing
  // duplicate forward is wasted work, never wrong results.
  if (meter) {
    meter->charge(charge_bytes);
    if (meter->oom() && meter->cap())
      throw SimulatedOom(meter->peak(), *meter->cap());
  }
  TokenDist dist = top_k(m.next_dist(prefix), k);
  if (meter) meter->release(charge_bytes);
  {
    std::lock_guard<std::mutex> lock(cache.mu_);
    cache.entries_.emplace(std::move(key), dist);
  }
  return dist;
}

// ==== phase operations =======================================================

SearchNode* select(SearchNode& root, const SearchConfig& config) {
  SearchNode* node = &root;
  while (node->expanded && !node->terminal && !node->children.empty()) {
    SearchNode* best = nullptr;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& child : node->children) {
      const double score = policy_score(config.policy, child->q, child->n,
                                        child->prior, node->n, config);
      // Strict > keeps the first of equal scores; children are ordered by
      // prior desc then token id asc, which is NOT the tie-break order, so
      // compare explicitly: equal scores resolve to the lowest token id.
      if (!best || score > best_score ||
          (score == best_score && child->state.back() < best->state.back())) {
        best = child.get();
        best_score = score;
      }
    }
    node = best;
  }
  return node;
}

void expand(SearchNode& node, TopKCache& cache, const model::TokenModel& m,
            const SearchConfig& config, costmodel::MemoryMeter* meter,
            std::int64_t charge_bytes) {
  if (node.terminal)
    throw PrefixTerminalError("expand: node is terminal");
  if (node.expanded) return;
  const TokenDist dist = cached_top_k(cache, m, node.state, config.expansion_k,
                                      meter, charge_bytes);
  node.children.reserve(dist.entries.size());
  for (const auto& e : dist.entries) {
    auto child = std::make_unique<SearchNode>();
    child->state = node.state;
    child->state.push_back(e.id);
    child->prior = e.prob;
    child->terminal = m.vocab().is_terminal(e.id);
    child->parent = &node;
    node.children.push_back(std::move(child));
  }
  node.expanded = true;
}

void backprop(SearchNode* leaf, double reward) {
  for (SearchNode* node = leaf; node; node = node->parent) {
    node->q = std::max(node->q, reward);
    node->n += 1;
  }
}

// ==== the search =============================================================

namespace {

/** Number of new tokens `state` adds below the prompt. */
int generated_tokens(const SearchNode& node, std::size_t prompt_len) {
  return static_cast<int>(node.state.size() - prompt_len);
}

}  // namespace

SearchResult flames_search(const model::TokenModel& m,
                           std::span<const TokenId> prompt,
                           const RewardFn& reward_fn, const SearchConfig& config,
                           costmodel::MemoryMeter* meter,
                           const IterationObserver& observer) {
  if (config.expansion_k < 1) throw BadKError("search: expansion_k must be >= 1");
  if (config.max_patches < 1)
    throw ConfigError("search: max_patches must be >= 1");
  m.vocab().validate_prefix(prompt);

  const auto t_start = std::chrono::steady_clock::now();
  costmodel::MemoryMeter local_meter(config.memory_cap);
  costmodel::MemoryMeter* mm = meter ? meter : &local_meter;

  // Every forward charges the greedy (k=1) step for the whole problem:
  // alpha plus a buffer sized as if the remaining generation budget were
  // allocated up front, so (sequence length + remaining budget) — and with
  // it the charge — is the same constant at every tree depth. Peak memory is
  // therefore a constant function of the patch budget.
  const std::int64_t fwd_bytes =
      m.memory_alpha() +
      4 * (static_cast<std::int64_t>(prompt.size()) + config.max_sim_tokens) *
          m.vocab().size();

  TopKCache cache(config.expansion_k);
  const auto next_tokens = [&](std::span<const TokenId> prefix) -> TokenDist {
    if (config.use_cache)
      return cached_top_k(cache, m, prefix, config.expansion_k, mm, fwd_bytes);
    mm->charge(fwd_bytes);
    if (mm->oom() && mm->cap()) throw SimulatedOom(mm->peak(), *mm->cap());
    TokenDist dist = top_k(m.next_dist(prefix), config.expansion_k);
    mm->release(fwd_bytes);
    return dist;
  };

  auto root = std::make_unique<SearchNode>();
  root->state.assign(prompt.begin(), prompt.end());

  SearchResult result;
  const std::uint64_t forwards_at_start = m.stats().forward_calls();
  const std::uint64_t hits_at_start = m.stats().cache_hits();
  std::map<std::vector<TokenId>, double> reward_memo;
  // Nodes that can still contribute something new: every node enters fresh
  // and is spent by its first simulation. When none remain, further
  // iterations can only repeat known rollouts — the space is exhausted.
  std::int64_t fresh_nodes = 1;  // the root

  std::string stop_reason;
  while (true) {
    if (fresh_nodes == 0) {
      stop_reason = "exhausted";
      break;
    }
    const double elapsed_secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      t_start)
            .count();
    if (elapsed_secs > config.timeout_secs) {
      stop_reason = "timeout";
      break;
    }

    result.report.iterations += 1;
    SearchNode* leaf = select(*root, config);

    const int used = generated_tokens(*leaf, prompt.size());
    const bool expandable =
        !leaf->terminal && !leaf->expanded && used < config.max_sim_tokens;
    if (expandable) expand(*leaf, cache, m, config, mm, fwd_bytes);
    if (leaf->n == 0) fresh_nodes -= 1;  // first visit spends the node
    fresh_nodes += expandable ? static_cast<std::int64_t>(leaf->children.size())
                              : 0;

    // Simulation: greedy completion of the leaf's own sequence through the
    // same cache; a terminal leaf is a zero-step rollout of itself.
    decode::ScoredSequence rollout;
    if (leaf->terminal) {
      rollout.tokens = leaf->state;
      rollout.complete = true;
    } else {
      rollout = decode::greedy_decode_via(next_tokens, m.vocab(), leaf->state,
                                          config.max_sim_tokens - used);
    }

    double reward = 0.0;
    bool first_discovery = false;
    if (rollout.complete) {
      auto memo = reward_memo.find(rollout.tokens);
      if (memo != reward_memo.end()) {
        reward = memo->second;
      } else {
        try {
          reward = std::clamp(reward_fn(rollout.tokens), 0.0, 1.0);
        } catch (const SimulatedOom&) {
          throw;
        } catch (const std::exception&) {
          reward = 0.0;
          result.report.reward_errors += 1;
        }
        reward_memo.emplace(rollout.tokens, reward);
        first_discovery = true;
      }
    }

    backprop(leaf, reward);
    if (observer) observer(*root, result.report.iterations);

    if (first_discovery) {
      PatchCandidate candidate;
      candidate.tokens = rollout.tokens;
      candidate.reward = reward;
      candidate.complete = true;
      candidate.iteration = result.report.iterations;
      candidate.source = Algo::Flames;
      result.candidates.push_back(std::move(candidate));

      if (config.stop_on_plausible && reward >= 1.0) {
        stop_reason = "plausible";
        break;
      }
      if (static_cast<std::int64_t>(result.candidates.size()) >=
          config.max_patches) {
        stop_reason = "budget";
        break;
      }
    }
  }

  std::stable_sort(result.candidates.begin(), result.candidates.end(),
                   [](const PatchCandidate& a, const PatchCandidate& b) {
                     if (a.reward != b.reward) return a.reward > b.reward;
                     return a.iteration < b.iteration;
                   });

  result.report.distinct_patches =
      static_cast<std::int64_t>(result.candidates.size());
  result.report.forward_calls = m.stats().forward_calls() - forwards_at_start;
  result.report.cache_hits = m.stats().cache_hits() - hits_at_start;
  result.report.stop_reason = stop_reason;
  result.report.memory = mm->reading();
  result.report.wall_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t_start)
          .count();
  return result;
}

SearchResult flames_search(const model::TokenModel& m, const reward::Bug& bug,
                           const reward::TestSuite& suite,
                           const SearchConfig& config,
                           costmodel::MemoryMeter* meter,
                           const IterationObserver& observer) {
  const RewardFn fn = [&](std::span<const TokenId> tokens) {
    return reward::evaluate_reward(tokens, suite, m.vocab()).reward;
  };
  return flames_search(m, bug.prompt_tokens, fn, config, meter, observer);
}

}  // namespace flames::search
