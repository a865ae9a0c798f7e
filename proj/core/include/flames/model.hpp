#pragma once

/**
 * Token models: the next-token oracle every decoder and the tree search run
 * against.
 *
 * A model owns a Vocab and answers next_dist(prefix) with a canonical
 * TokenDist (see token_dist.hpp). Models are immutable after construction
 * and safe for concurrent reads; the per-model counters (forward_calls,
 * cache_hits) are atomics so instrumentation tolerates parallel campaigns.
 *
 * Two local implementations:
 *   TableModel — explicit prefix -> distribution rules. Unlisted prefixes
 *                fall back to a configurable default (uniform over terminals
 *                by default, uniform over the whole vocabulary on request).
 *   NgramModel — order-n counts from a training corpus. Trained contexts
 *                reproduce their construction counts exactly (pure frequency
 *                ratios); unseen contexts smooth to the uniform add-one
 *                distribution so the model stays total.
 *
 * `alpha` is the abstract memory cost (bytes) of one forward pass of one
 * sequence; the cost model and meters consume it. It is a per-model constant
 * with no attempt to model real inference internals.
 */

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "flames/token_dist.hpp"
#include "flames/vocab.hpp"

namespace flames::model {

// ==== instrumentation =======================================================

class ModelStats {
 public:
  ModelStats() = default;
  // Copy/move snapshot the counters (atomics themselves don't copy), so
  // models stay movable.
  ModelStats(const ModelStats& other)
      : forward_calls_(other.forward_calls()), cache_hits_(other.cache_hits()) {}
  ModelStats& operator=(const ModelStats& other) {
    forward_calls_ = other.forward_calls();
    cache_hits_ = other.cache_hits();
    return *this;
  }

  void record_forward() const { forward_calls_.fetch_add(1, std::memory_order_relaxed); }
  void record_cache_hit() const { cache_hits_.fetch_add(1, std::memory_order_relaxed); }
  std::uint64_t forward_calls() const { return forward_calls_.load(std::memory_order_relaxed); }
  std::uint64_t cache_hits() const { return cache_hits_.load(std::memory_order_relaxed); }
  void reset() const { forward_calls_ = 0; cache_hits_ = 0; }

 private:
  mutable std::atomic<std::uint64_t> forward_calls_{0};
  mutable std::atomic<std::uint64_t> cache_hits_{0};
};

// ==== interface ==============================================================

class TokenModel {
 public:
  explicit TokenModel(Vocab vocab, std::int64_t alpha = 1000)
      : vocab_(std::move(vocab)), alpha_(alpha) {}
  virtual ~TokenModel() = default;

  const Vocab& vocab() const { return vocab_; }

  /** Abstract bytes for one forward pass of one sequence. */
  std::int64_t memory_alpha() const { return alpha_; }

  /**
   * Full next-token distribution for a valid prefix.
   * Deterministic; validates the prefix (PrefixTerminalError on terminal
   * contamination, UnknownTokenError on out-of-range ids) and increments
   * forward_calls.
   */
  TokenDist next_dist(std::span<const TokenId> prefix) const;

  const ModelStats& stats() const { return stats_; }

 protected:
  virtual TokenDist compute_dist(std::span<const TokenId> prefix) const = 0;

 private:
  Vocab vocab_;
  std::int64_t alpha_;
  ModelStats stats_;
};

// ==== table model ============================================================

/** Fallback for prefixes with no explicit rule. */
enum class UnlistedPolicy {
  UniformTerminals,  // every terminal equally likely (default)
  UniformAll,        // every vocabulary token equally likely
};

class TableModel : public TokenModel {
 public:
  using Rule = std::vector<TokenDist::Entry>;

  TableModel(Vocab vocab, std::map<std::vector<TokenId>, Rule> rules,
             UnlistedPolicy unlisted = UnlistedPolicy::UniformTerminals,
             std::int64_t alpha = 1000);

  /**
   * JSON file format:
   *   { "vocab": { "tokens": [surface...], "terminals": [id...], "sos": id },
   *     "rules": { "<space-joined prefix ids>": { "<token id>": prob } } }
   * Throws IoError / ProtocolError on malformed input.
   */
  static TableModel load_json(std::istream& in, std::int64_t alpha = 1000);
  void save_json(std::ostream& out) const;

  std::size_t rule_count() const { return rules_.size(); }

 protected:
  TokenDist compute_dist(std::span<const TokenId> prefix) const override;

 private:
  std::map<std::vector<TokenId>, TokenDist> rules_;
  UnlistedPolicy unlisted_;
};

// ==== n-gram model ===========================================================

class NgramModel : public TokenModel {
 public:
  /**
   * Trains order-n counts (order >= 2; context = last order-1 tokens) from
   * the given sequences. Each training sequence must be a complete
   * generation: starts at sos, ends with a terminal. Prediction on a context
   * seen in training is the exact count ratio; an unseen context yields the
   * add-one (uniform) distribution over the whole vocabulary.
   */
  NgramModel(Vocab vocab, const std::vector<std::vector<TokenId>>& corpus,
             int order = 2, std::int64_t alpha = 1000);

  int order() const { return order_; }

  /** Raw successor count for (context, token); 0 when never seen. */
  std::uint64_t count(std::span<const TokenId> context, TokenId next) const;

 protected:
  TokenDist compute_dist(std::span<const TokenId> prefix) const override;

 private:
  int order_;
  std::map<std::vector<TokenId>, std::vector<std::uint64_t>> counts_;
  std::map<std::vector<TokenId>, std::uint64_t> totals_;
};

}  // namespace flames::model
