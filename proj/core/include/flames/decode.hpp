#pragma once

/**
 * Baseline decoders: greedy, length-synchronous beam search, sequential beam
 * search, and temperature sampling — every one instrumented against the
 * abstract memory meter.
 *
 * Ranking discipline shared by all of them: candidates order by cumulative
 * logprob descending, ties by lexicographically ascending token sequence.
 * Completed sequences freeze in their beam slot and keep competing; nothing
 * is length-normalized.
 *
 * Meter charging (per decode step):
 *   beam:       k*alpha for the batched forward + one output buffer
 *               4*k*(n_in+n_out)*v, released at step end.
 *   sequential: two output buffers (per-sub-batch stack + final) held across
 *               the step, alpha charged per sub-batch forward one at a time —
 *               peak alpha + 8*k*(n_in+n_out)*v.
 *   greedy /    the k=1 beam charge: alpha + 4*(n_in+n_out)*v.
 *   sampling
 * A configured memory_cap turns a breach into SimulatedOom; the decode
 * aborts mid-run and the meter keeps the attempted peak.
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "flames/costmodel.hpp"
#include "flames/model.hpp"

namespace flames::decode {

using model::TokenDist;
using model::TokenId;

struct DecodeConfig {
  int beam_size = 10;
  int max_new_tokens = 24;
  double temperature = 1.0;   // sampling only
  std::uint64_t rng_seed = 0; // sampling only
  std::optional<std::int64_t> memory_cap;
};

struct ScoredSequence {
  std::vector<TokenId> tokens;  // prefix included
  double logprob = 0.0;         // sum of log P(token | prefix so far)
  bool complete = false;        // last token terminal (vs budget exhausted)
};

/**
 * Argmax decoding: appends the most probable token each step (ties resolve
 * to the lowest id via the distribution's canonical order), stopping at a
 * terminal token or after max_new_tokens. Equivalent to beam_search with
 * beam_size 1.
 */
ScoredSequence greedy_decode(const model::TokenModel& m,
                             std::span<const TokenId> prefix,
                             const DecodeConfig& config,
                             costmodel::MemoryMeter* meter = nullptr);

/**
 * Greedy decoding against an arbitrary next-token source instead of a bare
 * model — the tree search routes rollouts through its top-k cache with this.
 * The provider owns validation, instrumentation, and meter charging; it may
 * return a truncated distribution (only the first entry is consumed).
 */
using DistProvider = std::function<TokenDist(std::span<const TokenId>)>;
ScoredSequence greedy_decode_via(const DistProvider& next,
                                 const model::Vocab& vocab,
                                 std::span<const TokenId> prefix,
                                 int max_new_tokens);

/**
 * Length-synchronous beam search over the full model distribution. Returns
 * up to beam_size sequences, logprob descending (ties lexicographic).
 * Throws SimulatedOom if a step charge breaches config.memory_cap (or the
 * supplied meter's cap).
 */
std::vector<ScoredSequence> beam_search(const model::TokenModel& m,
                                        std::span<const TokenId> prefix,
                                        const DecodeConfig& config,
                                        costmodel::MemoryMeter* meter = nullptr);

/**
 * Beam search with per-beam sequential forwards: identical output contract
 * to beam_search — same sequences, same scores, same order — different
 * meter charging (see file header).
 */
std::vector<ScoredSequence> sequential_beam_search(
    const model::TokenModel& m, std::span<const TokenId> prefix,
    const DecodeConfig& config, costmodel::MemoryMeter* meter = nullptr);

/**
 * Ancestral sampling from the temperature-scaled distribution
 * (p_i^(1/temperature), renormalized). Draws n_samples full rollouts;
 * duplicates allowed; bit-reproducible for a fixed rng_seed (the generator
 * is mt19937_64 with an explicit inverse-CDF walk, no platform-dependent
 * std distributions). Each sequence's logprob is the model's, not the
 * tempered one.
 */
std::vector<ScoredSequence> multiple_sampling(
    const model::TokenModel& m, std::span<const TokenId> prefix,
    const DecodeConfig& config, int n_samples,
    costmodel::MemoryMeter* meter = nullptr);

}  // namespace flames::decode
