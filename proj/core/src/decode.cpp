#include "flames/decode.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "flames/errors.hpp"

namespace flames::decode {

namespace {

using costmodel::MemoryMeter;

/** (logprob desc, token sequence lexicographic asc) — the shared ranking. */
bool ranks_before(const ScoredSequence& a, const ScoredSequence& b) {
  if (a.logprob != b.logprob) return a.logprob > b.logprob;
  return a.tokens < b.tokens;
}

/**
 * Per-sequence output-buffer bytes. The buffer covers the full final length
 * (input + the whole generation budget) and is allocated at that size every
 * step — fixed shapes, as a static-batch implementation would — so each
 * step's charge is identical and the analytic step formulas hold exactly.
 */
std::int64_t buffer_bytes(std::size_t n_in, int max_new_tokens, std::int64_t v) {
  return 4 * (static_cast<std::int64_t>(n_in) + max_new_tokens) * v;
}

/** Throws when the last charge breached the cap; meter keeps the peak. */
void abort_if_oom(const MemoryMeter& meter) {
  if (meter.oom() && meter.cap())
    throw flames::SimulatedOom(meter.peak(), *meter.cap());
}

/** Resolve the meter to charge: caller's, or a local one built from config. */
MemoryMeter* pick_meter(MemoryMeter* supplied, MemoryMeter& local) {
  return supplied ? supplied : &local;
}

}  // namespace

// ==== greedy =================================================================

ScoredSequence greedy_decode(const model::TokenModel& m,
                             std::span<const TokenId> prefix,
                             const DecodeConfig& config, MemoryMeter* meter) {
  MemoryMeter local(config.memory_cap);
  MemoryMeter* mm = pick_meter(meter, local);
  const std::int64_t step_bytes =
      m.memory_alpha() + buffer_bytes(prefix.size(), config.max_new_tokens,
                                      m.vocab().size());

  ScoredSequence out;
  out.tokens.assign(prefix.begin(), prefix.end());
  for (int step = 0; step < config.max_new_tokens; ++step) {
    mm->charge(step_bytes);
    abort_if_oom(*mm);
    const TokenDist dist = m.next_dist(out.tokens);
    mm->release(step_bytes);
    mm->step_mark();
    if (dist.entries.empty()) break;
    const auto& best = dist.entries.front();  // canonical order: argmax, low id
    out.tokens.push_back(best.id);
    out.logprob += std::log(best.prob);
    if (m.vocab().is_terminal(best.id)) {
      out.complete = true;
      break;
    }
  }
  return out;
}

ScoredSequence greedy_decode_via(const DistProvider& next,
                                 const model::Vocab& vocab,
                                 std::span<const TokenId> prefix,
                                 int max_new_tokens) {
  ScoredSequence out;
  out.tokens.assign(prefix.begin(), prefix.end());
  for (int step = 0; step < max_new_tokens; ++step) {
    const TokenDist dist = next(out.tokens);
    if (dist.entries.empty()) break;
    const auto& best = dist.entries.front();
    out.tokens.push_back(best.id);
    out.logprob += std::log(best.prob);
    if (vocab.is_terminal(best.id)) {
      out.complete = true;
      break;
    }
  }
  return out;
}

// ==== beam search ============================================================

namespace {

/**
 * One length-synchronous expansion: every live beam fans out over its full
 * next-token distribution, completed beams carry over frozen, and the pool
 * is cut back to beam_size by the shared ranking. Returns false when no beam
 * could move (all complete, or the model gave an empty distribution).
 *
 * `forward` abstracts how the per-beam distributions are produced so the
 * batched and sequential variants share one expansion (identical arithmetic
 * order — the output contract between them is bit-identical, not just
 * equivalent).
 */
bool expand_one_step(
    const model::Vocab& vocab, std::vector<ScoredSequence>& beams, int beam_size,
    const std::function<TokenDist(const ScoredSequence&)>& forward) {
  std::vector<ScoredSequence> pool;
  bool moved = false;
  for (const ScoredSequence& b : beams) {
    if (b.complete) {
      pool.push_back(b);
      continue;
    }
    const TokenDist dist = forward(b);
    for (const auto& e : dist.entries) {
      ScoredSequence nb;
      nb.tokens = b.tokens;
      nb.tokens.push_back(e.id);
      nb.logprob = b.logprob + std::log(e.prob);
      nb.complete = vocab.is_terminal(e.id);
      pool.push_back(std::move(nb));
      moved = true;
    }
  }
  if (!moved) return false;
  std::sort(pool.begin(), pool.end(), ranks_before);
  if (pool.size() > static_cast<std::size_t>(beam_size))
    pool.resize(static_cast<std::size_t>(beam_size));
  beams = std::move(pool);
  return true;
}

bool all_complete(const std::vector<ScoredSequence>& beams) {
  return std::all_of(beams.begin(), beams.end(),
                     [](const ScoredSequence& b) { return b.complete; });
}

}  // namespace

std::vector<ScoredSequence> beam_search(const model::TokenModel& m,
                                        std::span<const TokenId> prefix,
                                        const DecodeConfig& config,
                                        MemoryMeter* meter) {
  if (config.beam_size < 1) throw BadKError("beam search: beam_size must be >= 1");
  MemoryMeter local(config.memory_cap);
  MemoryMeter* mm = pick_meter(meter, local);
  const std::int64_t k = config.beam_size;
  const std::int64_t beta = buffer_bytes(prefix.size(), config.max_new_tokens,
                                         m.vocab().size());

  std::vector<ScoredSequence> beams(1);
  beams[0].tokens.assign(prefix.begin(), prefix.end());
  for (int step = 0; step < config.max_new_tokens; ++step) {
    if (all_complete(beams)) break;
    // Batched step: all k forwards at once plus one k-wide output buffer.
    mm->charge(k * m.memory_alpha());
    mm->charge(k * beta);
    abort_if_oom(*mm);
    const bool moved = expand_one_step(
        m.vocab(), beams, config.beam_size,
        [&](const ScoredSequence& b) { return m.next_dist(b.tokens); });
    mm->release(k * beta);
    mm->release(k * m.memory_alpha());
    mm->step_mark();
    if (!moved) break;
  }
  return beams;
}

std::vector<ScoredSequence> sequential_beam_search(
    const model::TokenModel& m, std::span<const TokenId> prefix,
    const DecodeConfig& config, MemoryMeter* meter) {
  if (config.beam_size < 1) throw BadKError("beam search: beam_size must be >= 1");
  MemoryMeter local(config.memory_cap);
  MemoryMeter* mm = pick_meter(meter, local);
  const std::int64_t k = config.beam_size;
  const std::int64_t beta = buffer_bytes(prefix.size(), config.max_new_tokens,
                                         m.vocab().size());

  std::vector<ScoredSequence> beams(1);
  beams[0].tokens.assign(prefix.begin(), prefix.end());
  for (int step = 0; step < config.max_new_tokens; ++step) {
    if (all_complete(beams)) break;
    // Sequential step: the per-beam result stack and the step's output
    // buffer both live for the whole step (2*k*beta), while the model itself
    // runs one sub-batch at a time (alpha charged per forward, not k*alpha).
    mm->charge(2 * k * beta);
    abort_if_oom(*mm);
    const bool moved = expand_one_step(
        m.vocab(), beams, config.beam_size, [&](const ScoredSequence& b) {
          mm->charge(m.memory_alpha());
          abort_if_oom(*mm);
          TokenDist dist = m.next_dist(b.tokens);
          mm->release(m.memory_alpha());
          return dist;
        });
    mm->release(2 * k * beta);
    mm->step_mark();
    if (!moved) break;
  }
  return beams;
}

// ==== sampling ===============================================================

std::vector<ScoredSequence> multiple_sampling(const model::TokenModel& m,
                                              std::span<const TokenId> prefix,
                                              const DecodeConfig& config,
                                              int n_samples, MemoryMeter* meter) {
  if (n_samples < 0) throw std::invalid_argument("sampling: n_samples < 0");
  if (config.temperature <= 0.0)
    throw std::invalid_argument("sampling: temperature must be > 0");
  MemoryMeter local(config.memory_cap);
  MemoryMeter* mm = pick_meter(meter, local);
  const std::int64_t step_bytes =
      m.memory_alpha() + buffer_bytes(prefix.size(), config.max_new_tokens,
                                      m.vocab().size());

  std::mt19937_64 rng(config.rng_seed);
  // Uniform double in [0, 1) built directly from the top 53 bits so the draw
  // sequence is identical on every platform (std distributions are not).
  auto draw_unit = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };

  std::vector<ScoredSequence> out;
  out.reserve(static_cast<std::size_t>(n_samples));
  for (int s = 0; s < n_samples; ++s) {
    ScoredSequence seq;
    seq.tokens.assign(prefix.begin(), prefix.end());
    for (int step = 0; step < config.max_new_tokens; ++step) {
      mm->charge(step_bytes);
      abort_if_oom(*mm);
      const TokenDist dist = m.next_dist(seq.tokens);
      mm->release(step_bytes);
      mm->step_mark();
      if (dist.entries.empty()) break;

      // Temperature reshaping: w_i = p_i^(1/T), renormalized for the draw
      // only; the recorded logprob stays the model's.
      double wsum = 0.0;
      std::vector<double> w(dist.entries.size());
      for (std::size_t i = 0; i < dist.entries.size(); ++i) {
        w[i] = std::pow(dist.entries[i].prob, 1.0 / config.temperature);
        wsum += w[i];
      }
      const double u = draw_unit() * wsum;
      std::size_t pick = dist.entries.size() - 1;  // guard float residue
      double acc = 0.0;
      for (std::size_t i = 0; i < dist.entries.size(); ++i) {
        acc += w[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
      const auto& e = dist.entries[pick];
      seq.tokens.push_back(e.id);
      seq.logprob += std::log(e.prob);
      if (m.vocab().is_terminal(e.id)) {
        seq.complete = true;
        break;
      }
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace flames::decode
