#pragma once

/**
 * Analytic memory model and the abstract memory meter.
 *
 * The model is deliberately small: one forward pass of one sequence costs
 * `alpha` abstract bytes (opaque, per-model), and the decoder's output
 * buffer costs beta = 4 * (n_in + n_out) * v abstract bytes per sequence
 * (4 bytes per float32 logit row). From these two constants:
 *
 *   batched beam step:      bs    = k*alpha + k*beta
 *   sequential beam step:   seqbs = alpha   + 2*k*beta
 *   delta = bs - seqbs      =      (k-1)*alpha - k*beta
 *
 * so sequential decoding only helps when alpha/beta > k/(k-1): it trades the
 * batched forward for a second output buffer, and with a small model the
 * trade goes the wrong way.
 *
 * The meter is a peak-tracking accumulator the decoders charge and release
 * against. A configured cap turns a breach into a recorded OOM (the decode
 * layer aborts with SimulatedOom); without a cap the meter just observes.
 * All quantities are integer abstract bytes — no unit scaling anywhere.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace flames::costmodel {

// ==== analytic model =========================================================

struct MemoryModelParams {
  std::int64_t alpha;  // Memory of one forward pass of one sequence
  std::int64_t k;      // beam size
  std::int64_t n_in;   // input length (tokens)
  std::int64_t n_out;  // max new tokens
  std::int64_t v;      // vocab size
};

/** beta = 4 * (n_in + n_out) * v — one sequence's output buffer. */
std::int64_t beta_bytes(const MemoryModelParams& p);

/** Batched beam-search step-2 peak: k*alpha + 4*k*(n_in+n_out)*v. */
std::int64_t bs_step2_memory(const MemoryModelParams& p);

/** Sequential beam-search step-2 peak: alpha + 8*k*(n_in+n_out)*v. */
std::int64_t seqbs_step2_memory(const MemoryModelParams& p);

/** (k-1)*alpha - k*beta; equals bs_step2_memory - seqbs_step2_memory. */
std::int64_t memory_delta(const MemoryModelParams& p);

/** Same trade-off formula on raw (alpha, beta, k) without deriving beta. */
std::int64_t memory_delta(std::int64_t alpha, std::int64_t beta, std::int64_t k);

/**
 * Exact sign law for k >= 2: delta <= 0 iff alpha/beta <= k/(k-1),
 * compared as integers ((k-1)*alpha <= k*beta), no floating point.
 */
bool seqbs_uses_more_memory(std::int64_t alpha, std::int64_t beta, std::int64_t k);

// ==== meter ==================================================================

struct MemoryReading {
  std::int64_t peak_bytes = 0;
  std::int64_t current_bytes = 0;
  std::vector<std::int64_t> per_step;  // peak within each closed decode step
  bool oom = false;
};

/**
 * Peak-tracking accumulator. `charge` never throws — it records the breach
 * (peak + oom flag) and leaves aborting to the caller, so a reading taken
 * after an OOM still shows the attempted peak.
 */
class MemoryMeter {
 public:
  explicit MemoryMeter(std::optional<std::int64_t> cap = std::nullopt)
      : cap_(cap) {}

  void charge(std::int64_t bytes);
  void release(std::int64_t bytes);

  /** Close the current decode step, recording its peak in per_step. */
  void step_mark();

  bool oom() const { return oom_; }
  std::optional<std::int64_t> cap() const { return cap_; }
  std::int64_t peak() const { return peak_; }

  /**
   * Snapshot. If charges happened since the last step_mark, the open step's
   * peak is appended to per_step so peak == max(per_step) always holds.
   */
  MemoryReading reading() const;

 private:
  std::optional<std::int64_t> cap_;
  std::int64_t current_ = 0;
  std::int64_t peak_ = 0;
  std::int64_t step_peak_ = 0;
  bool step_open_ = false;
  bool oom_ = false;
  std::vector<std::int64_t> per_step_;
};

// ==== sweep ==================================================================

struct SweepRow {
  std::int64_t k;
  std::int64_t bs_bytes;
  std::int64_t seqbs_bytes;
  std::int64_t delta_bytes;
  bool oom;  // bs_bytes exceeds the configured cap
};

/** Beam sizes evaluated by sweep(): {1, 10, 25, 50, 100, 200}. */
const std::vector<std::int64_t>& sweep_beam_grid();

/**
 * Evaluates the analytic model at every grid beam size. `base.k` is ignored;
 * OOM is flagged where bs_step2_memory exceeds `cap` (never without a cap).
 */
std::vector<SweepRow> sweep(const MemoryModelParams& base,
                            std::optional<std::int64_t> cap = std::nullopt);

/** CSV with header: k,bs_bytes,seqbs_bytes,delta_bytes,oom. */
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace flames::costmodel
