#include "flames/costmodel.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace flames::costmodel {

// ==== analytic model =========================================================

std::int64_t beta_bytes(const MemoryModelParams& p) {
  return 4 * (p.n_in + p.n_out) * p.v;
}

std::int64_t bs_step2_memory(const MemoryModelParams& p) {
  return p.k * p.alpha + p.k * beta_bytes(p);
}

std::int64_t seqbs_step2_memory(const MemoryModelParams& p) {
  return p.alpha + 2 * p.k * beta_bytes(p);
}

std::int64_t memory_delta(const MemoryModelParams& p) {
  return memory_delta(p.alpha, beta_bytes(p), p.k);
}

std::int64_t memory_delta(std::int64_t alpha, std::int64_t beta, std::int64_t k) {
  return (k - 1) * alpha - k * beta;
}

bool seqbs_uses_more_memory(std::int64_t alpha, std::int64_t beta, std::int64_t k) {
  if (k < 2)
    throw std::invalid_argument("sign law is defined for k >= 2");
  // delta <= 0  <=>  (k-1)*alpha <= k*beta, kept in integers to stay exact.
  return (k - 1) * alpha <= k * beta;
}

// ==== meter ==================================================================

void MemoryMeter::charge(std::int64_t bytes) {
  if (bytes < 0) throw std::invalid_argument("meter: negative charge");
  current_ += bytes;
  peak_ = std::max(peak_, current_);
  step_peak_ = std::max(step_peak_, current_);
  step_open_ = true;
  if (cap_ && current_ > *cap_) oom_ = true;
}

void MemoryMeter::release(std::int64_t bytes) {
  if (bytes < 0) throw std::invalid_argument("meter: negative release");
  if (bytes > current_) throw std::invalid_argument("meter: release exceeds held");
  current_ -= bytes;
}

void MemoryMeter::step_mark() {
  per_step_.push_back(step_peak_);
  step_peak_ = current_;
  step_open_ = false;
}

MemoryReading MemoryMeter::reading() const {
  MemoryReading r;
  r.peak_bytes = peak_;
  r.current_bytes = current_;
  r.per_step = per_step_;
  if (step_open_) r.per_step.push_back(step_peak_);
  r.oom = oom_;
  return r;
}

// ==== sweep ==================================================================

const std::vector<std::int64_t>& sweep_beam_grid() {
  static const std::vector<std::int64_t> grid{1, 10, 25, 50, 100, 200};
  return grid;
}

std::vector<SweepRow> sweep(const MemoryModelParams& base,
                            std::optional<std::int64_t> cap) {
  std::vector<SweepRow> rows;
  rows.reserve(sweep_beam_grid().size());
  for (std::int64_t k : sweep_beam_grid()) {
    MemoryModelParams p = base;
    p.k = k;
    SweepRow row;
    row.k = k;
    row.bs_bytes = bs_step2_memory(p);
    row.seqbs_bytes = seqbs_step2_memory(p);
    row.delta_bytes = memory_delta(p);
    row.oom = cap.has_value() && row.bs_bytes > *cap;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "k,bs_bytes,seqbs_bytes,delta_bytes,oom\n";
  for (const SweepRow& r : rows) {
    out << r.k << ',' << r.bs_bytes << ',' << r.seqbs_bytes << ','
        << r.delta_bytes << ',' << (r.oom ? "true" : "false") << '\n';
  }
}

}  // namespace flames::costmodel
