#include "flames/token_dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flames/errors.hpp"

namespace flames::model {

TokenDist TokenDist::from_probs(std::vector<Entry> raw) {
  TokenDist d;
  d.entries.reserve(raw.size());
  for (const Entry& e : raw) {
    if (e.prob < 0.0 || !std::isfinite(e.prob))
      throw std::invalid_argument("token dist: negative or non-finite prob");
    if (e.prob == 0.0) continue;  // zero-probability entries are omitted
    d.entries.push_back(e);
  }
  std::sort(d.entries.begin(), d.entries.end(), [](const Entry& a, const Entry& b) {
    if (a.prob != b.prob) return a.prob > b.prob;
    return a.id < b.id;
  });
  return d;
}

double TokenDist::total() const {
  double s = 0.0;
  for (const Entry& e : entries) s += e.prob;
  return s;
}

bool TokenDist::is_normalized(double tol) const {
  return std::abs(total() - 1.0) <= tol;
}

TokenDist top_k(const TokenDist& dist, int k) {
  if (k < 1) throw BadKError("top_k: k must be >= 1, got " + std::to_string(k));
  TokenDist out;
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(k),
                                              dist.entries.size());
  out.entries.assign(dist.entries.begin(), dist.entries.begin() + n);
  return out;  // deliberately NOT renormalized: probabilities keep full-dist mass
}

}  // namespace flames::model
