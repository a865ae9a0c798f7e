#pragma once

/**
 * Next-token distribution.
 *
 * Canonical form: entries sorted by probability descending, ties broken by
 * ascending token id, and only strictly positive probabilities listed — any
 * id not present is an implicit zero. A distribution over the full
 * vocabulary therefore sums to 1 (tolerance 1e-9) across its entries.
 *
 * top_k truncates without renormalizing: downstream consumers (search
 * priors, greedy argmax) want the raw model probabilities.
 */

#include <cstdint>
#include <vector>

#include "flames/vocab.hpp"

namespace flames::model {

struct TokenDist {
  struct Entry {
    TokenId id;
    double prob;
  };
  std::vector<Entry> entries;

  /**
   * Canonicalizes raw (id, prob) pairs: drops zero-probability entries,
   * rejects negatives (std::invalid_argument), sorts desc-prob / asc-id.
   */
  static TokenDist from_probs(std::vector<Entry> raw);

  /** Sum of listed probabilities. */
  double total() const;

  /** True iff canonical ordering holds and total() is within tol of 1. */
  bool is_normalized(double tol = 1e-9) const;
};

/**
 * First min(k, entries) entries of the distribution, order preserved,
 * probabilities untouched. Throws BadKError for k < 1.
 */
TokenDist top_k(const TokenDist& dist, int k);

}  // namespace flames::model
