#pragma once

/**
 * Shared helpers for the test suites: small vocabularies, deterministic
 * random table models, and a handful of token-id conveniences.
 *
 * Conventions used throughout the tests:
 *   id 0 = "<s>" (start of sequence), id 1 = "</s>" (the only terminal),
 *   ids 2.. = single letters "a", "b", "c", ...
 */

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "flames/model.hpp"
#include "flames/token_dist.hpp"
#include "flames/vocab.hpp"

namespace testsup {

using flames::model::TableModel;
using flames::model::TokenDist;
using flames::model::TokenId;
using flames::model::UnlistedPolicy;
using flames::model::Vocab;

/** Vocab of size v: {"<s>", "</s>", "a", "b", ...}, terminal {1}, sos 0. */
inline Vocab letters_vocab(int v) {
  std::vector<std::string> surfaces{"<s>", "</s>"};
  for (int i = 2; i < v; ++i)
    surfaces.push_back(std::string(1, static_cast<char>('a' + i - 2)));
  return Vocab(std::move(surfaces), {1}, 0);
}

using RuleMap = std::map<std::vector<TokenId>, TableModel::Rule>;

/**
 * Fully specified random table model: every prefix reachable with fewer
 * than `depth` generated tokens gets a rule over all non-sos ids, with
 * weights drawn from rng. Total and deterministic for a fixed rng state.
 */
inline TableModel random_table_model(std::mt19937_64& rng, int v, int depth,
                                     std::int64_t alpha = 1000) {
  Vocab vocab = letters_vocab(v);
  RuleMap rules;
  std::vector<std::vector<TokenId>> frontier{{vocab.sos()}};
  for (int used = 0; used < depth; ++used) {
    std::vector<std::vector<TokenId>> next_frontier;
    for (const auto& prefix : frontier) {
      TableModel::Rule rule;
      for (TokenId id = 1; id < v; ++id) {
        const double w = 1.0 + static_cast<double>(rng() % 1000);
        rule.push_back({id, w});
      }
      double total = 0.0;
      for (const auto& e : rule) total += e.prob;
      for (auto& e : rule) e.prob /= total;
      rules.emplace(prefix, std::move(rule));
      if (used + 1 < depth) {
        for (TokenId id = 2; id < v; ++id) {
          auto ext = prefix;
          ext.push_back(id);
          next_frontier.push_back(std::move(ext));
        }
      }
    }
    frontier = std::move(next_frontier);
  }
  return TableModel(std::move(vocab), std::move(rules),
                    UnlistedPolicy::UniformTerminals, alpha);
}

/** Shorthand for a literal token sequence. */
inline std::vector<TokenId> seq(std::initializer_list<TokenId> ids) {
  return std::vector<TokenId>(ids);
}

}  // namespace testsup
