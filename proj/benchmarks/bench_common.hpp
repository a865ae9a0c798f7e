#pragma once

// Shared fixtures for the benchmark suite: one seeded corpus and the
// per-bug repair models the campaign would build for it.

#include <memory>
#include <vector>

#include "flames/campaign.hpp"
#include "flames/reward.hpp"

namespace bench {

inline const flames::model::Vocab& vocab() {
  static const auto v = flames::reward::default_vocab();
  return v;
}

inline const std::vector<flames::reward::CorpusEntry>& corpus() {
  static const auto c = flames::reward::generate_bug_corpus(7, 20, vocab());
  return c;
}

inline std::unique_ptr<flames::model::TokenModel> bug_model(std::size_t i) {
  return flames::campaign::make_bug_model("table", corpus()[i], vocab(), 7);
}

}  // namespace bench
