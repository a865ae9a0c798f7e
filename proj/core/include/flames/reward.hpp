#pragma once

/**
 * Repair problem instances: bugs, their test suites, and the pass-ratio
 * reward. reward = f_pass / (f_pass + f_fail) over the suite; a parse
 * failure or a runtime failure (division by zero, overflow) fails that
 * case, never the run.
 */

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "flames/vocab.hpp"

namespace flames::reward {

using model::TokenId;
using model::Vocab;

struct TestCase {
  std::vector<std::int64_t> inputs;
  std::int64_t expected;
};

/** The behavioral specification a candidate patch is validated against. */
struct TestSuite {
  std::vector<TestCase> cases;
};

struct Bug {
  std::string id;
  std::vector<TokenId> buggy_tokens;   // full sequence: sos ... terminal
  std::vector<TokenId> prompt_tokens;  // search prefix; [sos] by convention
  int expected_depth = 0;              // expression token count (stratification hint)
};

struct RewardReport {
  int f_pass = 0;
  int f_fail = 0;
  double reward = 0.0;             // f_pass / (f_pass + f_fail)
  bool parsed = false;             // tokens decoded to a program
  std::vector<int> failures;       // indices of failing cases
};

/**
 * Validates a candidate against the suite. Total: any token sequence yields
 * a report. Sequences that don't decode (missing terminal, bad arity, junk
 * tokens) fail every case. Deterministic and pure.
 */
RewardReport evaluate_reward(std::span<const TokenId> tokens,
                             const TestSuite& suite, const Vocab& vocab);

// ==== corpus =================================================================

/** One corpus line: the bug, its suite, and the known-good token sequence. */
struct CorpusEntry {
  Bug bug;
  TestSuite suite;
  std::vector<TokenId> ground_truth;  // full sequence: sos ... terminal
};

/**
 * Default repair vocabulary: sos, end, the six operators, inputs x0..x3,
 * literals 0..4. Small enough that the fix for a single-token mutation is
 * always within a 10-wide expansion.
 */
Vocab default_vocab();

/**
 * Seeded corpus generator. Samples ground-truth expression trees (2-4
 * leaves), derives 4-6 test cases by evaluating them on random inputs,
 * then injects one same-kind single-token mutation (operator for operator,
 * input for input, literal for literal) re-rolled until the mutant scores
 * reward < 1 on the suite.
 * Construction guarantees: ground truth scores exactly 1.0; the mutant
 * doesn't. Throws GenerationExhausted after 1000 failed mutation attempts
 * on a bug.
 */
std::vector<CorpusEntry> generate_bug_corpus(std::uint64_t seed, int n_bugs,
                                             const Vocab& vocab);

/**
 * JSONL corpus format, one object per line:
 *   {"id": str, "buggy_tokens": [int], "ground_truth": [int],
 *    "spec": [{"inputs": [int], "expected": int}]}
 */
void save_corpus_jsonl(const std::vector<CorpusEntry>& corpus, std::ostream& out);
std::vector<CorpusEntry> load_corpus_jsonl(std::istream& in);
std::vector<CorpusEntry> load_corpus_file(const std::string& path);
void save_corpus_file(const std::vector<CorpusEntry>& corpus, const std::string& path);

}  // namespace flames::reward
