// Corpus generation and JSONL persistence for the repair benchmark
// (declarations live in reward.hpp next to the reward function they feed).

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "flames/errors.hpp"
#include "flames/expr.hpp"
#include "flames/reward.hpp"
#include "json.hpp"

namespace flames::reward {

Vocab default_vocab() {
  return Vocab({"<s>", "</s>", "+", "-", "*", "/", "min", "max",
                "x0", "x1", "x2", "x3", "0", "1", "2", "3", "4"},
               /*terminals=*/{1}, /*sos=*/0);
}

namespace {

constexpr int kNumInputs = 4;         // x0..x3 always supplied
constexpr std::int64_t kInputLo = -9;
constexpr std::int64_t kInputHi = 9;
constexpr int kMutationAttempts = 1000;

/** Uniform integer in [0, n) off the raw engine — portable across stdlibs. */
int draw_below(std::mt19937_64& rng, int n) {
  return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

std::int64_t draw_input(std::mt19937_64& rng) {
  return kInputLo + draw_below(rng, static_cast<int>(kInputHi - kInputLo + 1));
}

/** Token ids of the default-vocab classes, resolved against `vocab`. */
struct TokenClasses {
  std::vector<model::TokenId> ops, inputs, literals;

  explicit TokenClasses(const Vocab& vocab) {
    for (model::TokenId id = 0; id < vocab.size(); ++id) {
      switch (expr::classify(vocab, id)) {
        case expr::TokenKind::Operator: ops.push_back(id); break;
        case expr::TokenKind::Input: inputs.push_back(id); break;
        case expr::TokenKind::Literal: literals.push_back(id); break;
        default: break;
      }
    }
  }

  const std::vector<model::TokenId>* of(const Vocab& vocab,
                                        model::TokenId id) const {
    switch (expr::classify(vocab, id)) {
      case expr::TokenKind::Operator: return &ops;
      case expr::TokenKind::Input: return &inputs;
      case expr::TokenKind::Literal: return &literals;
      default: return nullptr;
    }
  }
};

/**
 * Samples a random expression in token form with exactly `leaves` leaves
 * (leaves-1 operators), leaf kind a coin flip between input and literal.
 */
void sample_expr(std::mt19937_64& rng, const TokenClasses& classes, int leaves,
                 std::vector<model::TokenId>& out) {
  if (leaves == 1) {
    const bool use_input = (rng() & 1) != 0;
    const auto& pool = use_input ? classes.inputs : classes.literals;
    out.push_back(pool[static_cast<std::size_t>(draw_below(
        rng, static_cast<int>(pool.size())))]);
    return;
  }
  out.push_back(classes.ops[static_cast<std::size_t>(
      draw_below(rng, static_cast<int>(classes.ops.size())))]);
  const int left = 1 + draw_below(rng, leaves - 1);
  sample_expr(rng, classes, left, out);
  sample_expr(rng, classes, leaves - left, out);
}

/**
 * Builds a 4-6 case suite by evaluating the ground truth on random input
 * tuples. Inputs are re-rolled per case when evaluation fails (a data-
 * dependent division by zero); returns false when a case cannot be built
 * (e.g. a constant zero divisor makes the program total-failure).
 */
bool sample_suite(std::mt19937_64& rng, const expr::Program& truth,
                  TestSuite& suite) {
  const int n_cases = 4 + draw_below(rng, 3);
  suite.cases.clear();
  for (int c = 0; c < n_cases; ++c) {
    bool built = false;
    for (int attempt = 0; attempt < 50 && !built; ++attempt) {
      TestCase tc;
      tc.inputs.resize(kNumInputs);
      for (auto& x : tc.inputs) x = draw_input(rng);
      const auto value = expr::eval_program(truth, tc.inputs);
      if (!value) continue;
      tc.expected = *value;
      suite.cases.push_back(std::move(tc));
      built = true;
    }
    if (!built) return false;
  }
  return true;
}

std::string bug_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "bug-%03d", index);
  return buf;
}

}  // namespace

std::vector<CorpusEntry> generate_bug_corpus(std::uint64_t seed, int n_bugs,
                                             const Vocab& vocab) {
  if (n_bugs < 1) throw std::invalid_argument("corpus: n_bugs must be >= 1");
  const TokenClasses classes(vocab);
  if (classes.ops.empty() || classes.inputs.empty() || classes.literals.empty())
    throw std::invalid_argument("corpus: vocab lacks an expression class");

  std::mt19937_64 rng(seed);
  std::vector<CorpusEntry> corpus;
  corpus.reserve(static_cast<std::size_t>(n_bugs));

  for (int i = 0; i < n_bugs; ++i) {
    CorpusEntry entry;
    // Ground truth + suite; resample the tree if its suite can't be built.
    std::vector<model::TokenId> expr_tokens;
    for (;;) {
      expr_tokens.clear();
      const int leaves = 2 + draw_below(rng, 3);
      sample_expr(rng, classes, leaves, expr_tokens);

      std::vector<model::TokenId> full;
      full.push_back(vocab.sos());
      full.insert(full.end(), expr_tokens.begin(), expr_tokens.end());
      full.push_back(vocab.terminals().front());
      const auto truth = expr::decode_program(full, vocab);
      if (!truth) continue;  // cannot happen for grammar-sampled tokens
      if (!sample_suite(rng, *truth, entry.suite)) continue;
      entry.ground_truth = std::move(full);
      break;
    }

    // Single-token, same-kind mutation that demonstrably breaks the suite.
    bool mutated = false;
    for (int attempt = 0; attempt < kMutationAttempts && !mutated; ++attempt) {
      const std::size_t pos =
          1 + static_cast<std::size_t>(draw_below(
                  rng, static_cast<int>(expr_tokens.size())));
      const model::TokenId original = entry.ground_truth[pos];
      const auto* pool = classes.of(vocab, original);
      if (!pool || pool->size() < 2) continue;
      model::TokenId replacement = original;
      while (replacement == original)
        replacement = (*pool)[static_cast<std::size_t>(
            draw_below(rng, static_cast<int>(pool->size())))];

      std::vector<model::TokenId> mutant = entry.ground_truth;
      mutant[pos] = replacement;
      if (evaluate_reward(mutant, entry.suite, vocab).reward >= 1.0) continue;
      entry.bug.buggy_tokens = std::move(mutant);
      mutated = true;
    }
    if (!mutated)
      throw GenerationExhausted("corpus: no behavior-changing mutation for " +
                                bug_id(i) + " in " +
                                std::to_string(kMutationAttempts) + " attempts");

    entry.bug.id = bug_id(i);
    entry.bug.prompt_tokens = {vocab.sos()};
    entry.bug.expected_depth = static_cast<int>(expr_tokens.size());
    corpus.push_back(std::move(entry));
  }
  return corpus;
}

// ==== JSONL ==================================================================

void save_corpus_jsonl(const std::vector<CorpusEntry>& corpus,
                       std::ostream& out) {
  for (const CorpusEntry& entry : corpus) {
    nlohmann::ordered_json line;
    line["id"] = entry.bug.id;
    line["buggy_tokens"] = entry.bug.buggy_tokens;
    line["ground_truth"] = entry.ground_truth;
    nlohmann::ordered_json cases = nlohmann::ordered_json::array();
    for (const TestCase& tc : entry.suite.cases)
      cases.push_back({{"inputs", tc.inputs}, {"expected", tc.expected}});
    line["spec"] = std::move(cases);
    out << line.dump() << '\n';
  }
}

std::vector<CorpusEntry> load_corpus_jsonl(std::istream& in) {
  std::vector<CorpusEntry> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
      CorpusEntry entry;
      entry.bug.id = doc.at("id").get<std::string>();
      entry.bug.buggy_tokens =
          doc.at("buggy_tokens").get<std::vector<model::TokenId>>();
      entry.ground_truth =
          doc.at("ground_truth").get<std::vector<model::TokenId>>();
      for (const auto& jc : doc.at("spec")) {
        TestCase tc;
        tc.inputs = jc.at("inputs").get<std::vector<std::int64_t>>();
        tc.expected = jc.at("expected").get<std::int64_t>();
        entry.suite.cases.push_back(std::move(tc));
      }
      if (entry.bug.buggy_tokens.empty() || entry.ground_truth.empty() ||
          entry.suite.cases.empty())
        throw ProtocolError("corpus: empty field");
      // Sequences are stored in full, so the prompt is the leading sos.
      entry.bug.prompt_tokens = {entry.bug.buggy_tokens.front()};
      entry.bug.expected_depth =
          static_cast<int>(entry.bug.buggy_tokens.size()) - 2;
      corpus.push_back(std::move(entry));
    } catch (const nlohmann::json::exception& e) {
      throw ProtocolError("corpus line " + std::to_string(line_no) + ": " +
                          e.what());
    }
  }
  return corpus;
}

std::vector<CorpusEntry> load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("corpus: cannot read " + path);
  return load_corpus_jsonl(in);
}

void save_corpus_file(const std::vector<CorpusEntry>& corpus,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("corpus: cannot write " + path);
  save_corpus_jsonl(corpus, out);
  if (!out) throw IoError("corpus: write failed for " + path);
}

}  // namespace flames::reward
