#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <unordered_map>
#include <vector>

#include "flames/costmodel.hpp"
#include "flames/errors.hpp"
#include "flames/model.hpp"
#include "flames/reward.hpp"
#include "flames/search.hpp"
#include "test_support.hpp"

using namespace flames;
using model::TableModel;
using model::TokenId;
using model::Vocab;
using search::Policy;
using search::SearchConfig;
using search::SearchNode;
using testsup::letters_vocab;
using testsup::seq;

namespace {

/** The three-sequence toy model used across several cases below. */
TableModel three_path_model() {
  testsup::RuleMap rules;
  rules[seq({0})] = {{2, 0.6}, {1, 0.4}};
  rules[seq({0, 2})] = {{2, 0.5}, {1, 0.5}};
  rules[seq({0, 2, 2})] = {{1, 1.0}};
  return TableModel(letters_vocab(3), rules);
}

/** Reward by lookup table; everything else scores zero. */
search::RewardFn table_reward(std::map<std::vector<TokenId>, double> table,
                              int* calls = nullptr) {
  return [table = std::move(table), calls](std::span<const TokenId> tokens) {
    if (calls) *calls += 1;
    const std::vector<TokenId> key(tokens.begin(), tokens.end());
    const auto it = table.find(key);
    return it == table.end() ? 0.0 : it->second;
  };
}

/**
 * Walks the tree verifying the structural search invariants. Returns a bool
 * instead of asserting per node: the walk runs on every iteration of a
 * search, so assertion bookkeeping would dominate the test's runtime.
 */
bool tree_invariants_hold(const SearchNode& node,
                          std::unordered_map<const SearchNode*, double>& last_q) {
  if (node.q < 0.0 || node.q > 1.0) return false;
  const auto it = last_q.find(&node);
  if (it != last_q.end() && node.q < it->second) return false;
  last_q[&node] = node.q;
  std::int64_t child_visits = 0;
  for (const auto& child : node.children) {
    if (child->parent != &node) return false;
    if (child->q > node.q) return false;  // best reward flows upward
    child_visits += child->n;
    if (!tree_invariants_hold(*child, last_q)) return false;
  }
  return !node.expanded || node.n >= child_visits;
}

}  // namespace

TEST_CASE("policy scores match their closed forms") {
  SearchConfig config;

  SUBCASE("prior-weighted, fixed constant") {
    config.c_puct = 2.0;
    // 0.5 + 2 * 0.2 * sqrt(9) / (1 + 1) = 1.1
    CHECK(search::policy_score(Policy::PucbFixed, 0.5, 1, 0.2, 9, config) ==
          doctest::Approx(1.1).epsilon(1e-12));
  }

  SUBCASE("visit-count bonus, unvisited child") {
    const double s = search::policy_score(Policy::Ucb, 0.0, 0, 0.5, 7, config);
    CHECK(std::isinf(s));
    CHECK(s > 0);
  }

  SUBCASE("visit-count bonus, visited child") {
    config.c_ucb = 2.0;
    const double expect = 0.5 + 2.0 * std::sqrt(std::log(16.0) / 4.0);
    CHECK(search::policy_score(Policy::Ucb, 0.5, 4, 0.0, 16, config) ==
          doctest::Approx(expect).epsilon(1e-12));
  }

  SUBCASE("prior-weighted, growing constant") {
    config.c_base = 10.0;
    config.c_init = 4.0;
    // Unvisited parent: sqrt(0) collapses the exploration term entirely.
    CHECK(search::policy_score(Policy::PucbVar, 0.37, 0, 0.9, 0, config) ==
          0.37);
    // c = log((9 + 10 + 1)/10) + 4 = log(2) + 4.
    const double c = std::log(2.0) + 4.0;
    const double expect = 0.5 + c * 0.2 * std::sqrt(9.0) / 2.0;
    CHECK(search::policy_score(Policy::PucbVar, 0.5, 1, 0.2, 9, config) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("selection descends toward value and novelty") {
  SearchConfig config;

  SUBCASE("a fresh, unexpanded root is returned as-is") {
    SearchNode root;
    root.state = seq({0});
    CHECK(search::select(root, config) == &root);
  }

  SUBCASE("exploitation wins with small exploration constants") {
    SearchNode root;
    root.state = seq({0});
    root.expanded = true;
    root.n = 10;
    for (int i = 0; i < 2; ++i) {
      auto child = std::make_unique<SearchNode>();
      child->state = seq({0, static_cast<TokenId>(2 + i)});
      child->parent = &root;
      child->prior = 0.5;
      child->n = 5;
      child->q = i == 0 ? 0.9 : 0.1;
      root.children.push_back(std::move(child));
    }
    config.policy = Policy::PucbFixed;
    config.c_puct = 0.01;
    CHECK(search::select(root, config) == root.children[0].get());
  }

  SUBCASE("an unvisited child outranks everything under the visit bonus") {
    SearchNode root;
    root.state = seq({0});
    root.expanded = true;
    root.n = 6;
    auto seen = std::make_unique<SearchNode>();
    seen->state = seq({0, 2});
    seen->parent = &root;
    seen->n = 6;
    seen->q = 1.0;
    auto fresh = std::make_unique<SearchNode>();
    fresh->state = seq({0, 3});
    fresh->parent = &root;
    fresh->n = 0;
    root.children.push_back(std::move(seen));
    root.children.push_back(std::move(fresh));
    config.policy = Policy::Ucb;
    CHECK(search::select(root, config) == root.children[1].get());
  }

  SUBCASE("exact score ties resolve to the lower token id") {
    SearchNode root;
    root.state = seq({0});
    root.expanded = true;
    root.n = 4;
    for (TokenId id : {3, 2}) {  // inserted high id first on purpose
      auto child = std::make_unique<SearchNode>();
      child->state = seq({0, id});
      child->parent = &root;
      child->prior = 0.5;
      child->n = 2;
      child->q = 0.5;
      root.children.push_back(std::move(child));
    }
    config.policy = Policy::PucbFixed;
    const auto* picked = search::select(root, config);
    CHECK(picked->state == seq({0, 2}));
  }
}

TEST_CASE("expansion attaches raw truncated priors") {
  testsup::RuleMap rules;
  rules[seq({0})] = {{2, 0.7}, {1, 0.3}};
  const TableModel m(letters_vocab(3), rules);
  SearchConfig config;

  SUBCASE("all suggestions fit") {
    search::TopKCache cache(2);
    config.expansion_k = 2;
    SearchNode root;
    root.state = seq({0});
    search::expand(root, cache, m, config);
    CHECK(root.expanded);
    REQUIRE(root.children.size() == 2);
    CHECK(root.children[0]->state == seq({0, 2}));
    CHECK(root.children[0]->prior == 0.7);  // raw, not renormalized
    CHECK_FALSE(root.children[0]->terminal);
    CHECK(root.children[0]->q == 0.0);
    CHECK(root.children[0]->n == 0);
    CHECK(root.children[1]->state == seq({0, 1}));
    CHECK(root.children[1]->prior == 0.3);
    CHECK(root.children[1]->terminal);

    // Re-expanding is a no-op.
    const auto forwards = m.stats().forward_calls();
    search::expand(root, cache, m, config);
    CHECK(root.children.size() == 2);
    CHECK(m.stats().forward_calls() == forwards);
  }

  SUBCASE("k=1 keeps only the best suggestion") {
    search::TopKCache cache(1);
    config.expansion_k = 1;
    SearchNode root;
    root.state = seq({0});
    search::expand(root, cache, m, config);
    REQUIRE(root.children.size() == 1);
    CHECK(root.children[0]->state == seq({0, 2}));
  }

  SUBCASE("terminal nodes cannot expand") {
    search::TopKCache cache(2);
    config.expansion_k = 2;
    SearchNode leaf;
    leaf.state = seq({0, 1});
    leaf.terminal = true;
    CHECK_THROWS_AS(search::expand(leaf, cache, m, config),
                    PrefixTerminalError);
  }

  SUBCASE("a shared cache makes the second tree's expansion free") {
    search::TopKCache cache(2);
    config.expansion_k = 2;
    SearchNode first;
    first.state = seq({0});
    search::expand(first, cache, m, config);
    const auto forwards = m.stats().forward_calls();
    const auto hits = m.stats().cache_hits();

    SearchNode second;
    second.state = seq({0});
    search::expand(second, cache, m, config);
    CHECK(m.stats().forward_calls() == forwards);  // zero new forwards
    CHECK(m.stats().cache_hits() == hits + 1);
    REQUIRE(second.children.size() == 2);
    CHECK(second.children[0]->prior == first.children[0]->prior);
  }
}

TEST_CASE("the top-k cache memoizes by exact prefix") {
  testsup::RuleMap rules;
  rules[seq({0})] = {{2, 0.7}, {1, 0.3}};
  rules[seq({0, 2})] = {{1, 1.0}};
  rules[seq({0, 3})] = {{2, 1.0}};
  const TableModel m(letters_vocab(4), rules);
  search::TopKCache cache(2);

  const auto a = search::cached_top_k(cache, m, seq({0}), 2);
  CHECK(m.stats().forward_calls() == 1);
  CHECK(m.stats().cache_hits() == 0);
  const auto b = search::cached_top_k(cache, m, seq({0}), 2);
  CHECK(m.stats().forward_calls() == 1);  // +0: served from the cache
  CHECK(m.stats().cache_hits() == 1);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].id == b.entries[i].id);
    CHECK(a.entries[i].prob == b.entries[i].prob);
  }

  // Distinct prefixes get distinct entries.
  (void)search::cached_top_k(cache, m, seq({0, 2}), 2);
  (void)search::cached_top_k(cache, m, seq({0, 3}), 2);
  CHECK(cache.size() == 3);
  CHECK(m.stats().forward_calls() == 3);

  // k must match the cache's k.
  CHECK_THROWS_AS(search::cached_top_k(cache, m, seq({0}), 3), BadKError);
}

TEST_CASE("a thousand repeated queries cost ten forwards") {
  const TableModel m(letters_vocab(12), {}, model::UnlistedPolicy::UniformAll);
  search::TopKCache cache(5);
  std::vector<std::vector<TokenId>> states{seq({0})};
  for (TokenId id = 2; id <= 10; ++id) states.push_back(seq({0, id}));
  REQUIRE(states.size() == 10);
  for (int round = 0; round < 100; ++round)
    for (const auto& state : states)
      (void)search::cached_top_k(cache, m, state, 5);
  CHECK(m.stats().forward_calls() == 10);
  CHECK(m.stats().cache_hits() == 990);
  CHECK(cache.size() == 10);
}

TEST_CASE("backpropagation maxes Q and counts visits to the root") {
  SearchNode root;
  root.state = seq({0});
  root.q = 0.2;
  root.n = 3;
  auto child = std::make_unique<SearchNode>();
  child->state = seq({0, 2});
  child->parent = &root;
  child->q = 0.5;
  child->n = 2;
  SearchNode* leaf = child.get();
  root.children.push_back(std::move(child));

  // Reward between the two Qs: the smaller one rises, the larger holds.
  search::backprop(leaf, 0.4);
  CHECK(root.q == 0.4);
  CHECK(leaf->q == 0.5);
  CHECK(root.n == 4);
  CHECK(leaf->n == 3);

  // Zero reward: no Q moves, every visit count does.
  search::backprop(leaf, 0.0);
  CHECK(root.q == 0.4);
  CHECK(leaf->q == 0.5);
  CHECK(root.n == 5);
  CHECK(leaf->n == 4);

  // Full reward: the whole path saturates.
  search::backprop(leaf, 1.0);
  CHECK(root.q == 1.0);
  CHECK(leaf->q == 1.0);
}

TEST_CASE("the search finds an argmax-probability fix on iteration one") {
  const auto m = three_path_model();
  // Greedy from the root: a (0.6), then the 0.5 tie resolves to end.
  const auto target = seq({0, 2, 1});
  SearchConfig config;
  const auto result =
      search::flames_search(m, seq({0}), table_reward({{target, 1.0}}), config);
  REQUIRE_FALSE(result.candidates.empty());
  CHECK(result.candidates[0].tokens == target);
  CHECK(result.candidates[0].reward == 1.0);
  CHECK(result.candidates[0].iteration == 1);
  CHECK(result.candidates[0].complete);
  CHECK(result.report.iterations == 1);
  CHECK(result.report.stop_reason == "plausible");
  CHECK(result.report.distinct_patches == 1);
}

TEST_CASE("a rollout passing three of four cases scores 0.75") {
  // Model that deterministically completes to "+ x0 1".
  const Vocab vocab = reward::default_vocab();
  const TokenId plus = *vocab.id_of("+"), x0 = *vocab.id_of("x0"),
                one = *vocab.id_of("1"), end = *vocab.id_of("</s>");
  testsup::RuleMap rules;
  rules[seq({0})] = {{plus, 1.0}};
  rules[{0, plus}] = {{x0, 1.0}};
  rules[{0, plus, x0}] = {{one, 1.0}};
  rules[{0, plus, x0, one}] = {{end, 1.0}};
  const TableModel m(vocab, rules);

  reward::Bug bug;
  bug.id = "bug-x";
  bug.buggy_tokens = {0, plus, x0, one, end};
  bug.prompt_tokens = {0};
  // x0 + 1 is right on three cases and wrong on the last.
  reward::TestSuite suite{{{{0, 0, 0, 0}, 1},
                           {{4, 0, 0, 0}, 5},
                           {{-2, 0, 0, 0}, -1},
                           {{9, 0, 0, 0}, 99}}};
  SearchConfig config;
  config.max_patches = 1;
  const auto result = search::flames_search(m, bug, suite, config);
  REQUIRE_FALSE(result.candidates.empty());
  CHECK(result.candidates[0].reward == 0.75);
  CHECK(result.report.stop_reason == "budget");
}

TEST_CASE("duplicate rollouts are iterations, not validations") {
  const auto m = three_path_model();
  int reward_calls = 0;
  std::map<std::vector<TokenId>, double> rewards{
      {seq({0, 1}), 0.5}, {seq({0, 2, 1}), 1.0}, {seq({0, 2, 2, 1}), 0.25}};
  SearchConfig config;
  config.policy = Policy::Ucb;
  config.stop_on_plausible = false;
  config.max_patches = 50;
  config.max_sim_tokens = 5;
  const auto result = search::flames_search(
      m, seq({0}), table_reward(rewards, &reward_calls), config);

  // Every complete sequence of this model was found exactly once...
  REQUIRE(result.candidates.size() == 3);
  CHECK(result.report.distinct_patches == 3);
  CHECK(reward_calls == 3);  // ...and the runner never re-ran a duplicate
  CHECK(result.report.iterations > 3);  // though rollouts did repeat
  CHECK(result.report.stop_reason == "exhausted");

  // Candidates rank by reward, first-discovery breaking ties.
  CHECK(result.candidates[0].tokens == seq({0, 2, 1}));
  CHECK(result.candidates[0].reward == 1.0);
  CHECK(result.candidates[1].tokens == seq({0, 1}));
  CHECK(result.candidates[1].reward == 0.5);
  CHECK(result.candidates[2].tokens == seq({0, 2, 2, 1}));
  CHECK(result.candidates[2].reward == 0.25);
  for (std::size_t i = 1; i < result.candidates.size(); ++i)
    CHECK(result.candidates[i - 1].reward >= result.candidates[i].reward);
}

TEST_CASE("the patch budget stops the search") {
  const auto m = three_path_model();
  SearchConfig config;
  config.stop_on_plausible = false;
  config.max_patches = 2;
  config.max_sim_tokens = 5;
  const auto result =
      search::flames_search(m, seq({0}), table_reward({}), config);
  CHECK(result.report.stop_reason == "budget");
  CHECK(result.report.distinct_patches == 2);
  CHECK(result.candidates.size() == 2);
}

TEST_CASE("a zero timeout stops before the first rollout") {
  const auto m = three_path_model();
  SearchConfig config;
  config.timeout_secs = 0.0;
  const auto result =
      search::flames_search(m, seq({0}), table_reward({}), config);
  CHECK(result.report.stop_reason == "timeout");
  CHECK(result.report.iterations == 0);
  CHECK(result.candidates.empty());
}

TEST_CASE("an unsatisfiable suite exhausts with the best partial reward") {
  const Vocab vocab = reward::default_vocab();
  const TokenId x0 = *vocab.id_of("x0"), zero = *vocab.id_of("0"),
                end = *vocab.id_of("</s>");
  testsup::RuleMap rules;
  rules[seq({0})] = {{x0, 0.6}, {zero, 0.4}};
  rules[{0, x0}] = {{end, 1.0}};
  rules[{0, zero}] = {{end, 1.0}};
  const TableModel m(vocab, rules);

  reward::Bug bug;
  bug.id = "bug-y";
  bug.buggy_tokens = {0, zero, end};
  bug.prompt_tokens = {0};
  // Two cases with identical inputs and different expectations: nothing in
  // this space (or any space) can satisfy both.
  reward::TestSuite suite{{{{1, 0, 0, 0}, 1}, {{1, 0, 0, 0}, 2}}};
  SearchConfig config;
  config.max_patches = 100;
  const auto result = search::flames_search(m, bug, suite, config);
  CHECK(result.report.stop_reason == "exhausted");
  REQUIRE_FALSE(result.candidates.empty());
  CHECK(result.candidates[0].reward == 0.5);  // "x0" passes exactly one case
  CHECK(result.candidates[0].reward < 1.0);
  CHECK(result.report.distinct_patches == 2);
}

TEST_CASE("search invariants hold at every iteration") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = testsup::random_table_model(rng, 5, 3);
    std::unordered_map<const SearchNode*, double> last_q;
    std::int64_t seen_iterations = 0;
    bool invariants = true;
    const search::IterationObserver observer =
        [&](const SearchNode& root, std::int64_t iteration) {
          seen_iterations = iteration;
          // Every rollout lands on the root, and the whole tree stays sound.
          invariants = invariants && root.n == iteration &&
                       tree_invariants_hold(root, last_q);
        };
    SearchConfig config;
    config.stop_on_plausible = false;
    config.max_patches = 40;
    config.max_sim_tokens = 4;
    // A patch budget counts distinct rollouts, so a search dwelling on an
    // already-scored region can take a while to escape; the clock, not the
    // budget, bounds this test.
    config.timeout_secs = 0.5;
    config.policy = trial % 2 == 0 ? Policy::PucbVar : Policy::Ucb;
    // Reward by a stable hash of the tokens: deterministic, in [0, 1).
    const search::RewardFn fn = [](std::span<const TokenId> tokens) {
      std::uint64_t h = 1469598103934665603ull;
      for (const TokenId id : tokens) h = (h ^ static_cast<std::uint64_t>(id)) * 1099511628211ull;
      return static_cast<double>(h % 1000) / 1000.0;
    };
    const auto result =
        search::flames_search(m, seq({0}), fn, config, nullptr, observer);
    CHECK(invariants);
    CHECK(result.report.iterations == seen_iterations);
    for (const auto& c : result.candidates) {
      CHECK(c.reward >= 0.0);
      CHECK(c.reward <= 1.0);
    }
  }
}

TEST_CASE("the cache changes the cost, never the result") {
  std::mt19937_64 rng(56);
  for (int trial = 0; trial < 5; ++trial) {
    const int v = 4 + static_cast<int>(rng() % 3);
    const auto state = rng();
    std::mt19937_64 rng_a(state), rng_b(state);
    const auto m_cached = testsup::random_table_model(rng_a, v, 3);
    const auto m_plain = testsup::random_table_model(rng_b, v, 3);

    SearchConfig config;
    config.stop_on_plausible = false;
    config.max_patches = 60;
    config.max_sim_tokens = 4;
    SearchConfig no_cache = config;
    no_cache.use_cache = false;

    const search::RewardFn fn = [](std::span<const TokenId> tokens) {
      return tokens.size() % 2 == 0 ? 0.25 : 0.75;
    };
    const auto with_cache = search::flames_search(m_cached, seq({0}), fn, config);
    const auto without = search::flames_search(m_plain, seq({0}), fn, no_cache);

    REQUIRE(with_cache.candidates.size() == without.candidates.size());
    for (std::size_t i = 0; i < with_cache.candidates.size(); ++i) {
      CHECK(with_cache.candidates[i].tokens == without.candidates[i].tokens);
      CHECK(with_cache.candidates[i].reward == without.candidates[i].reward);
      CHECK(with_cache.candidates[i].iteration ==
            without.candidates[i].iteration);
    }
    CHECK(with_cache.report.iterations == without.report.iterations);
    CHECK(with_cache.report.stop_reason == without.report.stop_reason);
    // Any repeated state makes the cached run strictly cheaper.
    CHECK(with_cache.report.forward_calls < without.report.forward_calls);
    CHECK(with_cache.report.cache_hits > 0);
    CHECK(without.report.cache_hits == 0);
  }
}

TEST_CASE("search memory is one greedy forward, whatever the budget") {
  std::mt19937_64 rng(57);
  const auto m = testsup::random_table_model(rng, 5, 4);
  const search::RewardFn fn = [](std::span<const TokenId>) { return 0.3; };

  std::vector<std::int64_t> peaks;
  for (const int budget : {1, 50, 200}) {
    SearchConfig config;
    config.max_patches = budget;
    config.max_sim_tokens = 6;
    costmodel::MemoryMeter meter;
    (void)search::flames_search(m, seq({0}), fn, config, &meter);
    peaks.push_back(meter.reading().peak_bytes);
  }
  CHECK(peaks[0] == peaks[1]);
  CHECK(peaks[1] == peaks[2]);

  // And that constant is the one-sequence decode step: alpha + beta.
  const costmodel::MemoryModelParams params{1000, 1, 1, 6, 5};
  CHECK(peaks[0] == costmodel::bs_step2_memory(params));
}

TEST_CASE("a cap below one forward aborts the search") {
  std::mt19937_64 rng(58);
  const auto m = testsup::random_table_model(rng, 5, 3);
  SearchConfig config;
  config.max_sim_tokens = 6;
  const costmodel::MemoryModelParams params{1000, 1, 1, 6, 5};
  costmodel::MemoryMeter meter(costmodel::bs_step2_memory(params) - 1);
  const search::RewardFn fn = [](std::span<const TokenId>) { return 0.0; };
  CHECK_THROWS_AS(search::flames_search(m, seq({0}), fn, config, &meter),
                  SimulatedOom);
  CHECK(meter.oom());
}

TEST_CASE("reward evaluator failures fold to zero and are tallied") {
  const auto m = three_path_model();
  const search::RewardFn fn = [](std::span<const TokenId> tokens) -> double {
    if (tokens.size() == 2) throw std::runtime_error("runner crashed");
    return 0.4;
  };
  SearchConfig config;
  config.stop_on_plausible = false;
  config.max_patches = 10;
  config.max_sim_tokens = 5;
  const auto result = search::flames_search(m, seq({0}), fn, config);
  CHECK(result.report.reward_errors == 1);  // the [sos, end] rollout
  // The crashed rollout is still a (zero-reward) candidate.
  bool found_zero = false;
  for (const auto& c : result.candidates)
    if (c.tokens == seq({0, 1})) {
      CHECK(c.reward == 0.0);
      found_zero = true;
    }
  CHECK(found_zero);
}

TEST_CASE("rewards outside the unit interval are clamped") {
  const auto m = three_path_model();
  const search::RewardFn fn = [](std::span<const TokenId> tokens) -> double {
    return tokens.size() == 2 ? -2.0 : 7.0;
  };
  SearchConfig config;
  config.stop_on_plausible = false;
  config.max_patches = 10;
  config.max_sim_tokens = 5;
  const auto result = search::flames_search(m, seq({0}), fn, config);
  for (const auto& c : result.candidates) {
    CHECK(c.reward >= 0.0);
    CHECK(c.reward <= 1.0);
  }
}

TEST_CASE("budget-exhausted rollouts never become candidates") {
  // A model that never emits the terminal: every rollout is incomplete.
  testsup::RuleMap rules;
  rules[seq({0})] = {{2, 1.0}};
  rules[seq({0, 2})] = {{2, 1.0}};
  rules[seq({0, 2, 2})] = {{2, 1.0}};
  const TableModel m(Vocab({"<s>", "</s>", "a"}, {1}, 0), rules);

  SearchConfig config;
  config.stop_on_plausible = false;
  config.max_patches = 10;
  config.max_sim_tokens = 3;
  const auto result =
      search::flames_search(m, seq({0}), table_reward({}), config);
  CHECK(result.candidates.empty());
  CHECK(result.report.distinct_patches == 0);
  CHECK(result.report.stop_reason == "exhausted");
  CHECK(result.report.iterations > 0);
}
