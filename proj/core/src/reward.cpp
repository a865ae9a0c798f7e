#include "flames/reward.hpp"

#include "flames/expr.hpp"

namespace flames::reward {

RewardReport evaluate_reward(std::span<const TokenId> tokens,
                             const TestSuite& suite, const Vocab& vocab) {
  RewardReport report;
  const auto program = expr::decode_program(tokens, vocab);
  report.parsed = program.has_value();

  for (std::size_t i = 0; i < suite.cases.size(); ++i) {
    const TestCase& tc = suite.cases[i];
    bool ok = false;
    if (program) {
      const auto value = expr::eval_program(*program, tc.inputs);
      ok = value.has_value() && *value == tc.expected;
    }
    if (ok) {
      ++report.f_pass;
    } else {
      ++report.f_fail;
      report.failures.push_back(static_cast<int>(i));
    }
  }
  const int total = report.f_pass + report.f_fail;
  report.reward =
      total > 0 ? static_cast<double>(report.f_pass) / total : 0.0;
  return report;
}

}  // namespace flames::reward
