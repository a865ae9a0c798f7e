// corpus: generate seeded bug corpora for the repair benchmark.
//
//   corpus gen --seed S --n N --out corpus.jsonl
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "flames/errors.hpp"
#include "flames/reward.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bug corpus tools"};
  app.require_subcommand(1);

  auto* gen_cmd = app.add_subcommand("gen", "Generate a seeded bug corpus");
  std::uint64_t seed = 0;
  int n_bugs = 50;
  std::string out_path;
  gen_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--n", n_bugs, "Number of bugs")->capture_default_str();
  gen_cmd->add_option("--out", out_path, "Corpus path (JSONL)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (n_bugs < 1) throw flames::ConfigError("--n must be >= 1");
    const auto vocab = flames::reward::default_vocab();
    const auto corpus = flames::reward::generate_bug_corpus(seed, n_bugs, vocab);
    flames::reward::save_corpus_file(corpus, out_path);
    std::cout << corpus.size() << " bugs written to " << out_path << '\n';
    return 0;
  } catch (const flames::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const flames::GenerationExhausted& e) {
    std::cerr << "generation failed: " << e.what() << '\n';
    return 1;
  } catch (const flames::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  }
}
