// repair: run one repair algorithm over a bug corpus and write a JSON report.
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "flames/campaign.hpp"
#include "flames/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Repair campaign runner"};
  app.get_formatter()->column_width(34);

  std::string algo = "flames";
  std::string corpus_path;
  std::string model_spec = "table";
  std::string policy = "pucb-var";
  std::string out_path;
  flames::campaign::CampaignConfig config;
  std::int64_t memory_cap = -1;

  app.add_option("--algo", algo, "Algorithm: flames|beam|seqbeam|sample|greedy")
      ->capture_default_str();
  app.add_option("--corpus", corpus_path, "Bug corpus (JSONL)")->required();
  app.add_option("--model", model_spec,
                 "Model spec: table | table:<path> | ngram[:N] | remote:<url>")
      ->capture_default_str();
  app.add_option("--beam-size", config.beam_size, "Beam width (beam/seqbeam)")
      ->capture_default_str();
  app.add_option("--expansion-k", config.expansion_k,
                 "Children per tree expansion (flames)")
      ->capture_default_str();
  app.add_option("--policy", policy, "Selection policy: ucb|pucb-fixed|pucb-var")
      ->capture_default_str();
  app.add_option("--max-patches", config.max_patches,
                 "Patch validation budget per bug")
      ->capture_default_str();
  app.add_option("--timeout-secs", config.timeout_secs, "Per-bug timeout")
      ->capture_default_str();
  app.add_option("--max-new-tokens", config.max_new_tokens,
                 "Generation budget per sequence")
      ->capture_default_str();
  app.add_option("--temperature", config.temperature, "Sampling temperature")
      ->capture_default_str();
  app.add_option("--memory-cap", memory_cap,
                 "Abstract-byte cap; breaching runs record OOM");
  app.add_option("--seed", config.seed, "Campaign seed")->capture_default_str();
  app.add_option("--jobs", config.jobs, "Parallel bug workers")
      ->capture_default_str();
  app.add_flag("!--no-stop-on-plausible", config.stop_on_plausible,
               "Keep searching after the first plausible patch");
  app.add_option("--out", out_path, "Report path (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    config.algo = flames::campaign::parse_algo(algo);
    config.policy = flames::campaign::parse_policy(policy);
    config.corpus_path = corpus_path;
    config.model_spec = model_spec;
    if (memory_cap >= 0) config.memory_cap = memory_cap;

    const auto report = flames::campaign::run_campaign(config);

    std::ofstream out(out_path);
    if (!out) throw flames::IoError("cannot write " + out_path);
    out << flames::campaign::report_to_json(report);
    if (!out) throw flames::IoError("write failed for " + out_path);

    std::printf("%s on %zu bugs: %lld plausible, oom_rate %.2f, report %s\n",
                report.algorithm.c_str(), report.rows.size(),
                static_cast<long long>(report.plausible_count),
                report.oom_rate, out_path.c_str());
    return 0;
  } catch (const flames::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const flames::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const flames::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
