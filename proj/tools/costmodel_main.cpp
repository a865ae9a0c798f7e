// costmodel: evaluate the analytic memory model.
//
//   costmodel sweep --alpha A --n-in I --n-out O --vocab V [--cap BYTES]
//                   --out sweep.csv
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "flames/costmodel.hpp"
#include "flames/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Analytic memory-model tools"};
  app.require_subcommand(1);

  auto* sweep_cmd =
      app.add_subcommand("sweep", "Tabulate step memory across beam sizes");
  flames::costmodel::MemoryModelParams params{1000, 1, 10, 20, 100};
  std::int64_t cap = -1;
  std::string out_path;
  sweep_cmd->add_option("--alpha", params.alpha, "Per-forward model bytes")
      ->capture_default_str();
  sweep_cmd->add_option("--n-in", params.n_in, "Input length (tokens)")
      ->capture_default_str();
  sweep_cmd->add_option("--n-out", params.n_out, "Max new tokens")
      ->capture_default_str();
  sweep_cmd->add_option("--vocab", params.v, "Vocabulary size")
      ->capture_default_str();
  sweep_cmd->add_option("--cap", cap, "OOM threshold (abstract bytes)");
  sweep_cmd->add_option("--out", out_path, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (params.alpha <= 0 || params.n_in <= 0 || params.n_out <= 0 ||
        params.v <= 0)
      throw flames::ConfigError("alpha, n-in, n-out, vocab must be positive");
    std::optional<std::int64_t> cap_opt;
    if (cap >= 0) cap_opt = cap;

    const auto rows = flames::costmodel::sweep(params, cap_opt);
    std::ofstream out(out_path);
    if (!out) throw flames::IoError("cannot write " + out_path);
    flames::costmodel::write_sweep_csv(rows, out);
    if (!out) throw flames::IoError("write failed for " + out_path);
    std::cout << rows.size() << " rows written to " << out_path << '\n';
    return 0;
  } catch (const flames::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const flames::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  }
}
