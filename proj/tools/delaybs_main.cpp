#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "delaybs/cli/commands.hpp"
#include "delaybs/cli/config.hpp"
#include "delaybs/errors.hpp"

namespace {

struct Flags {
  std::string config;
  std::string command;
  std::optional<std::size_t> paths;
  std::optional<std::uint64_t> seed;
  std::optional<double> t0;
  std::string history;
  std::string measure;
  std::string out;
  std::string format;
  bool antithetic = false;
  std::optional<unsigned> workers;
  bool schema = false;
};

int run(const Flags& f) {
  using namespace delaybs::cli;
  if (f.schema) {
    std::cout << schema_text();
    return kExitOk;
  }
  if (f.config.empty() || f.command.empty()) {
    std::cerr << "delaybs: --config and --command are required (see --help)\n";
    return kExitUsage;
  }
  const auto cmd = parse_command(f.command);
  auto cfg = load_config(f.config);
  if (f.paths) cfg.n_paths = *f.paths;
  if (f.seed) cfg.seed = *f.seed;
  if (f.t0) cfg.t0 = *f.t0;
  if (!f.history.empty()) cfg.history_path = f.history;
  if (!f.measure.empty()) cfg.measure = parse_measure(f.measure);
  if (!f.format.empty()) cfg.format = parse_format(f.format);
  if (f.antithetic) cfg.antithetic = true;
  if (f.workers) cfg.workers = *f.workers;

  if (f.out.empty()) return run_command(cmd, cfg, std::cout);
  std::ofstream file(f.out, std::ios::binary);
  if (!file) throw delaybs::IoError("cannot open output file '" + f.out + "'");
  const int status = run_command(cmd, cfg, file);
  file.flush();
  if (!file) throw delaybs::IoError("failed writing '" + f.out + "'");
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pricing and hedging of European calls under delayed stock dynamics"};
  Flags f;
  app.add_option("--config", f.config, "config file (see --schema)");
  app.add_option("--command", f.command, "simulate | price | hedge | validate");
  app.add_option("--paths", f.paths, "number of Monte Carlo paths");
  app.add_option("--seed", f.seed, "64-bit seed");
  app.add_option("--t0", f.t0, "valuation time");
  app.add_option("--history", f.history, "CSV t,S of observed prices on [t0 - max(a, b), t0]");
  app.add_option("--measure", f.measure, "P | Q");
  app.add_option("--out", f.out, "output file (default stdout)");
  app.add_option("--format", f.format, "csv | json");
  app.add_flag("--antithetic", f.antithetic, "antithetic Monte Carlo pairs");
  app.add_option("--workers", f.workers, "threads, 0 = all cores");
  app.add_flag("--schema", f.schema, "print config grammar, outputs and exit codes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : delaybs::cli::kExitUsage;
  }

  try {
    return run(f);
  } catch (const delaybs::Error& e) {
    std::cerr << "delaybs: " << delaybs::to_string(e.code()) << ": " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "delaybs: internal error: " << e.what() << '\n';
    return delaybs::cli::kExitInternal;
  }
}
