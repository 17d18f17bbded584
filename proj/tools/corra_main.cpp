// corra: random pilot access experiments over correlated Rayleigh channels.
//
//   corra fig2|fig3|fig4 [--seed N] [--trials N] [--paper-scale] [--deterministic]
//                        [--threads N] [--config FILE] [--out FILE]
//   corra custom --config FILE [...]
//   corra validate [--seed N]
//
// Exit codes: 0 success, 1 usage or runtime error, 2 validation failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "corra/harness.hpp"

namespace {

struct Options {
  std::optional<std::uint64_t> seed;
  std::optional<long> trials;
  bool paper_scale = false;
  bool deterministic = false;
  int threads = 0;
  std::string config;
  std::string out;
};

void add_common(CLI::App* cmd, Options& o, bool config_required) {
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--trials", o.trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
  cmd->add_flag("--paper-scale", o.paper_scale, "Use the full-size configuration");
  cmd->add_flag("--deterministic", o.deterministic, "Single worker, fixed accumulation order");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)")
      ->check(CLI::NonNegativeNumber);
  auto* cfg = cmd->add_option("--config", o.config, "key = value scenario file");
  if (config_required) cfg->required();
  cmd->add_option("--out", o.out, "CSV output path (default stdout)");
}

int workers(const Options& o) {
  if (o.deterministic) return 1;
  if (o.threads > 0) return o.threads;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

int run_figure(const std::string& name, const Options& o) {
  corra::Scenario sc = name == "fig2"   ? corra::fig2_scenario(o.paper_scale)
                       : name == "fig3" ? corra::fig3_scenario(o.paper_scale)
                       : name == "fig4" ? corra::fig4_scenario(o.paper_scale)
                                        : corra::Scenario{};
  if (!o.config.empty()) corra::apply_config(sc, corra::read_key_value_file(o.config));
  if (o.seed) sc.config.seed = *o.seed;
  if (o.trials) sc.config.trials = *o.trials;
  sc.config.workers = workers(o);

  const auto table = corra::run_scenario(sc);
  if (o.out.empty()) {
    corra::write_csv(std::cout, sc, table);
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + o.out + "'");
    corra::write_csv(f, sc, table);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random pilot access over spatially correlated massive MIMO channels"};
  app.require_subcommand(1);

  Options fig2, fig3, fig4, custom, val;
  add_common(app.add_subcommand("fig2", "MSE-CE versus angular spread"), fig2, false);
  add_common(app.add_subcommand("fig3", "MSE-CE versus SNR for several pilot lengths"), fig3, false);
  add_common(app.add_subcommand("fig4", "Expected sum spectral efficiency versus SNR"), fig4, false);
  add_common(app.add_subcommand("custom", "Scenario read from --config"), custom, true);
  auto* validate = app.add_subcommand("validate", "Run the oracle validation suite");
  validate->add_option("--seed", val.seed, "RNG seed");
  validate->add_flag("--deterministic", val.deterministic, "Single worker");
  validate->add_option("--threads", val.threads, "Worker threads")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (app.got_subcommand("fig2")) return run_figure("fig2", fig2);
    if (app.got_subcommand("fig3")) return run_figure("fig3", fig3);
    if (app.got_subcommand("fig4")) return run_figure("fig4", fig4);
    if (app.got_subcommand("custom")) return run_figure("custom", custom);
    if (app.got_subcommand("validate")) {
      const auto report = corra::run_validate(val.seed.value_or(1), workers(val));
      corra::print_report(std::cout, report);
      return report.all_passed() ? 0 : 2;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
