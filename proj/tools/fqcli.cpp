#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "futurequant/error.hpp"
#include "futurequant/io.hpp"
#include "futurequant/metrics.hpp"
#include "futurequant/pipeline.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool verbose = false;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("-c,--config", o.config, "Run configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", o.out, "Output directory (overrides run.out_dir)");
  cmd->add_option("-s,--seed", o.seed, "Seed (overrides run.seed)");
  cmd->add_flag("-v,--verbose", o.verbose, "Log progress to stderr");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantile forecasting and backtesting pipeline"};
  app.require_subcommand(1);
  Options o;
  const char* names[] = {"synth", "ingest", "train", "eval", "backtest", "compare"};
  const char* help[] = {
      "Generate a synthetic tick series",
      "Parse, resample, window and split the data",
      "Train the configured model and write a checkpoint",
      "Score the checkpoint on the test split",
      "Run the indicator strategy on test forecasts",
      "Train and score every configured model",
  };
  for (int i = 0; i < 6; ++i) add_common(app.add_subcommand(names[i], help[i]), o);
  CLI11_PARSE(app, argc, argv);

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    fq::RunConfig config = fq::load_config(o.config);
    if (o.seed) config.set_seed(*o.seed);
    const std::filesystem::path out = o.out.empty() ? config.out_dir : std::filesystem::path(o.out);
    fq::Logger log;
    if (o.verbose) log = [](const std::string& line) { std::cerr << line << '\n'; };

    if (cmd == "synth") {
      const auto series = fq::cmd_synth(config, out, log);
      std::cout << "wrote " << series.prices.size() << " synthetic prices to " << out.string() << '\n';
    } else if (cmd == "ingest") {
      const auto s = fq::cmd_ingest(config, out, log);
      std::cout << "train " << s.train.size() << ", validation " << s.validation.size() << ", test "
                << s.test.size() << " samples\n";
    } else if (cmd == "train") {
      const auto r = fq::cmd_train(config, out, log);
      std::cout << "initial loss " << fq::format_double(r.initial_loss);
      if (!r.loss_history.empty()) std::cout << ", final loss " << fq::format_double(r.loss_history.back());
      std::cout << '\n';
    } else if (cmd == "eval") {
      std::cout << fq::to_key_value(fq::cmd_eval(config, out, log));
    } else if (cmd == "backtest") {
      std::cout << fq::summary_text(fq::cmd_backtest(config, out, log).summary);
    } else {
      std::cout << fq::comparison_header() << '\n';
      for (const auto& e : fq::cmd_compare(config, out, log)) std::cout << fq::comparison_row(e.model, e.report) << '\n';
    }
  } catch (const fq::Error& e) {
    std::cerr << "fqcli " << cmd << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "fqcli " << cmd << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}
