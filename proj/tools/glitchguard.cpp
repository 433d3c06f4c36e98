// glitchguard: synthetic corpus generation, autoencoder training, regularity
// scoring, plotting, clustering and evaluation from the command line.

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "glitchguard/cli/commands.hpp"
#include "glitchguard/cli/run_config.hpp"
#include "glitchguard/error.hpp"

namespace gg = glitchguard;

int main(int argc, char** argv) {
  CLI::App app{"Perceptual bug detection on gameplay video with a spatiotemporal autoencoder"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string seed;
  std::string threads;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--set", overrides, "override one config key, key=value (repeatable)");
  app.add_option("--seed", seed, "override the seed key");
  app.add_option("--threads", threads, "override the threads key");

  std::string out;
  std::string positional_a, positional_b;
  std::string category, curves_dir, manifest;

  auto* gen = app.add_subcommand("gen", "render a labeled synthetic corpus");
  gen->add_option("--out,out_dir", out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train the autoencoder on normal training videos");
  train->add_option("manifest", positional_a, "corpus manifest.csv")->required();
  train->add_option("--out", out, "checkpoint path")->required();

  auto* score = app.add_subcommand("score", "write one regularity curve CSV per video");
  score->add_option("checkpoint", positional_a, "trained checkpoint")->required();
  score->add_option("manifest", positional_b, "corpus manifest.csv")->required();
  score->add_option("--out", out, "output directory")->required();

  auto* plot = app.add_subcommand("plot", "render a regularity curve as SVG");
  plot->add_option("curve", positional_a, "curve CSV")->required();
  plot->add_option("--out", out, "SVG path")->required();
  plot->add_option("--category", category, "bug category whose threshold to use");

  auto* cluster = app.add_subcommand("cluster", "cluster regularity curves and label the clusters");
  cluster->add_option("curves", positional_a, "directory of curve CSVs")->required();
  cluster->add_option("manifest", positional_b, "manifest with labels and exemplar rows")->required();
  cluster->add_option("--out", out, "cluster report CSV")->required();

  auto* eval = app.add_subcommand("eval", "summarize a cluster report");
  eval->add_option("report", positional_a, "cluster report CSV")->required();
  eval->add_option("--curves", curves_dir, "curve directory, for detection metrics");
  eval->add_option("--manifest", manifest, "manifest, for detection metrics");
  eval->add_option("--out", out, "summary file");

  auto* demo = app.add_subcommand("demo", "gen, train, score, plot, cluster and eval in one go");
  demo->add_option("--out,workdir", out, "working directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help();
    std::cerr << "ERROR " << gg::kExitBadConfig << ": " << e.what() << "\n";
    return gg::kExitBadConfig;
  }

  try {
    gg::RunConfig config = config_path.empty() ? gg::RunConfig() : gg::RunConfig::from_file(config_path);
    for (const auto& item : overrides) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw gg::ConfigError("--set expects key=value, got '" + item + "'");
      config.set(item.substr(0, eq), item.substr(eq + 1));
    }
    if (!seed.empty()) config.set("seed", seed);
    if (!threads.empty()) config.set("threads", threads);
    config.validate();
    gg::log_config(config, std::cout);

    if (gen->parsed()) {
      gg::cmd_gen(config, out, std::cout);
    } else if (train->parsed()) {
      gg::cmd_train(config, positional_a, out, std::cout);
    } else if (score->parsed()) {
      gg::cmd_score(config, positional_a, positional_b, out, std::cout);
    } else if (plot->parsed()) {
      gg::cmd_plot(config, positional_a, out, category, std::cout);
    } else if (cluster->parsed()) {
      gg::cmd_cluster(config, positional_a, positional_b, out, std::cout);
    } else if (eval->parsed()) {
      if (curves_dir.empty() != manifest.empty()) {
        throw gg::ConfigError("eval needs both --curves and --manifest for detection metrics");
      }
      gg::cmd_eval(config, positional_a, curves_dir, manifest, out, std::cout);
    } else if (demo->parsed()) {
      gg::cmd_demo(config, out, std::cout);
    }
  } catch (const std::exception& e) {
    std::cout.flush();
    const int code = gg::exit_code_for(e);
    std::cerr << "ERROR " << code << ": " << e.what() << "\n";
    return code;
  }
  return gg::kExitOk;
}
