#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "cgmi/pipeline/commands.hpp"

namespace {

using cgmi::pipeline::RunConfig;

void setup_logging() {
  auto logger = spdlog::stderr_logger_st("cgmi");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("CGMI_LOG");
  const std::string level = env ? env : "info";
  if (level == "off") spdlog::set_level(spdlog::level::off);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::set_level(spdlog::level::info);
}

void add_options(CLI::App& app, RunConfig& c, std::string& activation, std::string& noun_weighting,
                 std::string& gender_weighting, int& world_case) {
  app.add_option("--seed", c.seed, "Global seed");
  app.add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "Output directory");

  app.add_option("--lang", c.language, "Language code");
  app.add_option("--genders", c.genders, "Gender inventory labels (default: by language)")->delimiter(',');
  app.add_option("--treebank", c.treebank, "CoNLL-U treebank (.conllu or .conllu.gz)");
  app.add_option("--lexicon", c.lexicon, "Inanimate noun lexicon, one lemma per line");
  app.add_option("--corpus", c.corpus, "Lemma stream, one sentence per line");
  app.add_option("--graph", c.graph, "Relation graph TSV");
  app.add_option("--similarity", c.similarity, "Word similarity TSV");
  app.add_option("--pairs", c.pairs, "Noun-adjective pairs TSV");
  app.add_option("--vectors", c.vectors, "Noun vectors (text format)");
  app.add_option("--adjective-vectors", c.adjective_vectors, "Adjective vectors (default: --vectors)");
  app.add_option("--checkpoint", c.checkpoint, "Classifier checkpoint JSON");
  app.add_option("--results", c.results, "Result JSON files for report")->delimiter(',');
  app.add_option("--representation", c.representation, "Representation name used in outputs");

  app.add_option("--dim", c.dim, "Embedding dimension");
  app.add_option("--window", c.sgns.window, "SGNS window");
  app.add_option("--min-count", c.sgns.min_count, "SGNS minimum count");
  app.add_option("--negatives", c.sgns.negatives, "SGNS negative samples");
  app.add_option("--sgns-epochs", c.sgns.epochs, "SGNS epochs");
  app.add_option("--lr-start", c.sgns.lr_start, "SGNS initial learning rate");
  app.add_option("--lr-end", c.sgns.lr_end, "SGNS final learning rate");
  app.add_option("--subsample", c.sgns.subsample, "SGNS subsampling threshold (0 = off)");
  app.add_option("--graph-alpha", c.graphvec.alpha, "Decay of the relatedness series");
  app.add_option("--graph-hops", c.graphvec.hops, "Highest adjacency power in the relatedness series");

  app.add_option("--hidden", c.train.hidden, "Classifier hidden width");
  app.add_option("--activation", activation, "tanh or relu")->check(CLI::IsMember({"tanh", "relu"}));
  app.add_option("--l1", c.train.reg.l1, "L1 coefficient");
  app.add_option("--l2", c.train.reg.l2, "L2 coefficient");
  app.add_option("--max-epochs", c.train.max_epochs, "Training epochs");
  app.add_option("--learning-rate", c.train.learning_rate, "Adam step size");
  app.add_option("--batch-size", c.train.batch_size, "Nouns per Adam step");
  app.add_option("--validation-fraction", c.train.validation_fraction, "Held-out token fraction");
  app.add_option("--patience", c.train.patience, "Early stopping patience (epochs)");
  app.add_option("--noun-weighting", noun_weighting, "Noun weights in the backdoor sum: type or token")
      ->check(CLI::IsMember({"type", "token"}));
  app.add_option("--gender-weighting", gender_weighting, "Gender marginal weights: type or token")
      ->check(CLI::IsMember({"type", "token"}));
  app.add_option("--vocab-cap", c.vocab_cap, "Adjective vocabulary cap (0 = none)");

  app.add_option("--permutations", c.perm.permutations, "Permutations per fold");
  app.add_option("--folds", c.perm.folds, "Cross-validation folds");
  app.add_option("--subset", c.perm.subset, "Adjectives kept for the permutation test");
  app.add_option("--alpha", c.perm.alpha, "Significance level");
  app.add_flag("--smoothed", c.perm.smoothed, "Use (b+1)/(n+1) p-values");

  app.add_option("--case", world_case, "Synthetic world case (1, 2 or 3)")->check(CLI::Range(1, 3));
  app.add_option("--nouns", c.world.nouns, "Synthetic noun count");
  app.add_option("--adjectives", c.world.adjectives, "Synthetic adjective count");
  app.add_option("--world-genders", c.world.genders, "Synthetic gender count");
  app.add_option("--noun-dim", c.world.noun_dim, "Synthetic noun meaning dim");
  app.add_option("--adjective-dim", c.world.adjective_dim, "Synthetic adjective vector dim");
  app.add_option("--teacher-hidden", c.world.hidden, "Synthetic teacher hidden width");
  app.add_option("--tokens-per-noun", c.world.tokens_per_noun, "Synthetic adjective tokens per noun");
  app.add_option("--target-mi-do", c.world.target_mi_do, "Synthetic target MI_do (bits)");
  app.add_option("--gender-sharpness", c.world.gender_sharpness, "Synthetic p(g|n) inverse temperature");
  app.add_option("--output-scale", c.world.output_scale, "Synthetic teacher output scale");
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Causal gender/adjective mutual information pipeline"};
  app.set_version_flag("--version", CGMI_VERSION);
  app.set_config("--config", "", "Key/value config file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig c;
  std::string activation = "tanh", noun_weighting = "type", gender_weighting = "token";
  int world_case = 3;
  add_options(app, c, activation, noun_weighting, gender_weighting, world_case);

  const std::map<std::string, std::string> commands = {
      {"extract", "Extract noun-adjective pairs and lemma streams from a treebank"},
      {"embed", "Train SGNS vectors on a lemma stream"},
      {"graphvec", "Build graph vectors from a relation graph"},
      {"evalsim", "Spearman correlation of vectors with similarity judgements"},
      {"fit", "Train the adjective classifier"},
      {"estimate", "Plug-in MI, model MI and MI_do"},
      {"permtest", "Permutation test on MI_do"},
      {"synth", "Generate a synthetic world with exact ground truth"},
      {"report", "Render result files as a table"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    c.train.activation = cgmi::model::parse_activation(activation);
    c.noun_weighting = cgmi::model::parse_noun_weighting(noun_weighting);
    c.gender_weighting = cgmi::model::parse_noun_weighting(gender_weighting);
    c.world.world_case = static_cast<cgmi::synth::WorldCase>(world_case);
    spdlog::info("{}: seed {} config {}", command, c.seed, cgmi::pipeline::config_hash(c));
    spdlog::debug("config {}", cgmi::pipeline::to_json(c).dump());

    namespace p = cgmi::pipeline;
    if (command == "extract") {
      const auto j = p::cmd_extract(c);
      spdlog::info("{} pair tokens over {} noun types", j["pair_tokens"].get<std::uint64_t>(),
                   j["noun_types"].get<std::size_t>());
    } else if (command == "embed") {
      const auto j = p::cmd_embed(c);
      spdlog::info("{} vectors of dim {}", j["vocab_size"].get<std::size_t>(), j["dim"].get<std::size_t>());
    } else if (command == "graphvec") {
      const auto j = p::cmd_graphvec(c);
      spdlog::info("{} nodes, dim {}", j["nodes"].get<std::size_t>(), j["dim"].get<std::size_t>());
    } else if (command == "evalsim") {
      const auto j = p::cmd_evalsim(c);
      spdlog::info("rho {:.4f}, coverage {:.1f}%", j["rho"].get<double>(), j["coverage_percent"].get<double>());
    } else if (command == "fit") {
      const auto j = p::cmd_fit(c);
      spdlog::info("trained {} epochs (best {})", j["epochs_run"].get<std::size_t>(), j["best_epoch"].get<std::size_t>());
    } else if (command == "estimate") {
      const auto j = p::cmd_estimate(c);
      spdlog::info("plugin_mi {:.6g}  model_mi {:.6g}  mi_do {:.6g}", j["plugin_mi"].get<double>(),
                   j["model_mi"].get<double>(), j["mi_do"].get<double>());
    } else if (command == "permtest") {
      const auto j = p::cmd_permtest(c);
      spdlog::info("p = {:.4g}, mean difference {:.4g}", j["p_value"].get<double>(),
                   j["mean_difference"].get<double>());
    } else if (command == "synth") {
      const auto j = p::cmd_synth(c);
      spdlog::info("realized MI {:.6g}, MI_do {:.6g}", j["realized"]["mi"].get<double>(),
                   j["realized"]["mi_do"].get<double>());
    } else if (command == "report") {
      std::cout << p::cmd_report(c);
    }
  } catch (const cgmi::ConfigError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
