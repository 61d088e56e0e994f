#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cgmi/core/error.hpp"
#include "cgmi/core/random.hpp"
#include "cgmi/embeddings/graph_vectors.hpp"
#include "cgmi/embeddings/sgns.hpp"
#include "cgmi/embeddings/similarity.hpp"
#include "cgmi/estimators/causal.hpp"
#include "cgmi/estimators/information.hpp"
#include "cgmi/model/checkpoint.hpp"
#include "cgmi/model/dataset_ops.hpp"
#include "cgmi/model/trainer.hpp"
#include "cgmi/model/types.hpp"
#include "cgmi/permtest/permtest.hpp"
#include "cgmi/permtest/report.hpp"
#include "cgmi/synth/world.hpp"
#include "cgmi/treebank/conllu.hpp"
#include "cgmi/treebank/extract.hpp"
#include "cgmi/treebank/io.hpp"

#ifndef CGMI_VERSION
#define CGMI_VERSION "0.0.0"
#endif

namespace cgmi::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

/// Everything one invocation needs. Paths left empty are simply unused by
/// commands that do not need them.
struct RunConfig {
  std::string language = "de";
  std::vector<std::string> genders;  ///< empty = language default

  std::string treebank;
  std::string lexicon;
  std::string corpus;  ///< lemma stream for embed
  std::string graph;
  std::string similarity;
  std::string pairs;
  std::string vectors;            ///< noun vectors (or the vectors under evaluation)
  std::string adjective_vectors;  ///< empty = same file as `vectors`
  std::string checkpoint;
  std::vector<std::string> results;  ///< permtest JSON files for report
  std::string out = ".";
  std::string representation = "sgns";

  std::size_t dim = 0;  ///< embedding dim; 0 = 200 for embed and unchecked elsewhere
  embed::SgnsConfig sgns;
  embed::GraphVectorConfig graphvec;

  model::TrainConfig train;
  model::NounWeighting noun_weighting = model::NounWeighting::kType;
  model::NounWeighting gender_weighting = model::NounWeighting::kToken;
  std::size_t vocab_cap = 10000;

  permtest::PermTestConfig perm;
  synth::WorldConfig world;

  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

inline json to_json(const RunConfig& c) {
  return {
      {"language", c.language},
      {"genders", c.genders},
      {"treebank", c.treebank},
      {"lexicon", c.lexicon},
      {"corpus", c.corpus},
      {"graph", c.graph},
      {"similarity", c.similarity},
      {"pairs", c.pairs},
      {"vectors", c.vectors},
      {"adjective_vectors", c.adjective_vectors},
      {"checkpoint", c.checkpoint},
      {"results", c.results},
      {"representation", c.representation},
      {"dim", c.dim},
      {"sgns",
       {{"window", c.sgns.window},
        {"min_count", c.sgns.min_count},
        {"negatives", c.sgns.negatives},
        {"epochs", c.sgns.epochs},
        {"lr_start", c.sgns.lr_start},
        {"lr_end", c.sgns.lr_end},
        {"subsample", c.sgns.subsample}}},
      {"graphvec", {{"alpha", c.graphvec.alpha}, {"hops", c.graphvec.hops}}},
      {"train",
       {{"hidden", c.train.hidden},
        {"activation", model::to_string(c.train.activation)},
        {"l1", c.train.reg.l1},
        {"l2", c.train.reg.l2},
        {"max_epochs", c.train.max_epochs},
        {"learning_rate", c.train.learning_rate},
        {"batch_size", c.train.batch_size},
        {"validation_fraction", c.train.validation_fraction},
        {"patience", c.train.patience}}},
      {"noun_weighting", model::to_string(c.noun_weighting)},
      {"gender_weighting", model::to_string(c.gender_weighting)},
      {"vocab_cap", c.vocab_cap},
      {"permtest",
       {{"permutations", c.perm.permutations},
        {"folds", c.perm.folds},
        {"subset", c.perm.subset},
        {"alpha", c.perm.alpha},
        {"smoothed", c.perm.smoothed}}},
      {"synth",
       {{"case", static_cast<int>(c.world.world_case)},
        {"nouns", c.world.nouns},
        {"adjectives", c.world.adjectives},
        {"genders", c.world.genders},
        {"noun_dim", c.world.noun_dim},
        {"adjective_dim", c.world.adjective_dim},
        {"hidden", c.world.hidden},
        {"tokens_per_noun", c.world.tokens_per_noun},
        {"target_mi_do", c.world.target_mi_do},
        {"gender_sharpness", c.world.gender_sharpness},
        {"output_scale", c.world.output_scale}}},
      {"seed", c.seed},
  };
}

/// Hash of the canonical config dump. Thread count and output directory are
/// left out: neither changes results.
inline std::string config_hash(const RunConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(c).dump())));
  return buf;
}

inline json provenance(const std::string& command, const RunConfig& c) {
  return {{"command", command}, {"seed", c.seed}, {"config_hash", config_hash(c)}, {"version", CGMI_VERSION}};
}

inline treebank::GenderInventory inventory_of(const RunConfig& c) {
  treebank::GenderInventory inv =
      c.genders.empty() ? treebank::GenderInventory::for_language(c.language)
                        : treebank::GenderInventory{c.language, c.genders};
  inv.validate();
  return inv;
}

namespace detail {

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string("missing required option ") + flag);
}

inline void require_file(const std::string& path, const char* flag) {
  require(path, flag);
  if (!fs::is_regular_file(path)) throw ConfigError(std::string(flag) + ": no such file '" + path + "'");
}

inline fs::path out_path(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.out);
  return fs::path(c.out) / name;
}

inline void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << content;
  if (!f.flush()) throw Error("write failed for '" + path.string() + "'");
}

inline void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

template <class F>
auto with_input(const std::string& path, F&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return fn(in);
}

inline embed::VectorTable load_vectors(const std::string& path, const char* flag) {
  require_file(path, flag);
  return with_input(path, [](std::istream& in) { return embed::read_vectors(in); });
}

inline void check_dim(std::size_t expected, std::size_t actual, const std::string& what) {
  if (expected != 0 && expected != actual) {
    throw ConfigError(what + " dimension mismatch: vectors have dim " + std::to_string(actual) +
                      ", config expects dim " + std::to_string(expected));
  }
}

struct Inputs {
  treebank::PairCorpus pairs;
  embed::VectorTable nouns;
  embed::VectorTable adjectives;
};

inline Inputs load_inputs(const RunConfig& c) {
  require_file(c.pairs, "--pairs");
  Inputs in;
  in.pairs = with_input(c.pairs, [](std::istream& s) { return treebank::read_pairs_tsv(s); });
  in.nouns = load_vectors(c.vectors, "--vectors");
  in.adjectives = c.adjective_vectors.empty() ? in.nouns : load_vectors(c.adjective_vectors, "--adjective-vectors");
  check_dim(c.dim, in.nouns.dim(), "noun");
  return in;
}

/// The pair corpus restricted to what the dataset kept, for the plug-in estimate.
inline treebank::PairCorpus dataset_pairs(const model::Dataset& data, const model::AdjectiveVocab& vocab) {
  treebank::PairCorpus pc;
  for (const auto& e : data.entries) {
    pc.noun_gender[e.noun.lemma] = data.genders[e.noun.gender];
    for (const auto& a : e.adjectives) pc.add(e.noun.lemma, vocab[a.adjective].lemma, a.count);
  }
  return pc;
}

inline json dataset_diagnostics(const model::Dataset& data, const model::DatasetDiagnostics& d) {
  return {{"nouns", data.size()},
          {"nouns_without_vector", d.nouns_without_vector},
          {"nouns_gender_outside_inventory", d.nouns_gender_outside_inventory},
          {"adjectives_without_vector", d.adjectives_without_vector},
          {"tokens_outside_vocab", d.tokens_outside_vocab},
          {"nouns_without_tokens", d.nouns_without_tokens}};
}

inline model::TrainConfig train_config(const RunConfig& c) {
  model::TrainConfig tc = c.train;
  tc.seed = derive_seed(c.seed, "init");
  return tc;
}

}  // namespace detail

// ---- extract ---------------------------------------------------------------

inline json cmd_extract(const RunConfig& c) {
  detail::require_file(c.lexicon, "--lexicon");
  detail::require_file(c.treebank, "--treebank");
  const auto inventory = inventory_of(c);
  const auto lexicon = detail::with_input(c.lexicon, [](std::istream& in) { return treebank::InanimateLexicon::read(in); });
  const std::string text = treebank::read_text_file(c.treebank);
  const auto parsed = treebank::parse_conllu(text);
  const auto result = treebank::extract_pairs(parsed.sentences, lexicon, inventory);

  std::ostringstream pairs;
  treebank::write_pairs_tsv(pairs, result.corpus);
  detail::write_file(detail::out_path(c, "pairs.tsv"), pairs.str());

  std::ostringstream stripped, full;
  treebank::write_lemma_stream(stripped, treebank::strip_adjectives(parsed.sentences));
  for (const auto& s : parsed.sentences) treebank::write_lemma_stream(full, {treebank::lemma_line(s, true)});
  detail::write_file(detail::out_path(c, "lemmas.txt"), stripped.str());
  detail::write_file(detail::out_path(c, "lemmas_with_adjectives.txt"), full.str());

  const auto stats = treebank::corpus_stats(result.corpus);
  const auto& d = result.diagnostics;
  json j = {
      {"language", c.language},
      {"sentences", parsed.sentences.size()},
      {"skipped_sentences", parsed.skipped_sentences},
      {"noun_types", stats.noun_types},
      {"adjective_types", stats.adjective_types},
      {"pair_types", stats.pair_types},
      {"pair_tokens", stats.pair_tokens},
      {"diagnostics",
       {{"amod_pairs", d.amod_pairs},
        {"dropped_not_inanimate", d.dropped_not_inanimate},
        {"dropped_no_gender", d.dropped_no_gender},
        {"dropped_gender_outside_inventory", d.dropped_gender_outside_inventory},
        {"ambiguous_gender_observations", d.ambiguous_gender_observations}}},
      {"warnings", parsed.warnings},
      {"provenance", provenance("extract", c)},
  };
  detail::write_json(detail::out_path(c, "stats.json"), j);
  return j;
}

// ---- embed / graphvec / evalsim --------------------------------------------

inline json cmd_embed(const RunConfig& c) {
  detail::require_file(c.corpus, "--corpus");
  const auto stream = detail::with_input(c.corpus, [](std::istream& in) { return treebank::read_lemma_stream(in); });
  embed::SgnsConfig sc = c.sgns;
  sc.dim = c.dim == 0 ? 200 : c.dim;
  sc.seed = derive_seed(c.seed, "embedding");
  sc.threads = c.threads;
  embed::SgnsReport report;
  const auto table = embed::train_sgns(stream, sc, &report);
  if (table.size() == 0) throw ConfigError("embedding vocabulary is empty (lower --min-count?)");
  std::ostringstream os;
  embed::write_vectors(os, table);
  detail::write_file(detail::out_path(c, "vectors.txt"), os.str());
  json j = {{"source", "sgns"},
            {"dim", table.dim()},
            {"vocab_size", report.vocab_size},
            {"training_words", report.training_words},
            {"epoch_loss", report.epoch_loss},
            {"sgns_hash", sc.hash()},
            {"provenance", provenance("embed", c)}};
  detail::write_json(detail::out_path(c, "vectors.json"), j);
  return j;
}

inline json cmd_graphvec(const RunConfig& c) {
  detail::require_file(c.graph, "--graph");
  const auto graph = detail::with_input(c.graph, [](std::istream& in) { return embed::RelationGraph::read_tsv(in); });
  if (graph.nodes().empty()) throw ConfigError("relation graph has no nodes");
  const std::size_t dim = c.dim == 0 ? std::min<std::size_t>(200, graph.nodes().size()) : c.dim;
  const auto table = embed::build_graph_vectors(graph, dim, c.graphvec);
  std::ostringstream os;
  embed::write_vectors(os, table);
  detail::write_file(detail::out_path(c, "graph_vectors.txt"), os.str());
  json j = {{"source", "wordnet"},
            {"dim", table.dim()},
            {"nodes", table.size()},
            {"isolated_nodes", table.metadata.isolated_nodes},
            {"alpha", c.graphvec.alpha},
            {"hops", c.graphvec.hops},
            {"provenance", provenance("graphvec", c)}};
  detail::write_json(detail::out_path(c, "graph_vectors.json"), j);
  return j;
}

inline json cmd_evalsim(const RunConfig& c) {
  const auto table = detail::load_vectors(c.vectors, "--vectors");
  detail::require_file(c.similarity, "--similarity");
  const auto pairs = detail::with_input(c.similarity, [](std::istream& in) { return embed::read_similarity_tsv(in); });
  const auto r = embed::evaluate_similarity(table, pairs);
  json j = {{"language", c.language},
            {"representation", c.representation},
            {"rho", r.rho},
            {"coverage_percent", 100.0 * r.coverage},
            {"pairs_kept", r.kept},
            {"pairs_total", r.total},
            {"provenance", provenance("evalsim", c)}};
  detail::write_json(detail::out_path(c, "similarity.json"), j);
  return j;
}

// ---- fit / estimate / permtest ---------------------------------------------

struct Prepared {
  model::Dataset data;
  model::AdjectiveVocab vocab;
  json diagnostics;
};

inline Prepared prepare_dataset(const RunConfig& c, const detail::Inputs& in) {
  const auto inventory = inventory_of(c);
  model::DatasetDiagnostics diag;
  Prepared p;
  p.vocab = model::make_vocab(in.pairs, inventory, in.nouns, in.adjectives, c.vocab_cap, &diag);
  if (p.vocab.size() == 0) throw ConfigError("adjective vocabulary is empty");
  p.data = model::build_dataset(in.pairs, inventory, in.nouns, p.vocab, &diag);
  if (p.data.empty()) throw ConfigError("no noun has both a vector and an in-vocabulary adjective");
  p.diagnostics = detail::dataset_diagnostics(p.data, diag);
  return p;
}

inline model::Checkpoint fit_checkpoint(const RunConfig& c, const Prepared& p, model::TrainReport* report = nullptr) {
  model::Checkpoint ck;
  ck.params = model::train_classifier(p.data, p.vocab, detail::train_config(c), report);
  ck.genders = p.data.genders;
  ck.vocab = p.vocab.lemmas();
  ck.vocab_hash = p.vocab.hash();
  return ck;
}

inline json cmd_fit(const RunConfig& c) {
  const auto in = detail::load_inputs(c);
  const auto p = prepare_dataset(c, in);
  model::TrainReport report;
  auto ck = fit_checkpoint(c, p, &report);
  ck.metadata = {{"language", c.language},
                 {"representation", c.representation},
                 {"epochs_run", report.epochs_run},
                 {"best_epoch", report.best_epoch},
                 {"early_stopped", report.early_stopped},
                 {"validation_nll", report.validation_nll},
                 {"dataset", p.diagnostics},
                 {"provenance", provenance("fit", c)}};
  const json j = model::to_json(ck);
  detail::write_json(detail::out_path(c, "model.json"), j);
  return ck.metadata;
}

inline model::Checkpoint load_checkpoint(const std::string& path) {
  detail::require_file(path, "--checkpoint");
  return detail::with_input(path, [&](std::istream& in) {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("checkpoint '" + path + "' is not JSON: " + e.what());
    }
    return model::checkpoint_from_json(j);
  });
}

/// Plug-in MI on the kept pairs, model-based MI on the nouns' true genders,
/// and MI_do by the backdoor adjustment, all over the dataset's nouns.
inline json cmd_estimate(const RunConfig& c) {
  const auto in = detail::load_inputs(c);
  Prepared p;
  model::Checkpoint ck;
  if (c.checkpoint.empty()) {
    p = prepare_dataset(c, in);
    ck = fit_checkpoint(c, p);
  } else {
    ck = load_checkpoint(c.checkpoint);
    if (ck.params.noun_dim != in.nouns.dim()) {
      throw ConfigError("noun dimension mismatch: vectors have dim " + std::to_string(in.nouns.dim()) +
                        ", checkpoint expects dim " + std::to_string(ck.params.noun_dim));
    }
    if (ck.params.adjective_dim != in.adjectives.dim()) {
      throw ConfigError("adjective dimension mismatch: vectors have dim " + std::to_string(in.adjectives.dim()) +
                        ", checkpoint expects dim " + std::to_string(ck.params.adjective_dim));
    }
    const auto inventory = inventory_of(c);
    if (ck.genders != inventory.labels) throw ConfigError("checkpoint gender inventory differs from config");
    for (const auto& lemma : ck.vocab) {
      if (!in.adjectives.contains(lemma)) throw ConfigError("checkpoint adjective '" + lemma + "' has no vector");
    }
    p.vocab = model::vocab_from_lemmas(ck.vocab, in.adjectives);
    if (p.vocab.hash() != ck.vocab_hash) throw ConfigError("checkpoint vocabulary hash mismatch");
    model::DatasetDiagnostics diag;
    p.data = model::build_dataset(in.pairs, inventory, in.nouns, p.vocab, &diag);
    if (p.data.empty()) throw ConfigError("no noun has both a vector and an in-vocabulary adjective");
    p.diagnostics = detail::dataset_diagnostics(p.data, diag);
  }
  const model::Classifier clf(ck.params, p.vocab);
  const auto nouns = estimate::noun_points(p.data, c.noun_weighting);
  const auto pi = model::empirical_gender_marginal(p.data, c.gender_weighting);
  const auto fam = estimate::intervention_family(clf, nouns, pi.probs);
  json j = {
      {"language", c.language},
      {"representation", c.representation},
      {"plugin_mi", estimate::plugin_mi(detail::dataset_pairs(p.data, p.vocab))},
      {"model_mi", estimate::model_mi(clf, nouns)},
      {"mi_do", estimate::mi_do(fam)},
      {"noun_weighting", model::to_string(c.noun_weighting)},
      {"gender_weighting", model::to_string(c.gender_weighting)},
      {"gender_marginal", pi.probs},
      {"log_base", 2},
      {"seeds", {{"global", c.seed}, {"init", detail::train_config(c).seed}}},
      {"checkpoint", c.checkpoint.empty() ? "fitted" : "loaded"},
      {"dataset", p.diagnostics},
      {"provenance", provenance("estimate", c)},
  };
  detail::write_json(detail::out_path(c, "estimates.json"), j);
  return j;
}

inline json to_json(const permtest::PermTestResult& r) {
  return {{"permutations", r.config.permutations},
          {"folds", r.config.folds},
          {"subset", r.config.subset},
          {"alpha", r.config.alpha},
          {"smoothed", r.config.smoothed},
          {"observed_mi_do", r.observed_mi_do},
          {"observed_model_mi", r.observed_model_mi},
          {"permuted_mi_do", r.permuted_mi_do},
          {"exceed_count", r.exceed_count},
          {"p_value", r.p_value},
          {"mean_difference", r.mean_difference},
          {"reject", r.reject},
          {"retried_runs", r.retried_runs}};
}

inline json cmd_permtest(const RunConfig& c) {
  const auto in = detail::load_inputs(c);
  const auto p = prepare_dataset(c, in);
  permtest::PermTestConfig pc = c.perm;
  pc.seed = derive_seed(c.seed, "permtest");
  pc.threads = c.threads;
  pc.noun_weighting = c.noun_weighting;
  pc.gender_weighting = c.gender_weighting;
  pc.subset = std::min(pc.subset, p.vocab.size());
  const auto r = permtest::run_permutation_test(p.data, p.vocab, c.train, pc);
  json j = to_json(r);
  j["language"] = c.language;
  j["representation"] = c.representation;
  j["noun_weighting"] = model::to_string(c.noun_weighting);
  j["dataset"] = p.diagnostics;
  j["provenance"] = provenance("permtest", c);
  detail::write_json(detail::out_path(c, "permtest.json"), j);
  detail::write_file(detail::out_path(c, "permtest.csv"),
                     permtest::summarize_csv({permtest::make_row(r, c.language, c.representation)}));
  return j;
}

// ---- synth -----------------------------------------------------------------

inline json cmd_synth(const RunConfig& c) {
  synth::WorldConfig wc = c.world;
  wc.seed = derive_seed(c.seed, "world");
  const auto world = synth::make_world(wc);

  std::ostringstream tb;
  synth::write_treebank(world, tb);
  detail::write_file(detail::out_path(c, "treebank.conllu"), tb.str());

  std::ostringstream lex;
  for (const auto& n : world.noun_lemmas) lex << n << '\n';
  detail::write_file(detail::out_path(c, "lexicon.txt"), lex.str());

  embed::VectorTable nv(wc.noun_dim), av(wc.adjective_dim);
  for (std::size_t n = 0; n < world.noun_lemmas.size(); ++n) nv.add(world.noun_lemmas[n], world.noun_meanings[n]);
  for (std::size_t a = 0; a < world.adjective_lemmas.size(); ++a) {
    av.add(world.adjective_lemmas[a], world.adjective_vectors[a]);
  }
  std::ostringstream nos, aos;
  embed::write_vectors(nos, nv);
  embed::write_vectors(aos, av);
  detail::write_file(detail::out_path(c, "noun_vectors.txt"), nos.str());
  detail::write_file(detail::out_path(c, "adjective_vectors.txt"), aos.str());

  model::Checkpoint teacher;
  teacher.params = world.teacher;
  teacher.genders = world.gender_labels;
  teacher.vocab = world.adjective_lemmas;
  teacher.vocab_hash = model::vocab_from_lemmas(world.adjective_lemmas, av).hash();
  teacher.metadata = {{"teacher", true}, {"provenance", provenance("synth", c)}};
  detail::write_json(detail::out_path(c, "teacher.json"), model::to_json(teacher));

  const auto population = synth::brute_force_truth(world, false);
  const auto realized = synth::brute_force_truth(world, true);
  std::vector<std::string> realized_genders;
  for (std::size_t g : world.realized_gender) realized_genders.push_back(world.gender_labels[g]);
  json j = {
      {"case", static_cast<int>(wc.world_case)},
      {"language", "synthetic"},
      {"genders", world.gender_labels},
      {"nouns", world.noun_lemmas},
      {"realized_genders", realized_genders},
      {"gender_effect", world.gender_effect},
      {"tokens_per_noun", wc.tokens_per_noun},
      {"population", {{"mi", population.mi}, {"mi_do", population.mi_do}, {"p_gender", population.p_gender}}},
      {"realized", {{"mi", realized.mi}, {"mi_do", realized.mi_do}, {"p_gender", realized.p_gender}}},
      {"log_base", 2},
      {"provenance", provenance("synth", c)},
  };
  detail::write_json(detail::out_path(c, "truth.json"), j);
  return j;
}

// ---- report ----------------------------------------------------------------

/// Accepts permtest result files and bare row records
/// {language, representation, model_mi, mi_do, mean_difference, p_value | significant}.
inline permtest::ReportRow row_from_json(const json& j) {
  try {
    permtest::ReportRow row;
    row.language = j.at("language").get<std::string>();
    row.representation = j.at("representation").get<std::string>();
    const double alpha = j.value("alpha", 0.05);
    if (j.contains("observed_mi_do")) {
      permtest::PermTestResult r;
      r.config.alpha = alpha;
      r.observed_mi_do = j.at("observed_mi_do").get<std::vector<double>>();
      r.observed_model_mi = j.at("observed_model_mi").get<std::vector<double>>();
      r.mean_difference = j.at("mean_difference").get<double>();
      r.p_value = j.at("p_value").get<double>();
      return permtest::make_row(r, row.language, row.representation);
    }
    row.model_mi = j.at("model_mi").get<double>();
    row.mi_do = j.at("mi_do").get<double>();
    row.mean_difference = j.at("mean_difference").get<double>();
    if (j.contains("p_value")) {
      row.p_value = j.at("p_value").get<double>();
      row.significant = row.p_value < alpha;
    } else {
      row.significant = j.at("significant").get<bool>();
    }
    return row;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed result record: ") + e.what());
  }
}

inline std::string cmd_report(const RunConfig& c) {
  if (c.results.empty()) throw ConfigError("missing required option --results");
  std::vector<permtest::ReportRow> rows;
  for (const auto& path : c.results) {
    detail::require_file(path, "--results");
    const json j = detail::with_input(path, [&](std::istream& in) {
      json parsed;
      try {
        in >> parsed;
      } catch (const json::exception& e) {
        throw ConfigError("result file '" + path + "' is not JSON: " + e.what());
      }
      return parsed;
    });
    if (j.is_array()) {
      for (const auto& item : j) rows.push_back(row_from_json(item));
    } else {
      rows.push_back(row_from_json(j));
    }
  }
  const std::string table = permtest::summarize(rows);
  detail::write_file(detail::out_path(c, "report.txt"), table);
  detail::write_file(detail::out_path(c, "report.csv"), permtest::summarize_csv(rows));
  return table;
}

}  // namespace cgmi::pipeline
