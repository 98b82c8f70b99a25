// Copyright 2026 The momsnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "moms/canonical.hpp"
#include "moms/descriptors.hpp"
#include "moms/error.hpp"
#include "moms/eval.hpp"
#include "moms/hetero.hpp"
#include "moms/model.hpp"
#include "moms/motif.hpp"
#include "moms/smiles.hpp"
#include "moms/spectra.hpp"

namespace {

using namespace moms;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

// Usage errors that are not library errors (missing files and the like).
class UsageError : public Error {
 public:
  using Error::Error;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  return out;
}

std::string slurp(const std::string& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs body, reporting format errors as path:line: message.
template <typename F>
auto reading(const std::string& path, F&& body) {
  try {
    return body();
  } catch (const FormatError& e) {
    std::string what = e.what();
    auto colon = what.find(": ");
    throw UsageError(path + ":" + std::to_string(e.line()) + ": " +
                     (colon == std::string::npos ? what : what.substr(colon + 2)));
  }
}

std::vector<chem::Molecule> load_corpus(const std::string& path) {
  auto in = open_in(path);
  auto corpus = reading(path, [&] { return chem::read_corpus(in); });
  for (auto& m : corpus) m = chem::canonicalize(m);
  return corpus;
}

motif::MotifVocabulary load_vocab(const std::string& path) {
  auto in = open_in(path);
  return reading(path, [&] { return motif::read_vocabulary(in); });
}

std::vector<spectra::PeakList> load_msp(const std::string& path) {
  auto in = open_in(path);
  return reading(path, [&] { return spectra::parse_msp(in); });
}

std::string record_id(const spectra::PeakList& p) { return p.compound_id.empty() ? p.name : p.compound_id; }

int cmd_mine(const std::string& corpus_path, std::size_t k, const std::string& out_path) {
  auto corpus = load_corpus(corpus_path);
  if (corpus.empty()) throw EmptyCorpus(corpus_path + " contains no molecules");
  auto vocab = motif::mine_vocabulary(corpus, k);
  auto out = open_out(out_path);
  motif::write_vocabulary(out, vocab);
  std::printf("%zu motifs mined from %zu molecules\n", vocab.size(), corpus.size());
  std::printf("%-8s %10s\n", "rank", "frequency");
  for (int decile = 0; decile <= 10 && !vocab.entries().empty(); ++decile) {
    std::size_t r = std::min(vocab.size() - 1, decile * (vocab.size() - 1) / 10);
    std::printf("%-8zu %10zu\n", r + 1, vocab[r].frequency);
  }
  return 0;
}

int cmd_build_graph(const std::string& corpus_path, const std::string& vocab_path, const std::string& out_dir) {
  auto vocab = load_vocab(vocab_path);
  auto corpus = load_corpus(corpus_path);
  if (corpus.empty()) throw EmptyCorpus(corpus_path + " contains no molecules");
  auto g = hetero::build_graph(corpus, vocab);
  fs::create_directories(out_dir);
  {
    auto out = open_out((fs::path(out_dir) / "edges.tsv").string());
    hetero::write_edge_list(out, g);
  }
  std::string manifest = hetero::graph_manifest_json(g, vocab_path);
  hetero::validate_graph_manifest(manifest);
  open_out((fs::path(out_dir) / "manifest.json").string()) << manifest;
  std::printf("nodes %zu (molecules %zu, motifs %zu), edges %zu\n", g.node_count(), g.n_molecules, g.n_motifs,
              g.edges().size());
  return 0;
}

const std::set<std::string> kPathKeys = {"corpus", "spectra", "vocab", "checkpoint", "output_dir"};

struct RunConfig {
  std::string corpus, spectra, vocab, checkpoint, output_dir;
  model::MoMSConfig model;
};

RunConfig load_run_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(path + ": config must be a JSON object");
  RunConfig rc;
  nlohmann::json rest = nlohmann::json::object();
  for (const auto& [key, v] : j.items()) {
    if (!kPathKeys.count(key)) {
      rest[key] = v;
      continue;
    }
    if (!v.is_string()) throw ConfigError(path + ": " + key + " must be a string");
    std::string value = v.get<std::string>();
    // Relative paths are relative to the config file.
    fs::path p(value);
    if (p.is_relative()) value = (fs::path(path).parent_path() / p).lexically_normal().string();
    if (key == "corpus") rc.corpus = value;
    else if (key == "spectra") rc.spectra = value;
    else if (key == "vocab") rc.vocab = value;
    else if (key == "checkpoint") rc.checkpoint = value;
    else rc.output_dir = value;
  }
  for (const char* required : {"corpus", "spectra", "output_dir"}) {
    if (!j.contains(required)) throw ConfigError(path + ": missing required key '" + required + "'");
  }
  try {
    rc.model = model::config_from_json(rest.dump());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (rc.checkpoint.empty()) rc.checkpoint = (fs::path(rc.output_dir) / "checkpoint").string();
  return rc;
}

int cmd_train(const std::string& config_path, const std::string& variant) {
  RunConfig rc = load_run_config(config_path);
  if (!variant.empty()) rc.model.variant = model::variant_from_string(variant);
  auto corpus = load_corpus(rc.corpus);
  if (corpus.empty()) throw EmptyCorpus(rc.corpus + " contains no molecules");
  auto spectra = model::spectra_by_id(load_msp(rc.spectra), rc.model.max_mz);
  fs::create_directories(rc.output_dir);
  auto log = open_out((fs::path(rc.output_dir) / "train_log.jsonl").string());
  auto split = model::scaffold_split(corpus, rc.model.split_fractions, rc.model.seed);
  auto result = model::train(corpus, spectra, rc.model, split, [&](const model::EpochLog& e) {
    log << model::epoch_log_json(e) << '\n';
    log.flush();
  });
  model::save_checkpoint(result.model, rc.checkpoint);
  if (!rc.vocab.empty()) {
    auto out = open_out(rc.vocab);
    motif::write_vocabulary(out, result.model.context.vocab);
  }
  nlohmann::ordered_json sj;
  sj["train"] = split.train;
  sj["valid"] = split.valid;
  sj["test"] = split.test;
  open_out((fs::path(rc.output_dir) / "split.json").string()) << sj.dump(2) << '\n';

  std::printf("variant %s, %zu/%zu/%zu train/valid/test molecules, %zu motifs\n",
              model::to_string(rc.model.variant).c_str(), split.train.size(), split.valid.size(), split.test.size(),
              result.model.context.vocab.size());
  const auto& best = result.log.at(static_cast<std::size_t>(result.best_epoch - 1));
  std::printf("best epoch %d of %zu, validation similarity %.4f\n", result.best_epoch, result.log.size(),
              best.valid_similarity);
  std::vector<chem::Molecule> test;
  for (const auto& m : corpus) {
    if (std::find(split.test.begin(), split.test.end(), m.id) != split.test.end() && spectra.count(m.id)) {
      test.push_back(m);
    }
  }
  if (!test.empty()) {
    std::printf("test similarity %.4f over %zu molecules\n", model::mean_similarity(result.model, test, spectra),
                test.size());
  }
  std::printf("checkpoint written to %s\n", rc.checkpoint.c_str());
  return 0;
}

int cmd_predict(const std::string& checkpoint, const std::string& in_path, const std::string& out_path) {
  model::Model m = model::load_checkpoint(checkpoint);
  std::vector<std::pair<std::string, std::string>> items;
  {
    auto in = open_in(in_path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw FormatError(lineno, in_path + ": expected id<TAB>SMILES");
      items.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
  }
  auto preds = model::predict_batch(m, items);
  std::vector<spectra::PeakList> records;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto& p = preds[i];
    if (!p.spectrum) {
      std::cerr << "momsnet: " << p.id << ": " << p.error << '\n';
      ++failed;
      continue;
    }
    spectra::PeakList pl;
    if (p.spectrum->norm() > 0.0) pl = spectra::to_peak_list(spectra::normalize(*p.spectrum, spectra::Normalization::BasePeak));
    pl.name = p.id;
    pl.compound_id = p.id;
    auto mol = chem::parse_smiles(items[i].second);
    pl.precursor_mz = chem::monoisotopic_mass(mol);
    pl.metadata.emplace_back("SMILES", items[i].second);
    records.push_back(std::move(pl));
  }
  auto out = open_out(out_path);
  spectra::write_msp(out, records);
  std::printf("predicted %zu spectra, %zu failed\n", records.size(), failed);
  return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path, int max_mz, const std::string& out_path) {
  auto preds = load_msp(pred_path);
  auto truth = model::spectra_by_id(load_msp(truth_path), max_mz);
  std::vector<spectra::Spectrum> p, t;
  std::vector<std::string> ids;
  for (const auto& r : preds) {
    auto it = truth.find(record_id(r));
    if (it == truth.end()) throw DataMismatch("no reference spectrum for prediction " + record_id(r));
    ids.push_back(record_id(r));
    p.push_back(spectra::bin_spectrum(r, max_mz));
    t.push_back(it->second);
  }
  auto summary = eval::evaluate_similarity(p, t);
  if (!out_path.empty()) open_out(out_path) << eval::similarity_report_json(ids, summary) << '\n';
  std::printf("pairs %zu\nmean similarity %.6f\nstddev %.6f\n", ids.size(), summary.mean, summary.stddev);
  return 0;
}

int cmd_rank(const std::string& queries_path, const std::string& refs_path, double k, int max_mz,
             std::optional<double> window, const std::string& out_path, const std::string& svg_path) {
  std::vector<eval::Query> queries;
  for (const auto& r : load_msp(queries_path)) {
    queries.push_back({record_id(r), spectra::bin_spectrum(r, max_mz), r.precursor_mz, {}, {}});
  }
  std::vector<eval::Reference> refs;
  for (const auto& r : load_msp(refs_path)) refs.push_back({record_id(r), spectra::bin_spectrum(r, max_mz), r.precursor_mz});
  auto ranks = eval::rank_candidates(eval::make_ranking_task(std::move(queries), std::move(refs), window));
  if (!out_path.empty()) open_out(out_path) << eval::ranking_report_json(ranks, k) << '\n';
  if (!svg_path.empty()) open_out(svg_path) << eval::rank_histogram_svg(ranks);
  std::fputs(eval::ranking_summary(ranks, k).c_str(), stdout);
  return 0;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const DataMismatch*>(&e) || dynamic_cast<const LengthMismatch*>(&e) ||
      dynamic_cast<const MissingTrueMatch*>(&e)) {
    return kExitData;
  }
  if (dynamic_cast<const Error*>(&e)) return kExitConfig;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mass spectrum prediction with molecule-motif graphs"};
  app.require_subcommand(1);

  std::string corpus, out, vocab, config, variant, checkpoint, in, pred, truth, queries, refs, svg;
  std::size_t k = motif::kDefaultVocabularySize;
  int max_mz = spectra::kMaxMz;
  double top_k = 5.0;
  std::optional<double> window;

  auto* mine = app.add_subcommand("mine", "mine a motif vocabulary");
  mine->add_option("--corpus", corpus, "id<TAB>SMILES corpus")->required();
  mine->add_option("--k", k, "vocabulary size")->capture_default_str();
  mine->add_option("--out", out, "vocabulary file")->required();

  auto* graph = app.add_subcommand("build-graph", "build and export the molecule-motif graph");
  graph->add_option("--corpus", corpus, "id<TAB>SMILES corpus")->required();
  graph->add_option("--vocab", vocab, "vocabulary file")->required();
  graph->add_option("--out", out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train a model from a run config");
  train->add_option("--config", config, "JSON run config")->required();
  train->add_option("--model", variant, "override the variant (moms_gcn, moms_gin, gcn_only, gin_only)");

  auto* predict = app.add_subcommand("predict", "predict spectra for molecules");
  predict->add_option("--checkpoint", checkpoint, "checkpoint directory")->required();
  predict->add_option("--in", in, "id<TAB>SMILES input")->required();
  predict->add_option("--out", out, "MSP output")->required();

  auto* evaluate = app.add_subcommand("eval", "cosine similarity of predictions against references");
  evaluate->add_option("--pred", pred, "predicted MSP")->required();
  evaluate->add_option("--truth", truth, "reference MSP")->required();
  evaluate->add_option("--max-mz", max_mz, "number of bins")->capture_default_str();
  evaluate->add_option("--out", out, "JSON report");

  auto* rank = app.add_subcommand("rank", "library-search ranking experiment");
  rank->add_option("--queries", queries, "query MSP (measured spectra)")->required();
  rank->add_option("--refs", refs, "reference MSP (predicted and measured)")->required();
  rank->add_option("--k", top_k, "Top-k percent")->capture_default_str();
  rank->add_option("--max-mz", max_mz, "number of bins")->capture_default_str();
  rank->add_option("--mass-window", window, "keep references within this many Da of the query precursor");
  rank->add_option("--out", out, "JSON report");
  rank->add_option("--svg", svg, "rank histogram SVG");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*mine) return cmd_mine(corpus, k, out);
    if (*graph) return cmd_build_graph(corpus, vocab, out);
    if (*train) return cmd_train(config, variant);
    if (*predict) return cmd_predict(checkpoint, in, out);
    if (*evaluate) return cmd_eval(pred, truth, max_mz, out);
    if (*rank) return cmd_rank(queries, refs, top_k, max_mz, window, out, svg);
  } catch (const std::exception& e) {
    std::cerr << "momsnet: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}
