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

#include "moms/model.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "model_support.hpp"
#include "moms/descriptors.hpp"
#include "moms/error.hpp"
#include "moms/runtime.hpp"

namespace moms::model {
namespace {

using testing::fixture_molecules;
using testing::fixture_spectra;
using testing::parse_all;
using testing::untrained_model;

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MoMSConfig small_config(Variant v = Variant::MomsGcn) {
  MoMSConfig c;
  c.variant = v;
  c.hidden = 16;
  c.vocab_size = 40;
  c.epochs = 3;
  return c;
}

TEST(ScaffoldSplit, SharedScaffoldStaysInTrain) {
  auto corpus = parse_all({"Cc1ccccc1", "Oc1ccccc1", "Nc1ccccc1", "c1ccccc1", "CCc1ccccc1"});
  for (std::size_t i = 0; i < corpus.size(); ++i) corpus[i].id = "m" + std::to_string(i);
  auto split = scaffold_split(corpus, {0.7, 0.2, 0.1}, 3);
  EXPECT_EQ(split.train.size(), 5u);
  EXPECT_TRUE(split.valid.empty());
  EXPECT_TRUE(split.test.empty());
}

TEST(ScaffoldSplit, TenSingletonsSplitSevenTwoOne) {
  auto corpus = parse_all({"c1ccccc1", "c1ccncc1", "C1CCCCC1", "C1CCNCC1", "c1ccoc1", "c1ccsc1", "c1ccc2ccccc2c1",
                           "C1COCCN1", "C1CCCC1", "C1CC1"});
  std::set<std::string> scaffolds;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    corpus[i].id = "m" + std::to_string(i);
    scaffolds.insert(chem::murcko_scaffold(corpus[i]));
  }
  ASSERT_EQ(scaffolds.size(), 10u);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto split = scaffold_split(corpus, {0.7, 0.2, 0.1}, seed);
    EXPECT_EQ(split.train.size(), 7u);
    EXPECT_EQ(split.valid.size(), 2u);
    EXPECT_EQ(split.test.size(), 1u);
  }
}

TEST(ScaffoldSplit, ScaffoldsNeverCrossPartitions) {
  auto corpus = fixture_molecules();
  std::map<std::string, std::string> scaffold_of;
  for (const auto& m : corpus) scaffold_of[m.id] = chem::murcko_scaffold(m);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto split = scaffold_split(corpus, {0.7, 0.2, 0.1}, seed);
    EXPECT_EQ(split.train.size() + split.valid.size() + split.test.size(), corpus.size());
    std::map<std::string, int> part_of;
    int p = 0;
    for (const auto* ids : {&split.train, &split.valid, &split.test}) {
      for (const auto& id : *ids) {
        auto [it, fresh] = part_of.emplace(scaffold_of[id], p);
        EXPECT_EQ(it->second, p) << scaffold_of[id];
      }
      ++p;
    }
  }
  EXPECT_THROW(scaffold_split({}, {0.7, 0.2, 0.1}, 0), EmptyCorpus);
  EXPECT_THROW(scaffold_split(corpus, {0.7, 0.2, 0.2}, 0), ConfigError);
}

TEST(Config, JsonRoundTripAndStrictness) {
  MoMSConfig c;
  c.variant = Variant::GinOnly;
  c.sample_sizes = {7, 3};
  c.learning_rate = 3e-4;
  c.seed = 12345678901234ULL;
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  EXPECT_EQ(config_from_json("{}"), MoMSConfig{});
  EXPECT_EQ(config_from_json(R"({"hidden": 32})").hidden, 32);
  EXPECT_THROW(config_from_json(R"({"hiden": 32})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"hidden": "32"})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"hidden": 0})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"variant": "transformer"})"), ConfigError);
  EXPECT_THROW(config_from_json(R"({"split_fractions": [0.5, 0.5]})"), ConfigError);
  EXPECT_THROW(config_from_json("{"), ConfigError);
  for (Variant v : {Variant::MomsGcn, Variant::MomsGin, Variant::GcnOnly, Variant::GinOnly}) {
    EXPECT_EQ(variant_from_string(to_string(v)), v);
  }
}

TEST(Features, BenzeneAtomRow) {
  auto m = parse_all({"c1ccccc1"})[0];
  auto x = atom_features(m);
  ASSERT_EQ(x.rows(), 6);
  ASSERT_EQ(x.cols(), kAtomFeatures);
  for (int r = 0; r < 6; ++r) {
    EXPECT_EQ(x(r, static_cast<int>(chem::Element::C)), 1.0);
    EXPECT_EQ(x(r, 11 + 2), 1.0);  // degree 2
    EXPECT_EQ(x(r, 19), 1.0);      // aromatic
    EXPECT_EQ(x(r, 20), 1.0);      // ring
    EXPECT_EQ(x(r, 21 + 1), 1.0);  // one hydrogen
    EXPECT_EQ(x.row(r).sum(), 5.0);
  }
}

TEST(Forward, DefaultWidthAndNonnegative) {
  auto corpus = fixture_molecules();
  MoMSConfig cfg;
  cfg.hidden = 32;
  for (Variant v : {Variant::MomsGcn, Variant::MomsGin, Variant::GcnOnly, Variant::GinOnly}) {
    cfg.variant = v;
    Model model = untrained_model(cfg, corpus);
    for (const char* smiles : {"CC(=O)Oc1ccccc1C(=O)O", "c1ccsc1", "ClCCBr"}) {
      auto s = predict(model, chem::parse_smiles(smiles));
      ASSERT_EQ(s.size(), 1000u);
      for (double v : s.bins) EXPECT_GE(v, 0.0);
    }
  }
}

TEST(Forward, ZeroMotifMoleculeHasZeroPrior) {
  auto corpus = fixture_molecules();
  MoMSConfig cfg = small_config();
  Model model = untrained_model(cfg, corpus);
  auto methane = chem::canonicalize(chem::parse_smiles("C"));
  auto view = hetero::attach_query(model.context.graph, methane, model.context.vocab);
  auto f = view.node_features(view.query_node());
  std::vector<int> counts(model.context.vocab.size());
  for (std::size_t v = 0; v < counts.size(); ++v) counts[v] = static_cast<int>(f[v]);
  EXPECT_EQ(std::count(counts.begin(), counts.end(), 0), static_cast<long>(counts.size()));
  auto in = molecule_inputs(methane, counts, model.context.motif_spectra, cfg.max_mz);
  EXPECT_EQ(in.prior.norm(), 0.0);
  auto s = predict(model, methane);
  EXPECT_EQ(s.size(), 1000u);
  for (double v : s.bins) EXPECT_TRUE(std::isfinite(v));
}

TEST(Forward, PriorIsNormalizedWeightedMotifSum) {
  motif::SpectrumMatrix S{2, 3, {1.0f, 0.0f, 0.0f, 0.0f, 3.0f, 4.0f}};
  auto m = parse_all({"CC"})[0];
  auto in = molecule_inputs(m, {2, 1}, S, 3);
  // 2*(1,0,0) + (0,3,4) = (2,3,4)
  const double n = std::sqrt(29.0);
  EXPECT_NEAR(in.prior(0, 0), 2.0 / n, 1e-15);
  EXPECT_NEAR(in.prior(0, 1), 3.0 / n, 1e-15);
  EXPECT_NEAR(in.prior(0, 2), 4.0 / n, 1e-15);
}

TEST(Gradients, ComposedNetworkTinyWidth) {
  for (Variant v : {Variant::MomsGcn, Variant::MomsGin, Variant::GcnOnly, Variant::GinOnly}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      auto r = testing::composed_gradient_error(v, seed);
      EXPECT_LT(r.max_relative_error, 1e-3) << to_string(v) << " seed " << seed << " " << r.worst_parameter;
    }
  }
}

TEST(Predict, InvariantToSmilesRewriting) {
  auto corpus = fixture_molecules();
  for (Variant v : {Variant::MomsGcn, Variant::GinOnly}) {
    Model model = untrained_model(small_config(v), corpus);
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"CCO", "OCC"}, {"Cc1ccccc1", "c1ccc(C)cc1"}, {"CC(=O)Oc1ccccc1C(=O)O", "OC(=O)c1ccccc1OC(C)=O"},
        {"C1CCNCC1", "N1CCCCC1"}};
    for (const auto& [a, b] : pairs) {
      EXPECT_EQ(predict(model, chem::parse_smiles(a)), predict(model, chem::parse_smiles(b))) << a;
    }
  }
}

TEST(Predict, BatchMatchesItemsAndReportsFailures) {
  auto corpus = fixture_molecules();
  Model model = untrained_model(small_config(), corpus);
  EXPECT_TRUE(predict_batch(model, {}).empty());
  auto out = predict_batch(model, {{"a", "CCO"}, {"bad", "C1CC"}, {"c", "c1ccncc1"}});
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0].id, "a");
  EXPECT_EQ(*out[0].spectrum, predict(model, chem::parse_smiles("CCO")));
  EXPECT_FALSE(out[1].spectrum);
  EXPECT_FALSE(out[1].error.empty());
  EXPECT_EQ(*out[2].spectrum, predict(model, chem::parse_smiles("c1ccncc1")));
}

TEST(Train, FirstLossInRangeAndCurveDescends) {
  auto corpus = fixture_molecules();
  auto spectra = fixture_spectra();
  MoMSConfig cfg = small_config();
  cfg.hidden = 32;
  cfg.epochs = 10;
  cfg.patience = 100;
  cfg.restore_best = false;
  Model model = untrained_model(cfg, corpus);
  std::vector<const chem::Molecule*> first(corpus.size() < 32 ? corpus.size() : 32);
  std::vector<MoleculeInputs> inputs;
  nn::Matrix target(static_cast<Eigen::Index>(first.size()), cfg.max_mz);
  hetero::GraphView view(model.context.graph);
  std::vector<int> seeds;
  for (std::size_t i = 0; i < first.size(); ++i) {
    std::vector<int> counts(model.context.vocab.size());
    auto f = model.context.graph.node_features(static_cast<int>(i));
    for (std::size_t v = 0; v < counts.size(); ++v) counts[v] = static_cast<int>(f[v]);
    inputs.push_back(molecule_inputs(corpus[i], counts, model.context.motif_spectra, cfg.max_mz));
    const auto& s = spectra.at(corpus[i].id);
    for (int c = 0; c < cfg.max_mz; ++c) target(static_cast<Eigen::Index>(i), c) = s.bins[c];
    seeds.push_back(static_cast<int>(i));
  }
  std::vector<const MoleculeInputs*> items;
  for (const auto& in : inputs) items.push_back(&in);
  auto sub = hetero::sample_khop(view, seeds, cfg.sample_sizes, 1);
  Batch b = make_batch(items, false, &view, &sub);
  nn::Tape t;
  double first_loss = nn::cosine_distance_mean(model.net->forward(t, b), target).value()(0, 0);
  EXPECT_GE(first_loss, 0.0);
  EXPECT_LE(first_loss, 1.0);

  std::vector<std::string> jsonl;
  auto result = train(corpus, spectra, cfg, [&](const EpochLog& e) { jsonl.push_back(epoch_log_json(e)); });
  ASSERT_EQ(result.log.size(), 10u);
  ASSERT_EQ(jsonl.size(), 10u);
  EXPECT_NE(jsonl[0].find("\"valid_similarity\""), std::string::npos);
  // Least-squares slope of epoch losses.
  double mx = 0, my = 0;
  for (const auto& e : result.log) {
    mx += e.epoch;
    my += e.train_loss;
  }
  mx /= 10;
  my /= 10;
  double num = 0, den = 0;
  for (const auto& e : result.log) {
    num += (e.epoch - mx) * (e.train_loss - my);
    den += (e.epoch - mx) * (e.epoch - mx);
  }
  EXPECT_LT(num / den, 0.0);
  EXPECT_LT(result.log.back().train_loss, result.log.front().train_loss);
  for (const auto& e : result.log) {
    EXPECT_GE(e.train_loss, 0.0);
    EXPECT_LE(e.train_loss, 1.0);
  }
}

TEST(Train, MissingSpectrumIsDataMismatch) {
  auto corpus = fixture_molecules();
  auto spectra = fixture_spectra();
  spectra.erase(corpus[0].id);
  DatasetSplit split;
  for (const auto& m : corpus) split.train.push_back(m.id);
  EXPECT_THROW(train(corpus, spectra, small_config(), split), DataMismatch);
}

TEST(Train, EarlyStoppingHonoursPatience) {
  auto corpus = fixture_molecules();
  auto spectra = fixture_spectra();
  MoMSConfig cfg = small_config(Variant::GcnOnly);
  cfg.epochs = 60;
  cfg.patience = 2;
  auto r = train(corpus, spectra, cfg);
  ASSERT_FALSE(r.log.empty());
  double best = -1;
  int best_epoch = 0;
  for (const auto& e : r.log) {
    if (e.valid_similarity > best) {
      best = e.valid_similarity;
      best_epoch = e.epoch;
    }
  }
  EXPECT_EQ(r.best_epoch, best_epoch);
  if (static_cast<int>(r.log.size()) < cfg.epochs) EXPECT_EQ(r.log.back().epoch, best_epoch + cfg.patience);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  set_quiet(true);
  auto corpus = fixture_molecules();
  auto spectra = fixture_spectra();
  for (Variant v : {Variant::MomsGin, Variant::GcnOnly}) {
    auto r = train(corpus, spectra, small_config(v));
    const auto dir = std::filesystem::temp_directory_path() / ("moms_ckpt_" + to_string(v));
    std::filesystem::remove_all(dir);
    save_checkpoint(r.model, dir.string());
    Model loaded = load_checkpoint(dir.string());
    EXPECT_EQ(loaded.config, r.model.config);
    for (const auto& m : corpus) EXPECT_EQ(predict(loaded, m), predict(r.model, m)) << m.id;
    const auto dir2 = dir.string() + "_again";
    std::filesystem::remove_all(dir2);
    save_checkpoint(loaded, dir2);
    for (const char* f : {"manifest.json", "params.bin", "vocab.tsv", "motif_spectra.bin", "graph_corpus.tsv"}) {
      EXPECT_EQ(read_file(dir / f), read_file(std::filesystem::path(dir2) / f)) << f;
    }
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir2);
  }
}

TEST(Checkpoint, RejectsTamperedShapes) {
  auto corpus = fixture_molecules();
  auto spectra = fixture_spectra();
  MoMSConfig cfg = small_config(Variant::GcnOnly);
  cfg.epochs = 1;
  auto r = train(corpus, spectra, cfg);
  const auto dir = std::filesystem::temp_directory_path() / "moms_ckpt_tamper";
  std::filesystem::remove_all(dir);
  save_checkpoint(r.model, dir.string());
  {
    std::ofstream out(dir / "params.bin", std::ios::binary | std::ios::app);
    out << "extra";
  }
  EXPECT_THROW(load_checkpoint(dir.string()), Error);
  std::filesystem::remove_all(dir);
}

TEST(Train, RepeatedRunsAreBitIdentical) {
  auto corpus = fixture_molecules();
  auto spectra = fixture_spectra();
  auto a = train(corpus, spectra, small_config(Variant::MomsGcn));
  auto b = train(corpus, spectra, small_config(Variant::MomsGcn));
  auto pa = a.model.net->params().all(), pb = b.model.net->params().all();
  ASSERT_EQ(pa.size(), pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_TRUE(pa[i]->value == pb[i]->value) << pa[i]->name;
}

}  // namespace
}  // namespace moms::model
