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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "moms/hetero.hpp"
#include "moms/molecule.hpp"
#include "moms/motif.hpp"
#include "moms/motif_spectra.hpp"
#include "moms/neural.hpp"
#include "moms/spectra.hpp"

namespace moms::model {

enum class Variant { MomsGcn, MomsGin, GcnOnly, GinOnly };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);  // throws ConfigError

struct MoMSConfig {
  Variant variant = Variant::MomsGcn;
  int vocab_size = 300;
  std::vector<int> sample_sizes = {10, 5, 5};
  int hidden = 128;
  int mol_depth = 3;
  int hetero_depth = 3;
  int head_depth = 2;
  int max_mz = spectra::kMaxMz;
  bool motif_prior = true;
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 100;
  int patience = 10;
  // Keep the parameters of the best validation epoch rather than the last.
  bool restore_best = true;
  std::uint64_t seed = 0;
  std::vector<double> split_fractions = {0.7, 0.2, 0.1};

  bool uses_hetero() const { return variant == Variant::MomsGcn || variant == Variant::MomsGin; }
  bool uses_gin() const { return variant == Variant::MomsGin || variant == Variant::GinOnly; }
  // Throws ConfigError.
  void validate() const;
  bool operator==(const MoMSConfig&) const = default;
};

// JSON object text; parsing rejects unknown keys and wrong types.
std::string config_to_json(const MoMSConfig& c);
MoMSConfig config_from_json(const std::string& text);

inline constexpr int kAtomFeatures = 26;

// One-hot element (11), one-hot degree 0-6, formal charge, aromatic, ring,
// one-hot hydrogen count 0-4.
nn::Matrix atom_features(const chem::Molecule& m);

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> valid;
  std::vector<std::string> test;
};

// Whole Murcko-scaffold groups, largest first (ties in seeded random order),
// go to the first partition with room left under its target; groups that fit
// nowhere go to train. Throws EmptyCorpus, ConfigError for bad fractions.
DatasetSplit scaffold_split(const std::vector<chem::Molecule>& corpus, const std::vector<double>& fractions,
                            std::uint64_t seed);

// Everything a prediction needs besides parameters.
struct ModelContext {
  motif::MotifVocabulary vocab;
  motif::SpectrumMatrix motif_spectra;
  std::vector<chem::Molecule> graph_corpus;
  hetero::HeteroMotifGraph graph;
};

ModelContext build_context(const std::vector<chem::Molecule>& graph_corpus, const MoMSConfig& config);

// Per-molecule inputs computed once.
struct MoleculeInputs {
  nn::Matrix atoms;
  std::vector<nn::Edge3> bonds;
  nn::Matrix fingerprint;  // 1 x 2048
  nn::Matrix prior;        // 1 x max_mz, l2-normalized or zero
};

MoleculeInputs molecule_inputs(const chem::Molecule& m, const std::vector<int>& motif_counts,
                               const motif::SpectrumMatrix& motif_spectra, int max_mz);

// A batch ready for the network. Hetero fields are empty for single-GNN
// variants.
struct Batch {
  nn::Matrix atoms;
  nn::SparseMatrix mol_op;
  std::vector<int> offsets;
  nn::Matrix fingerprint;
  nn::Matrix prior;
  nn::Matrix hetero_x;
  nn::SparseMatrix hetero_op;
  std::vector<int> seed_rows;
};

// Hetero input row: motif counts, then molecular weight scaled by 0.01.
nn::Matrix hetero_features(const hetero::GraphView& view, const std::vector<int>& nodes);

Batch make_batch(const std::vector<const MoleculeInputs*>& items, bool gin, const hetero::GraphView* view,
                 const hetero::SampledSubgraph* sub);

class MoMSNet {
 public:
  MoMSNet(const MoMSConfig& config, int n_motifs);
  MoMSNet(const MoMSNet&) = delete;
  MoMSNet& operator=(const MoMSNet&) = delete;

  // batch x max_mz, nonnegative.
  nn::Var forward(nn::Tape& t, const Batch& b) const;
  // Pooled molecule-graph embedding (before the fingerprint), batch x hidden.
  nn::Var molecule_embedding(nn::Tape& t, const Batch& b) const;

  nn::ParameterSet& params() { return params_; }
  const nn::ParameterSet& params() const { return params_; }
  const MoMSConfig& config() const { return config_; }
  int n_motifs() const { return n_motifs_; }

 private:
  MoMSConfig config_;
  int n_motifs_;
  nn::ParameterSet params_;
  std::vector<nn::GCNLayer> mol_gcn_;
  std::vector<nn::GINLayer> mol_gin_;
  nn::Linear fingerprint_proj_;
  nn::MLP hetero_embed_;
  std::vector<nn::GINLayer> hetero_gin_;
  nn::Linear prior_proj_;
  nn::MLP head_;
};

struct Model {
  MoMSConfig config;
  ModelContext context;
  std::unique_ptr<MoMSNet> net;
};

// Canonicalizes m, overlays it on the training graph, samples its
// neighbourhood with a seed derived from the config seed and the molecule's
// canonical key, and runs the network.
spectra::Spectrum predict(const Model& model, const chem::Molecule& m);

struct Prediction {
  std::string id;
  std::optional<spectra::Spectrum> spectrum;
  std::string error;
};

// Parses each SMILES independently; failures are reported per item.
std::vector<Prediction> predict_batch(const Model& model,
                                      const std::vector<std::pair<std::string, std::string>>& id_smiles);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double valid_similarity = 0.0;
  double wall_ms = 0.0;
};

std::string epoch_log_json(const EpochLog& e);

struct TrainResult {
  Model model;
  DatasetSplit split;
  std::vector<EpochLog> log;
  int best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Spectra are keyed by molecule id. The graph and vocabulary cover train and
// valid molecules; test molecules are only reached through predict. Throws
// DataMismatch if a train or valid molecule lacks a spectrum.
TrainResult train(const std::vector<chem::Molecule>& corpus, const std::map<std::string, spectra::Spectrum>& spectra,
                  const MoMSConfig& config, const DatasetSplit& split, const EpochCallback& on_epoch = {});

TrainResult train(const std::vector<chem::Molecule>& corpus, const std::map<std::string, spectra::Spectrum>& spectra,
                  const MoMSConfig& config, const EpochCallback& on_epoch = {});

// Mean cosine similarity of predictions against truth (zero predictions
// score 0).
// Bins each record and keys it by its ID header (the name when ID is absent).
// Throws DataMismatch on duplicate keys.
std::map<std::string, spectra::Spectrum> spectra_by_id(const std::vector<spectra::PeakList>& records, int max_mz);

double mean_similarity(const Model& model, const std::vector<chem::Molecule>& molecules,
                       const std::map<std::string, spectra::Spectrum>& spectra);

// Directory layout: manifest.json, params.bin, vocab.tsv, motif_spectra.bin,
// graph_corpus.tsv.
void save_checkpoint(const Model& model, const std::string& dir);
Model load_checkpoint(const std::string& dir);

}  // namespace moms::model
