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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "moms/canonical.hpp"
#include "moms/descriptors.hpp"
#include "moms/error.hpp"
#include "moms/runtime.hpp"
#include "moms/smiles.hpp"

namespace moms::model {

using chem::Molecule;
using nn::Matrix;
using nn::Tape;
using nn::Var;
using json = nlohmann::ordered_json;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix64(a ^ splitmix64(b)); }

std::uint64_t key_hash(const Molecule& m) {
  std::string key = chem::canonical_key_unchecked(m);
  return chem::murmur_hash64({reinterpret_cast<const std::uint8_t*>(key.data()), key.size()}, chem::kFingerprintSeed);
}

template <typename T>
void shuffle_with(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::MomsGcn: return "moms_gcn";
    case Variant::MomsGin: return "moms_gin";
    case Variant::GcnOnly: return "gcn_only";
    case Variant::GinOnly: return "gin_only";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  for (Variant v : {Variant::MomsGcn, Variant::MomsGin, Variant::GcnOnly, Variant::GinOnly}) {
    if (to_string(v) == s) return v;
  }
  throw ConfigError("unknown model variant '" + s + "'");
}

void MoMSConfig::validate() const {
  auto positive = [](int v, const char* what) {
    if (v <= 0) throw ConfigError(std::string(what) + " must be positive");
  };
  positive(vocab_size, "vocab_size");
  positive(hidden, "hidden");
  positive(mol_depth, "mol_depth");
  positive(hetero_depth, "hetero_depth");
  positive(head_depth, "head_depth");
  positive(max_mz, "max_mz");
  positive(batch_size, "batch_size");
  positive(epochs, "epochs");
  positive(patience, "patience");
  if (sample_sizes.empty()) throw ConfigError("sample_sizes must not be empty");
  for (int s : sample_sizes) positive(s, "sample_sizes entries");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be positive");
  if (split_fractions.size() != 3) throw ConfigError("split_fractions needs three entries");
  double total = 0.0;
  for (double f : split_fractions) {
    if (f < 0.0) throw ConfigError("split_fractions must be nonnegative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split_fractions must sum to 1");
}

std::string config_to_json(const MoMSConfig& c) {
  json j;
  j["variant"] = to_string(c.variant);
  j["vocab_size"] = c.vocab_size;
  j["sample_sizes"] = c.sample_sizes;
  j["hidden"] = c.hidden;
  j["mol_depth"] = c.mol_depth;
  j["hetero_depth"] = c.hetero_depth;
  j["head_depth"] = c.head_depth;
  j["max_mz"] = c.max_mz;
  j["motif_prior"] = c.motif_prior;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["epochs"] = c.epochs;
  j["patience"] = c.patience;
  j["restore_best"] = c.restore_best;
  j["seed"] = c.seed;
  j["split_fractions"] = c.split_fractions;
  return j.dump(2);
}

namespace {

MoMSConfig config_from(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model config must be a JSON object");
  MoMSConfig c;
  auto get_int = [&](const std::string& key, const nlohmann::json& v) {
    if (!v.is_number_integer()) throw ConfigError(key + " must be an integer");
    return v.get<long long>();
  };
  auto get_int_list = [&](const std::string& key, const nlohmann::json& v) {
    if (!v.is_array()) throw ConfigError(key + " must be an array");
    std::vector<int> out;
    for (const auto& x : v) out.push_back(static_cast<int>(get_int(key, x)));
    return out;
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "variant") {
      if (!v.is_string()) throw ConfigError("variant must be a string");
      c.variant = variant_from_string(v.get<std::string>());
    } else if (key == "vocab_size") c.vocab_size = static_cast<int>(get_int(key, v));
    else if (key == "sample_sizes") c.sample_sizes = get_int_list(key, v);
    else if (key == "hidden") c.hidden = static_cast<int>(get_int(key, v));
    else if (key == "mol_depth") c.mol_depth = static_cast<int>(get_int(key, v));
    else if (key == "hetero_depth") c.hetero_depth = static_cast<int>(get_int(key, v));
    else if (key == "head_depth") c.head_depth = static_cast<int>(get_int(key, v));
    else if (key == "max_mz") c.max_mz = static_cast<int>(get_int(key, v));
    else if (key == "batch_size") c.batch_size = static_cast<int>(get_int(key, v));
    else if (key == "epochs") c.epochs = static_cast<int>(get_int(key, v));
    else if (key == "patience") c.patience = static_cast<int>(get_int(key, v));
    else if (key == "motif_prior" || key == "restore_best") {
      if (!v.is_boolean()) throw ConfigError(key + " must be a boolean");
      (key == "motif_prior" ? c.motif_prior : c.restore_best) = v.get<bool>();
    } else if (key == "learning_rate") {
      if (!v.is_number()) throw ConfigError("learning_rate must be a number");
      c.learning_rate = v.get<double>();
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "split_fractions") {
      if (!v.is_array()) throw ConfigError("split_fractions must be an array");
      c.split_fractions.clear();
      for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("split_fractions entries must be numbers");
        c.split_fractions.push_back(x.get<double>());
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

}  // namespace

MoMSConfig config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from(j);
}

Matrix atom_features(const Molecule& m) {
  Matrix x = Matrix::Zero(static_cast<Eigen::Index>(m.atom_count()), kAtomFeatures);
  for (std::size_t i = 0; i < m.atom_count(); ++i) {
    const auto& a = m.atoms[i];
    const auto r = static_cast<Eigen::Index>(i);
    x(r, static_cast<int>(a.element)) = 1.0;
    x(r, 11 + std::min<int>(static_cast<int>(m.degree(static_cast<int>(i))), 6)) = 1.0;
    x(r, 18) = a.formal_charge;
    x(r, 19) = a.aromatic ? 1.0 : 0.0;
    x(r, 20) = a.in_ring ? 1.0 : 0.0;
    x(r, 21 + std::min(a.total_h(), 4)) = 1.0;
  }
  return x;
}

DatasetSplit scaffold_split(const std::vector<Molecule>& corpus, const std::vector<double>& fractions,
                            std::uint64_t seed) {
  if (corpus.empty()) throw EmptyCorpus("cannot split an empty corpus");
  if (fractions.size() != 3) throw ConfigError("split needs three fractions");
  double total = 0.0;
  for (double f : fractions) total += f;
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");

  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& m : corpus) groups[chem::murcko_scaffold(m)].push_back(m.id);
  std::vector<const std::vector<std::string>*> order;
  for (const auto& [scaffold, ids] : groups) order.push_back(&ids);
  std::mt19937_64 rng(seed);
  shuffle_with(order, rng);
  std::stable_sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->size() > b->size(); });

  const double n = static_cast<double>(corpus.size());
  DatasetSplit split;
  std::vector<std::string>* parts[3] = {&split.train, &split.valid, &split.test};
  for (const auto* ids : order) {
    std::vector<std::string>* target = &split.train;
    for (int p = 0; p < 3; ++p) {
      if (static_cast<double>(parts[p]->size() + ids->size()) <= fractions[p] * n + 1e-9) {
        target = parts[p];
        break;
      }
    }
    target->insert(target->end(), ids->begin(), ids->end());
  }
  return split;
}

ModelContext build_context(const std::vector<Molecule>& graph_corpus, const MoMSConfig& config) {
  ModelContext ctx;
  ctx.graph_corpus = graph_corpus;
  ctx.vocab = motif::mine_vocabulary(graph_corpus, static_cast<std::size_t>(config.vocab_size));
  ctx.motif_spectra = motif::motif_spectrum_matrix(ctx.vocab, config.max_mz);
  ctx.graph = hetero::build_graph(graph_corpus, ctx.vocab);
  return ctx;
}

MoleculeInputs molecule_inputs(const Molecule& m, const std::vector<int>& motif_counts,
                               const motif::SpectrumMatrix& motif_spectra, int max_mz) {
  MoleculeInputs in;
  in.atoms = atom_features(m);
  for (const auto& b : m.bonds) in.bonds.push_back({b.begin, b.end, 1.0});
  auto fp = chem::path_fingerprint(m);
  in.fingerprint = Matrix::Zero(1, static_cast<Eigen::Index>(chem::kFingerprintBits));
  for (std::size_t i = 0; i < chem::kFingerprintBits; ++i) {
    if (fp.bits[i]) in.fingerprint(0, static_cast<Eigen::Index>(i)) = 1.0;
  }
  in.prior = Matrix::Zero(1, max_mz);
  const std::size_t cols = std::min<std::size_t>(motif_spectra.cols, static_cast<std::size_t>(max_mz));
  for (std::size_t v = 0; v < motif_counts.size() && v < motif_spectra.rows; ++v) {
    if (motif_counts[v] == 0) continue;
    auto row = motif_spectra.row(v);
    for (std::size_t c = 0; c < cols; ++c) in.prior(0, static_cast<Eigen::Index>(c)) += motif_counts[v] * row[c];
  }
  double norm = in.prior.norm();
  if (norm > 0.0) in.prior /= norm;
  return in;
}

Matrix hetero_features(const hetero::GraphView& view, const std::vector<int>& nodes) {
  const auto dim = static_cast<Eigen::Index>(view.feature_dim());
  Matrix x(static_cast<Eigen::Index>(nodes.size()), dim);
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    auto f = view.node_features(nodes[r]);
    for (Eigen::Index c = 0; c < dim; ++c) x(static_cast<Eigen::Index>(r), c) = f[c];
    x(static_cast<Eigen::Index>(r), dim - 1) *= 0.01;
  }
  return x;
}

Batch make_batch(const std::vector<const MoleculeInputs*>& items, bool gin, const hetero::GraphView* view,
                 const hetero::SampledSubgraph* sub) {
  Batch b;
  int total_atoms = 0;
  b.offsets.push_back(0);
  for (const auto* it : items) {
    total_atoms += static_cast<int>(it->atoms.rows());
    b.offsets.push_back(total_atoms);
  }
  const Eigen::Index n_items = static_cast<Eigen::Index>(items.size());
  b.atoms.resize(total_atoms, kAtomFeatures);
  std::vector<nn::Edge3> bonds;
  b.fingerprint.resize(n_items, static_cast<Eigen::Index>(chem::kFingerprintBits));
  b.prior.resize(n_items, items.empty() ? 0 : items[0]->prior.cols());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const int base = b.offsets[i];
    if (items[i]->atoms.rows() > 0) b.atoms.middleRows(base, items[i]->atoms.rows()) = items[i]->atoms;
    for (const auto& e : items[i]->bonds) bonds.push_back({base + e.a, base + e.b, e.w});
    b.fingerprint.row(static_cast<Eigen::Index>(i)) = items[i]->fingerprint.row(0);
    b.prior.row(static_cast<Eigen::Index>(i)) = items[i]->prior.row(0);
  }
  b.mol_op = gin ? nn::adjacency_operator(total_atoms, bonds) : nn::gcn_operator(total_atoms, bonds);
  if (view && sub) {
    b.hetero_x = hetero_features(*view, sub->nodes);
    const int n = static_cast<int>(sub->nodes.size());
    std::vector<double> degree(n, 0.0);
    for (const auto& e : sub->edges) {
      degree[e.a] += e.weight;
      degree[e.b] += e.weight;
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (const auto& e : sub->edges) {
      if (degree[e.a] > 0.0) trip.emplace_back(e.a, e.b, e.weight / degree[e.a]);
      if (degree[e.b] > 0.0) trip.emplace_back(e.b, e.a, e.weight / degree[e.b]);
    }
    b.hetero_op.resize(n, n);
    b.hetero_op.setFromTriplets(trip.begin(), trip.end());
    b.seed_rows = sub->seed_index;
  }
  return b;
}

MoMSNet::MoMSNet(const MoMSConfig& config, int n_motifs) : config_(config), n_motifs_(n_motifs) {
  config_.validate();
  nn::Initializer init(mix(config.seed, 0x6D6F6D73ULL));
  const int h = config.hidden;
  for (int l = 0; l < config.mol_depth; ++l) {
    const int in = l == 0 ? kAtomFeatures : h;
    const std::string name = "mol." + std::to_string(l);
    if (config.uses_gin()) mol_gin_.emplace_back(params_, name, in, h, init);
    else mol_gcn_.emplace_back(params_, name, in, h, init);
  }
  fingerprint_proj_ = nn::Linear(params_, "fingerprint", static_cast<int>(chem::kFingerprintBits), h, init);
  int head_in = 2 * h;
  if (config.uses_hetero()) {
    hetero_embed_ = nn::MLP(params_, "hetero.embed", {n_motifs + 1, h, h}, true, init);
    for (int l = 0; l < config.hetero_depth; ++l) {
      hetero_gin_.emplace_back(params_, "hetero.gin." + std::to_string(l), h, h, init);
    }
    head_in += h;
    if (config.motif_prior) {
      prior_proj_ = nn::Linear(params_, "prior", config.max_mz, h, init);
      head_in += h;
    }
  }
  std::vector<int> widths{head_in};
  for (int l = 1; l < config.head_depth; ++l) widths.push_back(h);
  widths.push_back(config.max_mz);
  head_ = nn::MLP(params_, "head", widths, true, init);
  // Start the output layer slightly positive so no bin begins dead.
  head_.layers.back().bias->value.setConstant(0.1);
}

Var MoMSNet::molecule_embedding(Tape& t, const Batch& b) const {
  Var h = t.constant(b.atoms);
  for (const auto& l : mol_gcn_) h = l(t, h, b.mol_op);
  for (const auto& l : mol_gin_) h = l(t, h, b.mol_op);
  return nn::segment_mean(h, b.offsets);
}

Var MoMSNet::forward(Tape& t, const Batch& b) const {
  std::vector<Var> parts{molecule_embedding(t, b), fingerprint_proj_(t, t.constant(b.fingerprint))};
  if (config_.uses_hetero()) {
    Var x = hetero_embed_(t, t.constant(b.hetero_x));
    for (const auto& l : hetero_gin_) x = l(t, x, b.hetero_op);
    parts.push_back(nn::gather_rows(x, b.seed_rows));
    if (config_.motif_prior) parts.push_back(prior_proj_(t, t.constant(b.prior)));
  }
  return head_(t, nn::concat_cols(parts));
}

namespace {

std::vector<int> counts_of(std::span<const double> features, std::size_t k) {
  std::vector<int> counts(k);
  for (std::size_t v = 0; v < k; ++v) counts[v] = static_cast<int>(features[v]);
  return counts;
}

}  // namespace

spectra::Spectrum predict(const Model& model, const Molecule& input) {
  const Molecule m = chem::canonicalize(input);
  const auto& ctx = model.context;
  const auto& cfg = model.config;
  hetero::GraphView view = hetero::attach_query(ctx.graph, m, ctx.vocab);
  const int q = view.query_node();
  MoleculeInputs in = molecule_inputs(m, counts_of(view.node_features(q), ctx.vocab.size()), ctx.motif_spectra,
                                      cfg.max_mz);
  Batch b;
  if (cfg.uses_hetero()) {
    auto sub = hetero::sample_khop(view, {q}, cfg.sample_sizes, mix(cfg.seed, key_hash(m)));
    b = make_batch({&in}, cfg.uses_gin(), &view, &sub);
  } else {
    b = make_batch({&in}, cfg.uses_gin(), nullptr, nullptr);
  }
  Tape t;
  Var out = model.net->forward(t, b);
  const Matrix& v = out.value();
  return spectra::Spectrum(std::vector<double>(v.data(), v.data() + v.cols()));
}

std::vector<Prediction> predict_batch(const Model& model,
                                      const std::vector<std::pair<std::string, std::string>>& id_smiles) {
  std::vector<Prediction> out;
  out.reserve(id_smiles.size());
  auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < id_smiles.size(); ++i) {
    Prediction p;
    p.id = id_smiles[i].first;
    try {
      Molecule m = chem::parse_smiles(id_smiles[i].second);
      m.id = p.id;
      p.spectrum = predict(model, m);
    } catch (const Error& e) {
      p.error = e.what();
    }
    out.push_back(std::move(p));
    if ((i + 1) % 1000 == 0) {
      double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      log_info("predicted " + std::to_string(i + 1) + " molecules, " + std::to_string((i + 1) / s) + " per second");
    }
  }
  return out;
}

double mean_similarity(const Model& model, const std::vector<Molecule>& molecules,
                       const std::map<std::string, spectra::Spectrum>& spectra) {
  if (molecules.empty()) return 0.0;
  double total = 0.0;
  for (const auto& m : molecules) {
    auto it = spectra.find(m.id);
    if (it == spectra.end()) throw DataMismatch("no spectrum for molecule " + m.id);
    try {
      total += spectra::cosine_similarity(predict(model, m), it->second);
    } catch (const ZeroSpectrum&) {
    }
  }
  return total / static_cast<double>(molecules.size());
}

std::map<std::string, spectra::Spectrum> spectra_by_id(const std::vector<spectra::PeakList>& records, int max_mz) {
  std::map<std::string, spectra::Spectrum> out;
  for (const auto& r : records) {
    const std::string& id = r.compound_id.empty() ? r.name : r.compound_id;
    if (!out.emplace(id, spectra::bin_spectrum(r, max_mz)).second) throw DataMismatch("duplicate spectrum id " + id);
  }
  return out;
}

std::string epoch_log_json(const EpochLog& e) {
  json j;
  j["epoch"] = e.epoch;
  j["train_loss"] = e.train_loss;
  j["valid_similarity"] = e.valid_similarity;
  j["wall_ms"] = e.wall_ms;
  return j.dump();
}

TrainResult train(const std::vector<Molecule>& corpus, const std::map<std::string, spectra::Spectrum>& spectra,
                  const MoMSConfig& config, const EpochCallback& on_epoch) {
  std::vector<Molecule> canon;
  for (const auto& m : corpus) canon.push_back(chem::canonicalize(m));
  return train(canon, spectra, config, scaffold_split(canon, config.split_fractions, config.seed), on_epoch);
}

TrainResult train(const std::vector<Molecule>& corpus, const std::map<std::string, spectra::Spectrum>& spectra,
                  const MoMSConfig& config, const DatasetSplit& split, const EpochCallback& on_epoch) {
  config.validate();
  std::map<std::string, const Molecule*> by_id;
  for (const auto& m : corpus) by_id[m.id] = &m;
  auto collect = [&](const std::vector<std::string>& ids) {
    std::vector<Molecule> out;
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw DataMismatch("split names unknown molecule " + id);
      out.push_back(chem::canonicalize(*it->second));
      if (!spectra.count(id)) throw DataMismatch("no spectrum for molecule " + id);
      if (spectra.at(id).size() != static_cast<std::size_t>(config.max_mz)) {
        throw DataMismatch("spectrum for " + id + " has " + std::to_string(spectra.at(id).size()) + " bins");
      }
    }
    return out;
  };
  std::vector<Molecule> train_mols = collect(split.train);
  std::vector<Molecule> valid_mols = collect(split.valid);
  if (train_mols.empty()) throw EmptyCorpus("training partition is empty");

  std::vector<Molecule> graph_corpus = train_mols;
  graph_corpus.insert(graph_corpus.end(), valid_mols.begin(), valid_mols.end());

  TrainResult result;
  result.split = split;
  Model& model = result.model;
  model.config = config;
  model.context = build_context(graph_corpus, config);
  const auto& ctx = model.context;
  model.net = std::make_unique<MoMSNet>(config, static_cast<int>(ctx.vocab.size()));
  MoMSNet& net = *model.net;

  std::vector<MoleculeInputs> inputs(train_mols.size());
  std::vector<Matrix> targets(train_mols.size());
  parallel_for(train_mols.size(), [&](std::size_t i) {
    inputs[i] = molecule_inputs(train_mols[i], counts_of(ctx.graph.node_features(static_cast<int>(i)), ctx.vocab.size()),
                                ctx.motif_spectra, config.max_mz);
    const auto& s = spectra.at(train_mols[i].id);
    targets[i] = Eigen::Map<const Matrix>(s.bins.data(), 1, static_cast<Eigen::Index>(s.size()));
  });

  nn::Adam adam({.lr = config.learning_rate});
  hetero::GraphView view(ctx.graph);
  const auto& eval_set = valid_mols.empty() ? train_mols : valid_mols;
  std::vector<Matrix> best;
  double best_sim = -1.0;
  int since_best = 0;
  std::vector<int> order(train_mols.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(mix(config.seed, static_cast<std::uint64_t>(epoch)));
    shuffle_with(order, rng);
    double loss_sum = 0.0;
    int batch_index = 0;
    for (std::size_t lo = 0; lo < order.size(); lo += static_cast<std::size_t>(config.batch_size), ++batch_index) {
      const std::size_t hi = std::min(order.size(), lo + static_cast<std::size_t>(config.batch_size));
      std::vector<const MoleculeInputs*> items;
      std::vector<int> seeds;
      Matrix target(static_cast<Eigen::Index>(hi - lo), config.max_mz);
      for (std::size_t k = lo; k < hi; ++k) {
        items.push_back(&inputs[order[k]]);
        seeds.push_back(order[k]);
        target.row(static_cast<Eigen::Index>(k - lo)) = targets[order[k]].row(0);
      }
      Batch b;
      if (config.uses_hetero()) {
        auto sub = hetero::sample_khop(view, seeds, config.sample_sizes,
                                       mix(mix(config.seed, static_cast<std::uint64_t>(epoch)), batch_index));
        b = make_batch(items, config.uses_gin(), &view, &sub);
      } else {
        b = make_batch(items, config.uses_gin(), nullptr, nullptr);
      }
      net.params().zero_grad();
      Tape t;
      Var loss = nn::cosine_distance_mean(net.forward(t, b), target);
      t.backward(loss);
      adam.step(net.params().all());
      loss_sum += loss.value()(0, 0) * static_cast<double>(hi - lo);
    }
    EpochLog entry;
    entry.epoch = epoch;
    entry.train_loss = loss_sum / static_cast<double>(order.size());
    entry.valid_similarity = mean_similarity(model, eval_set, spectra);
    entry.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(entry);
    if (on_epoch) on_epoch(entry);
    if (entry.valid_similarity > best_sim) {
      best_sim = entry.valid_similarity;
      result.best_epoch = epoch;
      since_best = 0;
      best.clear();
      for (const auto* p : net.params().all()) best.push_back(p->value);
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  if (config.restore_best && !best.empty()) {
    auto params = net.params().all();
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  }
  return result;
}

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void save_checkpoint(const Model& model, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path root(dir);
  json manifest;
  manifest["format_version"] = 1;
  manifest["dtype"] = "float64";
  manifest["byte_order"] = "little";
  manifest["config"] = json::parse(config_to_json(model.config));
  manifest["n_motifs"] = model.net->n_motifs();
  json tensors = json::array();
  std::string payload;
  for (const auto* p : model.net->params().all()) {
    tensors.push_back({{"name", p->name}, {"shape", {p->value.rows(), p->value.cols()}}});
    for (Eigen::Index i = 0; i < p->value.size(); ++i) {
      auto bits = std::bit_cast<std::uint64_t>(p->value.data()[i]);
      for (int b = 0; b < 8; ++b) payload.push_back(static_cast<char>(bits >> (8 * b)));
    }
  }
  manifest["tensors"] = tensors;
  manifest["files"] = {{"params", "params.bin"},
                       {"vocabulary", "vocab.tsv"},
                       {"motif_spectra", "motif_spectra.bin"},
                       {"graph_corpus", "graph_corpus.tsv"}};
  write_text(root / "manifest.json", manifest.dump(2) + "\n");
  write_text(root / "params.bin", payload);
  std::ostringstream vocab, mat, corpus;
  motif::write_vocabulary(vocab, model.context.vocab);
  motif::write_spectrum_matrix(mat, model.context.motif_spectra);
  chem::write_corpus(corpus, model.context.graph_corpus);
  write_text(root / "vocab.tsv", vocab.str());
  write_text(root / "motif_spectra.bin", mat.str());
  write_text(root / "graph_corpus.tsv", corpus.str());
}

Model load_checkpoint(const std::string& dir) {
  const std::filesystem::path root(dir);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(read_text(root / "manifest.json"));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(0, std::string("checkpoint manifest: ") + e.what());
  }
  if (manifest.value("format_version", 0) != 1 || manifest.value("dtype", "") != "float64") {
    throw FormatError(0, "unsupported checkpoint format");
  }
  Model model;
  model.config = config_from(manifest.at("config"));
  {
    std::istringstream vocab(read_text(root / "vocab.tsv"));
    model.context.vocab = motif::read_vocabulary(vocab);
    std::istringstream mat(read_text(root / "motif_spectra.bin"));
    model.context.motif_spectra = motif::read_spectrum_matrix(mat);
    std::istringstream corpus(read_text(root / "graph_corpus.tsv"));
    for (auto& m : chem::read_corpus(corpus)) model.context.graph_corpus.push_back(chem::canonicalize(m));
  }
  if (model.context.motif_spectra.rows != model.context.vocab.size()) {
    throw DataMismatch("motif spectra rows do not match the vocabulary");
  }
  model.context.graph = hetero::build_graph(model.context.graph_corpus, model.context.vocab);
  const int k = static_cast<int>(model.context.vocab.size());
  if (manifest.value("n_motifs", -1) != k) throw DataMismatch("checkpoint motif count differs from its vocabulary");
  model.net = std::make_unique<MoMSNet>(model.config, k);
  const std::string payload = read_text(root / "params.bin");
  std::size_t offset = 0;
  std::set<std::string> loaded;
  for (const auto& t : manifest.at("tensors")) {
    const std::string name = t.at("name").get<std::string>();
    nn::Parameter* p = model.net->params().find(name);
    if (!p) throw DataMismatch("checkpoint tensor " + name + " is not a model parameter");
    auto rows = t.at("shape").at(0).get<Eigen::Index>(), cols = t.at("shape").at(1).get<Eigen::Index>();
    if (rows != p->value.rows() || cols != p->value.cols()) throw DataMismatch("shape mismatch for " + name);
    if (offset + 8 * static_cast<std::size_t>(rows * cols) > payload.size()) throw FormatError(0, "params.bin truncated");
    for (Eigen::Index i = 0; i < rows * cols; ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(payload[offset++])) << (8 * b);
      p->value.data()[i] = std::bit_cast<double>(bits);
    }
    loaded.insert(name);
  }
  if (loaded.size() != model.net->params().size() || offset != payload.size()) {
    throw DataMismatch("checkpoint tensors do not cover the model parameters");
  }
  return model;
}

}  // namespace moms::model
