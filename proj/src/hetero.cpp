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

#include "moms/hetero.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "moms/descriptors.hpp"
#include "moms/error.hpp"
#include "moms/runtime.hpp"

namespace moms::hetero {

using chem::Molecule;
using motif::Occurrence;

double pmi(double n_ij, double n_i, double n_j, double m) {
  if (m <= 0.0 || n_i <= 0.0 || n_j <= 0.0) throw DomainError("PMI needs positive M, N(i) and N(j)");
  return std::log((n_ij / m) / ((n_i / m) * (n_j / m)));
}

double tf_idf(double c_ij, double n_i, double m) { return c_ij * (std::log((1.0 + m) / (1.0 + n_i)) + 1.0); }

std::vector<WeightedEdge> HeteroMotifGraph::edges() const {
  std::vector<WeightedEdge> out;
  for (std::size_t u = 0; u < adjacency.size(); ++u) {
    for (const auto& e : adjacency[u]) {
      if (static_cast<std::size_t>(e.to) > u) out.push_back({static_cast<int>(u), e.to, e.weight});
    }
  }
  return out;
}

namespace {

bool share_atom(const std::vector<int>& a, const std::vector<int>& b) {
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) return true;
    if (*i < *j) ++i;
    else ++j;
  }
  return false;
}

void add_edge(HeteroMotifGraph& g, int a, int b, double w) {
  g.adjacency[a].push_back({b, w});
  g.adjacency[b].push_back({a, w});
}

}  // namespace

HeteroMotifGraph build_graph(const std::vector<std::vector<Occurrence>>& occurrences, std::size_t n_motifs) {
  if (n_motifs == 0) throw EmptyVocabulary("heterogeneous graph needs at least one motif");
  HeteroMotifGraph g;
  g.n_molecules = occurrences.size();
  g.n_motifs = n_motifs;
  g.adjacency.resize(g.node_count());
  g.features.assign(g.node_count() * g.feature_dim(), 0.0);
  g.document_frequency.assign(n_motifs, 0);

  const std::size_t k = n_motifs;
  std::vector<int> joint(k * k, 0);
  std::vector<char> overlap(k * k, 0);
  for (std::size_t i = 0; i < occurrences.size(); ++i) {
    auto row = g.features.begin() + static_cast<std::ptrdiff_t>(i * g.feature_dim());
    for (const auto& occ : occurrences[i]) {
      if (occ.motif < 0 || static_cast<std::size_t>(occ.motif) >= k) throw DataMismatch("occurrence of unknown motif");
      row[occ.motif] += 1.0;
    }
    std::vector<int> present;
    for (std::size_t v = 0; v < k; ++v) {
      if (row[v] > 0.0) present.push_back(static_cast<int>(v));
    }
    for (int v : present) ++g.document_frequency[v];
    for (std::size_t a = 0; a < present.size(); ++a) {
      for (std::size_t b = a + 1; b < present.size(); ++b) ++joint[present[a] * k + present[b]];
    }
    const auto& occ = occurrences[i];
    for (std::size_t a = 0; a < occ.size(); ++a) {
      for (std::size_t b = a + 1; b < occ.size(); ++b) {
        int x = occ[a].motif, y = occ[b].motif;
        if (x == y) continue;
        if (x > y) std::swap(x, y);
        if (!overlap[x * k + y] && share_atom(occ[a].atoms, occ[b].atoms)) overlap[x * k + y] = 1;
      }
    }
  }

  const double m = static_cast<double>(g.n_molecules);
  for (std::size_t i = 0; i < g.n_molecules; ++i) {
    auto row = g.node_features(static_cast<int>(i));
    for (std::size_t v = 0; v < k; ++v) {
      if (row[v] > 0.0) add_edge(g, static_cast<int>(i), g.motif_node(v), tf_idf(row[v], g.document_frequency[v], m));
    }
  }
  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = x + 1; y < k; ++y) {
      if (!overlap[x * k + y] || joint[x * k + y] == 0) continue;
      double w = pmi(joint[x * k + y], g.document_frequency[x], g.document_frequency[y], m);
      if (w >= 0.0) add_edge(g, g.motif_node(x), g.motif_node(y), w);
    }
  }
  for (auto& adj : g.adjacency) {
    std::sort(adj.begin(), adj.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
  }
  return g;
}

HeteroMotifGraph build_graph(const std::vector<Molecule>& corpus, const motif::MotifVocabulary& vocab) {
  if (vocab.empty()) throw EmptyVocabulary("heterogeneous graph needs at least one motif");
  std::vector<std::vector<Occurrence>> occurrences(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) { occurrences[i] = motif::replay(corpus[i], vocab); });
  HeteroMotifGraph g = build_graph(occurrences, vocab.size());
  const std::size_t dim = g.feature_dim();
  for (std::size_t i = 0; i < corpus.size(); ++i) g.features[i * dim + dim - 1] = chem::molecular_weight(corpus[i]);
  parallel_for(vocab.size(), [&](std::size_t v) {
    const auto& frag = vocab[v].fragment;
    auto counts = motif::motif_occurrences(frag, vocab);
    double* row = g.features.data() + static_cast<std::size_t>(g.motif_node(v)) * dim;
    for (std::size_t c = 0; c < counts.size(); ++c) row[c] = counts[c];
    row[dim - 1] = chem::molecular_weight(frag);
  });
  return g;
}

std::vector<Edge> GraphView::neighbors(int node) const {
  if (has_query_ && node == query_node()) return query_edges_;
  std::vector<Edge> out = g_->adjacency.at(static_cast<std::size_t>(node));
  if (has_query_) {
    for (const auto& e : query_edges_) {
      if (e.to == node) out.push_back({query_node(), e.weight});
    }
  }
  return out;
}

std::span<const double> GraphView::node_features(int node) const {
  if (has_query_ && node == query_node()) return query_features_;
  return g_->node_features(node);
}

GraphView attach_query(const HeteroMotifGraph& g, const Molecule& m, const motif::MotifVocabulary& vocab) {
  if (vocab.size() != g.n_motifs) throw DataMismatch("vocabulary size differs from the graph's motif count");
  GraphView view(g);
  view.has_query_ = true;
  auto counts = motif::motif_occurrences(m, vocab);
  view.query_features_.assign(g.feature_dim(), 0.0);
  const double corpus_size = static_cast<double>(g.n_molecules);
  for (std::size_t v = 0; v < counts.size(); ++v) {
    view.query_features_[v] = counts[v];
    if (counts[v] > 0) {
      view.query_edges_.push_back({g.motif_node(v), tf_idf(counts[v], g.document_frequency[v], corpus_size)});
    }
  }
  view.query_features_.back() = chem::molecular_weight(m);
  return view;
}

SampledSubgraph sample_khop(const GraphView& g, const std::vector<int>& seeds, const std::vector<int>& sizes,
                            std::uint64_t rng_seed) {
  for (int s : sizes) {
    if (s <= 0) throw DomainError("sampler sizes must be positive");
  }
  for (int s : seeds) {
    if (s < 0 || static_cast<std::size_t>(s) >= g.node_count() || !g.is_molecule(s)) {
      throw InvalidSeed("seed " + std::to_string(s) + " is not a molecule node");
    }
  }
  std::mt19937_64 rng(rng_seed);
  SampledSubgraph out;
  std::unordered_map<int, int> local;
  auto intern = [&](int node) {
    auto [it, inserted] = local.try_emplace(node, static_cast<int>(out.nodes.size()));
    if (inserted) out.nodes.push_back(node);
    return it->second;
  };
  for (int s : seeds) out.seed_index.push_back(intern(s));

  for (int s : seeds) {
    std::set<int> visited{s};
    std::vector<int> prev{s};
    auto& hops = out.hops.emplace_back();
    for (int budget : sizes) {
      std::set<int> cand_set;
      for (int u : prev) {
        for (const auto& e : g.neighbors(u)) {
          if (!visited.count(e.to)) cand_set.insert(e.to);
        }
      }
      std::vector<int> cand(cand_set.begin(), cand_set.end());
      const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(budget), cand.size());
      for (std::size_t i = 0; i < take; ++i) {
        std::size_t j = i + static_cast<std::size_t>(rng() % (cand.size() - i));
        std::swap(cand[i], cand[j]);
      }
      cand.resize(take);
      std::sort(cand.begin(), cand.end());
      for (int v : cand) {
        visited.insert(v);
        intern(v);
      }
      hops.push_back(cand);
      prev = std::move(cand);
    }
  }

  for (std::size_t lu = 0; lu < out.nodes.size(); ++lu) {
    for (const auto& e : g.neighbors(out.nodes[lu])) {
      auto it = local.find(e.to);
      if (it != local.end() && static_cast<std::size_t>(it->second) > lu) {
        out.edges.push_back({static_cast<int>(lu), it->second, e.weight});
      }
    }
  }
  std::sort(out.edges.begin(), out.edges.end(),
            [](const WeightedEdge& x, const WeightedEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return out;
}

std::uint64_t graph_hash(const HeteroMotifGraph& g) {
  std::vector<std::uint8_t> bytes;
  auto put = [&](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  put(g.n_molecules);
  put(g.n_motifs);
  for (int df : g.document_frequency) put(static_cast<std::uint64_t>(df));
  for (const auto& adj : g.adjacency) {
    put(adj.size());
    for (const auto& e : adj) {
      put(static_cast<std::uint64_t>(e.to));
      put(std::bit_cast<std::uint64_t>(e.weight));
    }
  }
  for (double f : g.features) put(std::bit_cast<std::uint64_t>(f));
  return chem::murmur_hash64(bytes, chem::kFingerprintSeed);
}

void write_edge_list(std::ostream& out, const HeteroMotifGraph& g) {
  char buf[64];
  for (const auto& e : g.edges()) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << e.a << ' ' << e.b << ' ' << buf << '\n';
  }
}

std::string graph_manifest_json(const HeteroMotifGraph& g, const std::string& vocab_path) {
  nlohmann::ordered_json j;
  j["format"] = "moms-hetero-graph";
  j["version"] = 1;
  j["molecules"] = g.n_molecules;
  j["motifs"] = g.n_motifs;
  j["nodes"] = g.node_count();
  j["edges"] = g.edges().size();
  j["feature_dim"] = g.feature_dim();
  j["vocabulary"] = vocab_path;
  return j.dump(2) + "\n";
}

void validate_graph_manifest(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(0, std::string("manifest is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError(0, "manifest must be an object");
  static const std::set<std::string> counts = {"version", "molecules", "motifs", "nodes", "edges", "feature_dim"};
  std::set<std::string> seen;
  for (const auto& [key, value] : j.items()) {
    seen.insert(key);
    if (counts.count(key)) {
      if (!value.is_number_unsigned()) throw FormatError(0, "manifest field " + key + " must be a count");
    } else if (key == "format" || key == "vocabulary") {
      if (!value.is_string()) throw FormatError(0, "manifest field " + key + " must be a string");
    } else {
      throw FormatError(0, "unknown manifest field " + key);
    }
  }
  if (seen.size() != counts.size() + 2) throw FormatError(0, "manifest is missing fields");
  if (j["format"] != "moms-hetero-graph" || j["version"] != 1) throw FormatError(0, "unsupported manifest format");
  if (j["nodes"].get<std::size_t>() != j["molecules"].get<std::size_t>() + j["motifs"].get<std::size_t>()) {
    throw FormatError(0, "node count must equal molecules plus motifs");
  }
  if (j["feature_dim"].get<std::size_t>() != j["motifs"].get<std::size_t>() + 1) {
    throw FormatError(0, "feature dimension must be motifs plus one");
  }
}

}  // namespace moms::hetero
