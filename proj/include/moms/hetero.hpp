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
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "moms/molecule.hpp"
#include "moms/motif.hpp"

namespace moms::hetero {

struct Edge {
  int to = 0;
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

struct WeightedEdge {
  int a = 0;  // a < b
  int b = 0;
  double weight = 0.0;

  bool operator==(const WeightedEdge&) const = default;
};

// ln((n_ij/M) / ((n_i/M)(n_j/M))). Throws DomainError for zero M, n_i or n_j.
double pmi(double n_ij, double n_i, double n_j, double m);

// c_ij * (ln((1+M)/(1+n_i)) + 1).
double tf_idf(double c_ij, double n_i, double m);

// Nodes 0..N-1 are molecules, N..N+K-1 motifs. Each node carries K motif
// occurrence counts followed by a molecular weight.
struct HeteroMotifGraph {
  std::size_t n_molecules = 0;
  std::size_t n_motifs = 0;
  // Molecules containing each motif; frozen for query overlays.
  std::vector<int> document_frequency;
  std::vector<std::vector<Edge>> adjacency;  // sorted by neighbour id
  std::vector<double> features;              // row-major, node_count() x feature_dim()

  std::size_t node_count() const { return n_molecules + n_motifs; }
  std::size_t feature_dim() const { return n_motifs + 1; }
  int motif_node(std::size_t motif) const { return static_cast<int>(n_molecules + motif); }
  bool is_molecule(int node) const { return node >= 0 && static_cast<std::size_t>(node) < n_molecules; }
  std::span<const double> node_features(int node) const {
    return {features.data() + static_cast<std::size_t>(node) * feature_dim(), feature_dim()};
  }
  std::vector<WeightedEdge> edges() const;

  bool operator==(const HeteroMotifGraph&) const = default;
};

// Edges from raw per-molecule occurrences. Molecule-motif edges carry tf-idf
// of the occurrence count. Motif pairs get a PMI edge over the molecules
// containing both when, in some molecule, an occurrence of one shares an atom
// with an occurrence of the other; negative PMI is dropped. Features hold the
// occurrence counts of molecule nodes and zeros elsewhere.
HeteroMotifGraph build_graph(const std::vector<std::vector<motif::Occurrence>>& occurrences, std::size_t n_motifs);

// Replays the vocabulary on every molecule, then fills molecular weights and
// motif-node features (the motif's own replay counts and fragment weight).
HeteroMotifGraph build_graph(const std::vector<chem::Molecule>& corpus, const motif::MotifVocabulary& vocab);

// Read-only view of a graph, optionally with one extra query molecule node
// (id node_count of the base) linked by tf-idf edges against frozen corpus
// statistics.
class GraphView {
 public:
  explicit GraphView(const HeteroMotifGraph& g) : g_(&g) {}

  const HeteroMotifGraph& base() const { return *g_; }
  std::size_t node_count() const { return g_->node_count() + (has_query_ ? 1 : 0); }
  std::size_t feature_dim() const { return g_->feature_dim(); }
  bool has_query() const { return has_query_; }
  int query_node() const { return static_cast<int>(g_->node_count()); }
  bool is_molecule(int node) const { return g_->is_molecule(node) || (has_query_ && node == query_node()); }

  std::vector<Edge> neighbors(int node) const;
  std::span<const double> node_features(int node) const;

 private:
  friend GraphView attach_query(const HeteroMotifGraph&, const chem::Molecule&, const motif::MotifVocabulary&);

  const HeteroMotifGraph* g_;
  bool has_query_ = false;
  std::vector<Edge> query_edges_;
  std::vector<double> query_features_;
};

GraphView attach_query(const HeteroMotifGraph& g, const chem::Molecule& m, const motif::MotifVocabulary& vocab);

inline constexpr int kSamplerHops = 3;
inline const std::vector<int> kDefaultSampleSizes = {10, 5, 5};

struct SampledSubgraph {
  std::vector<int> nodes;                     // global ids, seeds first
  std::vector<int> seed_index;                // local index of each seed
  std::vector<std::vector<std::vector<int>>> hops;  // [seed][hop] global ids
  std::vector<WeightedEdge> edges;            // induced, local indices

  bool operator==(const SampledSubgraph&) const = default;
};

// Breadth-first sampling per seed: hop h draws at most sizes[h] unvisited
// nodes, without replacement, from the neighbours of hop h-1. Throws
// InvalidSeed for a seed that is not a molecule node, DomainError for a
// non-positive size.
SampledSubgraph sample_khop(const GraphView& g, const std::vector<int>& seeds, const std::vector<int>& sizes,
                            std::uint64_t rng_seed);

// Structural hash covering counts, edges and features.
std::uint64_t graph_hash(const HeteroMotifGraph& g);

// "i j weight" per undirected edge with i < j.
void write_edge_list(std::ostream& out, const HeteroMotifGraph& g);
std::string graph_manifest_json(const HeteroMotifGraph& g, const std::string& vocab_path);
// Throws FormatError when the manifest does not follow the schema.
void validate_graph_manifest(const std::string& json_text);

}  // namespace moms::hetero
