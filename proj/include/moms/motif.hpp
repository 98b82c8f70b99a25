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

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "moms/molecule.hpp"

namespace moms::motif {

inline constexpr std::size_t kMaxMotifAtoms = 30;
inline constexpr std::size_t kDefaultVocabularySize = 300;

// Partition of one molecule's atoms. Each fragment is labelled by its lowest
// atom index, so fragment_of_atom[a] <= a and fragment_of_atom[l] == l for
// every label l.
struct MoleculeFragments {
  chem::Molecule molecule;
  std::vector<int> fragment_of_atom;
  // Canonical key of the union of two adjacent fragments, keyed by labels.
  std::unordered_map<long long, std::string> pair_keys;

  std::vector<std::vector<int>> fragments() const;
  // Adjacent fragment label pairs (a < b), sorted, each listed once.
  std::vector<std::pair<int, int>> adjacent_pairs() const;
};

struct FragmentState {
  std::vector<MoleculeFragments> molecules;

  std::size_t fragment_count() const;
  std::size_t adjacency_count() const;
};

struct MotifEntry {
  std::string key;
  // Hydrogen-completed, canonically ordered motif graph.
  chem::Molecule fragment;
  std::size_t frequency = 0;

  bool operator==(const MotifEntry&) const = default;
};

class MotifVocabulary {
 public:
  MotifVocabulary() = default;
  explicit MotifVocabulary(std::size_t capacity) : capacity_(capacity) {}

  const std::vector<MotifEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t capacity() const { return capacity_; }
  const MotifEntry& operator[](std::size_t i) const { return entries_[i]; }

  // Index of the entry with this key, or -1.
  int find(const std::string& key) const;
  // Appends unless the key is already present; returns whether it was added.
  bool add(MotifEntry entry);

 private:
  std::size_t capacity_ = kDefaultVocabularySize;
  std::vector<MotifEntry> entries_;
  std::unordered_map<std::string, int> index_;
};

struct PairCount {
  std::string key;
  std::size_t count = 0;
};

struct RoundResult {
  PairCount winner;
  std::size_t merges = 0;
  bool valid = false;
  bool added = false;
};

FragmentState init_fragments(const std::vector<chem::Molecule>& corpus);

PairCount most_frequent_pair(FragmentState& state);

RoundResult merge_round(FragmentState& state, MotifVocabulary& vocab);

MotifVocabulary mine_vocabulary(const std::vector<chem::Molecule>& corpus, std::size_t k);

// Connected, at most kMaxMotifAtoms heavy atoms, valence-legal.
bool valid_motif(const chem::Molecule& fragment);

// Key of the subgraph induced by atoms (need not be sorted).
std::string subgraph_key(const chem::Molecule& m, const std::vector<int>& atoms);

// Motif graph for a set of atoms of m: induced, hydrogen-completed, canonical.
chem::Molecule motif_graph(const chem::Molecule& m, const std::vector<int>& atoms);

struct Occurrence {
  int motif = 0;
  std::vector<int> atoms;  // sorted
};

// Replays the vocabulary merges in rank order on one molecule. Nested merges
// each produce an occurrence, so occurrences may share atoms.
std::vector<Occurrence> replay(const chem::Molecule& m, const MotifVocabulary& vocab);

std::vector<int> motif_occurrences(const chem::Molecule& m, const MotifVocabulary& vocab);

void write_vocabulary(std::ostream& out, const MotifVocabulary& vocab);
MotifVocabulary read_vocabulary(std::istream& in);

}  // namespace moms::motif
