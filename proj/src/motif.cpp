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

#include "moms/motif.hpp"

#include <algorithm>
#include <sstream>

#include "moms/canonical.hpp"
#include "moms/error.hpp"
#include "moms/runtime.hpp"
#include "moms/smiles.hpp"

namespace moms::motif {

using chem::Molecule;

namespace {

long long pack(int a, int b) { return (static_cast<long long>(a) << 32) | static_cast<unsigned>(b); }

std::vector<int> union_atoms(const MoleculeFragments& mf, int a, int b) {
  std::vector<int> atoms;
  for (std::size_t i = 0; i < mf.fragment_of_atom.size(); ++i) {
    int f = mf.fragment_of_atom[i];
    if (f == a || f == b) atoms.push_back(static_cast<int>(i));
  }
  return atoms;
}

const std::string& pair_key(MoleculeFragments& mf, int a, int b) {
  auto [it, inserted] = mf.pair_keys.try_emplace(pack(a, b));
  if (inserted) it->second = subgraph_key(mf.molecule, union_atoms(mf, a, b));
  return it->second;
}

std::vector<int> fragment_sizes(const MoleculeFragments& mf) {
  std::vector<int> sizes(mf.fragment_of_atom.size(), 0);
  for (int f : mf.fragment_of_atom) ++sizes[f];
  return sizes;
}

// Merges every non-overlapping adjacent pair whose union has the given key,
// scanning pairs in label order. Returns the atom sets of the merged fragments.
std::vector<std::vector<int>> merge_matching(MoleculeFragments& mf, const std::string& key, int key_atoms) {
  std::vector<std::vector<int>> merged;
  auto pairs = mf.adjacent_pairs();
  if (pairs.empty()) return merged;
  auto sizes = fragment_sizes(mf);
  std::vector<char> used(mf.fragment_of_atom.size(), 0);
  for (auto [a, b] : pairs) {
    if (used[a] || used[b]) continue;
    if (key_atoms >= 0 && sizes[a] + sizes[b] != key_atoms) continue;
    if (pair_key(mf, a, b) != key) continue;
    used[a] = used[b] = 1;
    merged.push_back(union_atoms(mf, a, b));
  }
  if (merged.empty()) return merged;
  for (const auto& atoms : merged) {
    for (int x : atoms) mf.fragment_of_atom[x] = atoms.front();
  }
  std::erase_if(mf.pair_keys, [&](const auto& kv) {
    return used[static_cast<int>(kv.first >> 32)] || used[static_cast<int>(kv.first & 0xffffffffLL)];
  });
  return merged;
}

}  // namespace

std::vector<std::vector<int>> MoleculeFragments::fragments() const {
  std::vector<std::vector<int>> out;
  std::vector<int> slot(fragment_of_atom.size(), -1);
  for (std::size_t i = 0; i < fragment_of_atom.size(); ++i) {
    int f = fragment_of_atom[i];
    if (slot[f] < 0) {
      slot[f] = static_cast<int>(out.size());
      out.emplace_back();
    }
    out[slot[f]].push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<std::pair<int, int>> MoleculeFragments::adjacent_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& bd : molecule.bonds) {
    int a = fragment_of_atom[bd.begin], b = fragment_of_atom[bd.end];
    if (a == b) continue;
    pairs.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

std::size_t FragmentState::fragment_count() const {
  std::size_t n = 0;
  for (const auto& mf : molecules) {
    for (std::size_t i = 0; i < mf.fragment_of_atom.size(); ++i) n += mf.fragment_of_atom[i] == static_cast<int>(i);
  }
  return n;
}

std::size_t FragmentState::adjacency_count() const {
  std::size_t n = 0;
  for (const auto& mf : molecules) n += mf.adjacent_pairs().size();
  return n;
}

int MotifVocabulary::find(const std::string& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? -1 : it->second;
}

bool MotifVocabulary::add(MotifEntry entry) {
  if (index_.count(entry.key)) return false;
  index_.emplace(entry.key, static_cast<int>(entries_.size()));
  entries_.push_back(std::move(entry));
  return true;
}

FragmentState init_fragments(const std::vector<Molecule>& corpus) {
  if (corpus.empty()) throw EmptyCorpus("motif mining needs at least one molecule");
  FragmentState state;
  state.molecules.reserve(corpus.size());
  for (const auto& m : corpus) {
    MoleculeFragments mf;
    mf.molecule = m;
    mf.fragment_of_atom.resize(m.atom_count());
    for (std::size_t i = 0; i < m.atom_count(); ++i) mf.fragment_of_atom[i] = static_cast<int>(i);
    state.molecules.push_back(std::move(mf));
  }
  return state;
}

PairCount most_frequent_pair(FragmentState& state) {
  const std::size_t n = state.molecules.size();
  std::vector<std::vector<const std::string*>> per_molecule(n);
  parallel_for(n, [&](std::size_t i) {
    auto& mf = state.molecules[i];
    for (auto [a, b] : mf.adjacent_pairs()) per_molecule[i].push_back(&pair_key(mf, a, b));
  });
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& keys : per_molecule) {
    for (const auto* k : keys) ++counts[*k];
  }
  if (counts.empty()) throw NoAdjacentPairs("no adjacent fragment pairs remain");
  PairCount best;
  for (const auto& [key, count] : counts) {
    if (count > best.count || (count == best.count && key < best.key)) best = {key, count};
  }
  return best;
}

RoundResult merge_round(FragmentState& state, MotifVocabulary& vocab) {
  RoundResult result;
  result.winner = most_frequent_pair(state);
  std::vector<int> exemplar;
  const Molecule* exemplar_mol = nullptr;
  for (auto& mf : state.molecules) {
    auto merged = merge_matching(mf, result.winner.key, -1);
    result.merges += merged.size();
    if (!merged.empty() && exemplar_mol == nullptr) {
      exemplar = merged.front();
      exemplar_mol = &mf.molecule;
    }
  }
  Molecule graph = motif_graph(*exemplar_mol, exemplar);
  result.valid = valid_motif(graph);
  if (result.valid && vocab.size() < vocab.capacity()) {
    result.added = vocab.add({result.winner.key, std::move(graph), result.winner.count});
  }
  return result;
}

MotifVocabulary mine_vocabulary(const std::vector<Molecule>& corpus, std::size_t k) {
  FragmentState state = init_fragments(corpus);
  MotifVocabulary vocab(k);
  for (std::size_t round = 0; round < k; ++round) {
    try {
      merge_round(state, vocab);
    } catch (const NoAdjacentPairs&) {
      break;
    }
  }
  return vocab;
}

bool valid_motif(const Molecule& fragment) {
  return fragment.atom_count() > 0 && fragment.atom_count() <= kMaxMotifAtoms && fragment.connected() &&
         chem::valence_legal(fragment);
}

std::string subgraph_key(const Molecule& m, const std::vector<int>& atoms) {
  // Lightweight induced subgraph; ring perception is not needed for the key.
  Molecule sub;
  std::vector<int> remap(m.atom_count(), -1);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    remap[atoms[i]] = static_cast<int>(i);
    sub.atoms.push_back(m.atoms[atoms[i]]);
  }
  sub.adjacency.resize(atoms.size());
  for (int x : atoms) {
    for (const auto& nb : m.adjacency[x]) {
      if (nb.atom < x || remap[nb.atom] < 0) continue;
      int bi = static_cast<int>(sub.bonds.size());
      int u = remap[x], v = remap[nb.atom];
      sub.bonds.push_back({u, v, m.bonds[nb.bond].order, false});
      sub.adjacency[u].push_back({v, bi});
      sub.adjacency[v].push_back({u, bi});
    }
  }
  return chem::canonical_key(sub);
}

Molecule motif_graph(const Molecule& m, const std::vector<int>& atoms) {
  std::vector<int> sorted = atoms;
  std::sort(sorted.begin(), sorted.end());
  Molecule sub = chem::induced_subgraph(m, sorted);
  sub.id.clear();
  chem::complete_valence(sub);
  return chem::canonicalize(sub);
}

std::vector<Occurrence> replay(const Molecule& m, const MotifVocabulary& vocab) {
  MoleculeFragments mf;
  mf.molecule = m;
  mf.fragment_of_atom.resize(m.atom_count());
  for (std::size_t i = 0; i < m.atom_count(); ++i) mf.fragment_of_atom[i] = static_cast<int>(i);
  std::vector<Occurrence> out;
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    const auto& entry = vocab[v];
    if (entry.fragment.atom_count() > m.atom_count()) continue;
    auto merged = merge_matching(mf, entry.key, static_cast<int>(entry.fragment.atom_count()));
    for (auto& atoms : merged) out.push_back({static_cast<int>(v), std::move(atoms)});
  }
  return out;
}

std::vector<int> motif_occurrences(const Molecule& m, const MotifVocabulary& vocab) {
  std::vector<int> counts(vocab.size(), 0);
  for (const auto& occ : replay(m, vocab)) ++counts[occ.motif];
  return counts;
}

void write_vocabulary(std::ostream& out, const MotifVocabulary& vocab) {
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const auto& e = vocab[i];
    out << (i + 1) << '\t' << e.key << '\t' << e.frequency << '\t' << chem::write_smiles(e.fragment) << '\n';
  }
}

MotifVocabulary read_vocabulary(std::istream& in) {
  std::vector<MotifEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '\t')) fields.push_back(field);
    if (fields.size() != 4) throw FormatError(line_no, "expected 4 tab-separated fields");
    MotifEntry e;
    try {
      if (std::stoul(fields[0]) != entries.size() + 1) throw FormatError(line_no, "rank out of sequence");
      e.frequency = std::stoull(fields[2]);
    } catch (const std::logic_error&) {
      throw FormatError(line_no, "malformed number");
    }
    e.key = fields[1];
    try {
      Molecule frag = chem::parse_smiles(fields[3], {.fragment = true});
      chem::complete_valence(frag);
      e.fragment = chem::canonicalize(frag);
    } catch (const Error& err) {
      throw FormatError(line_no, err.what());
    }
    if (chem::canonical_key(e.fragment) != e.key) throw FormatError(line_no, "fragment does not match key");
    entries.push_back(std::move(e));
  }
  MotifVocabulary vocab(entries.size());
  for (auto& e : entries) {
    if (!vocab.add(std::move(e))) throw FormatError(line_no, "duplicate motif key");
  }
  return vocab;
}

}  // namespace moms::motif
