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

// Independent reference computations shared by unit tests and the acceptance
// suite.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "moms/canonical.hpp"
#include "moms/isotopes.hpp"
#include "moms/motif.hpp"

namespace moms::testing {

using OccurrenceCorpus = std::vector<std::vector<motif::Occurrence>>;

inline OccurrenceCorpus random_occurrences(std::mt19937_64& rng, std::size_t molecules, std::size_t motifs) {
  OccurrenceCorpus corpus(molecules);
  for (auto& occ : corpus) {
    int atoms = 2 + static_cast<int>(rng() % 29);
    int n = static_cast<int>(rng() % 8);
    for (int k = 0; k < n; ++k) {
      std::set<int> picked;
      int size = 1 + static_cast<int>(rng() % 5);
      for (int s = 0; s < size; ++s) picked.insert(static_cast<int>(rng() % atoms));
      occ.push_back({static_cast<int>(rng() % motifs), std::vector<int>(picked.begin(), picked.end())});
    }
  }
  return corpus;
}

// Edge weights recounted straight from the definitions, keyed by node pair
// (molecules first, then motifs).
inline std::map<std::pair<int, int>, double> recount_edges(const OccurrenceCorpus& corpus, std::size_t motifs) {
  const int n = static_cast<int>(corpus.size());
  const double m = static_cast<double>(n);
  auto contains = [&](int mol, int v) {
    for (const auto& o : corpus[mol]) {
      if (o.motif == v) return true;
    }
    return false;
  };
  std::vector<int> df(motifs, 0);
  for (int i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < motifs; ++v) df[v] += contains(i, static_cast<int>(v));
  }
  std::map<std::pair<int, int>, double> edges;
  for (int i = 0; i < n; ++i) {
    for (std::size_t v = 0; v < motifs; ++v) {
      int c = 0;
      for (const auto& o : corpus[i]) c += o.motif == static_cast<int>(v);
      if (c > 0) edges[{i, n + static_cast<int>(v)}] = c * (std::log((1.0 + m) / (1.0 + df[v])) + 1.0);
    }
  }
  for (std::size_t x = 0; x < motifs; ++x) {
    for (std::size_t y = x + 1; y < motifs; ++y) {
      int joint = 0;
      bool shared = false;
      for (int i = 0; i < n; ++i) {
        if (contains(i, static_cast<int>(x)) && contains(i, static_cast<int>(y))) ++joint;
        for (const auto& a : corpus[i]) {
          for (const auto& b : corpus[i]) {
            if (a.motif != static_cast<int>(x) || b.motif != static_cast<int>(y)) continue;
            std::set<int> sa(a.atoms.begin(), a.atoms.end());
            for (int atom : b.atoms) shared |= sa.count(atom) > 0;
          }
        }
      }
      if (!shared || joint == 0) continue;
      double p_ij = joint / m, p_i = df[x] / m, p_j = df[y] / m;
      double w = std::log(p_ij / (p_i * p_j));
      if (w >= 0.0) edges[{n + static_cast<int>(x), n + static_cast<int>(y)}] = w;
    }
  }
  return edges;
}

// Exhaustive miner kept deliberately naive: fragments are atom sets, every
// pair of fragments is tested for a crossing bond, and keys come from the
// fully perceived induced subgraph.
struct ReferenceMiner {
  struct Mol {
    chem::Molecule m;
    std::vector<std::set<int>> frags;
  };
  std::vector<Mol> mols;

  explicit ReferenceMiner(const std::vector<chem::Molecule>& corpus) {
    for (const auto& m : corpus) {
      Mol r{m, {}};
      for (std::size_t i = 0; i < m.atom_count(); ++i) r.frags.push_back({static_cast<int>(i)});
      mols.push_back(std::move(r));
    }
  }

  static bool adjacent(const chem::Molecule& m, const std::set<int>& a, const std::set<int>& b) {
    for (const auto& bd : m.bonds) {
      if ((a.count(bd.begin) && b.count(bd.end)) || (a.count(bd.end) && b.count(bd.begin))) return true;
    }
    return false;
  }

  static std::string union_key(const chem::Molecule& m, const std::set<int>& a, const std::set<int>& b) {
    std::set<int> u = a;
    u.insert(b.begin(), b.end());
    return chem::canonical_key(chem::induced_subgraph(m, std::vector<int>(u.begin(), u.end())));
  }

  // Returns false when no adjacent pair exists.
  bool round(std::vector<std::pair<std::string, std::size_t>>& vocab, std::size_t k) {
    std::map<std::string, std::size_t> counts;
    for (const auto& r : mols) {
      for (std::size_t i = 0; i < r.frags.size(); ++i) {
        for (std::size_t j = i + 1; j < r.frags.size(); ++j) {
          if (adjacent(r.m, r.frags[i], r.frags[j])) ++counts[union_key(r.m, r.frags[i], r.frags[j])];
        }
      }
    }
    if (counts.empty()) return false;
    std::string best;
    std::size_t best_count = 0;
    for (const auto& [key, c] : counts) {
      if (c > best_count) {
        best = key;
        best_count = c;
      }
    }
    std::set<int> exemplar;
    const chem::Molecule* exemplar_mol = nullptr;
    for (auto& r : mols) {
      std::vector<std::pair<int, int>> cands;
      for (std::size_t i = 0; i < r.frags.size(); ++i) {
        for (std::size_t j = i + 1; j < r.frags.size(); ++j) {
          if (adjacent(r.m, r.frags[i], r.frags[j]) && union_key(r.m, r.frags[i], r.frags[j]) == best) {
            cands.emplace_back(static_cast<int>(i), static_cast<int>(j));
          }
        }
      }
      std::sort(cands.begin(), cands.end(), [&](auto x, auto y) {
        auto lx = std::minmax(*r.frags[x.first].begin(), *r.frags[x.second].begin());
        auto ly = std::minmax(*r.frags[y.first].begin(), *r.frags[y.second].begin());
        return lx < ly;
      });
      std::set<int> used;
      std::vector<std::set<int>> next;
      for (auto [i, j] : cands) {
        if (used.count(i) || used.count(j)) continue;
        used.insert(i);
        used.insert(j);
        std::set<int> u = r.frags[i];
        u.insert(r.frags[j].begin(), r.frags[j].end());
        if (!exemplar_mol) {
          exemplar = u;
          exemplar_mol = &r.m;
        }
        next.push_back(u);
      }
      for (std::size_t i = 0; i < r.frags.size(); ++i) {
        if (!used.count(static_cast<int>(i))) next.push_back(r.frags[i]);
      }
      r.frags = next;
    }
    chem::Molecule g = chem::induced_subgraph(*exemplar_mol, std::vector<int>(exemplar.begin(), exemplar.end()));
    chem::complete_valence(g);
    bool valid = g.atom_count() <= 30 && chem::valence_legal(g);
    bool dup = std::any_of(vocab.begin(), vocab.end(), [&](const auto& e) { return e.first == best; });
    if (valid && !dup && vocab.size() < k) vocab.emplace_back(best, best_count);
    return true;
  }

  std::vector<std::pair<std::string, std::size_t>> mine(std::size_t k) {
    std::vector<std::pair<std::string, std::size_t>> vocab;
    for (std::size_t i = 0; i < k; ++i) {
      if (!round(vocab, k)) break;
    }
    return vocab;
  }
};

// Enumerates every isotope assignment of every atom (hydrogens included).
inline std::map<int, double> brute_force_pattern(const chem::Molecule& m) {
  const auto& table = chem::IsotopeTable::standard();
  std::vector<chem::Element> atoms;
  for (const auto& a : m.atoms) {
    atoms.push_back(a.element);
    for (int h = 0; h < a.total_h(); ++h) atoms.push_back(chem::Element::H);
  }
  std::map<int, double> dist;
  std::function<void(std::size_t, double, double)> rec = [&](std::size_t i, double p, double shift) {
    if (i == atoms.size()) {
      dist[static_cast<int>(std::lround(shift))] += p;
      return;
    }
    const auto& isos = table.isotopes(atoms[i]);
    double base = table.principal_mass(atoms[i]);
    for (const auto& iso : isos) rec(i + 1, p * iso.abundance, shift + std::round(iso.mass - base));
  };
  rec(0, 1.0, 0.0);
  return dist;
}

}  // namespace moms::testing
