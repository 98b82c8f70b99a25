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

#include "moms/descriptors.hpp"

#include <algorithm>

#include "moms/canonical.hpp"
#include "moms/isotopes.hpp"

namespace moms::chem {

std::uint64_t murmur_hash64(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
  constexpr std::uint64_t m = 0xc6a4a7935bd1e995ULL;
  constexpr int r = 47;
  const std::size_t len = bytes.size();
  std::uint64_t h = seed ^ (static_cast<std::uint64_t>(len) * m);
  std::size_t nblocks = len / 8;
  for (std::size_t b = 0; b < nblocks; ++b) {
    std::uint64_t k = 0;
    for (int i = 7; i >= 0; --i) k = (k << 8) | bytes[b * 8 + i];
    k *= m;
    k ^= k >> r;
    k *= m;
    h ^= k;
    h *= m;
  }
  const std::uint8_t* tail = bytes.data() + nblocks * 8;
  switch (len & 7) {
    case 7:
      h ^= static_cast<std::uint64_t>(tail[6]) << 48;
      [[fallthrough]];
    case 6:
      h ^= static_cast<std::uint64_t>(tail[5]) << 40;
      [[fallthrough]];
    case 5:
      h ^= static_cast<std::uint64_t>(tail[4]) << 32;
      [[fallthrough]];
    case 4:
      h ^= static_cast<std::uint64_t>(tail[3]) << 24;
      [[fallthrough]];
    case 3:
      h ^= static_cast<std::uint64_t>(tail[2]) << 16;
      [[fallthrough]];
    case 2:
      h ^= static_cast<std::uint64_t>(tail[1]) << 8;
      [[fallthrough]];
    case 1:
      h ^= static_cast<std::uint64_t>(tail[0]);
      h *= m;
      break;
    default:
      break;
  }
  h ^= h >> r;
  h *= m;
  h ^= h >> r;
  return h;
}

std::vector<std::uint8_t> encode_path(const Molecule& m, std::span<const int> atoms) {
  auto encode = [&](bool reversed) {
    std::vector<std::uint8_t> out;
    const std::size_t n = atoms.size();
    for (std::size_t i = 0; i < n; ++i) {
      int a = atoms[reversed ? n - 1 - i : i];
      if (i > 0) {
        int prev = atoms[reversed ? n - i : i - 1];
        out.push_back(static_cast<std::uint8_t>(m.bonds[m.bond_between(prev, a)].order));
      }
      out.push_back(static_cast<std::uint8_t>(static_cast<int>(m.atoms[a].element) + 1));
    }
    return out;
  };
  auto fwd = encode(false);
  auto rev = encode(true);
  return std::min(fwd, rev);
}

Fingerprint path_fingerprint(const Molecule& m) {
  Fingerprint fp;
  std::vector<int> path;
  std::vector<bool> on_path(m.atom_count(), false);
  auto extend = [&](auto&& self) -> void {
    int tip = path.back();
    for (const auto& nb : m.adjacency[tip]) {
      if (on_path[nb.atom]) continue;
      path.push_back(nb.atom);
      on_path[nb.atom] = true;
      // Each path is met from both ends; only the copy starting at the lower
      // atom index is hashed.
      if (path.front() < path.back()) {
        auto bytes = encode_path(m, path);
        fp.bits.set(murmur_hash64(bytes, kFingerprintSeed) % kFingerprintBits);
      }
      if (static_cast<int>(path.size()) - 1 < kMaxPathBonds) self(self);
      on_path[nb.atom] = false;
      path.pop_back();
    }
  };
  for (std::size_t s = 0; s < m.atom_count(); ++s) {
    path.assign(1, static_cast<int>(s));
    on_path[s] = true;
    extend(extend);
    on_path[s] = false;
  }
  return fp;
}

double molecular_weight(const Molecule& m) {
  double w = 0.0;
  for (const auto& a : m.atoms) {
    w += average_weight(a.element) + a.total_h() * average_weight(Element::H);
  }
  return w;
}

double monoisotopic_mass(const Molecule& m) {
  const auto& table = IsotopeTable::standard();
  double w = 0.0;
  for (const auto& a : m.atoms) {
    w += table.principal_mass(a.element) + a.total_h() * table.principal_mass(Element::H);
  }
  return w;
}

Molecule murcko_scaffold_graph(const Molecule& m) {
  if (m.rings.empty()) return Molecule{};
  std::vector<bool> alive(m.atom_count(), true);
  std::vector<int> degree(m.atom_count());
  for (std::size_t i = 0; i < m.atom_count(); ++i) degree[i] = static_cast<int>(m.degree(static_cast<int>(i)));
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < m.atom_count(); ++i) {
      if (!alive[i] || m.atoms[i].in_ring || degree[i] > 1) continue;
      alive[i] = false;
      changed = true;
      for (const auto& nb : m.adjacency[i]) {
        if (alive[nb.atom]) --degree[nb.atom];
      }
    }
  }
  std::vector<int> keep;
  for (std::size_t i = 0; i < m.atom_count(); ++i) {
    if (alive[i]) keep.push_back(static_cast<int>(i));
  }
  return induced_subgraph(m, keep);
}

std::string murcko_scaffold(const Molecule& m) {
  Molecule scaffold = murcko_scaffold_graph(m);
  if (scaffold.atom_count() == 0) return std::string(kAcyclicScaffold);
  return canonical_key_unchecked(scaffold);
}

}  // namespace moms::chem
