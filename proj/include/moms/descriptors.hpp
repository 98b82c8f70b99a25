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

#include <bitset>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "moms/molecule.hpp"

namespace moms::chem {

inline constexpr std::size_t kFingerprintBits = 2048;
inline constexpr int kMaxPathBonds = 7;
inline constexpr std::uint64_t kFingerprintSeed = 0x5D;

// Hashed linear-path fingerprint. Not bit-identical to any external toolkit.
struct Fingerprint {
  std::bitset<kFingerprintBits> bits;

  std::size_t n_bits_set() const { return bits.count(); }
  bool operator==(const Fingerprint&) const = default;
};

// MurmurHash64A over bytes read little-endian, so results are identical on
// every platform.
std::uint64_t murmur_hash64(std::span<const std::uint8_t> bytes, std::uint64_t seed);

// Direction-independent byte encoding of a simple path given as a sequence of
// atoms: element codes interleaved with bond orders, taking whichever of the
// two reading directions is lexicographically smaller.
std::vector<std::uint8_t> encode_path(const Molecule& m, std::span<const int> atoms);

// Every simple path of 1..kMaxPathBonds bonds sets bit hash(path) mod 2048.
Fingerprint path_fingerprint(const Molecule& m);

// Sum of average atomic weights including hydrogens.
double molecular_weight(const Molecule& m);

// Sum of principal-isotope masses including hydrogens.
double monoisotopic_mass(const Molecule& m);

inline constexpr std::string_view kAcyclicScaffold = "ACYCLIC";

// Ring systems plus linkers: degree<=1 non-ring atoms are pruned to a
// fixpoint. Returns an empty molecule when m has no rings.
Molecule murcko_scaffold_graph(const Molecule& m);

// canonical key of the scaffold graph, or "ACYCLIC".
std::string murcko_scaffold(const Molecule& m);

}  // namespace moms::chem
