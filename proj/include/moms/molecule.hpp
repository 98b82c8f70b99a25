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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace moms::chem {

enum class Element : std::uint8_t { H, B, C, N, O, P, S, F, Cl, Br, I };

inline constexpr std::size_t kElementCount = 11;

inline constexpr std::array<Element, kElementCount> kAllElements = {
    Element::H, Element::B,  Element::C,  Element::N, Element::O, Element::P,
    Element::S, Element::F, Element::Cl, Element::Br, Element::I};

std::string_view symbol(Element e);
std::optional<Element> element_from_symbol(std::string_view s);

// Standard valences in ascending order (uncharged).
const std::vector<int>& standard_valences(Element e);

// Average (natural-abundance) atomic weight in Daltons.
double average_weight(Element e);

enum class BondOrder : std::uint8_t { Single = 1, Double = 2, Triple = 3, Aromatic = 4 };

// Valence contribution of a bond; aromatic bonds count 1 (the extra
// pi-electron is accounted per atom, see implicit hydrogen rules).
int valence_contribution(BondOrder order);

struct Atom {
  Element element = Element::C;
  int formal_charge = 0;
  // Hydrogens written explicitly (bracket atoms or folded [H] atoms).
  int explicit_h = 0;
  // Hydrogens implied by standard valence; zero for bracket atoms.
  int implicit_h = 0;
  bool aromatic = false;
  bool in_ring = false;

  int total_h() const { return explicit_h + implicit_h; }

  bool operator==(const Atom&) const = default;
};

struct Bond {
  int begin = 0;
  int end = 0;
  BondOrder order = BondOrder::Single;
  bool in_ring = false;

  int other(int atom) const { return atom == begin ? end : begin; }

  bool operator==(const Bond&) const = default;
};

struct Neighbor {
  int atom;
  int bond;

  bool operator==(const Neighbor&) const = default;
};

// A molecular graph of heavy atoms (hydrogens folded into per-atom counts).
// Build through finalize() so adjacency and ring data stay consistent.
struct Molecule {
  std::string id;
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<std::vector<Neighbor>> adjacency;
  // Smallest set of smallest rings, each ring as a cyclic atom sequence.
  std::vector<std::vector<int>> rings;

  std::size_t atom_count() const { return atoms.size(); }
  std::size_t bond_count() const { return bonds.size(); }
  std::size_t degree(int atom) const { return adjacency[atom].size(); }

  // Index of the bond joining a and b, or -1.
  int bond_between(int a, int b) const;

  std::size_t component_count() const;
  bool connected() const { return component_count() <= 1; }

  bool operator==(const Molecule&) const = default;
};

// Rebuilds adjacency, ring perception (SSSR) and ring flags from atoms and
// bonds. Throws SyntaxError on self loops, duplicate bonds or bad indices.
void finalize(Molecule& m);

// Computes implicit hydrogens for atoms that are not bracket atoms
// (`bracket[i] == false`) and checks every atom against its allowed valences.
// Throws ValenceError when an atom is over-bonded.
void assign_hydrogens(Molecule& m, const std::vector<bool>& bracket);

// Replaces each atom's hydrogen count by its valence completion within this
// graph (as if written in the organic subset, or as a charged bracket atom).
void complete_valence(Molecule& m);

// Hydrogens that valence completion gives an atom in `m`.
int completed_hydrogens(const Molecule& m, int atom);

// True when every atom's bonding plus hydrogens fits an allowed valence.
bool valence_legal(const Molecule& m);

// Subgraph induced by `atom_subset` (all bonds among them). Atom order follows
// the subset order; hydrogen counts are copied from the parent.
Molecule induced_subgraph(const Molecule& m, const std::vector<int>& atom_subset);

// New molecule whose atom i is m.atoms[order[i]].
Molecule reorder_atoms(const Molecule& m, const std::vector<int>& order);

}  // namespace moms::chem
