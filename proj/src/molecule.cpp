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

#include "moms/molecule.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <set>
#include <string>
#include <utility>

#include "moms/error.hpp"

namespace moms::chem {

namespace {

struct ElementInfo {
  std::string_view symbol;
  double average_weight;
};

// IUPAC conventional atomic weights.
constexpr std::array<ElementInfo, kElementCount> kElementInfo = {{
    {"H", 1.008},
    {"B", 10.81},
    {"C", 12.011},
    {"N", 14.007},
    {"O", 15.999},
    {"P", 30.974},
    {"S", 32.06},
    {"F", 18.998},
    {"Cl", 35.45},
    {"Br", 79.904},
    {"I", 126.904},
}};

std::size_t index_of(Element e) { return static_cast<std::size_t>(e); }

// Valences allowed for an atom once its formal charge is taken into account.
std::vector<int> charged_valences(Element e, int charge) {
  std::vector<int> out;
  for (int v : standard_valences(e)) {
    int shifted = v;
    switch (e) {
      case Element::N:
      case Element::O:
      case Element::P:
      case Element::S:
      case Element::F:
      case Element::Cl:
      case Element::Br:
      case Element::I:
        shifted = v + charge;
        break;
      case Element::B:
        shifted = v - charge;
        break;
      case Element::C:
      case Element::H:
        shifted = v - std::abs(charge);
        break;
    }
    if (shifted >= 0) out.push_back(shifted);
  }
  if (out.empty()) out.push_back(0);
  return out;
}

int bond_valence_sum(const Molecule& m, int atom) {
  int sum = 0;
  for (const auto& nb : m.adjacency[atom]) {
    sum += valence_contribution(m.bonds[nb.bond].order);
  }
  return sum;
}

bool has_multiple_bond(const Molecule& m, int atom) {
  for (const auto& nb : m.adjacency[atom]) {
    auto o = m.bonds[nb.bond].order;
    if (o == BondOrder::Double || o == BondOrder::Triple) return true;
  }
  return false;
}

// Bonding demand of an atom before hydrogens. Aromatic atoms carry one extra
// unit for the delocalized bond when it fits the lowest allowed valence.
int bonding_demand(const Molecule& m, int atom, const std::vector<int>& valences) {
  int total = bond_valence_sum(m, atom);
  const Atom& a = m.atoms[atom];
  if (a.aromatic && !has_multiple_bond(m, atom) && total + 1 + a.explicit_h <= valences.front()) {
    total += 1;
  }
  return total;
}

using BondSet = std::vector<std::uint64_t>;

BondSet make_bondset(std::size_t nbonds) { return BondSet((nbonds + 63) / 64, 0); }

void toggle(BondSet& s, int b) { s[b / 64] ^= (std::uint64_t{1} << (b % 64)); }

bool test(const BondSet& s, int b) { return (s[b / 64] >> (b % 64)) & 1u; }

int lowest_bit(const BondSet& s) {
  for (std::size_t w = 0; w < s.size(); ++w) {
    if (s[w] != 0) return static_cast<int>(w * 64 + __builtin_ctzll(s[w]));
  }
  return -1;
}

// Orders the bonds of a simple cycle into an atom walk starting at its lowest
// atom index.
std::vector<int> cycle_atoms(const Molecule& m, const std::vector<int>& bonds) {
  int start = m.atom_count();
  for (int b : bonds) start = std::min({start, m.bonds[b].begin, m.bonds[b].end});
  std::set<int> remaining(bonds.begin(), bonds.end());
  std::vector<int> walk{start};
  int current = start;
  while (!remaining.empty()) {
    int next_bond = -1;
    int best_next = -1;
    for (int b : remaining) {
      const Bond& bd = m.bonds[b];
      if (bd.begin != current && bd.end != current) continue;
      int other = bd.other(current);
      if (next_bond < 0 || other < best_next) {
        next_bond = b;
        best_next = other;
      }
    }
    if (next_bond < 0) break;
    remaining.erase(next_bond);
    if (best_next == start) break;
    walk.push_back(best_next);
    current = best_next;
  }
  return walk;
}

// Horton candidate cycles reduced to a minimum cycle basis by Gaussian
// elimination over GF(2).
std::vector<std::vector<int>> perceive_sssr(const Molecule& m) {
  const int n = static_cast<int>(m.atom_count());
  const int nb = static_cast<int>(m.bond_count());
  int cyclomatic = nb - n + static_cast<int>(m.component_count());
  if (cyclomatic <= 0) return {};

  struct Candidate {
    std::vector<int> bonds;  // sorted
    BondSet set;
  };
  std::vector<Candidate> candidates;
  std::set<std::vector<int>> seen;

  for (int root = 0; root < n; ++root) {
    std::vector<int> parent_bond(n, -1), depth(n, -1);
    std::deque<int> queue{root};
    depth[root] = 0;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (const auto& nbr : m.adjacency[u]) {
        if (depth[nbr.atom] >= 0) continue;
        depth[nbr.atom] = depth[u] + 1;
        parent_bond[nbr.atom] = nbr.bond;
        queue.push_back(nbr.atom);
      }
    }
    auto path_to_root = [&](int v, std::vector<int>& atoms, std::vector<int>& bonds) {
      atoms.push_back(v);
      while (v != root) {
        int b = parent_bond[v];
        bonds.push_back(b);
        v = m.bonds[b].other(v);
        atoms.push_back(v);
      }
    };
    for (int b = 0; b < nb; ++b) {
      const Bond& bd = m.bonds[b];
      int x = bd.begin, y = bd.end;
      if (depth[x] < 0 || depth[y] < 0) continue;
      if (parent_bond[x] == b || parent_bond[y] == b) continue;
      std::vector<int> ax, bx, ay, by;
      path_to_root(x, ax, bx);
      path_to_root(y, ay, by);
      std::set<int> sx(ax.begin(), ax.end());
      int shared = 0;
      for (int a : ay) shared += sx.count(a);
      if (shared != 1) continue;
      std::vector<int> bonds = bx;
      bonds.insert(bonds.end(), by.begin(), by.end());
      bonds.push_back(b);
      std::sort(bonds.begin(), bonds.end());
      if (!seen.insert(bonds).second) continue;
      BondSet s = make_bondset(nb);
      for (int e : bonds) toggle(s, e);
      candidates.push_back({std::move(bonds), std::move(s)});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.bonds.size() != b.bonds.size()) return a.bonds.size() < b.bonds.size();
    return a.bonds < b.bonds;
  });

  // Reduced row-echelon basis keyed by pivot bit.
  std::vector<std::pair<int, BondSet>> basis;
  std::vector<std::vector<int>> rings;
  for (const auto& c : candidates) {
    if (static_cast<int>(rings.size()) == cyclomatic) break;
    BondSet v = c.set;
    for (const auto& [pivot, row] : basis) {
      if (test(v, pivot)) {
        for (std::size_t w = 0; w < v.size(); ++w) v[w] ^= row[w];
      }
    }
    int pivot = lowest_bit(v);
    if (pivot < 0) continue;
    for (auto& [p, row] : basis) {
      if (test(row, pivot)) {
        for (std::size_t w = 0; w < row.size(); ++w) row[w] ^= v[w];
      }
    }
    basis.emplace_back(pivot, v);
    rings.push_back(cycle_atoms(m, c.bonds));
  }
  return rings;
}

}  // namespace

std::string_view symbol(Element e) { return kElementInfo[index_of(e)].symbol; }

std::optional<Element> element_from_symbol(std::string_view s) {
  for (Element e : kAllElements) {
    if (symbol(e) == s) return e;
  }
  return std::nullopt;
}

const std::vector<int>& standard_valences(Element e) {
  static const std::array<std::vector<int>, kElementCount> table = {{
      {1},        // H
      {3},        // B
      {4},        // C
      {3, 5},     // N
      {2},        // O
      {3, 5},     // P
      {2, 4, 6},  // S
      {1},        // F
      {1},        // Cl
      {1},        // Br
      {1},        // I
  }};
  return table[index_of(e)];
}

double average_weight(Element e) { return kElementInfo[index_of(e)].average_weight; }

int valence_contribution(BondOrder order) {
  switch (order) {
    case BondOrder::Single:
      return 1;
    case BondOrder::Double:
      return 2;
    case BondOrder::Triple:
      return 3;
    case BondOrder::Aromatic:
      return 1;
  }
  return 1;
}

int Molecule::bond_between(int a, int b) const {
  for (const auto& nb : adjacency[a]) {
    if (nb.atom == b) return nb.bond;
  }
  return -1;
}

std::size_t Molecule::component_count() const {
  std::vector<bool> seen(atom_count(), false);
  std::size_t components = 0;
  for (std::size_t s = 0; s < atom_count(); ++s) {
    if (seen[s]) continue;
    ++components;
    std::vector<int> stack{static_cast<int>(s)};
    seen[s] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (const auto& nb : adjacency[u]) {
        if (!seen[nb.atom]) {
          seen[nb.atom] = true;
          stack.push_back(nb.atom);
        }
      }
    }
  }
  return components;
}

void finalize(Molecule& m) {
  const int n = static_cast<int>(m.atom_count());
  m.adjacency.assign(n, {});
  std::set<std::pair<int, int>> pairs;
  for (std::size_t b = 0; b < m.bonds.size(); ++b) {
    Bond& bd = m.bonds[b];
    if (bd.begin < 0 || bd.end < 0 || bd.begin >= n || bd.end >= n) {
      throw SyntaxError("bond endpoint out of range");
    }
    if (bd.begin == bd.end) throw SyntaxError("bond joins an atom to itself");
    auto key = std::minmax(bd.begin, bd.end);
    if (!pairs.insert({key.first, key.second}).second) {
      throw SyntaxError("duplicate bond between atoms " + std::to_string(key.first) + " and " +
                        std::to_string(key.second));
    }
    m.adjacency[bd.begin].push_back({bd.end, static_cast<int>(b)});
    m.adjacency[bd.end].push_back({bd.begin, static_cast<int>(b)});
  }
  m.rings = perceive_sssr(m);
  for (auto& a : m.atoms) a.in_ring = false;
  for (auto& bd : m.bonds) bd.in_ring = false;
  for (const auto& ring : m.rings) {
    for (std::size_t i = 0; i < ring.size(); ++i) {
      int a = ring[i];
      int b = ring[(i + 1) % ring.size()];
      m.atoms[a].in_ring = true;
      int bond = m.bond_between(a, b);
      if (bond >= 0) m.bonds[bond].in_ring = true;
    }
  }
}

void assign_hydrogens(Molecule& m, const std::vector<bool>& bracket) {
  for (std::size_t i = 0; i < m.atom_count(); ++i) {
    Atom& a = m.atoms[i];
    auto valences = charged_valences(a.element, a.formal_charge);
    int demand = bonding_demand(m, static_cast<int>(i), valences);
    if (bracket[i]) {
      a.implicit_h = 0;
      if (demand + a.explicit_h > valences.back()) {
        throw ValenceError("atom " + std::to_string(i) + " (" + std::string(symbol(a.element)) +
                           ") exceeds its allowed valence");
      }
      continue;
    }
    demand += a.explicit_h;
    auto it = std::find_if(valences.begin(), valences.end(), [&](int v) { return v >= demand; });
    if (it == valences.end()) {
      throw ValenceError("atom " + std::to_string(i) + " (" + std::string(symbol(a.element)) +
                         ") exceeds its allowed valence");
    }
    a.implicit_h = *it - demand;
  }
}

int completed_hydrogens(const Molecule& m, int atom) {
  const Atom& a = m.atoms[atom];
  auto valences = charged_valences(a.element, a.formal_charge);
  int total = bond_valence_sum(m, atom);
  if (a.aromatic && !has_multiple_bond(m, atom) && total + 1 <= valences.front()) total += 1;
  auto it = std::find_if(valences.begin(), valences.end(), [&](int v) { return v >= total; });
  return it == valences.end() ? 0 : *it - total;
}

void complete_valence(Molecule& m) {
  std::vector<int> h(m.atom_count());
  for (std::size_t i = 0; i < m.atom_count(); ++i) h[i] = completed_hydrogens(m, static_cast<int>(i));
  for (std::size_t i = 0; i < m.atom_count(); ++i) {
    m.atoms[i].explicit_h = 0;
    m.atoms[i].implicit_h = h[i];
  }
}

bool valence_legal(const Molecule& m) {
  for (std::size_t i = 0; i < m.atom_count(); ++i) {
    const Atom& a = m.atoms[i];
    auto valences = charged_valences(a.element, a.formal_charge);
    if (bond_valence_sum(m, static_cast<int>(i)) + a.total_h() > valences.back()) return false;
  }
  return true;
}

Molecule induced_subgraph(const Molecule& m, const std::vector<int>& atom_subset) {
  Molecule out;
  out.id = m.id;
  std::vector<int> remap(m.atom_count(), -1);
  for (std::size_t i = 0; i < atom_subset.size(); ++i) {
    remap[atom_subset[i]] = static_cast<int>(i);
    out.atoms.push_back(m.atoms[atom_subset[i]]);
  }
  for (const Bond& bd : m.bonds) {
    if (remap[bd.begin] >= 0 && remap[bd.end] >= 0) {
      out.bonds.push_back({remap[bd.begin], remap[bd.end], bd.order, false});
    }
  }
  finalize(out);
  return out;
}

Molecule reorder_atoms(const Molecule& m, const std::vector<int>& order) {
  Molecule out;
  out.id = m.id;
  std::vector<int> remap(m.atom_count(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) {
    remap[order[i]] = static_cast<int>(i);
    out.atoms.push_back(m.atoms[order[i]]);
  }
  std::vector<Bond> bonds;
  for (const Bond& bd : m.bonds) {
    int a = remap[bd.begin], b = remap[bd.end];
    if (a > b) std::swap(a, b);
    bonds.push_back({a, b, bd.order, false});
  }
  std::sort(bonds.begin(), bonds.end(), [](const Bond& x, const Bond& y) {
    return std::tie(x.begin, x.end) < std::tie(y.begin, y.end);
  });
  out.bonds = std::move(bonds);
  finalize(out);
  return out;
}

}  // namespace moms::chem
