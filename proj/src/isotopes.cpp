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

#include "moms/isotopes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace moms::chem {

const IsotopeTable& IsotopeTable::standard() {
  // Masses and representative abundances from the IUPAC/NIST isotopic
  // composition tables.
  static const IsotopeTable table = [] {
    IsotopeTable t;
    t.set(Element::H, {{1.00782503207, 0.999885}, {2.0141017778, 0.000115}});
    t.set(Element::B, {{10.0129370, 0.199}, {11.0093054, 0.801}});
    t.set(Element::C, {{12.0, 0.9893}, {13.0033548378, 0.0107}});
    t.set(Element::N, {{14.0030740048, 0.99636}, {15.0001088982, 0.00364}});
    t.set(Element::O, {{15.99491461956, 0.99757}, {16.99913170, 0.00038}, {17.9991610, 0.00205}});
    t.set(Element::P, {{30.97376163, 1.0}});
    t.set(Element::S, {{31.97207100, 0.9499}, {32.97145876, 0.0075}, {33.96786690, 0.0425},
                       {35.96708076, 0.0001}});
    t.set(Element::F, {{18.99840322, 1.0}});
    t.set(Element::Cl, {{34.96885268, 0.7576}, {36.96590259, 0.2424}});
    t.set(Element::Br, {{78.9183371, 0.5069}, {80.9162906, 0.4931}});
    t.set(Element::I, {{126.904473, 1.0}});
    return t;
  }();
  return table;
}

void IsotopeTable::set(Element e, std::vector<Isotope> isotopes) {
  double total = 0.0;
  for (const auto& iso : isotopes) {
    if (iso.abundance < 0.0 || iso.abundance > 1.0) throw std::invalid_argument("isotope abundance outside [0,1]");
    total += iso.abundance;
  }
  if (isotopes.empty() || std::abs(total - 1.0) > 1e-6) {
    throw std::invalid_argument("isotope abundances must sum to 1");
  }
  table_[static_cast<std::size_t>(e)] = std::move(isotopes);
}

const std::vector<Isotope>& IsotopeTable::isotopes(Element e) const {
  return table_[static_cast<std::size_t>(e)];
}

std::size_t IsotopeTable::principal_index(Element e) const {
  const auto& isos = isotopes(e);
  if (isos.empty()) throw std::invalid_argument("no isotopes for element " + std::string(symbol(e)));
  return static_cast<std::size_t>(
      std::max_element(isos.begin(), isos.end(),
                       [](const Isotope& a, const Isotope& b) { return a.abundance < b.abundance; }) -
      isos.begin());
}

double IsotopeTable::principal_mass(Element e) const { return isotopes(e)[principal_index(e)].mass; }

std::vector<std::pair<Element, int>> composition(const Molecule& m) {
  std::array<int, kElementCount> counts{};
  for (const auto& a : m.atoms) {
    counts[static_cast<std::size_t>(a.element)] += 1;
    counts[static_cast<std::size_t>(Element::H)] += a.total_h();
  }
  std::vector<std::pair<Element, int>> out;
  for (Element e : kAllElements) {
    int c = counts[static_cast<std::size_t>(e)];
    if (c > 0) out.emplace_back(e, c);
  }
  return out;
}

}  // namespace moms::chem
