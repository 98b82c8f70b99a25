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

#include <utility>
#include <vector>

#include "moms/molecule.hpp"

namespace moms::chem {

struct Isotope {
  double mass;       // Daltons
  double abundance;  // fraction; per element the abundances sum to 1
};

// Natural isotopic compositions per element. The default table covers every
// supported element; custom tables are accepted by the isotope-pattern code.
class IsotopeTable {
 public:
  IsotopeTable() = default;

  static const IsotopeTable& standard();

  void set(Element e, std::vector<Isotope> isotopes);
  const std::vector<Isotope>& isotopes(Element e) const;

  // Mass of the most abundant isotope.
  double principal_mass(Element e) const;
  std::size_t principal_index(Element e) const;

 private:
  std::vector<std::vector<Isotope>> table_ = std::vector<std::vector<Isotope>>(kElementCount);
};

// Atom counts per element including hydrogens (explicit + implicit).
std::vector<std::pair<Element, int>> composition(const Molecule& m);

}  // namespace moms::chem
