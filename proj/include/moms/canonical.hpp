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

#include <string>
#include <vector>

#include "moms/molecule.hpp"

namespace moms::chem {

// Isomorphism-complete label of a connected fragment over element, formal
// charge, aromaticity and bond order: two fragments share a key iff they are
// isomorphic as attributed graphs. Colour refinement followed by exhaustive
// individualization of the remaining ties; intended for small graphs.
//
// Throws DisconnectedFragment.
std::string canonical_key(const Molecule& fragment);

// canonical_key without the connectivity requirement.
std::string canonical_key_unchecked(const Molecule& m);

// Canonical atom order including hydrogen counts: element i of the result is
// the original index of the atom placed at position i.
std::vector<int> canonical_order(const Molecule& m);

// m with atoms permuted into canonical order; identical for every SMILES
// spelling of the same molecule.
Molecule canonicalize(const Molecule& m);

}  // namespace moms::chem
