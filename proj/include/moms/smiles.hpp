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

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "moms/molecule.hpp"

namespace moms::chem {

struct SmilesOptions {
  // Fragment mode keeps aromatic atoms and bonds that are not part of a ring,
  // which happens for motifs cut out of aromatic systems.
  bool fragment = false;
};

// Parses the supported SMILES subset: organic-subset and bracket atoms
// (charge, H count), branches, ring closures (digits and %nn), bond symbols
// - = # : and '.' separated components. Stereo marks are ignored with a
// warning; isotope labels are rejected.
//
// Throws SyntaxError or ValenceError.
Molecule parse_smiles(std::string_view text, const SmilesOptions& options = {});

// Non-canonical depth-first SMILES writer. Hydrogen counts that differ from
// the organic-subset default are written as bracket atoms, so
// parse_smiles(write_smiles(m), {.fragment = true}) reproduces the graph.
std::string write_smiles(const Molecule& m);

// Reads "id<TAB>SMILES" records; '#' lines and blank lines are skipped.
// Throws FormatError carrying the offending line number.
std::vector<Molecule> read_corpus(std::istream& in);

void write_corpus(std::ostream& out, const std::vector<Molecule>& corpus);

}  // namespace moms::chem
