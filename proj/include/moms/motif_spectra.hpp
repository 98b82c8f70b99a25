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

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "moms/isotopes.hpp"
#include "moms/molecule.hpp"
#include "moms/motif.hpp"
#include "moms/spectra.hpp"

namespace moms::motif {

inline constexpr int kMaxIsotopeShift = 3;
inline constexpr std::size_t kMaxCleavageFragments = 8;
inline constexpr double kFragmentIntensity = 0.3;

// Relative abundances of the molecular ion at integer mass shifts 0..max_shift
// (shift 0 normalized to 1). Zero-abundance shifts are omitted.
std::vector<std::pair<int, double>> isotope_pattern(const chem::Molecule& m, int max_shift = kMaxIsotopeShift,
                                                    const chem::IsotopeTable& table = chem::IsotopeTable::standard());

double monoisotopic_mass(const chem::Molecule& m, const chem::IsotopeTable& table);

// Both sides of every acyclic single-bond cut, hydrogens kept from the parent,
// deduplicated by canonical key, at most the eight heaviest.
std::vector<chem::Molecule> cleavage_fragments(const chem::Molecule& m);

struct MotifSpectrum {
  spectra::Spectrum spectrum;
  std::string key;
};

// Molecular ion at 1.0 with its isotope satellites, cleavage fragments at 0.3,
// then l2-normalized. Bin b lives at index b - 1. Throws OutOfRange when the
// molecular ion lies above max_mz.
MotifSpectrum build_motif_spectrum(const chem::Molecule& motif, int max_mz = spectra::kMaxMz,
                                   const chem::IsotopeTable& table = chem::IsotopeTable::standard());

// Row-major |V| x max_mz matrix of motif spectra. Values are rounded to single
// precision so the persisted blob reloads exactly.
struct SpectrumMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
  bool operator==(const SpectrumMatrix&) const = default;
};

// Rows whose motif is out of range are left zero with a warning.
SpectrumMatrix motif_spectrum_matrix(const MotifVocabulary& vocab, int max_mz = spectra::kMaxMz);

// Blob layout: uint32 rows, uint32 cols, then rows*cols float32, little-endian.
void write_spectrum_matrix(std::ostream& out, const SpectrumMatrix& matrix);
SpectrumMatrix read_spectrum_matrix(std::istream& in);

}  // namespace moms::motif
