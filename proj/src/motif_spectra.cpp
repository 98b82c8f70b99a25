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

#include "moms/motif_spectra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <deque>
#include <set>

#include "moms/canonical.hpp"
#include "moms/error.hpp"
#include "moms/runtime.hpp"

namespace moms::motif {

using chem::Element;
using chem::Molecule;

std::vector<std::pair<int, double>> isotope_pattern(const Molecule& m, int max_shift,
                                                    const chem::IsotopeTable& table) {
  std::vector<double> dist(max_shift + 1, 0.0);
  dist[0] = 1.0;
  for (auto [element, count] : chem::composition(m)) {
    const auto& isos = table.isotopes(element);
    const double base = table.principal_mass(element);
    std::vector<double> atom(max_shift + 1, 0.0);
    for (const auto& iso : isos) {
      long shift = std::lround(iso.mass - base);
      if (shift >= 0 && shift <= max_shift) atom[shift] += iso.abundance;
    }
    for (int c = 0; c < count; ++c) {
      std::vector<double> next(max_shift + 1, 0.0);
      for (int i = 0; i <= max_shift; ++i) {
        if (dist[i] == 0.0) continue;
        for (int j = 0; i + j <= max_shift; ++j) next[i + j] += dist[i] * atom[j];
      }
      dist = std::move(next);
    }
  }
  std::vector<std::pair<int, double>> out;
  for (int s = 0; s <= max_shift; ++s) {
    if (dist[s] > 0.0) out.emplace_back(s, dist[s] / dist[0]);
  }
  return out;
}

double monoisotopic_mass(const Molecule& m, const chem::IsotopeTable& table) {
  double w = 0.0;
  for (const auto& a : m.atoms) w += table.principal_mass(a.element) + a.total_h() * table.principal_mass(Element::H);
  return w;
}

std::vector<Molecule> cleavage_fragments(const Molecule& m) {
  struct Piece {
    Molecule graph;
    std::string key;
    double mass;
  };
  std::vector<Piece> pieces;
  std::set<std::string> seen;
  const auto& table = chem::IsotopeTable::standard();
  for (std::size_t b = 0; b < m.bond_count(); ++b) {
    const auto& bond = m.bonds[b];
    if (bond.in_ring || bond.order != chem::BondOrder::Single) continue;
    for (int start : {bond.begin, bond.end}) {
      std::vector<char> in_side(m.atom_count(), 0);
      std::deque<int> queue{start};
      in_side[start] = 1;
      while (!queue.empty()) {
        int u = queue.front();
        queue.pop_front();
        for (const auto& nb : m.adjacency[u]) {
          if (nb.bond == static_cast<int>(b) || in_side[nb.atom]) continue;
          in_side[nb.atom] = 1;
          queue.push_back(nb.atom);
        }
      }
      std::vector<int> atoms;
      for (std::size_t i = 0; i < m.atom_count(); ++i) {
        if (in_side[i]) atoms.push_back(static_cast<int>(i));
      }
      Molecule side = chem::induced_subgraph(m, atoms);
      side.id.clear();
      std::string key = chem::canonical_key(side);
      if (!seen.insert(key).second) continue;
      double mass = monoisotopic_mass(side, table);
      pieces.push_back({std::move(side), std::move(key), mass});
    }
  }
  std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& a, const Piece& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.key < b.key;
  });
  if (pieces.size() > kMaxCleavageFragments) pieces.resize(kMaxCleavageFragments);
  std::vector<Molecule> out;
  out.reserve(pieces.size());
  for (auto& p : pieces) out.push_back(std::move(p.graph));
  return out;
}

MotifSpectrum build_motif_spectrum(const Molecule& motif, int max_mz, const chem::IsotopeTable& table) {
  const long ion = std::lround(monoisotopic_mass(motif, table));
  if (ion < 1 || ion > max_mz) {
    throw OutOfRange("molecular ion at m/z " + std::to_string(ion) + " outside 1.." + std::to_string(max_mz));
  }
  spectra::Spectrum s(static_cast<std::size_t>(max_mz));
  for (auto [shift, abundance] : isotope_pattern(motif, kMaxIsotopeShift, table)) {
    if (ion + shift <= max_mz) s.bins[ion + shift - 1] += abundance;
  }
  for (const auto& frag : cleavage_fragments(motif)) {
    long bin = std::lround(monoisotopic_mass(frag, table));
    if (bin >= 1 && bin <= max_mz) s.bins[bin - 1] += kFragmentIntensity;
  }
  return {spectra::normalize(s, spectra::Normalization::L2), chem::canonical_key(motif)};
}

SpectrumMatrix motif_spectrum_matrix(const MotifVocabulary& vocab, int max_mz) {
  if (vocab.empty()) throw EmptyVocabulary("cannot build motif spectra for an empty vocabulary");
  SpectrumMatrix out;
  out.rows = vocab.size();
  out.cols = static_cast<std::size_t>(max_mz);
  out.data.assign(out.rows * out.cols, 0.0);
  std::vector<std::string> warnings(out.rows);
  parallel_for(out.rows, [&](std::size_t r) {
    try {
      auto ms = build_motif_spectrum(vocab[r].fragment, max_mz);
      for (std::size_t c = 0; c < out.cols; ++c) out.data[r * out.cols + c] = static_cast<float>(ms.spectrum.bins[c]);
    } catch (const OutOfRange& e) {
      warnings[r] = "motif " + std::to_string(r + 1) + " spectrum zeroed: " + e.what();
    }
  });
  for (const auto& w : warnings) {
    if (!w.empty()) log_warning(w);
  }
  return out;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError(0, "truncated spectrum matrix");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_spectrum_matrix(std::ostream& out, const SpectrumMatrix& matrix) {
  put_u32(out, static_cast<std::uint32_t>(matrix.rows));
  put_u32(out, static_cast<std::uint32_t>(matrix.cols));
  for (double v : matrix.data) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
}

SpectrumMatrix read_spectrum_matrix(std::istream& in) {
  SpectrumMatrix m;
  m.rows = get_u32(in);
  m.cols = get_u32(in);
  m.data.resize(m.rows * m.cols);
  for (auto& v : m.data) v = std::bit_cast<float>(get_u32(in));
  return m;
}

}  // namespace moms::motif
