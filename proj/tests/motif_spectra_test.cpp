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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "moms/canonical.hpp"
#include "moms/descriptors.hpp"
#include "moms/error.hpp"
#include "moms/motif_spectra.hpp"
#include "moms/smiles.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace moms::motif {
namespace {

using chem::Element;
using chem::Molecule;

Molecule completed(const std::string& smiles) {
  Molecule m = chem::parse_smiles(smiles, {.fragment = true});
  chem::complete_valence(m);
  return m;
}

TEST(IsotopeTest, BenzeneAndCarbon) {
  auto p = isotope_pattern(completed("c1ccccc1"));
  ASSERT_GE(p.size(), 3u);
  EXPECT_EQ(p[0], (std::pair<int, double>{0, 1.0}));
  EXPECT_EQ(p[1].first, 1);
  EXPECT_NEAR(p[1].second, 0.0646, 0.005);
  auto oracle = moms::testing::brute_force_pattern(completed("c1ccccc1"));
  EXPECT_NEAR(p[1].second, oracle[1] / oracle[0], 1e-12);

  Molecule carbon = chem::parse_smiles("[C]");
  auto c = isotope_pattern(carbon);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[1].second, 0.0107, 0.0005);
}

TEST(IsotopeTest, SingleIsotopeElementsGiveOnlyTheMonoisotopicPeak) {
  chem::IsotopeTable table = chem::IsotopeTable::standard();
  table.set(Element::C, {{12.0, 1.0}});
  table.set(Element::H, {{1.00782503207, 1.0}});
  auto p = isotope_pattern(completed("CCCC"), 3, table);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p[0], (std::pair<int, double>{0, 1.0}));
}

TEST(IsotopeTest, MatchesExhaustiveEnumeration) {
  for (const char* smi : {"C", "CO", "CCO", "CS", "CCl", "C#N", "O=C=O", "CBr", "NC=O", "CP", "FC(F)F"}) {
    Molecule m = completed(smi);
    auto oracle = moms::testing::brute_force_pattern(m);
    auto p = isotope_pattern(m);
    std::map<int, double> got(p.begin(), p.end());
    for (int s = 0; s <= 3; ++s) {
      double expected = oracle.count(s) ? oracle[s] / oracle[0] : 0.0;
      double actual = got.count(s) ? got[s] : 0.0;
      EXPECT_NEAR(actual, expected, 1e-12) << smi << " shift " << s;
    }
  }
}

TEST(IsotopeTest, SatellitesDecayForOrganicCHNO) {
  for (const auto& m : moms::testing::fixture_molecules()) {
    bool chno = true;
    for (const auto& a : m.atoms) {
      chno &= a.element == Element::C || a.element == Element::N || a.element == Element::O;
    }
    if (!chno || chem::monoisotopic_mass(m) >= 500) continue;
    auto p = isotope_pattern(m);
    std::vector<double> rel(4, 0.0);
    for (auto [s, a] : p) rel[s] = a;
    EXPECT_GE(rel[1], rel[2]) << m.id;
    EXPECT_GE(rel[2], rel[3]) << m.id;
  }
}

TEST(IsotopeTest, SulfurBreaksSatelliteDecay) {
  // 34S is far more abundant than 33S, so M+2 exceeds M+1 for small thiols.
  auto p = isotope_pattern(completed("CS"));
  EXPECT_GT(p[2].second, p[1].second);
}

std::set<std::string> keys(const std::vector<Molecule>& ms) {
  std::set<std::string> out;
  for (const auto& m : ms) out.insert(chem::canonical_key(m));
  return out;
}

std::string key_of(const std::string& smiles) { return chem::canonical_key(completed(smiles)); }

TEST(CleavageTest, Examples) {
  EXPECT_EQ(keys(cleavage_fragments(completed("CCO"))),
            (std::set<std::string>{key_of("CC"), key_of("CO"), key_of("C"), key_of("O")}));
  EXPECT_TRUE(cleavage_fragments(completed("c1ccccc1")).empty());
  auto cc = cleavage_fragments(completed("CC"));
  ASSERT_EQ(cc.size(), 1u);
  EXPECT_EQ(chem::canonical_key(cc[0]), key_of("C"));
  EXPECT_EQ(cc[0].atoms[0].total_h(), 3);
}

TEST(CleavageTest, MatchesBondCutOracle) {
  std::mt19937_64 rng(17);
  auto panel = moms::testing::fixture_molecules();
  for (int i = 0; i < 40; ++i) panel.push_back(moms::testing::random_molecule(rng, 10));
  for (const auto& m : panel) {
    // Oracle: delete each single bond; it is acyclic iff the graph splits.
    std::map<std::string, double> pieces;
    for (std::size_t b = 0; b < m.bond_count(); ++b) {
      if (m.bonds[b].order != chem::BondOrder::Single) continue;
      std::vector<int> comp(m.atom_count(), -1);
      int ncomp = 0;
      for (std::size_t s = 0; s < m.atom_count(); ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack{static_cast<int>(s)};
        comp[s] = ncomp;
        while (!stack.empty()) {
          int u = stack.back();
          stack.pop_back();
          for (std::size_t c = 0; c < m.bond_count(); ++c) {
            if (c == b) continue;
            const auto& bd = m.bonds[c];
            int v = bd.begin == u ? bd.end : bd.end == u ? bd.begin : -1;
            if (v >= 0 && comp[v] < 0) {
              comp[v] = ncomp;
              stack.push_back(v);
            }
          }
        }
        ++ncomp;
      }
      if (ncomp == 1) continue;
      for (int side = 0; side < 2; ++side) {
        std::vector<int> atoms;
        for (std::size_t a = 0; a < m.atom_count(); ++a) {
          if (comp[a] == side) atoms.push_back(static_cast<int>(a));
        }
        Molecule piece = chem::induced_subgraph(m, atoms);
        pieces.emplace(chem::canonical_key(piece), chem::monoisotopic_mass(piece));
      }
    }
    auto got = cleavage_fragments(m);
    EXPECT_EQ(got.size(), std::min<std::size_t>(pieces.size(), kMaxCleavageFragments));
    std::vector<double> masses;
    for (const auto& [k, mass] : pieces) masses.push_back(mass);
    std::sort(masses.rbegin(), masses.rend());
    for (std::size_t i = 0; i < got.size(); ++i) {
      ASSERT_TRUE(pieces.count(chem::canonical_key(got[i])));
      EXPECT_NEAR(chem::monoisotopic_mass(got[i]), masses[i], 1e-9);
    }
  }
}

TEST(MotifSpectrumTest, Benzene) {
  auto ms = build_motif_spectrum(completed("c1ccccc1"));
  EXPECT_NEAR(ms.spectrum.norm(), 1.0, 1e-12);
  for (std::size_t i = 0; i < ms.spectrum.size(); ++i) {
    if (i + 1 < 78 || i + 1 > 81) EXPECT_EQ(ms.spectrum.bins[i], 0.0) << i;
  }
  // The M+3 satellite exists but is negligible.
  EXPECT_LT(ms.spectrum.bins[80], 1e-4);
  EXPECT_GT(ms.spectrum.bins[77], 0.0);
  EXPECT_NEAR(ms.spectrum.bins[78] / ms.spectrum.bins[77], 0.0646, 0.005);
  EXPECT_GT(ms.spectrum.bins[79], 0.0);
  EXPECT_LT(ms.spectrum.bins[79], ms.spectrum.bins[78]);
}

TEST(MotifSpectrumTest, EthaneFragment) {
  auto ms = build_motif_spectrum(completed("CC"));
  auto p = isotope_pattern(completed("CC"));
  std::vector<double> expected(1000, 0.0);
  for (auto [s, a] : p) expected[29 + s] += a;
  expected[14] += 0.3;
  double norm = 0.0;
  for (double v : expected) norm += v * v;
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < 1000; ++i) EXPECT_NEAR(ms.spectrum.bins[i], expected[i] / norm, 1e-15) << i;
  EXPECT_EQ(ms.key, key_of("CC"));
}

TEST(MotifSpectrumTest, HeavyMotifIsOutOfRange) {
  EXPECT_THROW(build_motif_spectrum(completed(std::string(72, 'C'))), OutOfRange);
  EXPECT_NO_THROW(build_motif_spectrum(completed(std::string(70, 'C'))));
  EXPECT_THROW(build_motif_spectrum(completed("c1ccccc1"), 50), OutOfRange);
}

TEST(MotifSpectrumTest, SupportBoundedByMolecularIon) {
  for (const auto& m : moms::testing::fixture_molecules()) {
    auto ms = build_motif_spectrum(m);
    long ion = std::lround(chem::monoisotopic_mass(m));
    for (std::size_t i = 0; i < ms.spectrum.size(); ++i) {
      if (static_cast<long>(i) + 1 > ion + 3) ASSERT_EQ(ms.spectrum.bins[i], 0.0) << m.id;
    }
    EXPECT_NEAR(ms.spectrum.norm(), 1.0, 1e-12);
  }
}

TEST(SpectrumMatrixTest, RowsMatchAndPersist) {
  auto vocab = mine_vocabulary(moms::testing::fixture_molecules(), 60);
  auto mat = motif_spectrum_matrix(vocab);
  ASSERT_EQ(mat.rows, vocab.size());
  ASSERT_EQ(mat.cols, 1000u);
  for (std::size_t r = 0; r < mat.rows; ++r) {
    double n = 0.0;
    for (double v : mat.row(r)) n += v * v;
    EXPECT_NEAR(std::sqrt(n), 1.0, 1e-6);
    auto ms = build_motif_spectrum(vocab[r].fragment);
    for (std::size_t c = 0; c < mat.cols; ++c) {
      ASSERT_EQ(mat.row(r)[c], static_cast<double>(static_cast<float>(ms.spectrum.bins[c])));
    }
  }
  int benzene = vocab.find(key_of("c1ccccc1"));
  ASSERT_GE(benzene, 0);
  EXPECT_GT(mat.row(benzene)[77], 0.9);

  std::ostringstream out;
  write_spectrum_matrix(out, mat);
  EXPECT_EQ(out.str().size(), 8 + 4 * mat.rows * mat.cols);
  std::istringstream in(out.str());
  EXPECT_EQ(read_spectrum_matrix(in), mat);
  EXPECT_EQ(motif_spectrum_matrix(vocab), mat);
}

TEST(SpectrumMatrixTest, OutOfRangeRowsAreZeroed) {
  auto corpus = moms::testing::parse_all({"c1ccccc1", "c1ccccc1"});
  auto vocab = mine_vocabulary(corpus, 10);
  auto mat = motif_spectrum_matrix(vocab, 40);
  bool saw_zero = false, saw_row = false;
  for (std::size_t r = 0; r < mat.rows; ++r) {
    double n = 0.0;
    for (double v : mat.row(r)) n += v * v;
    if (n == 0.0) saw_zero = true;
    else saw_row = true;
  }
  EXPECT_TRUE(saw_zero);
  EXPECT_TRUE(saw_row);
  EXPECT_THROW(motif_spectrum_matrix(MotifVocabulary{}), EmptyVocabulary);
}

}  // namespace
}  // namespace moms::motif
