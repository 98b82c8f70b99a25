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

// Writes deterministic pseudo-spectra for a SMILES corpus. Peaks are derived
// from structure only: molecular ion with isotopes, single-bond cleavage
// fragments and a small table of characteristic ions.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "moms/canonical.hpp"
#include "moms/error.hpp"
#include "moms/motif_spectra.hpp"
#include "moms/smiles.hpp"
#include "moms/spectra.hpp"

namespace {

using moms::chem::BondOrder;
using moms::chem::Element;
using moms::chem::Molecule;

bool single(const Molecule& m, int bond) { return m.bonds[bond].order == BondOrder::Single; }

bool is(const Molecule& m, int atom, Element e) { return m.atoms[atom].element == e; }

int count_rings(const Molecule& m, bool aromatic, bool need_nitrogen) {
  int n = 0;
  for (const auto& ring : m.rings) {
    if (ring.size() != 6) continue;
    bool ok = true, nitrogen = false;
    for (int a : ring) {
      if (m.atoms[a].aromatic != aromatic) ok = false;
      if (is(m, a, Element::N)) nitrogen = true;
      else if (!is(m, a, Element::C)) ok = false;
    }
    if (ok && nitrogen == need_nitrogen) ++n;
  }
  return n;
}

// Carbonyl carbon attached to a hydroxyl oxygen / a methyl group.
struct Carbonyl {
  int any = 0, acid = 0, acetyl = 0;
};

Carbonyl carbonyls(const Molecule& m) {
  Carbonyl c;
  for (int a = 0; a < static_cast<int>(m.atom_count()); ++a) {
    if (!is(m, a, Element::C)) continue;
    bool oxo = false, hydroxy = false, methyl = false;
    for (const auto& nb : m.adjacency[a]) {
      const auto& other = m.atoms[nb.atom];
      if (other.element == Element::O && m.bonds[nb.bond].order == BondOrder::Double) oxo = true;
      if (other.element == Element::O && single(m, nb.bond) && other.total_h() == 1) hydroxy = true;
      if (other.element == Element::C && other.total_h() == 3) methyl = true;
    }
    if (!oxo) continue;
    ++c.any;
    if (hydroxy) ++c.acid;
    if (methyl) ++c.acetyl;
  }
  return c;
}

std::map<int, double> characteristic_ions(const Molecule& m) {
  std::map<int, double> ions;
  auto add = [&](int mz, double intensity, int times) {
    if (times > 0) ions[mz] += intensity * std::min(times, 3);
  };
  int methyl = 0, ethyl = 0, benzylic = 0, hydroxyl = 0, amine = 0, cl = 0, br = 0;
  for (int a = 0; a < static_cast<int>(m.atom_count()); ++a) {
    const auto& atom = m.atoms[a];
    if (atom.element == Element::Cl) ++cl;
    if (atom.element == Element::Br) ++br;
    if (atom.element == Element::O && !atom.aromatic && atom.total_h() == 1) ++hydroxyl;
    if (atom.element == Element::N && !atom.aromatic && atom.total_h() > 0) ++amine;
    if (atom.element != Element::C || atom.aromatic) continue;
    if (atom.total_h() == 3 && m.degree(a) == 1) {
      ++methyl;
      int nb = m.adjacency[a][0].atom;
      if (is(m, nb, Element::C) && !m.atoms[nb].aromatic && m.atoms[nb].total_h() == 2) ++ethyl;
    }
    if (atom.total_h() > 0) {
      for (const auto& nb : m.adjacency[a]) {
        if (m.atoms[nb.atom].aromatic && is(m, nb.atom, Element::C)) ++benzylic;
      }
    }
  }
  const int benzene = count_rings(m, true, false);
  const int pyridine = count_rings(m, true, true);
  const int cyclohexane = count_rings(m, false, false);
  const Carbonyl co = carbonyls(m);

  add(77, 0.6, benzene);
  add(51, 0.3, benzene);
  add(39, 0.15, benzene);
  add(91, 0.8, benzylic);
  add(65, 0.2, benzylic);
  add(15, 0.1, methyl);
  add(29, 0.35, ethyl);
  add(28, 0.25, co.any);
  add(43, 0.7, co.acetyl);
  add(45, 0.4, co.acid);
  add(31, 0.3, hydroxyl);
  add(30, 0.45, amine);
  add(35, 0.3, cl);
  add(37, 0.1, cl);
  add(79, 0.3, br);
  add(81, 0.3, br);
  add(79, 0.5, pyridine);
  add(52, 0.3, pyridine);
  add(83, 0.5, cyclohexane);
  add(55, 0.6, cyclohexane);
  add(41, 0.4, cyclohexane);
  return ions;
}

moms::spectra::PeakList pseudo_spectrum(const Molecule& m) {
  const auto& table = moms::chem::IsotopeTable::standard();
  std::map<int, double> peaks;
  const int parent = static_cast<int>(std::lround(moms::motif::monoisotopic_mass(m, table)));
  for (const auto& [shift, abundance] : moms::motif::isotope_pattern(m, moms::motif::kMaxIsotopeShift, table)) {
    peaks[parent + shift] += 0.35 * abundance;
  }
  for (const auto& f : moms::motif::cleavage_fragments(m)) {
    peaks[static_cast<int>(std::lround(moms::motif::monoisotopic_mass(f, table)))] += 0.15;
  }
  for (const auto& [mz, intensity] : characteristic_ions(m)) peaks[mz] += intensity;

  double base = 0.0;
  for (const auto& [mz, v] : peaks) base = std::max(base, v);
  moms::spectra::PeakList out;
  out.name = m.id;
  out.compound_id = m.id;
  out.precursor_mz = moms::motif::monoisotopic_mass(m, table);
  out.metadata.emplace_back("SMILES", moms::chem::write_smiles(m));
  for (const auto& [mz, v] : peaks) {
    double scaled = std::round(999.0 * v / base * 100.0) / 100.0;
    if (scaled > 0.0 && mz >= 1) out.peaks.push_back({static_cast<double>(mz), scaled});
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate structure-derived pseudo-spectra for a corpus"};
  std::string corpus_path, out_path;
  app.add_option("--corpus", corpus_path, "id<TAB>SMILES corpus")->required();
  app.add_option("--out", out_path, "output MSP file")->required();
  CLI11_PARSE(app, argc, argv);
  try {
    std::ifstream in(corpus_path);
    if (!in) throw moms::Error("cannot open " + corpus_path);
    std::vector<moms::spectra::PeakList> records;
    for (const auto& m : moms::chem::read_corpus(in)) records.push_back(pseudo_spectrum(m));
    std::ofstream out(out_path);
    moms::spectra::write_msp(out, records);
  } catch (const moms::Error& e) {
    std::cerr << "make_fixture: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
