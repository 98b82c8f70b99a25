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

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "moms/canonical.hpp"
#include "moms/error.hpp"
#include "moms/motif.hpp"
#include "moms/smiles.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace moms::motif {
namespace {

using chem::Molecule;
using moms::testing::fixture_molecules;
using moms::testing::parse_all;
using moms::testing::ReferenceMiner;

std::string key_of(const std::string& smiles) {
  return chem::canonical_key(chem::parse_smiles(smiles, {.fragment = true}));
}

// Independent replay: atom sets, full scans, no key cache.
std::vector<int> reference_occurrences(const Molecule& m, const MotifVocabulary& vocab) {
  std::vector<std::set<int>> frags;
  for (std::size_t i = 0; i < m.atom_count(); ++i) frags.push_back({static_cast<int>(i)});
  std::vector<int> counts(vocab.size(), 0);
  for (std::size_t v = 0; v < vocab.size(); ++v) {
    std::vector<std::pair<std::pair<int, int>, std::pair<int, int>>> cands;
    for (std::size_t i = 0; i < frags.size(); ++i) {
      for (std::size_t j = i + 1; j < frags.size(); ++j) {
        if (ReferenceMiner::adjacent(m, frags[i], frags[j]) &&
            ReferenceMiner::union_key(m, frags[i], frags[j]) == vocab[v].key) {
          cands.push_back({std::minmax(*frags[i].begin(), *frags[j].begin()), {i, j}});
        }
      }
    }
    std::sort(cands.begin(), cands.end());
    std::set<int> used;
    std::vector<std::set<int>> next;
    for (const auto& c : cands) {
      auto [i, j] = c.second;
      if (used.count(i) || used.count(j)) continue;
      used.insert(i);
      used.insert(j);
      std::set<int> u = frags[i];
      u.insert(frags[j].begin(), frags[j].end());
      next.push_back(u);
      ++counts[v];
    }
    for (std::size_t i = 0; i < frags.size(); ++i) {
      if (!used.count(static_cast<int>(i))) next.push_back(frags[i]);
    }
    frags = next;
  }
  return counts;
}

void expect_partition(const FragmentState& state) {
  for (const auto& mf : state.molecules) {
    std::vector<int> seen(mf.molecule.atom_count(), 0);
    for (const auto& frag : mf.fragments()) {
      for (int a : frag) ++seen[a];
      ASSERT_EQ(chem::induced_subgraph(mf.molecule, frag).component_count(), 1u);
    }
    for (int c : seen) ASSERT_EQ(c, 1);
    for (auto [a, b] : mf.adjacent_pairs()) ASSERT_LT(a, b);
  }
}

TEST(FragmentTest, InitialState) {
  auto s = init_fragments(parse_all({"CCO"}));
  EXPECT_EQ(s.fragment_count(), 3u);
  EXPECT_EQ(s.adjacency_count(), 2u);
  s = init_fragments(parse_all({"C"}));
  EXPECT_EQ(s.fragment_count(), 1u);
  EXPECT_EQ(s.adjacency_count(), 0u);
  auto corpus = fixture_molecules();
  corpus.resize(10);
  std::size_t atoms = 0, bonds = 0;
  for (const auto& m : corpus) {
    atoms += m.atom_count();
    bonds += m.bond_count();
  }
  s = init_fragments(corpus);
  EXPECT_EQ(s.fragment_count(), atoms);
  EXPECT_EQ(s.adjacency_count(), bonds);
  EXPECT_THROW(init_fragments({}), EmptyCorpus);
  EXPECT_THROW(mine_vocabulary({}, 3), EmptyCorpus);
}

TEST(FragmentTest, MostFrequentPair) {
  auto s = init_fragments(parse_all({"CCO", "CCN", "CCC"}));
  auto best = most_frequent_pair(s);
  EXPECT_EQ(best.key, key_of("CC"));
  EXPECT_EQ(best.count, 4u);
  s = init_fragments(parse_all({"CO"}));
  best = most_frequent_pair(s);
  EXPECT_EQ(best.key, key_of("CO"));
  EXPECT_EQ(best.count, 1u);
  s = init_fragments(parse_all({"C", "O"}));
  EXPECT_THROW(most_frequent_pair(s), NoAdjacentPairs);
}

TEST(FragmentTest, TieBreaksOnSmallestKey) {
  auto s = init_fragments(parse_all({"CO", "CN"}));
  auto best = most_frequent_pair(s);
  EXPECT_EQ(best.count, 1u);
  EXPECT_EQ(best.key, std::min(key_of("CO"), key_of("CN")));
}

TEST(FragmentTest, MergeRoundCreatesUnits) {
  auto s = init_fragments(parse_all({"CCO", "CCN", "CCC"}));
  MotifVocabulary vocab(10);
  auto r = merge_round(s, vocab);
  EXPECT_TRUE(r.added);
  EXPECT_EQ(r.merges, 3u);
  ASSERT_EQ(vocab.size(), 1u);
  EXPECT_EQ(vocab[0].key, key_of("CC"));
  EXPECT_EQ(vocab[0].frequency, 4u);
  EXPECT_EQ(chem::write_smiles(vocab[0].fragment), "CC");
  for (const auto& mf : s.molecules) {
    int two_carbon = 0;
    for (const auto& f : mf.fragments()) {
      if (f.size() == 2 && subgraph_key(mf.molecule, f) == key_of("CC")) ++two_carbon;
    }
    EXPECT_EQ(two_carbon, 1);
  }
  expect_partition(s);
}

TEST(FragmentTest, ZeroIterations) {
  auto corpus = parse_all({"CCO", "CCN"});
  auto vocab = mine_vocabulary(corpus, 0);
  EXPECT_TRUE(vocab.empty());
}

TEST(FragmentTest, OversizedCandidateSkippedButMerged) {
  auto corpus = parse_all({std::string(64, 'C')});
  auto s = init_fragments(corpus);
  MotifVocabulary vocab(100);
  bool saw_invalid = false;
  for (int round = 0; round < 8 && !saw_invalid; ++round) {
    auto before = s.fragment_count();
    auto r = merge_round(s, vocab);
    if (!r.valid) {
      saw_invalid = true;
      EXPECT_FALSE(r.added);
      EXPECT_GT(r.merges, 0u);
      EXPECT_LT(s.fragment_count(), before);
    }
    expect_partition(s);
  }
  EXPECT_TRUE(saw_invalid);
  for (const auto& e : vocab.entries()) EXPECT_LE(e.fragment.atom_count(), kMaxMotifAtoms);
}

TEST(FragmentTest, PartitionInvariantOnFixture) {
  auto s = init_fragments(fixture_molecules());
  MotifVocabulary vocab(40);
  for (int round = 0; round < 40; ++round) {
    merge_round(s, vocab);
    expect_partition(s);
  }
}

TEST(MinerTest, MatchesReferenceMinerOnFixtureSubsets) {
  auto fixture = fixture_molecules();
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 6; ++trial) {
    std::shuffle(fixture.begin(), fixture.end(), rng);
    std::vector<Molecule> corpus(fixture.begin(), fixture.begin() + 10 + static_cast<int>(rng() % 41));
    std::size_t k = 1 + rng() % 10;
    auto mined = mine_vocabulary(corpus, k);
    auto ref = ReferenceMiner(corpus).mine(k);
    ASSERT_EQ(mined.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_EQ(mined[i].key, ref[i].first);
      EXPECT_EQ(mined[i].frequency, ref[i].second);
    }
  }
}

TEST(MinerTest, MatchesReferenceMinerOnRandomGraphs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Molecule> corpus;
    std::size_t n = 3 + rng() % 20;
    for (std::size_t i = 0; i < n; ++i) corpus.push_back(moms::testing::random_molecule(rng, 12));
    std::size_t k = 1 + rng() % 10;
    auto mined = mine_vocabulary(corpus, k);
    auto ref = ReferenceMiner(corpus).mine(k);
    ASSERT_EQ(mined.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      EXPECT_EQ(mined[i].key, ref[i].first);
      EXPECT_EQ(mined[i].frequency, ref[i].second);
    }
  }
}

TEST(MinerTest, CorpusOrderInvariance) {
  auto corpus = fixture_molecules();
  auto base = mine_vocabulary(corpus, 30);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(corpus.begin(), corpus.end(), rng);
    auto again = mine_vocabulary(corpus, 30);
    EXPECT_EQ(again.entries(), base.entries());
  }
}

TEST(MinerTest, CommonMotifsAndFrequencyDecay) {
  auto vocab = mine_vocabulary(fixture_molecules(), 100);
  EXPECT_GE(vocab.find(key_of("CC")), 0);
  EXPECT_GE(vocab.find(key_of("CO")), 0);
  EXPECT_GE(vocab.find(key_of("c1ccccc1")), 0);
  ASSERT_GE(vocab.size(), 20u);
  std::vector<double> decile(10, 0.0);
  std::vector<int> members(10, 0);
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    std::size_t d = i * 10 / vocab.size();
    decile[d] += static_cast<double>(vocab[i].frequency);
    ++members[d];
  }
  for (int d = 0; d < 10; ++d) decile[d] /= members[d];
  EXPECT_GT(decile.front(), decile.back());
  double first_half = 0, second_half = 0;
  for (int d = 0; d < 5; ++d) first_half += decile[d];
  for (int d = 5; d < 10; ++d) second_half += decile[d];
  EXPECT_GT(first_half, second_half);
}

TEST(OccurrenceTest, Examples) {
  auto corpus = parse_all({"CC", "CCO"});
  auto vocab = mine_vocabulary(corpus, 5);
  ASSERT_FALSE(vocab.empty());
  auto counts = motif_occurrences(corpus[0], vocab);
  int cc = vocab.find(key_of("CC"));
  ASSERT_GE(cc, 0);
  EXPECT_EQ(counts[cc], 1);
  auto none = motif_occurrences(chem::parse_smiles("FBr"), vocab);
  EXPECT_EQ(none, std::vector<int>(vocab.size(), 0));
}

TEST(OccurrenceTest, ReplayMatchesReferenceOnHeldOut) {
  auto fixture = fixture_molecules();
  std::vector<Molecule> train(fixture.begin(), fixture.begin() + 48);
  auto vocab = mine_vocabulary(train, 60);
  for (std::size_t i = 48; i < fixture.size(); ++i) {
    EXPECT_EQ(motif_occurrences(fixture[i], vocab), reference_occurrences(fixture[i], vocab)) << fixture[i].id;
  }
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    auto m = moms::testing::random_molecule(rng, 14);
    EXPECT_EQ(motif_occurrences(m, vocab), reference_occurrences(m, vocab));
  }
}

TEST(OccurrenceTest, NestedOccurrencesShareAtoms) {
  // Parse order keeps atoms along the chain so both terminal pairs merge.
  std::vector<Molecule> corpus = {chem::parse_smiles("CCCC"), chem::parse_smiles("CCCC")};
  auto vocab = mine_vocabulary(corpus, 2);
  ASSERT_EQ(vocab.size(), 2u);
  auto occ = replay(corpus[0], vocab);
  ASSERT_EQ(occ.size(), 3u);
  EXPECT_EQ(occ[2].atoms.size(), 4u);
  for (const auto& o : occ) EXPECT_TRUE(std::is_sorted(o.atoms.begin(), o.atoms.end()));
}

TEST(VocabularyFileTest, RoundTrip) {
  auto vocab = mine_vocabulary(fixture_molecules(), 60);
  std::ostringstream out;
  write_vocabulary(out, vocab);
  std::istringstream in(out.str());
  auto back = read_vocabulary(in);
  EXPECT_EQ(back.entries(), vocab.entries());
  std::ostringstream again;
  write_vocabulary(again, back);
  EXPECT_EQ(again.str(), out.str());
}

TEST(VocabularyFileTest, RejectsMalformedLines) {
  std::istringstream bad_fields("1\tC.C|0-1:1\t4\n");
  EXPECT_THROW(read_vocabulary(bad_fields), FormatError);
  std::istringstream bad_key("1\tC.O|0-1:1\t4\tCC\n");
  EXPECT_THROW(read_vocabulary(bad_key), FormatError);
  std::istringstream bad_rank("2\t" + key_of("CC") + "\t4\tCC\n");
  EXPECT_THROW(read_vocabulary(bad_rank), FormatError);
}

}  // namespace
}  // namespace moms::motif
