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

#include <optional>
#include <string>
#include <vector>

#include "moms/spectra.hpp"

namespace moms::eval {

// Cosine similarity that scores an all-zero spectrum as 0 instead of throwing.
double similarity(const spectra::Spectrum& a, const spectra::Spectrum& b);

struct SimilaritySummary {
  double mean = 0.0;
  double stddev = 0.0;  // population
  std::vector<double> values;
};

// Pairwise similarity of aligned lists. Throws LengthMismatch.
SimilaritySummary evaluate_similarity(const std::vector<spectra::Spectrum>& pred,
                                      const std::vector<spectra::Spectrum>& truth);

// Mean and population stddev of per-seed results.
SimilaritySummary aggregate(const std::vector<double>& values);

struct Reference {
  std::string id;
  spectra::Spectrum spectrum;
  std::optional<double> precursor_mz;
};

struct Query {
  std::string id;
  spectra::Spectrum spectrum;
  std::optional<double> precursor_mz;
  std::string true_id;
  std::vector<std::size_t> candidates;  // indices into RankingTask::references
};

struct RankingTask {
  std::vector<Query> queries;
  std::vector<Reference> references;
};

inline constexpr std::size_t kMinCandidates = 20;

// Every reference is a candidate for every query unless mass_window is set, in
// which case only references whose precursor lies within the window of the
// query's are kept (references without a precursor are always kept). The true
// match of a query is the reference with the same id. Warns once if any query
// has fewer than kMinCandidates candidates.
RankingTask make_ranking_task(std::vector<Query> queries, std::vector<Reference> references,
                              std::optional<double> mass_window = std::nullopt);

struct QueryRank {
  std::string id;
  std::size_t rank = 0;
  std::size_t candidates = 0;
  double true_similarity = 0.0;
};

// Rank of the true match among the query's candidates by descending
// similarity; candidates tied with the true match rank ahead of it.
// Throws MissingTrueMatch unless the true id occurs exactly once.
std::vector<QueryRank> rank_candidates(const RankingTask& task);

// Fraction of queries whose rank is within ceil(k/100 * candidates).
double top_k_percent(const std::vector<std::size_t>& ranks, const std::vector<std::size_t>& counts, double k = 5.0);
double top_k_percent(const std::vector<QueryRank>& ranks, double k = 5.0);

std::string similarity_report_json(const std::vector<std::string>& ids, const SimilaritySummary& s);
std::string ranking_report_json(const std::vector<QueryRank>& ranks, double k = 5.0);
std::string ranking_summary(const std::vector<QueryRank>& ranks, double k = 5.0);
// Histogram of rank percentiles (rank / candidates) in 20 bins.
std::string rank_histogram_svg(const std::vector<QueryRank>& ranks);

}  // namespace moms::eval
