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

#include "moms/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "moms/error.hpp"
#include "moms/runtime.hpp"

namespace moms::eval {

using spectra::Spectrum;

double similarity(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) throw LengthMismatch("spectra have different lengths");
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return spectra::cosine_similarity(a, b);
}

SimilaritySummary aggregate(const std::vector<double>& values) {
  SimilaritySummary s;
  s.values = values;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

SimilaritySummary evaluate_similarity(const std::vector<Spectrum>& pred, const std::vector<Spectrum>& truth) {
  if (pred.size() != truth.size()) {
    throw LengthMismatch(std::to_string(pred.size()) + " predictions for " + std::to_string(truth.size()) +
                         " reference spectra");
  }
  std::vector<double> values(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) values[i] = similarity(pred[i], truth[i]);
  return aggregate(values);
}

RankingTask make_ranking_task(std::vector<Query> queries, std::vector<Reference> references,
                              std::optional<double> mass_window) {
  RankingTask task;
  task.references = std::move(references);
  std::size_t small = 0;
  for (auto& q : queries) {
    if (q.true_id.empty()) q.true_id = q.id;
    q.candidates.clear();
    for (std::size_t r = 0; r < task.references.size(); ++r) {
      const auto& ref = task.references[r];
      if (mass_window && q.precursor_mz && ref.precursor_mz &&
          std::abs(*q.precursor_mz - *ref.precursor_mz) > *mass_window && ref.id != q.true_id) {
        continue;
      }
      q.candidates.push_back(r);
    }
    small += q.candidates.size() < kMinCandidates;
    task.queries.push_back(std::move(q));
  }
  if (small > 0) {
    log_warning(std::to_string(small) + " of " + std::to_string(task.queries.size()) + " queries have fewer than " +
                std::to_string(kMinCandidates) + " candidates");
  }
  return task;
}

std::vector<QueryRank> rank_candidates(const RankingTask& task) {
  std::vector<QueryRank> out(task.queries.size());
  parallel_for(task.queries.size(), [&](std::size_t qi) {
    const Query& q = task.queries[qi];
    std::vector<double> sims;
    std::size_t true_pos = 0, matches = 0;
    for (std::size_t c = 0; c < q.candidates.size(); ++c) {
      const auto& ref = task.references.at(q.candidates[c]);
      sims.push_back(similarity(q.spectrum, ref.spectrum));
      if (ref.id == q.true_id) {
        true_pos = c;
        ++matches;
      }
    }
    if (matches != 1) {
      throw MissingTrueMatch("query " + q.id + " has " + std::to_string(matches) + " candidates named " + q.true_id);
    }
    std::size_t ahead = 0;
    for (std::size_t c = 0; c < sims.size(); ++c) {
      if (c != true_pos && sims[c] >= sims[true_pos]) ++ahead;
    }
    out[qi] = {q.id, ahead + 1, q.candidates.size(), sims[true_pos]};
  });
  return out;
}

double top_k_percent(const std::vector<std::size_t>& ranks, const std::vector<std::size_t>& counts, double k) {
  if (ranks.size() != counts.size()) throw LengthMismatch("ranks and candidate counts differ in length");
  if (ranks.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    // Integer ceiling of k% of the count, robust to k like 5.0 being inexact.
    const double raw = k / 100.0 * static_cast<double>(counts[i]);
    auto threshold = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    if (ranks[i] <= threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double top_k_percent(const std::vector<QueryRank>& ranks, double k) {
  std::vector<std::size_t> r, c;
  for (const auto& q : ranks) {
    r.push_back(q.rank);
    c.push_back(q.candidates);
  }
  return top_k_percent(r, c, k);
}

std::string similarity_report_json(const std::vector<std::string>& ids, const SimilaritySummary& s) {
  nlohmann::ordered_json j;
  j["mean"] = s.mean;
  j["stddev"] = s.stddev;
  j["count"] = s.values.size();
  auto pairs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    pairs.push_back({{"id", i < ids.size() ? ids[i] : std::to_string(i)}, {"similarity", s.values[i]}});
  }
  j["pairs"] = pairs;
  return j.dump(2);
}

std::string ranking_report_json(const std::vector<QueryRank>& ranks, double k) {
  nlohmann::ordered_json j;
  j["k_percent"] = k;
  j["top_k"] = top_k_percent(ranks, k);
  j["queries"] = ranks.size();
  auto per = nlohmann::ordered_json::array();
  for (const auto& q : ranks) {
    per.push_back({{"id", q.id}, {"rank", q.rank}, {"candidates", q.candidates}, {"similarity", q.true_similarity}});
  }
  j["ranks"] = per;
  return j.dump(2);
}

std::string ranking_summary(const std::vector<QueryRank>& ranks, double k) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%-10s %10s\n", "metric", "value");
  out << buf;
  std::snprintf(buf, sizeof(buf), "%-10s %10zu\n", "queries", ranks.size());
  out << buf;
  std::vector<double> r;
  for (const auto& q : ranks) r.push_back(static_cast<double>(q.rank));
  std::sort(r.begin(), r.end());
  double median = r.empty() ? 0.0 : (r[(r.size() - 1) / 2] + r[r.size() / 2]) / 2.0;
  std::snprintf(buf, sizeof(buf), "%-10s %10.1f\n", "median", median);
  out << buf;
  for (double kk : {1.0, k, 10.0}) {
    std::snprintf(buf, sizeof(buf), "top-%g%%%*s %10.4f\n", kk, kk < 10 ? 4 : 3, "", top_k_percent(ranks, kk));
    out << buf;
  }
  return out.str();
}

std::string rank_histogram_svg(const std::vector<QueryRank>& ranks) {
  constexpr int kBins = 20, kW = 400, kH = 200, kPad = 30;
  std::vector<int> counts(kBins, 0);
  for (const auto& q : ranks) {
    double p = static_cast<double>(q.rank - 1) / static_cast<double>(std::max<std::size_t>(q.candidates, 1));
    counts[std::min(kBins - 1, static_cast<int>(p * kBins))]++;
  }
  const int peak = std::max(1, *std::max_element(counts.begin(), counts.end()));
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW + 2 * kPad << "\" height=\"" << kH + 2 * kPad
      << "\">\n";
  svg << "<text x=\"" << kPad << "\" y=\"18\" font-size=\"12\">rank percentile of true match</text>\n";
  const double bw = static_cast<double>(kW) / kBins;
  for (int b = 0; b < kBins; ++b) {
    double h = static_cast<double>(kH) * counts[b] / peak;
    svg << "<rect x=\"" << kPad + b * bw << "\" y=\"" << kPad + kH - h << "\" width=\"" << bw - 1 << "\" height=\""
        << h << "\" fill=\"steelblue\"><title>" << b * 5 << "-" << (b + 1) * 5 << "%: " << counts[b]
        << "</title></rect>\n";
  }
  svg << "<line x1=\"" << kPad << "\" y1=\"" << kPad + kH << "\" x2=\"" << kPad + kW << "\" y2=\"" << kPad + kH
      << "\" stroke=\"black\"/>\n</svg>\n";
  return svg.str();
}

}  // namespace moms::eval
