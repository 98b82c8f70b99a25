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
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace moms::spectra {

// Number of unit m/z bins; bin k (1-based) collects peaks with round(mz) == k.
inline constexpr int kMaxMz = 1000;

struct Peak {
  double mz = 0.0;
  double intensity = 0.0;

  bool operator==(const Peak&) const = default;
};

// A centroided spectrum as read from or written to a library file. Peaks are
// kept sorted by m/z.
struct PeakList {
  std::vector<Peak> peaks;
  std::string name;
  std::string compound_id;
  std::optional<double> precursor_mz;
  // Header lines not mapped onto the fields above, in file order.
  std::vector<std::pair<std::string, std::string>> metadata;

  bool operator==(const PeakList&) const = default;
};

// Fixed-length binned intensity vector (index k-1 holds bin k).
struct Spectrum {
  std::vector<double> bins;

  Spectrum() : bins(kMaxMz, 0.0) {}
  explicit Spectrum(std::size_t length) : bins(length, 0.0) {}
  explicit Spectrum(std::vector<double> values) : bins(std::move(values)) {}

  std::size_t size() const { return bins.size(); }
  double norm() const;
  double total() const;

  bool operator==(const Spectrum&) const = default;
};

// Reads MSP records: "Key: Value" headers, "Num Peaks: N", then N
// "mz intensity" pairs separated by whitespace or ';'. Records are separated
// by blank lines. Name, ID and PrecursorMZ fill the typed fields; other
// headers are kept in metadata.
//
// Throws FormatError (missing Num Peaks, count mismatch, negative intensity,
// malformed numbers).
std::vector<PeakList> parse_msp(std::istream& in);

// Writes m/z with 4 decimals and intensities with 2.
void write_msp(std::ostream& out, const std::vector<PeakList>& records);

// Adds each peak's intensity into bin round(mz). Throws OutOfRange for peaks
// that round outside 1..max_mz.
Spectrum bin_spectrum(const PeakList& peaks, int max_mz = kMaxMz);

// Nonzero bins as integer-m/z peaks.
PeakList to_peak_list(const Spectrum& s);

enum class Normalization { L2, BasePeak };

// L2 gives unit Euclidean norm; BasePeak scales the largest bin to 999.
// Throws ZeroSpectrum when no entry is positive.
Spectrum normalize(const Spectrum& s, Normalization mode);

// dot(a, b) / (|a| |b|). Throws ZeroSpectrum or LengthMismatch.
double cosine_similarity(const Spectrum& a, const Spectrum& b);

// 1 - cosine_similarity(a, b).
double cosine_distance(const Spectrum& a, const Spectrum& b);

}  // namespace moms::spectra
