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

#include "moms/spectra.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "moms/error.hpp"

namespace moms::spectra {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return errno == 0 && end == token.c_str() + token.size() && std::isfinite(out);
}

// Splits a peak line into numeric tokens, dropping quoted annotations.
std::vector<std::string> peak_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::string current;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
      continue;
    }
    if (quoted) continue;
    if (std::isspace(static_cast<unsigned char>(c)) || c == ';' || c == ',') {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

}  // namespace

double Spectrum::norm() const {
  double s = 0.0;
  for (double v : bins) s += v * v;
  return std::sqrt(s);
}

double Spectrum::total() const { return std::accumulate(bins.begin(), bins.end(), 0.0); }

std::vector<PeakList> parse_msp(std::istream& in) {
  std::vector<PeakList> out;
  PeakList current;
  bool in_record = false;
  bool have_count = false;
  std::size_t remaining = 0;
  std::size_t declared = 0;
  std::string line;
  std::size_t lineno = 0;

  auto finish = [&](std::size_t at) {
    if (!in_record) return;
    if (!have_count) throw FormatError(at, "record ended without 'Num Peaks'");
    if (remaining > 0) {
      throw FormatError(at, "expected " + std::to_string(declared) + " peaks, found " +
                                std::to_string(declared - remaining));
    }
    std::stable_sort(current.peaks.begin(), current.peaks.end(),
                     [](const Peak& a, const Peak& b) { return a.mz < b.mz; });
    out.push_back(std::move(current));
    current = PeakList{};
    in_record = false;
    have_count = false;
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) {
      finish(lineno);
      continue;
    }
    in_record = true;
    if (have_count) {
      auto tokens = peak_tokens(t);
      if (tokens.size() % 2 != 0) throw FormatError(lineno, "peak line has an unpaired value");
      for (std::size_t i = 0; i < tokens.size(); i += 2) {
        Peak p;
        if (!parse_double(tokens[i], p.mz) || !parse_double(tokens[i + 1], p.intensity)) {
          throw FormatError(lineno, "malformed peak '" + tokens[i] + " " + tokens[i + 1] + "'");
        }
        if (remaining == 0) {
          throw FormatError(lineno, "more peaks than the declared " + std::to_string(declared));
        }
        if (p.mz <= 0.0) throw FormatError(lineno, "non-positive m/z");
        if (p.intensity < 0.0) throw FormatError(lineno, "negative intensity");
        current.peaks.push_back(p);
        --remaining;
      }
      continue;
    }
    std::size_t colon = t.find(':');
    if (colon == std::string::npos) throw FormatError(lineno, "expected 'Key: Value' header");
    std::string key = trim(t.substr(0, colon));
    std::string value = trim(t.substr(colon + 1));
    std::string k = lower(key);
    if (k == "num peaks") {
      char* end = nullptr;
      long n = std::strtol(value.c_str(), &end, 10);
      if (value.empty() || end != value.c_str() + value.size() || n < 0) {
        throw FormatError(lineno, "invalid peak count '" + value + "'");
      }
      have_count = true;
      declared = remaining = static_cast<std::size_t>(n);
    } else if (k == "name") {
      current.name = value;
    } else if (k == "id") {
      current.compound_id = value;
    } else if (k == "precursormz" || k == "precursor_mz") {
      double v = 0.0;
      if (!parse_double(value, v)) throw FormatError(lineno, "invalid precursor m/z '" + value + "'");
      current.precursor_mz = v;
    } else {
      current.metadata.emplace_back(key, value);
    }
  }
  finish(lineno + 1);
  return out;
}

void write_msp(std::ostream& out, const std::vector<PeakList>& records) {
  for (std::size_t r = 0; r < records.size(); ++r) {
    const PeakList& p = records[r];
    if (r > 0) out << '\n';
    out << "Name: " << p.name << '\n';
    if (!p.compound_id.empty()) out << "ID: " << p.compound_id << '\n';
    if (p.precursor_mz) out << "PrecursorMZ: " << format_fixed(*p.precursor_mz, 4) << '\n';
    for (const auto& [k, v] : p.metadata) out << k << ": " << v << '\n';
    out << "Num Peaks: " << p.peaks.size() << '\n';
    for (const auto& peak : p.peaks) {
      out << format_fixed(peak.mz, 4) << ' ' << format_fixed(peak.intensity, 2) << '\n';
    }
  }
}

Spectrum bin_spectrum(const PeakList& peaks, int max_mz) {
  Spectrum s(static_cast<std::size_t>(max_mz));
  for (const auto& p : peaks.peaks) {
    long bin = std::lround(p.mz);
    if (bin < 1 || bin > max_mz) {
      throw OutOfRange("peak at m/z " + format_fixed(p.mz, 4) + " outside bins 1.." + std::to_string(max_mz));
    }
    s.bins[static_cast<std::size_t>(bin - 1)] += p.intensity;
  }
  return s;
}

PeakList to_peak_list(const Spectrum& s) {
  PeakList out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.bins[i] > 0.0) out.peaks.push_back({static_cast<double>(i + 1), s.bins[i]});
  }
  return out;
}

Spectrum normalize(const Spectrum& s, Normalization mode) {
  double scale = 0.0;
  if (mode == Normalization::L2) {
    double n = s.norm();
    if (!(n > 0.0)) throw ZeroSpectrum("cannot normalize a zero spectrum");
    scale = 1.0 / n;
  } else {
    double peak = s.bins.empty() ? 0.0 : *std::max_element(s.bins.begin(), s.bins.end());
    if (!(peak > 0.0)) throw ZeroSpectrum("cannot normalize a zero spectrum");
    scale = 999.0 / peak;
  }
  Spectrum out = s;
  for (auto& v : out.bins) v *= scale;
  return out;
}

double cosine_similarity(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) {
    throw LengthMismatch("spectra of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a.bins[i] * b.bins[i];
    na += a.bins[i] * a.bins[i];
    nb += b.bins[i] * b.bins[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw ZeroSpectrum("cosine similarity of a zero spectrum");
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, 0.0, 1.0);
}

double cosine_distance(const Spectrum& a, const Spectrum& b) { return 1.0 - cosine_similarity(a, b); }

}  // namespace moms::spectra
