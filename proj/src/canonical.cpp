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

#include "moms/canonical.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>

#include "moms/error.hpp"

namespace moms::chem {

namespace {

std::string atom_label(const Atom& a, bool with_h) {
  std::string out(symbol(a.element));
  if (a.aromatic) {
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (a.formal_charge != 0) {
    out += a.formal_charge > 0 ? "+" : "-";
    out += std::to_string(std::abs(a.formal_charge));
  }
  if (with_h) out += "H" + std::to_string(a.total_h());
  return out;
}

class Canonicalizer {
 public:
  Canonicalizer(const Molecule& m, bool with_h) : m_(m), with_h_(with_h) {
    labels_.reserve(m.atom_count());
    for (const auto& a : m.atoms) labels_.push_back(atom_label(a, with_h));
  }

  // Returns (certificate, order) of the lexicographically smallest leaf.
  std::pair<std::string, std::vector<int>> run() {
    const int n = static_cast<int>(m_.atom_count());
    if (n == 0) return {"", {}};
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return labels_[a] < labels_[b]; });
    std::vector<int> colors(n);
    int rank = 0;
    for (int i = 0; i < n; ++i) {
      if (i > 0 && labels_[order[i]] != labels_[order[i - 1]]) ++rank;
      colors[order[i]] = rank;
    }
    search(std::move(colors));
    return {std::move(best_), std::move(best_order_)};
  }

 private:
  // Iterated neighbourhood refinement; colours stay ordered consistently with
  // the incoming colouring so individualization order is preserved.
  void refine(std::vector<int>& colors) const {
    const int n = static_cast<int>(colors.size());
    int classes = count_classes(colors);
    std::vector<std::vector<int>> sig(n);
    while (true) {
      for (int i = 0; i < n; ++i) {
        auto& s = sig[i];
        s.clear();
        s.push_back(colors[i]);
        std::vector<int> nb;
        nb.reserve(m_.adjacency[i].size());
        for (const auto& e : m_.adjacency[i]) {
          nb.push_back(colors[e.atom] * 8 + static_cast<int>(m_.bonds[e.bond].order));
        }
        std::sort(nb.begin(), nb.end());
        s.insert(s.end(), nb.begin(), nb.end());
      }
      std::vector<int> idx(n);
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](int a, int b) { return sig[a] < sig[b]; });
      int r = 0;
      for (int k = 0; k < n; ++k) {
        if (k > 0 && sig[idx[k]] != sig[idx[k - 1]]) ++r;
        colors[idx[k]] = r;
      }
      int now = r + 1;
      if (now == classes) break;
      classes = now;
    }
  }

  static int count_classes(const std::vector<int>& colors) {
    return colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
  }

  void search(std::vector<int> colors) {
    refine(colors);
    const int n = static_cast<int>(colors.size());
    if (count_classes(colors) == n) {
      leaf(colors);
      return;
    }
    std::vector<int> size(n, 0);
    for (int c : colors) ++size[c];
    int target = -1;
    for (int c = 0; c < n; ++c) {
      if (size[c] > 1) {
        target = c;
        break;
      }
    }
    for (int v = 0; v < n; ++v) {
      if (colors[v] != target) continue;
      std::vector<int> next(n);
      for (int u = 0; u < n; ++u) next[u] = 2 * colors[u] + 1;
      next[v] = 2 * colors[v];
      search(std::move(next));
    }
  }

  void leaf(const std::vector<int>& colors) {
    const int n = static_cast<int>(colors.size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[colors[i]] = i;
    std::string cert;
    for (int i = 0; i < n; ++i) {
      if (i) cert += '.';
      cert += labels_[order[i]];
    }
    std::vector<std::tuple<int, int, int>> edges;
    edges.reserve(m_.bond_count());
    for (const auto& b : m_.bonds) {
      int x = colors[b.begin], y = colors[b.end];
      if (x > y) std::swap(x, y);
      edges.emplace_back(x, y, static_cast<int>(b.order));
    }
    std::sort(edges.begin(), edges.end());
    cert += '|';
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (k) cert += ',';
      auto [x, y, o] = edges[k];
      cert += std::to_string(x) + '-' + std::to_string(y) + ':' + std::to_string(o);
    }
    if (!have_best_ || cert < best_) {
      best_ = std::move(cert);
      best_order_ = std::move(order);
      have_best_ = true;
    }
  }

  const Molecule& m_;
  bool with_h_;
  std::vector<std::string> labels_;
  bool have_best_ = false;
  std::string best_;
  std::vector<int> best_order_;
};

}  // namespace

std::string canonical_key(const Molecule& fragment) {
  if (!fragment.connected()) {
    throw DisconnectedFragment("fragment has " + std::to_string(fragment.component_count()) + " components");
  }
  return canonical_key_unchecked(fragment);
}

std::string canonical_key_unchecked(const Molecule& m) { return Canonicalizer(m, false).run().first; }

std::vector<int> canonical_order(const Molecule& m) { return Canonicalizer(m, true).run().second; }

Molecule canonicalize(const Molecule& m) { return reorder_atoms(m, canonical_order(m)); }

}  // namespace moms::chem
