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

#include "moms/smiles.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "moms/error.hpp"
#include "moms/runtime.hpp"

namespace moms::chem {

namespace {

enum class BondSymbol { None, Single, Double, Triple, Aromatic };

struct RingOpen {
  int atom;
  BondSymbol symbol;
};

bool is_aromatic_symbol(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

Element aromatic_element(char c) {
  switch (c) {
    case 'b':
      return Element::B;
    case 'c':
      return Element::C;
    case 'n':
      return Element::N;
    case 'o':
      return Element::O;
    case 'p':
      return Element::P;
    default:
      return Element::S;
  }
}

class Parser {
 public:
  Parser(std::string_view text, const SmilesOptions& options) : text_(text), options_(options) {}

  Molecule run() {
    if (text_.empty()) throw SyntaxError("empty SMILES");
    int prev = -1;
    std::vector<int> branch_stack;
    BondSymbol pending = BondSymbol::None;
    bool pending_set = false;

    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(') {
        if (prev < 0) fail("branch opened before any atom");
        branch_stack.push_back(prev);
        ++pos_;
      } else if (c == ')') {
        if (branch_stack.empty()) fail("unbalanced ')'");
        if (pending_set) fail("bond symbol before ')'");
        prev = branch_stack.back();
        branch_stack.pop_back();
        ++pos_;
      } else if (c == '-' || c == '=' || c == '#' || c == ':' || c == '/' || c == '\\') {
        if (pending_set) fail("two consecutive bond symbols");
        if (prev < 0) fail("bond symbol without a preceding atom");
        pending = symbol_for(c);
        pending_set = true;
        ++pos_;
      } else if (c == '.') {
        if (pending_set) fail("bond symbol before '.'");
        if (!branch_stack.empty()) fail("'.' inside a branch");
        prev = -1;
        ++pos_;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '%') {
        if (prev < 0) fail("ring closure without a preceding atom");
        int label = read_ring_label();
        ring_closure(prev, label, pending_set ? pending : BondSymbol::None);
        pending = BondSymbol::None;
        pending_set = false;
      } else {
        int atom = read_atom();
        if (prev >= 0) {
          add_bond(prev, atom, pending_set ? pending : BondSymbol::None);
        } else if (pending_set) {
          fail("bond symbol without a preceding atom");
        }
        pending = BondSymbol::None;
        pending_set = false;
        prev = atom;
      }
    }
    if (pending_set) fail("dangling bond symbol at end of input");
    if (!branch_stack.empty()) fail("unbalanced '('");
    if (!open_rings_.empty()) {
      throw SyntaxError("unclosed ring bond " + std::to_string(open_rings_.begin()->first));
    }
    if (stereo_seen_) log_warning("stereo marks ignored in '" + std::string(text_) + "'");
    return build();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw SyntaxError(what + " at position " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

  BondSymbol symbol_for(char c) {
    switch (c) {
      case '-':
        return BondSymbol::Single;
      case '=':
        return BondSymbol::Double;
      case '#':
        return BondSymbol::Triple;
      case ':':
        return BondSymbol::Aromatic;
      default:
        stereo_seen_ = true;
        return BondSymbol::None;
    }
  }

  int read_ring_label() {
    if (text_[pos_] != '%') return text_[pos_++] - '0';
    auto digit_at = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    if (!digit_at(pos_ + 1) || !digit_at(pos_ + 2)) fail("'%' must be followed by two digits");
    int label = (text_[pos_ + 1] - '0') * 10 + (text_[pos_ + 2] - '0');
    pos_ += 3;
    return label;
  }

  int new_atom(Element e, bool aromatic, bool bracket) {
    Atom a;
    a.element = e;
    a.aromatic = aromatic;
    atoms_.push_back(a);
    bracket_.push_back(bracket);
    return static_cast<int>(atoms_.size()) - 1;
  }

  int read_atom() {
    char c = text_[pos_];
    if (c == '[') return read_bracket_atom();
    if (c == 'C' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'l') {
      pos_ += 2;
      return new_atom(Element::Cl, false, false);
    }
    if (c == 'B' && pos_ + 1 < text_.size() && text_[pos_ + 1] == 'r') {
      pos_ += 2;
      return new_atom(Element::Br, false, false);
    }
    switch (c) {
      case 'B':
      case 'C':
      case 'N':
      case 'O':
      case 'P':
      case 'S':
      case 'F':
      case 'I':
        ++pos_;
        return new_atom(*element_from_symbol(std::string_view(&c, 1)), false, false);
      default:
        break;
    }
    if (is_aromatic_symbol(c)) {
      ++pos_;
      return new_atom(aromatic_element(c), true, false);
    }
    fail(std::string("unknown element or symbol '") + c + "'");
  }

  int read_bracket_atom() {
    std::size_t close = text_.find(']', pos_);
    if (close == std::string_view::npos) fail("unterminated bracket atom");
    std::string_view body = text_.substr(pos_ + 1, close - pos_ - 1);
    std::size_t i = 0;
    if (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
      fail("isotope labels are not supported");
    }
    Element element = Element::C;
    bool aromatic = false;
    if (i + 1 < body.size() && std::isupper(static_cast<unsigned char>(body[i])) &&
        std::islower(static_cast<unsigned char>(body[i + 1])) &&
        element_from_symbol(body.substr(i, 2))) {
      element = *element_from_symbol(body.substr(i, 2));
      i += 2;
    } else if (i < body.size() && std::isupper(static_cast<unsigned char>(body[i])) &&
               element_from_symbol(body.substr(i, 1))) {
      element = *element_from_symbol(body.substr(i, 1));
      i += 1;
    } else if (i < body.size() && is_aromatic_symbol(body[i])) {
      element = aromatic_element(body[i]);
      aromatic = true;
      i += 1;
    } else {
      fail("unknown element in bracket atom '[" + std::string(body) + "]'");
    }
    if (i < body.size() && body[i] == '@') {
      stereo_seen_ = true;
      while (i < body.size() && (body[i] == '@' || (std::isupper(static_cast<unsigned char>(body[i])) &&
                                                    body[i] != 'H'))) {
        ++i;
      }
      while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
    }
    int hcount = 0;
    if (i < body.size() && body[i] == 'H') {
      ++i;
      hcount = 1;
      if (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
        hcount = body[i] - '0';
        ++i;
      }
    }
    int charge = 0;
    if (i < body.size() && (body[i] == '+' || body[i] == '-')) {
      char sign = body[i];
      int magnitude = 0;
      while (i < body.size() && body[i] == sign) {
        ++magnitude;
        ++i;
      }
      if (magnitude == 1 && i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
        magnitude = 0;
        while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) {
          magnitude = magnitude * 10 + (body[i] - '0');
          ++i;
        }
      }
      charge = sign == '+' ? magnitude : -magnitude;
    }
    if (i < body.size() && body[i] == ':') {
      ++i;
      while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
    }
    if (i != body.size()) fail("unexpected text in bracket atom '[" + std::string(body) + "]'");
    pos_ = close + 1;
    int idx = new_atom(element, aromatic, true);
    atoms_[idx].explicit_h = hcount;
    atoms_[idx].formal_charge = charge;
    return idx;
  }

  void add_bond(int a, int b, BondSymbol symbol) {
    Bond bd;
    bd.begin = a;
    bd.end = b;
    bool implicit = symbol == BondSymbol::None;
    switch (symbol) {
      case BondSymbol::None:
        bd.order = (atoms_[a].aromatic && atoms_[b].aromatic) ? BondOrder::Aromatic : BondOrder::Single;
        break;
      case BondSymbol::Single:
        bd.order = BondOrder::Single;
        break;
      case BondSymbol::Double:
        bd.order = BondOrder::Double;
        break;
      case BondSymbol::Triple:
        bd.order = BondOrder::Triple;
        break;
      case BondSymbol::Aromatic:
        bd.order = BondOrder::Aromatic;
        break;
    }
    for (const Bond& existing : bonds_) {
      if ((existing.begin == a && existing.end == b) || (existing.begin == b && existing.end == a)) {
        fail("duplicate bond");
      }
    }
    if (a == b) fail("ring closure onto the same atom");
    bonds_.push_back(bd);
    implicit_.push_back(implicit);
  }

  void ring_closure(int atom, int label, BondSymbol symbol) {
    auto it = open_rings_.find(label);
    if (it == open_rings_.end()) {
      open_rings_[label] = {atom, symbol};
      return;
    }
    RingOpen open = it->second;
    open_rings_.erase(it);
    BondSymbol use = symbol;
    if (open.symbol != BondSymbol::None) {
      if (symbol != BondSymbol::None && symbol != open.symbol) fail("conflicting ring-closure bond symbols");
      use = open.symbol;
    }
    add_bond(open.atom, atom, use);
  }

  Molecule build() {
    Molecule m;
    // Fold explicit hydrogens attached to exactly one heavy atom.
    std::vector<bool> drop(atoms_.size(), false);
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (atoms_[i].element != Element::H || atoms_[i].formal_charge != 0 || atoms_[i].explicit_h != 0) continue;
      int partner = -1, count = 0;
      BondOrder order = BondOrder::Single;
      for (const Bond& bd : bonds_) {
        if (bd.begin == static_cast<int>(i) || bd.end == static_cast<int>(i)) {
          partner = bd.other(static_cast<int>(i));
          order = bd.order;
          ++count;
        }
      }
      if (count == 1 && order == BondOrder::Single && atoms_[partner].element != Element::H) {
        drop[i] = true;
        atoms_[partner].explicit_h += 1;
      }
    }
    std::vector<int> remap(atoms_.size(), -1);
    std::vector<bool> bracket;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      if (drop[i]) continue;
      remap[i] = static_cast<int>(m.atoms.size());
      m.atoms.push_back(atoms_[i]);
      bracket.push_back(bracket_[i]);
    }
    std::vector<bool> implicit;
    for (std::size_t b = 0; b < bonds_.size(); ++b) {
      const Bond& bd = bonds_[b];
      if (drop[bd.begin] || drop[bd.end]) continue;
      m.bonds.push_back({remap[bd.begin], remap[bd.end], bd.order, false});
      implicit.push_back(implicit_[b]);
    }
    finalize(m);

    for (const Bond& bd : m.bonds) {
      if (bd.order == BondOrder::Aromatic) {
        m.atoms[bd.begin].aromatic = true;
        m.atoms[bd.end].aromatic = true;
      }
    }
    if (!options_.fragment) {
      for (std::size_t b = 0; b < m.bonds.size(); ++b) {
        Bond& bd = m.bonds[b];
        if (bd.order != BondOrder::Aromatic || bd.in_ring) continue;
        if (!implicit[b]) throw SyntaxError("aromatic bond outside a ring in '" + std::string(text_) + "'");
        bd.order = BondOrder::Single;
      }
      for (const Atom& a : m.atoms) {
        if (a.aromatic && !a.in_ring) {
          throw SyntaxError("aromatic atom outside a ring in '" + std::string(text_) + "'");
        }
      }
    }
    assign_hydrogens(m, bracket);
    return m;
  }

  std::string_view text_;
  SmilesOptions options_;
  std::size_t pos_ = 0;
  bool stereo_seen_ = false;
  std::vector<Atom> atoms_;
  std::vector<bool> bracket_;
  std::vector<Bond> bonds_;
  std::vector<bool> implicit_;
  std::map<int, RingOpen> open_rings_;
};

std::string bond_text(const Molecule& m, const Bond& bd) {
  bool both_aromatic = m.atoms[bd.begin].aromatic && m.atoms[bd.end].aromatic;
  switch (bd.order) {
    case BondOrder::Single:
      return both_aromatic ? "-" : "";
    case BondOrder::Double:
      return "=";
    case BondOrder::Triple:
      return "#";
    case BondOrder::Aromatic:
      return both_aromatic ? "" : ":";
  }
  return "";
}

std::string atom_text(const Molecule& m, int idx) {
  const Atom& a = m.atoms[idx];
  std::string sym(symbol(a.element));
  if (a.aromatic) {
    for (auto& ch : sym) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  bool organic = a.element != Element::H && a.formal_charge == 0 &&
                 completed_hydrogens(m, idx) == a.total_h();
  if (organic) return sym;
  std::string out = "[" + sym;
  if (a.total_h() > 0) {
    out += "H";
    if (a.total_h() > 1) out += std::to_string(a.total_h());
  }
  if (a.formal_charge != 0) {
    out += a.formal_charge > 0 ? "+" : "-";
    if (std::abs(a.formal_charge) > 1) out += std::to_string(std::abs(a.formal_charge));
  }
  return out + "]";
}

class Writer {
 public:
  explicit Writer(const Molecule& m) : m_(m), visited_(m.atom_count(), false), order_(m.atom_count(), -1) {}

  std::string run() {
    std::string out;
    for (std::size_t s = 0; s < m_.atom_count(); ++s) {
      if (visited_[s]) continue;
      if (!out.empty()) out += '.';
      plan(static_cast<int>(s), -1);
      emit(static_cast<int>(s), -1, out);
    }
    return out;
  }

 private:
  // First pass: DFS tree; bonds to already-visited atoms become ring closures.
  void plan(int atom, int parent_bond) {
    visited_[atom] = true;
    order_[atom] = counter_++;
    for (const auto& nb : m_.adjacency[atom]) {
      if (nb.bond == parent_bond) continue;
      if (visited_[nb.atom]) {
        if (!closure_.count(nb.bond)) {
          closure_.insert(nb.bond);
        }
        continue;
      }
      children_[atom].push_back(nb);
      tree_.insert(nb.bond);
      plan(nb.atom, nb.bond);
    }
  }

  int take_digit() {
    for (int d = 1;; ++d) {
      if (!used_digits_.count(d)) {
        used_digits_.insert(d);
        return d;
      }
    }
  }

  static std::string digit_text(int d) { return d < 10 ? std::to_string(d) : "%" + std::to_string(d); }

  void emit(int atom, int parent_bond, std::string& out) {
    out += atom_text(m_, atom);
    for (const auto& nb : m_.adjacency[atom]) {
      if (!closure_.count(nb.bond)) continue;
      auto it = digit_of_bond_.find(nb.bond);
      if (it == digit_of_bond_.end()) {
        int d = take_digit();
        digit_of_bond_[nb.bond] = d;
        out += bond_text(m_, m_.bonds[nb.bond]) + digit_text(d);
      } else {
        out += digit_text(it->second);
        used_digits_.erase(it->second);
      }
    }
    (void)parent_bond;
    const auto& kids = children_[atom];
    for (std::size_t k = 0; k < kids.size(); ++k) {
      bool last = k + 1 == kids.size();
      if (!last) out += '(';
      out += bond_text(m_, m_.bonds[kids[k].bond]);
      emit(kids[k].atom, kids[k].bond, out);
      if (!last) out += ')';
    }
  }

  const Molecule& m_;
  std::vector<bool> visited_;
  std::vector<int> order_;
  int counter_ = 0;
  std::set<int> closure_;
  std::set<int> tree_;
  std::map<int, std::vector<Neighbor>> children_;
  std::set<int> used_digits_;
  std::map<int, int> digit_of_bond_;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Molecule parse_smiles(std::string_view text, const SmilesOptions& options) {
  return Parser(text, options).run();
}

std::string write_smiles(const Molecule& m) { return Writer(m).run(); }

std::vector<Molecule> read_corpus(std::istream& in) {
  std::vector<Molecule> out;
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t tab = t.find('\t');
    if (tab == std::string::npos) throw FormatError(lineno, "expected 'id<TAB>SMILES'");
    std::string id = trim(t.substr(0, tab));
    std::string smiles = trim(t.substr(tab + 1));
    if (id.empty()) throw FormatError(lineno, "empty molecule id");
    if (!ids.insert(id).second) throw FormatError(lineno, "duplicate molecule id '" + id + "'");
    try {
      Molecule m = parse_smiles(smiles);
      m.id = id;
      out.push_back(std::move(m));
    } catch (const Error& e) {
      throw FormatError(lineno, e.what());
    }
  }
  return out;
}

void write_corpus(std::ostream& out, const std::vector<Molecule>& corpus) {
  for (const auto& m : corpus) out << m.id << '\t' << write_smiles(m) << '\n';
}

}  // namespace moms::chem
