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

#include "moms/neural.hpp"

#include <algorithm>
#include <cmath>

#include "moms/error.hpp"

namespace moms::nn {

namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeMismatch(what);
}

}  // namespace

Parameter& ParameterSet::add(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
  if (find(name)) throw Error("duplicate parameter name " + name);
  auto& p = params_.emplace_back();
  p.name = name;
  p.value = Matrix::Zero(rows, cols);
  p.grad = Matrix::Zero(rows, cols);
  return p;
}

std::vector<Parameter*> ParameterSet::all() {
  std::vector<Parameter*> out;
  for (auto& p : params_) out.push_back(&p);
  return out;
}

std::vector<const Parameter*> ParameterSet::all() const {
  std::vector<const Parameter*> out;
  for (const auto& p : params_) out.push_back(&p);
  return out;
}

Parameter* ParameterSet::find(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void ParameterSet::zero_grad() {
  for (auto& p : params_) p.grad.setZero(p.value.rows(), p.value.cols());
}

double Initializer::uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

void Initializer::glorot(Matrix& w) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = (2.0 * uniform() - 1.0) * limit;
}

const Matrix& Var::value() const { return tape->value(id); }

Var Tape::constant(Matrix value) { return record(std::move(value), {}, nullptr); }

Var Tape::param(Parameter& p) {
  Node n;
  n.value = p.value;
  n.param = &p;
  n.needs_grad = true;
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

Var Tape::record(Matrix value, std::vector<int> parents, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  for (int p : parents) n.needs_grad = n.needs_grad || nodes_[p].needs_grad;
  n.parents = std::move(parents);
  if (n.needs_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return {this, static_cast<int>(nodes_.size()) - 1};
}

void Tape::accumulate(int id, const Matrix& g) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0) n.grad = g;
  else n.grad += g;
}

void Tape::backward(Var loss) {
  require(loss.rows() == 1 && loss.cols() == 1, "loss must be 1x1, got " + shape(loss.value()));
  for (auto& n : nodes_) n.grad.resize(0, 0);
  accumulate(loss.id, Matrix::Ones(1, 1));
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.grad.size() == 0) continue;
    for (int p : n.parents) {
      if (p >= id) throw GraphCycle("node " + std::to_string(id) + " depends on later node " + std::to_string(p));
    }
    if (n.param) {
      if (n.param->grad.size() == 0) n.param->grad = Matrix::Zero(n.value.rows(), n.value.cols());
      n.param->grad += n.grad;
    }
    if (n.backward) n.backward(*this, n.grad);
  }
}

Var matmul(Var a, Var b) {
  require(a.cols() == b.rows(), "matmul " + shape(a.value()) + " by " + shape(b.value()));
  Tape& t = *a.tape;
  Matrix out = a.value() * b.value();
  int ia = a.id, ib = b.id;
  return t.record(std::move(out), {ia, ib}, [ia, ib](Tape& t, const Matrix& g) {
    if (t.needs_grad(ia)) t.accumulate(ia, g * t.value(ib).transpose());
    if (t.needs_grad(ib)) t.accumulate(ib, t.value(ia).transpose() * g);
  });
}

Var add(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add " + shape(a.value()) + " and " + shape(b.value()));
  int ia = a.id, ib = b.id;
  return a.tape->record(a.value() + b.value(), {ia, ib}, [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    t.accumulate(ib, g);
  });
}

Var add_row(Var a, Var b) {
  require(b.rows() == 1 && b.cols() == a.cols(), "add_row " + shape(a.value()) + " and " + shape(b.value()));
  Matrix out = a.value();
  out.rowwise() += b.value().row(0);
  int ia = a.id, ib = b.id;
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, const Matrix& g) {
    t.accumulate(ia, g);
    if (t.needs_grad(ib)) t.accumulate(ib, g.colwise().sum());
  });
}

Var mul(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "mul " + shape(a.value()) + " and " + shape(b.value()));
  int ia = a.id, ib = b.id;
  Matrix out = a.value().cwiseProduct(b.value());
  return a.tape->record(std::move(out), {ia, ib}, [ia, ib](Tape& t, const Matrix& g) {
    if (t.needs_grad(ia)) t.accumulate(ia, g.cwiseProduct(t.value(ib)));
    if (t.needs_grad(ib)) t.accumulate(ib, g.cwiseProduct(t.value(ia)));
  });
}

Var scale(Var a, double s) {
  int ia = a.id;
  return a.tape->record(a.value() * s, {ia}, [ia, s](Tape& t, const Matrix& g) { t.accumulate(ia, g * s); });
}

Var scale_one_plus(Var a, Var eps) {
  require(eps.rows() == 1 && eps.cols() == 1, "eps must be 1x1");
  int ia = a.id, ie = eps.id;
  const double f = 1.0 + eps.value()(0, 0);
  return a.tape->record(a.value() * f, {ia, ie}, [ia, ie, f](Tape& t, const Matrix& g) {
    if (t.needs_grad(ia)) t.accumulate(ia, g * f);
    if (t.needs_grad(ie)) t.accumulate(ie, Matrix::Constant(1, 1, g.cwiseProduct(t.value(ia)).sum()));
  });
}

Var relu(Var a) {
  int ia = a.id;
  Matrix out = a.value().cwiseMax(0.0);
  return a.tape->record(std::move(out), {ia}, [ia](Tape& t, const Matrix& g) {
    t.accumulate(ia, (t.value(ia).array() > 0.0).select(g, 0.0));
  });
}

Var propagate(const SparseMatrix& s, Var a) {
  require(s.cols() == a.rows(), "propagate " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) + " by " +
                                    shape(a.value()));
  int ia = a.id;
  Matrix out = s * a.value();
  return a.tape->record(std::move(out), {ia}, [ia, &s](Tape& t, const Matrix& g) {
    Matrix back = s.transpose() * g;
    t.accumulate(ia, back);
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat of nothing");
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  std::vector<int> ids;
  std::vector<Eigen::Index> widths;
  for (const auto& p : parts) {
    require(p.rows() == rows, "concat rows differ");
    ids.push_back(p.id);
    widths.push_back(p.cols());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const auto& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  return parts[0].tape->record(std::move(out), ids, [ids, widths](Tape& t, const Matrix& g) {
    Eigen::Index c = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.needs_grad(ids[k])) t.accumulate(ids[k], g.middleCols(c, widths[k]));
      c += widths[k];
    }
  });
}

Var segment_mean(Var a, const std::vector<int>& offsets) {
  require(offsets.size() >= 1 && offsets.front() == 0 && offsets.back() == a.rows(), "segment offsets do not cover rows");
  const Eigen::Index groups = static_cast<Eigen::Index>(offsets.size()) - 1;
  Matrix out = Matrix::Zero(groups, a.cols());
  for (Eigen::Index s = 0; s < groups; ++s) {
    int lo = offsets[s], hi = offsets[s + 1];
    require(lo <= hi, "segment offsets must be nondecreasing");
    if (hi > lo) out.row(s) = a.value().middleRows(lo, hi - lo).colwise().sum() / static_cast<double>(hi - lo);
  }
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia, offsets](Tape& t, const Matrix& g) {
    Matrix back = Matrix::Zero(t.value(ia).rows(), t.value(ia).cols());
    for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
      int lo = offsets[s], hi = offsets[s + 1];
      for (int r = lo; r < hi; ++r) back.row(r) = g.row(static_cast<Eigen::Index>(s)) / static_cast<double>(hi - lo);
    }
    t.accumulate(ia, back);
  });
}

Var gather_rows(Var a, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    require(rows[r] >= 0 && rows[r] < a.rows(), "gather row out of range");
    out.row(static_cast<Eigen::Index>(r)) = a.value().row(rows[r]);
  }
  int ia = a.id;
  return a.tape->record(std::move(out), {ia}, [ia, rows](Tape& t, const Matrix& g) {
    Matrix back = Matrix::Zero(t.value(ia).rows(), t.value(ia).cols());
    for (std::size_t r = 0; r < rows.size(); ++r) back.row(rows[r]) += g.row(static_cast<Eigen::Index>(r));
    t.accumulate(ia, back);
  });
}

Var sum(Var a) {
  int ia = a.id;
  return a.tape->record(Matrix::Constant(1, 1, a.value().sum()), {ia}, [ia](Tape& t, const Matrix& g) {
    t.accumulate(ia, Matrix::Constant(t.value(ia).rows(), t.value(ia).cols(), g(0, 0)));
  });
}

Var cosine_distance_mean(Var pred, const Matrix& target, double eps) {
  require(pred.rows() == target.rows() && pred.cols() == target.cols(),
          "cosine distance " + shape(pred.value()) + " vs " + shape(target));
  require(pred.rows() > 0, "cosine distance over no rows");
  const Matrix& p = pred.value();
  const Eigen::Index rows = p.rows();
  double total = 0.0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    double tn = target.row(r).norm();
    if (tn == 0.0) {
      total += 1.0;
      continue;
    }
    double pn = std::sqrt(p.row(r).squaredNorm() + eps * eps);
    total += 1.0 - p.row(r).dot(target.row(r)) / (pn * tn);
  }
  int ip = pred.id;
  return pred.tape->record(Matrix::Constant(1, 1, total / static_cast<double>(rows)), {ip},
                           [ip, target, eps](Tape& t, const Matrix& g) {
                             const Matrix& p = t.value(ip);
                             const Eigen::Index rows = p.rows();
                             Matrix back = Matrix::Zero(rows, p.cols());
                             for (Eigen::Index r = 0; r < rows; ++r) {
                               double tn = target.row(r).norm();
                               if (tn == 0.0) continue;
                               double pn = std::sqrt(p.row(r).squaredNorm() + eps * eps);
                               double dot = p.row(r).dot(target.row(r));
                               back.row(r) = -(target.row(r) / (pn * tn) - p.row(r) * (dot / (pn * pn * pn * tn)));
                             }
                             t.accumulate(ip, back * (g(0, 0) / static_cast<double>(rows)));
                           });
}

Linear::Linear(ParameterSet& ps, const std::string& name, int in, int out, Initializer& init) {
  weight = &ps.add(name + ".weight", in, out);
  bias = &ps.add(name + ".bias", 1, out);
  init.glorot(weight->value);
}

Var Linear::operator()(Tape& t, Var x) const { return add_row(matmul(x, t.param(*weight)), t.param(*bias)); }

MLP::MLP(ParameterSet& ps, const std::string& name, const std::vector<int>& widths, bool final_relu_,
         Initializer& init)
    : final_relu(final_relu_) {
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    layers.emplace_back(ps, name + "." + std::to_string(i), widths[i], widths[i + 1], init);
  }
}

Var MLP::operator()(Tape& t, Var x) const {
  for (std::size_t i = 0; i < layers.size(); ++i) {
    x = layers[i](t, x);
    if (i + 1 < layers.size() || final_relu) x = relu(x);
  }
  return x;
}

SparseMatrix gcn_operator(int n, const std::vector<Edge3>& edges) {
  std::vector<double> degree(n, 1.0);
  for (const auto& e : edges) {
    degree[e.a] += e.w;
    degree[e.b] += e.w;
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0 / degree[i]);
  for (const auto& e : edges) {
    double v = e.w / std::sqrt(degree[e.a] * degree[e.b]);
    trip.emplace_back(e.a, e.b, v);
    trip.emplace_back(e.b, e.a, v);
  }
  SparseMatrix s(n, n);
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

SparseMatrix adjacency_operator(int n, const std::vector<Edge3>& edges) {
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : edges) {
    trip.emplace_back(e.a, e.b, e.w);
    trip.emplace_back(e.b, e.a, e.w);
  }
  SparseMatrix s(n, n);
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

GCNLayer::GCNLayer(ParameterSet& ps, const std::string& name, int in, int out, Initializer& init)
    : linear(ps, name, in, out, init) {}

Var GCNLayer::operator()(Tape& t, Var h, const SparseMatrix& s) const {
  require(s.rows() == h.rows(), "GCN operator does not match node count");
  Var hw = matmul(h, t.param(*linear.weight));
  return relu(add_row(propagate(s, hw), t.param(*linear.bias)));
}

GINLayer::GINLayer(ParameterSet& ps, const std::string& name, int in, int out, Initializer& init)
    : mlp(ps, name + ".mlp", {in, out, out}, true, init) {
  eps = &ps.add(name + ".eps", 1, 1);
}

Var GINLayer::operator()(Tape& t, Var h, const SparseMatrix& a) const {
  require(a.rows() == h.rows(), "GIN adjacency does not match node count");
  Var z = add(scale_one_plus(h, t.param(*eps)), propagate(a, h));
  return mlp(t, z);
}

void Adam::step(const std::vector<Parameter*>& params) {
  if (m_.empty()) {
    for (const auto* p : params) {
      m_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
      v_.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    }
  }
  require(m_.size() == params.size(), "optimizer state has " + std::to_string(m_.size()) + " slots for " +
                                          std::to_string(params.size()) + " parameters");
  ++t_;
  const double c1 = 1.0 - std::pow(opt_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(opt_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    require(m_[i].rows() == p.value.rows() && m_[i].cols() == p.value.cols(), "optimizer state shape for " + p.name);
    require(p.grad.size() == 0 || (p.grad.rows() == p.value.rows() && p.grad.cols() == p.value.cols()),
            "gradient shape for " + p.name);
    if (p.grad.size() == 0) {
      m_[i] *= opt_.beta1;
      v_[i] *= opt_.beta2;
    } else {
      m_[i] = opt_.beta1 * m_[i] + (1.0 - opt_.beta1) * p.grad;
      v_[i] = opt_.beta2 * v_[i] + (1.0 - opt_.beta2) * p.grad.cwiseProduct(p.grad);
    }
    p.value.array() -= opt_.lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + opt_.eps);
  }
}

GradCheck check_gradients(const std::vector<Parameter*>& params, const std::function<Var(Tape&)>& loss, double h,
                          std::size_t max_entries, std::uint64_t seed, double min_scale) {
  for (auto* p : params) p->grad.setZero(p->value.rows(), p->value.cols());
  {
    Tape t;
    t.backward(loss(t));
  }
  auto eval = [&] {
    Tape t;
    return loss(t).value()(0, 0);
  };
  std::mt19937_64 rng(seed);
  GradCheck result;
  for (auto* p : params) {
    const std::size_t n = static_cast<std::size_t>(p->value.size());
    std::vector<std::size_t> entries;
    if (n <= max_entries) {
      for (std::size_t i = 0; i < n; ++i) entries.push_back(i);
    } else {
      for (std::size_t i = 0; i < max_entries; ++i) entries.push_back(rng() % n);
    }
    double diff = 0.0, na = 0.0, nn = 0.0;
    for (std::size_t e : entries) {
      double& x = p->value.data()[e];
      const double saved = x;
      x = saved + h;
      double up = eval();
      x = saved - h;
      double down = eval();
      x = saved;
      double numeric = (up - down) / (2.0 * h);
      double analytic = p->grad.data()[e];
      diff += (analytic - numeric) * (analytic - numeric);
      na += analytic * analytic;
      nn += numeric * numeric;
    }
    double rel = std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), min_scale});
    if (rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_parameter = p->name;
    }
  }
  return result;
}

}  // namespace moms::nn
