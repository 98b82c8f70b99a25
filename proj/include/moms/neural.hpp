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

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace moms::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;
};

// Owns parameters at stable addresses, in registration order.
class ParameterSet {
 public:
  Parameter& add(const std::string& name, Eigen::Index rows, Eigen::Index cols);
  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  Parameter* find(const std::string& name);
  std::size_t size() const { return params_.size(); }
  void zero_grad();

 private:
  std::deque<Parameter> params_;
};

// Deterministic initializer driven by raw mt19937_64 output.
class Initializer {
 public:
  explicit Initializer(std::uint64_t seed) : rng_(seed) {}
  // Uniform in [0, 1) from the top 53 bits.
  double uniform();
  void glorot(Matrix& w);

 private:
  std::mt19937_64 rng_;
};

class Tape;

// Handle to a value recorded on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
};

class Tape {
 public:
  Var constant(Matrix value);
  // Leaf bound to a parameter; backward accumulates into parameter.grad.
  Var param(Parameter& p);

  const Matrix& value(int id) const { return nodes_[id].value; }
  const Matrix& grad(int id) const { return nodes_[id].grad; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and runs the recorded graph in reverse. The loss
  // must be 1x1. Throws GraphCycle if a node refers to a later node.
  void backward(Var loss);

  // Records a node whose backward is given the node's output gradient.
  using BackwardFn = std::function<void(Tape&, const Matrix& grad_out)>;
  Var record(Matrix value, std::vector<int> parents, BackwardFn backward);
  void accumulate(int id, const Matrix& g);
  bool needs_grad(int id) const { return nodes_[id].needs_grad; }

  // Test hook: rewires a parent link to exercise cycle detection.
  void corrupt_parent_for_testing(int node, int parent) { nodes_[node].parents.assign(1, parent); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::vector<int> parents;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
};

Var matmul(Var a, Var b);
Var add(Var a, Var b);
// Adds the 1 x d row b to every row of a.
Var add_row(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
// (1 + eps) * a for a 1x1 eps.
Var scale_one_plus(Var a, Var eps);
Var relu(Var a);
// Constant sparse operator applied on the left: s * a. The operator is held by
// reference and must outlive the tape.
Var propagate(const SparseMatrix& s, Var a);
Var concat_cols(const std::vector<Var>& parts);
// Mean of rows in [offsets[g], offsets[g+1]) for each segment g.
Var segment_mean(Var a, const std::vector<int>& offsets);
Var gather_rows(Var a, const std::vector<int>& rows);
Var sum(Var a);
// Mean over rows of 1 - <p, t> / (sqrt(|p|^2 + eps^2) |t|); target is constant.
Var cosine_distance_mean(Var pred, const Matrix& target, double eps = 1e-6);

struct Linear {
  Parameter* weight = nullptr;  // in x out
  Parameter* bias = nullptr;    // 1 x out

  Linear() = default;
  Linear(ParameterSet& ps, const std::string& name, int in, int out, Initializer& init);
  Var operator()(Tape& t, Var x) const;
  int in() const { return static_cast<int>(weight->value.rows()); }
  int out() const { return static_cast<int>(weight->value.cols()); }
};

// Affine layers with ReLU between them; the last activation is optional.
struct MLP {
  std::vector<Linear> layers;
  bool final_relu = false;

  MLP() = default;
  MLP(ParameterSet& ps, const std::string& name, const std::vector<int>& widths, bool final_relu, Initializer& init);
  Var operator()(Tape& t, Var x) const;
};

// D^-1/2 (A + I) D^-1/2 with weighted degrees including the unit self loop.
struct Edge3 {
  int a;
  int b;
  double w;
};
SparseMatrix gcn_operator(int n, const std::vector<Edge3>& edges);
// Plain symmetric weighted adjacency (no self loops).
SparseMatrix adjacency_operator(int n, const std::vector<Edge3>& edges);

// ReLU(S H W + b) for S = gcn_operator(...).
struct GCNLayer {
  Linear linear;

  GCNLayer() = default;
  GCNLayer(ParameterSet& ps, const std::string& name, int in, int out, Initializer& init);
  Var operator()(Tape& t, Var h, const SparseMatrix& s) const;
};

// ReLU(MLP((1 + eps) H + A H)) with a two-layer MLP and learnable eps.
struct GINLayer {
  MLP mlp;
  Parameter* eps = nullptr;

  GINLayer() = default;
  GINLayer(ParameterSet& ps, const std::string& name, int in, int out, Initializer& init);
  Var operator()(Tape& t, Var h, const SparseMatrix& a) const;
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamOptions options = {}) : opt_(options) {}
  // Throws ShapeMismatch when a parameter no longer matches its moment state.
  void step(const std::vector<Parameter*>& params);
  long steps() const { return t_; }

 private:
  AdamOptions opt_;
  long t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

// Finite-difference check: per-parameter relative error
// |analytic - numeric| / max(|analytic|, |numeric|, min_scale), Frobenius norms
// over the checked entries. min_scale keeps parameters whose true gradient is
// zero (dead ReLUs) from dividing round-off noise by zero. At most max_entries
// entries per parameter are probed.
struct GradCheck {
  double max_relative_error = 0.0;
  std::string worst_parameter;
};
GradCheck check_gradients(const std::vector<Parameter*>& params, const std::function<Var(Tape&)>& loss,
                          double h = 1e-6, std::size_t max_entries = 64, std::uint64_t seed = 1,
                          double min_scale = 1e-5);

}  // namespace moms::nn
