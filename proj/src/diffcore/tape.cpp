// Copyright 2026 The planrl Authors.
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

#include "planrl/diffcore/tape.hpp"

#include <cmath>
#include <sstream>

namespace planrl::diff {

namespace {

enum BinaryOp { kAdd, kSub, kMul, kMin };

std::string shape(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

// Broadcast dimension: equal, or one side is 1.
Eigen::Index joint(Eigen::Index a, Eigen::Index b) {
  if (a == b) return a;
  if (a == 1) return b;
  if (b == 1) return a;
  return -1;
}

Matrix expand(const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  if (m.rows() == rows && m.cols() == cols) return m;
  return m.replicate(m.rows() == rows ? 1 : rows, m.cols() == cols ? 1 : cols);
}

// Sums a gradient back down to the operand's (possibly broadcast) shape.
Matrix reduce(const Matrix& g, Eigen::Index rows, Eigen::Index cols) {
  if (g.rows() == rows && g.cols() == cols) return g;
  Matrix r = g;
  if (rows == 1 && r.rows() != 1) r = r.colwise().sum().eval();
  if (cols == 1 && r.cols() != 1) r = r.rowwise().sum().eval();
  return r;
}

}  // namespace

Matrix tanh_values(const Matrix& x) {
  return (1.0 - 2.0 / ((2.0 * x.array()).exp() + 1.0)).matrix();
}

const Matrix& Var::value() const { return tape->value(*this); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.size() != 1) throw UsageError("scalar() on a " + shape(v) + " node");
  return v(0, 0);
}

Tape::Tape(bool record_gradients) : record_(record_gradients) { nodes_.reserve(256); }

int Tape::push(Matrix value, bool needs_grad, std::function<void(const Matrix&)> back) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = record_ && needs_grad;
  if (n.needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

void Tape::check(Var v) const {
  if (v.tape != this || v.id < 0 || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw UsageError("variable does not belong to this tape");
  }
}

template <class Derived>
void Tape::accumulate(int id, const Eigen::MatrixBase<Derived>& g) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0) {
    n.grad.noalias() = g;
  } else {
    n.grad.noalias() += g;
  }
}

Var Tape::constant(Matrix value) { return {this, push(std::move(value), false)}; }

Var Tape::input(Matrix value) { return {this, push(std::move(value), true)}; }

Var Tape::param(ParamStore& store, ParamId id, bool trainable) {
  const auto key = std::make_tuple(static_cast<const ParamStore*>(&store), id, trainable);
  if (auto it = param_nodes_.find(key); it != param_nodes_.end()) return {this, it->second};
  const int node = push(Matrix(), trainable);
  nodes_[static_cast<std::size_t>(node)].ref = &store[id].value;
  if (nodes_[static_cast<std::size_t>(node)].needs_grad) {
    nodes_[static_cast<std::size_t>(node)].store = &store;
    nodes_[static_cast<std::size_t>(node)].param = id;
  }
  param_nodes_.emplace(key, node);
  return {this, node};
}

Var Tape::detach(Var v) {
  check(v);
  return constant(value(v));
}

const Matrix& Tape::value(Var v) const {
  check(v);
  return nodes_[static_cast<std::size_t>(v.id)].val();
}

Matrix Tape::grad(Var v) const {
  check(v);
  const Node& n = nodes_[static_cast<std::size_t>(v.id)];
  if (n.grad.size() == 0) return Matrix::Zero(n.val().rows(), n.val().cols());
  return n.grad;
}

bool Tape::requires_grad(Var v) const {
  check(v);
  return needs(v);
}

void Tape::backward(Var loss) {
  check(loss);
  if (!record_) throw UsageError("backward on a tape that does not record gradients");
  if (backward_done_) throw UsageError("backward called twice on one recording; call reset()");
  if (value(loss).size() != 1) throw UsageError("backward needs a scalar loss, got " + shape(value(loss)));
  backward_done_ = true;
  if (!needs(loss)) return;

  nodes_[static_cast<std::size_t>(loss.id)].grad = Matrix::Ones(1, 1);
  for (int i = loss.id; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.grad.size() == 0) continue;
    if (n.back) n.back(n.grad);
    if (n.store != nullptr) (*n.store)[n.param].grad += n.grad;
  }
}

void Tape::reset() {
  nodes_.clear();
  param_nodes_.clear();
  backward_done_ = false;
}

Var Tape::matmul(Var a, Var b) {
  check(a);
  check(b);
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  if (av.cols() != bv.rows()) {
    throw ConfigError("matmul shape mismatch: " + shape(av) + " * " + shape(bv));
  }
  const int ai = a.id;
  const int bi = b.id;
  return {this, push(av * bv, needs(a) || needs(b), [this, ai, bi](const Matrix& g) {
            accumulate(ai, g * nodes_[bi].val().transpose());
            accumulate(bi, nodes_[ai].val().transpose() * g);
          })};
}

Var Tape::binary(Var a, Var b, int op) {
  check(a);
  check(b);
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  const Eigen::Index rows = joint(av.rows(), bv.rows());
  const Eigen::Index cols = joint(av.cols(), bv.cols());
  if (rows < 0 || cols < 0) {
    throw ConfigError("elementwise shape mismatch: " + shape(av) + " vs " + shape(bv));
  }
  const bool same = av.rows() == bv.rows() && av.cols() == bv.cols();
  // b is a row added to (or subtracted from) every row of a: the bias case.
  const bool row_bias = !same && (op == kAdd || op == kSub) && av.rows() == rows && av.cols() == cols &&
                        bv.rows() == 1 && bv.cols() == cols;
  Matrix out;
  if (same) {
    switch (op) {
      case kAdd: out = av + bv; break;
      case kSub: out = av - bv; break;
      case kMul: out = av.cwiseProduct(bv); break;
      default: out = av.cwiseMin(bv); break;
    }
  } else if (row_bias) {
    out = op == kAdd ? Matrix(av.rowwise() + bv.row(0)) : Matrix(av.rowwise() - bv.row(0));
  } else {
    const Matrix ae = expand(av, rows, cols);
    const Matrix be = expand(bv, rows, cols);
    switch (op) {
      case kAdd: out = ae + be; break;
      case kSub: out = ae - be; break;
      case kMul: out = ae.cwiseProduct(be); break;
      default: out = ae.cwiseMin(be); break;
    }
  }
  const int ai = a.id;
  const int bi = b.id;
  return {this, push(std::move(out), needs(a) || needs(b), [this, ai, bi, op, rows, cols](const Matrix& g) {
            const Matrix& av = nodes_[ai].val();
            const Matrix& bv = nodes_[bi].val();
            const bool a_full = av.rows() == rows && av.cols() == cols;
            const bool b_full = bv.rows() == rows && bv.cols() == cols;
            switch (op) {
              case kAdd:
              case kSub: {
                const double sign = op == kAdd ? 1.0 : -1.0;
                if (a_full) {
                  accumulate(ai, g);
                } else {
                  accumulate(ai, reduce(g, av.rows(), av.cols()));
                }
                if (!nodes_[bi].needs_grad) break;
                if (b_full) {
                  accumulate(bi, sign * g);
                } else if (bv.rows() == 1 && bv.cols() == cols) {
                  accumulate(bi, sign * g.colwise().sum());
                } else {
                  accumulate(bi, sign * reduce(g, bv.rows(), bv.cols()));
                }
                break;
              }
              case kMul: {
                if (a_full && b_full) {
                  if (nodes_[ai].needs_grad) accumulate(ai, g.cwiseProduct(bv));
                  if (nodes_[bi].needs_grad) accumulate(bi, g.cwiseProduct(av));
                  break;
                }
                const Matrix ae = expand(av, rows, cols);
                const Matrix be = expand(bv, rows, cols);
                if (nodes_[ai].needs_grad) accumulate(ai, reduce(g.cwiseProduct(be), av.rows(), av.cols()));
                if (nodes_[bi].needs_grad) accumulate(bi, reduce(g.cwiseProduct(ae), bv.rows(), bv.cols()));
                break;
              }
              default: {
                const Matrix ae = expand(av, rows, cols);
                const Matrix be = expand(bv, rows, cols);
                const Matrix take_a = (ae.array() <= be.array()).cast<double>().matrix();
                accumulate(ai, reduce(g.cwiseProduct(take_a), av.rows(), av.cols()));
                accumulate(bi, reduce(g - g.cwiseProduct(take_a), bv.rows(), bv.cols()));
                break;
              }
            }
          })};
}

Var Tape::add(Var a, Var b) { return binary(a, b, kAdd); }
Var Tape::sub(Var a, Var b) { return binary(a, b, kSub); }
Var Tape::mul(Var a, Var b) { return binary(a, b, kMul); }
Var Tape::min(Var a, Var b) { return binary(a, b, kMin); }

Var Tape::scale(Var a, double c) {
  check(a);
  const int ai = a.id;
  return {this, push(value(a) * c, needs(a), [this, ai, c](const Matrix& g) { accumulate(ai, g * c); })};
}

Var Tape::add_scalar(Var a, double c) {
  check(a);
  const int ai = a.id;
  return {this, push((value(a).array() + c).matrix(), needs(a),
                     [this, ai](const Matrix& g) { accumulate(ai, g); })};
}

Var Tape::relu(Var a) {
  check(a);
  const int ai = a.id;
  return {this, push(value(a).cwiseMax(0.0), needs(a), [this, ai](const Matrix& g) {
            accumulate(ai, g.cwiseProduct((nodes_[ai].val().array() > 0.0).cast<double>().matrix()));
          })};
}

Var Tape::tanh(Var a) {
  check(a);
  const int ai = a.id;
  const int out = push(tanh_values(value(a)), needs(a));
  if (nodes_[out].needs_grad) {
    nodes_[out].back = [this, ai, out](const Matrix& g) {
      const auto& y = nodes_[out].val().array();
      accumulate(ai, (g.array() * (1.0 - y * y)).matrix());
    };
  }
  return {this, out};
}

Var Tape::sigmoid(Var a) {
  check(a);
  const int ai = a.id;
  Matrix y = (1.0 / (1.0 + (-value(a).array()).exp())).matrix();
  const int out = push(std::move(y), needs(a));
  if (nodes_[out].needs_grad) {
    nodes_[out].back = [this, ai, out](const Matrix& g) {
      const auto& y = nodes_[out].val().array();
      accumulate(ai, (g.array() * y * (1.0 - y)).matrix());
    };
  }
  return {this, out};
}

Var Tape::exp(Var a) {
  check(a);
  const int ai = a.id;
  const int out = push(value(a).array().exp().matrix(), needs(a));
  if (nodes_[out].needs_grad) {
    nodes_[out].back = [this, ai, out](const Matrix& g) {
      accumulate(ai, g.cwiseProduct(nodes_[out].val()));
    };
  }
  return {this, out};
}

Var Tape::log(Var a) {
  check(a);
  const int ai = a.id;
  return {this, push(value(a).array().log().matrix(), needs(a), [this, ai](const Matrix& g) {
            accumulate(ai, g.cwiseQuotient(nodes_[ai].val()));
          })};
}

Var Tape::square(Var a) {
  check(a);
  const int ai = a.id;
  return {this, push(value(a).array().square().matrix(), needs(a), [this, ai](const Matrix& g) {
            accumulate(ai, 2.0 * g.cwiseProduct(nodes_[ai].val()));
          })};
}

Var Tape::softplus(Var a) {
  check(a);
  const int ai = a.id;
  const auto x = value(a).array();
  Matrix y = (x.max(0.0) + (-x.abs()).exp().log1p()).matrix();
  return {this, push(std::move(y), needs(a), [this, ai](const Matrix& g) {
            const auto x = nodes_[ai].val().array();
            accumulate(ai, (g.array() / (1.0 + (-x).exp())).matrix());
          })};
}

Var Tape::clamp(Var a, double lo, double hi) {
  check(a);
  const int ai = a.id;
  return {this, push(value(a).cwiseMax(lo).cwiseMin(hi), needs(a), [this, ai, lo, hi](const Matrix& g) {
            const auto x = nodes_[ai].val().array();
            accumulate(ai, g.cwiseProduct(((x >= lo) && (x <= hi)).cast<double>().matrix()));
          })};
}

Var Tape::clamp(Var a, const RowVector& lo, const RowVector& hi) {
  check(a);
  const Matrix& av = value(a);
  if (lo.size() != av.cols() || hi.size() != av.cols()) {
    throw ConfigError("clamp bounds width does not match " + shape(av));
  }
  Matrix out = av;
  for (Eigen::Index c = 0; c < av.cols(); ++c) {
    out.col(c) = out.col(c).cwiseMax(lo(c)).cwiseMin(hi(c));
  }
  const int ai = a.id;
  return {this, push(std::move(out), needs(a), [this, ai, lo, hi](const Matrix& g) {
            const Matrix& x = nodes_[ai].val();
            Matrix pass(x.rows(), x.cols());
            for (Eigen::Index c = 0; c < x.cols(); ++c) {
              pass.col(c) = ((x.col(c).array() >= lo(c)) && (x.col(c).array() <= hi(c))).cast<double>().matrix();
            }
            accumulate(ai, g.cwiseProduct(pass));
          })};
}

Var Tape::sum(Var a) {
  check(a);
  const int ai = a.id;
  Matrix s(1, 1);
  s(0, 0) = value(a).sum();
  return {this, push(std::move(s), needs(a), [this, ai](const Matrix& g) {
            const Matrix& x = nodes_[ai].val();
            accumulate(ai, Matrix::Constant(x.rows(), x.cols(), g(0, 0)));
          })};
}

Var Tape::mean(Var a) {
  check(a);
  const int ai = a.id;
  const double n = static_cast<double>(value(a).size());
  Matrix s(1, 1);
  s(0, 0) = value(a).sum() / n;
  return {this, push(std::move(s), needs(a), [this, ai, n](const Matrix& g) {
            const Matrix& x = nodes_[ai].val();
            accumulate(ai, Matrix::Constant(x.rows(), x.cols(), g(0, 0) / n));
          })};
}

Var Tape::row_sum(Var a) {
  check(a);
  const int ai = a.id;
  return {this, push(value(a).rowwise().sum(), needs(a), [this, ai](const Matrix& g) {
            accumulate(ai, g.replicate(1, nodes_[ai].val().cols()));
          })};
}

Var Tape::col_mean(Var a) {
  check(a);
  const int ai = a.id;
  const double n = static_cast<double>(value(a).rows());
  return {this, push(value(a).colwise().sum() / n, needs(a), [this, ai, n](const Matrix& g) {
            accumulate(ai, (g / n).replicate(nodes_[ai].val().rows(), 1));
          })};
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ConfigError("concat_cols of nothing");
  Eigen::Index rows = -1;
  Eigen::Index cols = 0;
  bool any = false;
  for (const Var& p : parts) {
    check(p);
    const Matrix& v = value(p);
    if (rows >= 0 && v.rows() != rows) throw ConfigError("concat_cols row mismatch");
    rows = v.rows();
    cols += v.cols();
    any = any || needs(p);
  }
  Matrix out(rows, cols);
  std::vector<int> ids;
  std::vector<Eigen::Index> offsets;
  Eigen::Index at = 0;
  for (const Var& p : parts) {
    const Matrix& v = value(p);
    out.middleCols(at, v.cols()) = v;
    ids.push_back(p.id);
    offsets.push_back(at);
    at += v.cols();
  }
  return {this, push(std::move(out), any, [this, ids, offsets](const Matrix& g) {
            for (std::size_t k = 0; k < ids.size(); ++k) {
              if (!nodes_[ids[k]].needs_grad) continue;
              accumulate(ids[k], g.middleCols(offsets[k], nodes_[ids[k]].val().cols()));
            }
          })};
}

Var Tape::slice_cols(Var a, int start, int count) {
  check(a);
  const Matrix& av = value(a);
  if (start < 0 || count < 0 || start + count > av.cols()) {
    throw ConfigError("slice_cols out of range on " + shape(av));
  }
  const int ai = a.id;
  return {this, push(av.middleCols(start, count), needs(a), [this, ai, start, count](const Matrix& g) {
            Node& n = nodes_[static_cast<std::size_t>(ai)];
            if (n.grad.size() == 0) n.grad = Matrix::Zero(n.val().rows(), n.val().cols());
            n.grad.middleCols(start, count) += g;
          })};
}

Var Tape::pick(Var a, std::span<const int> cols) {
  check(a);
  const Matrix& av = value(a);
  if (static_cast<Eigen::Index>(cols.size()) != av.rows()) throw ConfigError("pick needs one column per row");
  Matrix out(av.rows(), 1);
  for (Eigen::Index r = 0; r < av.rows(); ++r) {
    const int c = cols[static_cast<std::size_t>(r)];
    if (c < 0 || c >= av.cols()) throw UsageError("pick column out of range");
    out(r, 0) = av(r, c);
  }
  const int ai = a.id;
  std::vector<int> idx(cols.begin(), cols.end());
  return {this, push(std::move(out), needs(a), [this, ai, idx](const Matrix& g) {
            Node& n = nodes_[static_cast<std::size_t>(ai)];
            if (n.grad.size() == 0) n.grad = Matrix::Zero(n.val().rows(), n.val().cols());
            for (Eigen::Index r = 0; r < n.grad.rows(); ++r) n.grad(r, idx[static_cast<std::size_t>(r)]) += g(r, 0);
          })};
}

}  // namespace planrl::diff
