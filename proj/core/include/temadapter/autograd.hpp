#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "temadapter/tensor.hpp"

namespace temadapter {

/// A named learnable tensor with its accumulated gradient.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

class Tape;

/// Handle to a node on a Tape. Cheap to copy; only valid while the tape lives.
class Var {
 public:
  Var() = default;
  const Matrix& value() const;
  const Matrix& grad() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  /// Value of a 1x1 node.
  double scalar() const;
  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Reverse-mode recording of one forward pass. Not thread-safe; use one tape
/// per worker.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t)>;

  /// With `track_gradients` false, parameter leaves are recorded as constants
  /// and no backward closures are kept (inference).
  explicit Tape(bool track_gradients = true) : track_gradients_(track_gradients) {}

  Var constant(Matrix value);
  /// Leaf bound to `param`; backward() adds into param.grad.
  Var leaf(Parameter& param);

  /// Records an op. `backward` receives the tape and the node's own id and
  /// must accumulate into its inputs via add_grad().
  Var record(Matrix value, std::span<const Var> inputs, Backward backward);

  /// Seeds d(out)/d(out) = 1 for a 1x1 output and propagates to every leaf.
  /// Parameter gradients stay on the tape until accumulate_param_grads().
  void backward(const Var& out);

  /// Adds each parameter leaf's gradient into Parameter::grad.
  void accumulate_param_grads() const;

  /// Parameter leaves that received a gradient, in recording order.
  std::vector<std::pair<Parameter*, const Matrix*>> param_grads() const;

  const Matrix& value(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.param != nullptr ? n.param->value : n.value;
  }
  const Matrix& grad(std::size_t id) const { return nodes_[id].grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  void add_grad(std::size_t id, const Matrix& g);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;  // unused for parameter leaves, which read param->value
    Matrix grad;
    Backward backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };
  std::vector<Node> nodes_;
  bool track_gradients_ = true;
};

enum class AttentionMask {
  kNone,
  kCausal,    // row i sees columns 0..i
  kDiagonal,  // row i sees column i only
};

namespace ad {

Var matmul(const Var& a, const Var& b);
/// a * b^T
Var matmul_nt(const Var& a, const Var& b);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var hadamard(const Var& a, const Var& b);
Var scale(const Var& a, double s);
/// Adds the 1xN row `row` to every row of `a`.
Var add_row(const Var& a, const Var& row);
Var relu(const Var& a);
/// Row-wise softmax; masked entries get probability 0.
Var softmax_rows(const Var& a, AttentionMask mask = AttentionMask::kNone);
/// Row-wise layer normalisation with affine 1xN gamma/beta.
Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps = 1e-5);
/// 1xN column means.
Var mean_rows(const Var& a);
/// 1x1 sum of squared entries.
Var sum_squares(const Var& a);
/// 1x1 sum of entries.
Var sum(const Var& a);
/// 1x1 cosine similarity of two 1xN rows. Throws NumericError on a zero norm.
Var cosine(const Var& a, const Var& b);
Var slice_cols(const Var& a, Eigen::Index begin, Eigen::Index count);
Var slice_rows(const Var& a, Eigen::Index begin, Eigen::Index count);
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);

}  // namespace ad
}  // namespace temadapter
