#include "temadapter/autograd.hpp"

#include <cmath>
#include <limits>

#include "temadapter/errors.hpp"

namespace temadapter {

const Matrix& Var::value() const { return tape_->value(id_); }
const Matrix& Var::grad() const { return tape_->grad(id_); }

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) throw ContractError("Var::scalar on a non-1x1 node");
  return v(0, 0);
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), Matrix(), nullptr, nullptr, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::leaf(Parameter& param) {
  nodes_.push_back(Node{Matrix(), Matrix(), nullptr, &param, track_gradients_});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::span<const Var> inputs, Backward backward) {
  bool needs = false;
  for (const auto& in : inputs) {
    if (in.tape_ != this) throw ContractError("Tape::record: input from another tape");
    needs = needs || nodes_[in.id_].requires_grad;
  }
  nodes_.push_back(Node{std::move(value), Matrix(), needs ? std::move(backward) : nullptr,
                        nullptr, needs});
  return Var(this, nodes_.size() - 1);
}

void Tape::add_grad(std::size_t id, const Matrix& g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

void Tape::backward(const Var& out) {
  if (out.tape_ != this) throw ContractError("Tape::backward: output from another tape");
  const Matrix& v = value(out.id_);
  if (v.rows() != 1 || v.cols() != 1) throw ContractError("Tape::backward: output must be 1x1");
  add_grad(out.id_, Matrix::Ones(1, 1));
  for (std::size_t i = out.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.size() == 0) continue;
    if (n.backward) n.backward(*this, i);
  }
}

void Tape::accumulate_param_grads() const {
  for (const auto& [param, grad] : param_grads()) param->grad += *grad;
}

std::vector<std::pair<Parameter*, const Matrix*>> Tape::param_grads() const {
  std::vector<std::pair<Parameter*, const Matrix*>> out;
  for (const auto& n : nodes_) {
    if (n.param != nullptr && n.grad.size() != 0) out.emplace_back(n.param, &n.grad);
  }
  return out;
}

namespace ad {
namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                        std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                        std::to_string(b.cols()));
  }
}

bool masked(AttentionMask mask, Eigen::Index r, Eigen::Index c) {
  switch (mask) {
    case AttentionMask::kCausal: return c > r;
    case AttentionMask::kDiagonal: return c != r;
    case AttentionMask::kNone: return false;
  }
  return false;
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) throw ContractError("matmul: inner dimensions differ");
  Tape& t = *a.tape();
  const Var in[] = {a, b};
  return t.record(a.value() * b.value(), in, [a, b](Tape& tape, std::size_t self) {
    const Matrix& g = tape.grad(self);
    if (tape.requires_grad(a.id())) tape.add_grad(a.id(), g * b.value().transpose());
    if (tape.requires_grad(b.id())) tape.add_grad(b.id(), a.value().transpose() * g);
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  if (a.cols() != b.cols()) throw ContractError("matmul_nt: inner dimensions differ");
  Tape& t = *a.tape();
  const Var in[] = {a, b};
  return t.record(a.value() * b.value().transpose(), in, [a, b](Tape& tape, std::size_t self) {
    const Matrix& g = tape.grad(self);
    if (tape.requires_grad(a.id())) tape.add_grad(a.id(), g * b.value());
    if (tape.requires_grad(b.id())) tape.add_grad(b.id(), g.transpose() * a.value());
  });
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  const Var in[] = {a, b};
  return a.tape()->record(a.value() + b.value(), in, [a, b](Tape& tape, std::size_t self) {
    tape.add_grad(a.id(), tape.grad(self));
    tape.add_grad(b.id(), tape.grad(self));
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  const Var in[] = {a, b};
  return a.tape()->record(a.value() - b.value(), in, [a, b](Tape& tape, std::size_t self) {
    tape.add_grad(a.id(), tape.grad(self));
    tape.add_grad(b.id(), -tape.grad(self));
  });
}

Var hadamard(const Var& a, const Var& b) {
  require_same_shape(a, b, "hadamard");
  const Var in[] = {a, b};
  return a.tape()->record(a.value().cwiseProduct(b.value()), in,
                          [a, b](Tape& tape, std::size_t self) {
                            const Matrix& g = tape.grad(self);
                            if (tape.requires_grad(a.id())) {
                              tape.add_grad(a.id(), g.cwiseProduct(b.value()));
                            }
                            if (tape.requires_grad(b.id())) {
                              tape.add_grad(b.id(), g.cwiseProduct(a.value()));
                            }
                          });
}

Var scale(const Var& a, double s) {
  const Var in[] = {a};
  return a.tape()->record(a.value() * s, in, [a, s](Tape& tape, std::size_t self) {
    tape.add_grad(a.id(), tape.grad(self) * s);
  });
}

Var add_row(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw ContractError("add_row: row shape mismatch");
  Matrix out = a.value();
  out.rowwise() += row.value().row(0);
  const Var in[] = {a, row};
  return a.tape()->record(std::move(out), in, [a, row](Tape& tape, std::size_t self) {
    const Matrix& g = tape.grad(self);
    tape.add_grad(a.id(), g);
    if (tape.requires_grad(row.id())) tape.add_grad(row.id(), g.colwise().sum());
  });
}

Var relu(const Var& a) {
  const Var in[] = {a};
  return a.tape()->record(a.value().cwiseMax(0.0), in, [a](Tape& tape, std::size_t self) {
    const Matrix mask = (a.value().array() > 0.0).cast<double>().matrix();
    tape.add_grad(a.id(), tape.grad(self).cwiseProduct(mask));
  });
}

Var softmax_rows(const Var& a, AttentionMask mask) {
  const Matrix& x = a.value();
  Matrix p = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    double mx = -std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (!masked(mask, r, c)) mx = std::max(mx, x(r, c));
    }
    if (!std::isfinite(mx)) throw NumericError("softmax_rows: row has no unmasked finite entry");
    double z = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (masked(mask, r, c)) continue;
      p(r, c) = std::exp(x(r, c) - mx);
      z += p(r, c);
    }
    p.row(r) /= z;
  }
  const Var in[] = {a};
  return a.tape()->record(std::move(p), in, [a](Tape& tape, std::size_t self) {
    const Matrix& y = tape.value(self);
    const Matrix& g = tape.grad(self);
    Matrix dx(y.rows(), y.cols());
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      const double dot = y.row(r).dot(g.row(r));
      dx.row(r) = y.row(r).cwiseProduct((g.row(r).array() - dot).matrix());
    }
    tape.add_grad(a.id(), dx);
  });
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  const Eigen::Index n = x.cols();
  if (gamma.cols() != n || beta.cols() != n || gamma.rows() != 1 || beta.rows() != 1) {
    throw ContractError("layer_norm: affine parameter shape mismatch");
  }
  const Matrix& v = x.value();
  Matrix xhat(v.rows(), n);
  Eigen::VectorXd inv_std(v.rows());
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double mean = v.row(r).mean();
    const double var = (v.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (v.row(r).array() - mean) * inv_std(r);
  }
  Matrix out = xhat;
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    out.row(r) = out.row(r).cwiseProduct(gamma.value().row(0)) + beta.value().row(0);
  }
  const Var in[] = {x, gamma, beta};
  return x.tape()->record(
      std::move(out), in,
      [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& tape,
                                                                            std::size_t self) {
        const Matrix& g = tape.grad(self);
        if (tape.requires_grad(gamma.id())) {
          tape.add_grad(gamma.id(), g.cwiseProduct(xhat).colwise().sum());
        }
        if (tape.requires_grad(beta.id())) tape.add_grad(beta.id(), g.colwise().sum());
        if (tape.requires_grad(x.id())) {
          const double n_cols = static_cast<double>(xhat.cols());
          Matrix dx(g.rows(), g.cols());
          for (Eigen::Index r = 0; r < g.rows(); ++r) {
            const Eigen::RowVectorXd gh = g.row(r).cwiseProduct(gamma.value().row(0));
            const double mean_gh = gh.mean();
            const double mean_gh_xhat = gh.dot(xhat.row(r)) / n_cols;
            dx.row(r) = inv_std(r) * (gh.array() - mean_gh - xhat.row(r).array() * mean_gh_xhat);
          }
          tape.add_grad(x.id(), dx);
        }
      });
}

Var mean_rows(const Var& a) {
  const double n = static_cast<double>(a.rows());
  const Var in[] = {a};
  return a.tape()->record(a.value().colwise().mean(), in, [a, n](Tape& tape, std::size_t self) {
    Matrix g = tape.grad(self).replicate(a.rows(), 1) / n;
    tape.add_grad(a.id(), g);
  });
}

Var sum_squares(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().squaredNorm();
  const Var in[] = {a};
  return a.tape()->record(std::move(out), in, [a](Tape& tape, std::size_t self) {
    tape.add_grad(a.id(), 2.0 * tape.grad(self)(0, 0) * a.value());
  });
}

Var sum(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  const Var in[] = {a};
  return a.tape()->record(std::move(out), in, [a](Tape& tape, std::size_t self) {
    tape.add_grad(a.id(), Matrix::Constant(a.rows(), a.cols(), tape.grad(self)(0, 0)));
  });
}

Var cosine(const Var& a, const Var& b) {
  require_same_shape(a, b, "cosine");
  if (a.rows() != 1) throw ContractError("cosine: operands must be single rows");
  const double na = a.value().norm();
  const double nb = b.value().norm();
  if (na == 0.0) throw NumericError("cosine: first operand has zero norm");
  if (nb == 0.0) throw NumericError("cosine: second operand has zero norm");
  const double dot = a.value().row(0).dot(b.value().row(0));
  Matrix out(1, 1);
  out(0, 0) = dot / (na * nb);
  const Var in[] = {a, b};
  return a.tape()->record(std::move(out), in, [a, b, na, nb](Tape& tape, std::size_t self) {
    const double g = tape.grad(self)(0, 0);
    const double c = tape.value(self)(0, 0);
    if (tape.requires_grad(a.id())) {
      tape.add_grad(a.id(), g * (b.value() / (na * nb) - c * a.value() / (na * na)));
    }
    if (tape.requires_grad(b.id())) {
      tape.add_grad(b.id(), g * (a.value() / (na * nb) - c * b.value() / (nb * nb)));
    }
  });
}

Var slice_cols(const Var& a, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > a.cols()) throw ContractError("slice_cols: out of range");
  const Var in[] = {a};
  return a.tape()->record(a.value().middleCols(begin, count), in,
                          [a, begin, count](Tape& tape, std::size_t self) {
                            Matrix g = Matrix::Zero(a.rows(), a.cols());
                            g.middleCols(begin, count) = tape.grad(self);
                            tape.add_grad(a.id(), g);
                          });
}

Var slice_rows(const Var& a, Eigen::Index begin, Eigen::Index count) {
  if (begin < 0 || count < 0 || begin + count > a.rows()) throw ContractError("slice_rows: out of range");
  const Var in[] = {a};
  return a.tape()->record(a.value().middleRows(begin, count), in,
                          [a, begin, count](Tape& tape, std::size_t self) {
                            Matrix g = Matrix::Zero(a.rows(), a.cols());
                            g.middleRows(begin, count) = tape.grad(self);
                            tape.add_grad(a.id(), g);
                          });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no parts");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw ContractError("concat_cols: row count mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().tape()->record(std::move(out), parts,
                                      [inputs](Tape& tape, std::size_t self) {
                                        const Matrix& g = tape.grad(self);
                                        Eigen::Index off = 0;
                                        for (const auto& p : inputs) {
                                          if (tape.requires_grad(p.id())) {
                                            tape.add_grad(p.id(), g.middleCols(off, p.cols()));
                                          }
                                          off += p.cols();
                                        }
                                      });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no parts");
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw ContractError("concat_rows: column count mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts.front().tape()->record(std::move(out), parts,
                                      [inputs](Tape& tape, std::size_t self) {
                                        const Matrix& g = tape.grad(self);
                                        Eigen::Index off = 0;
                                        for (const auto& p : inputs) {
                                          if (tape.requires_grad(p.id())) {
                                            tape.add_grad(p.id(), g.middleRows(off, p.rows()));
                                          }
                                          off += p.rows();
                                        }
                                      });
}

}  // namespace ad
}  // namespace temadapter
