#include "temadapter/nn.hpp"

#include <cmath>

#include "temadapter/errors.hpp"

namespace temadapter::nn {

Matrix xavier_uniform(Eigen::Index in, Eigen::Index out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix w(in, out);
  for (Eigen::Index r = 0; r < in; ++r) {
    for (Eigen::Index c = 0; c < out; ++c) w(r, c) = dist(rng);
  }
  return w;
}

Matrix sinusoidal_positions(Eigen::Index length, Eigen::Index width) {
  Matrix pe(length, width);
  for (Eigen::Index t = 0; t < length; ++t) {
    for (Eigen::Index i = 0; i < width; ++i) {
      const double exponent = static_cast<double>(2 * (i / 2)) / static_cast<double>(width);
      const double angle = static_cast<double>(t) / std::pow(10000.0, exponent);
      pe(t, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return pe;
}

Linear::Linear(const std::string& name, Eigen::Index in, Eigen::Index out, Rng& rng)
    : weight(name + ".weight", xavier_uniform(in, out, rng)),
      bias(name + ".bias", Matrix::Zero(1, out)) {}

Var Linear::forward(Tape& tape, const Var& x) {
  if (x.cols() != weight.value.rows()) {
    throw ContractError(weight.name + ": input width " + std::to_string(x.cols()) +
                        " != " + std::to_string(weight.value.rows()));
  }
  return ad::add_row(ad::matmul(x, tape.leaf(weight)), tape.leaf(bias));
}

void Linear::collect(std::vector<Parameter*>& out) {
  out.push_back(&weight);
  out.push_back(&bias);
}

LayerNorm::LayerNorm(const std::string& name, Eigen::Index width)
    : gamma(name + ".gamma", Matrix::Ones(1, width)), beta(name + ".beta", Matrix::Zero(1, width)) {}

Var LayerNorm::forward(Tape& tape, const Var& x) {
  return ad::layer_norm(x, tape.leaf(gamma), tape.leaf(beta));
}

void LayerNorm::collect(std::vector<Parameter*>& out) {
  out.push_back(&gamma);
  out.push_back(&beta);
}

MultiHeadAttention::MultiHeadAttention(const std::string& name, Eigen::Index width, int h, Rng& rng)
    : query(name + ".query", width, width, rng),
      key(name + ".key", width, width, rng),
      value(name + ".value", width, width, rng),
      output(name + ".output", width, width, rng),
      heads(h) {
  if (h <= 0 || width % h != 0) {
    throw ConfigError(name + ": width " + std::to_string(width) + " not divisible by " +
                      std::to_string(h) + " heads");
  }
}

Var MultiHeadAttention::forward(Tape& tape, const Var& queries, const Var& memory,
                                AttentionMask mask) {
  const Var q = query.forward(tape, queries);
  const Var k = key.forward(tape, memory);
  const Var v = value.forward(tape, memory);
  const Eigen::Index width = q.cols();
  const Eigen::Index head_dim = width / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Var> per_head;
  per_head.reserve(static_cast<std::size_t>(heads));
  for (int h = 0; h < heads; ++h) {
    const Var qh = ad::slice_cols(q, h * head_dim, head_dim);
    const Var kh = ad::slice_cols(k, h * head_dim, head_dim);
    const Var vh = ad::slice_cols(v, h * head_dim, head_dim);
    const Var weights = ad::softmax_rows(ad::scale(ad::matmul_nt(qh, kh), inv_sqrt), mask);
    per_head.push_back(ad::matmul(weights, vh));
  }
  const Var joined = heads == 1 ? per_head.front() : ad::concat_cols(per_head);
  return output.forward(tape, joined);
}

void MultiHeadAttention::collect(std::vector<Parameter*>& out) {
  query.collect(out);
  key.collect(out);
  value.collect(out);
  output.collect(out);
}

FeedForward::FeedForward(const std::string& name, Eigen::Index width, Eigen::Index hidden, Rng& rng)
    : expand(name + ".expand", width, hidden, rng), contract(name + ".contract", hidden, width, rng) {}

Var FeedForward::forward(Tape& tape, const Var& x) {
  return contract.forward(tape, ad::relu(expand.forward(tape, x)));
}

void FeedForward::collect(std::vector<Parameter*>& out) {
  expand.collect(out);
  contract.collect(out);
}

EncoderLayer::EncoderLayer(const std::string& name, Eigen::Index width, int heads,
                           Eigen::Index hidden, Rng& rng)
    : self_attention(name + ".self_attention", width, heads, rng),
      norm1(name + ".norm1", width),
      feed_forward(name + ".feed_forward", width, hidden, rng),
      norm2(name + ".norm2", width) {}

Var EncoderLayer::forward(Tape& tape, const Var& x) {
  const Var attended = self_attention.forward(tape, x, x, AttentionMask::kNone);
  const Var h = norm1.forward(tape, ad::add(x, attended));
  return norm2.forward(tape, ad::add(h, feed_forward.forward(tape, h)));
}

void EncoderLayer::collect(std::vector<Parameter*>& out) {
  self_attention.collect(out);
  norm1.collect(out);
  feed_forward.collect(out);
  norm2.collect(out);
}

DecoderLayer::DecoderLayer(const std::string& name, Eigen::Index width, int heads,
                           Eigen::Index hidden, Rng& rng)
    : self_attention(name + ".self_attention", width, heads, rng),
      norm1(name + ".norm1", width),
      cross_attention(name + ".cross_attention", width, heads, rng),
      norm2(name + ".norm2", width),
      feed_forward(name + ".feed_forward", width, hidden, rng),
      norm3(name + ".norm3", width) {}

Var DecoderLayer::forward(Tape& tape, const Var& x, const Var& memory, AttentionMask self_mask) {
  const Var h1 = norm1.forward(tape, ad::add(x, self_attention.forward(tape, x, x, self_mask)));
  const Var h2 = norm2.forward(
      tape, ad::add(h1, cross_attention.forward(tape, h1, memory, AttentionMask::kNone)));
  return norm3.forward(tape, ad::add(h2, feed_forward.forward(tape, h2)));
}

void DecoderLayer::collect(std::vector<Parameter*>& out) {
  self_attention.collect(out);
  norm1.collect(out);
  cross_attention.collect(out);
  norm2.collect(out);
  feed_forward.collect(out);
  norm3.collect(out);
}

}  // namespace temadapter::nn
