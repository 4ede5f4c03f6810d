#pragma once

#include <random>
#include <string>
#include <vector>

#include "temadapter/autograd.hpp"

namespace temadapter::nn {

using Rng = std::mt19937_64;

/// Xavier/Glorot uniform initialisation of an in x out weight.
Matrix xavier_uniform(Eigen::Index in, Eigen::Index out, Rng& rng);

/// Sinusoidal position table, rows = positions, cols = width.
Matrix sinusoidal_positions(Eigen::Index length, Eigen::Index width);

/// y = x W + b with W stored in x out.
struct Linear {
  Parameter weight;
  Parameter bias;

  Linear() = default;
  Linear(const std::string& name, Eigen::Index in, Eigen::Index out, Rng& rng);
  Var forward(Tape& tape, const Var& x);
  void collect(std::vector<Parameter*>& out);
};

struct LayerNorm {
  Parameter gamma;
  Parameter beta;

  LayerNorm() = default;
  LayerNorm(const std::string& name, Eigen::Index width);
  Var forward(Tape& tape, const Var& x);
  void collect(std::vector<Parameter*>& out);
};

struct MultiHeadAttention {
  Linear query;
  Linear key;
  Linear value;
  Linear output;
  int heads = 1;

  MultiHeadAttention() = default;
  MultiHeadAttention(const std::string& name, Eigen::Index width, int heads, Rng& rng);
  Var forward(Tape& tape, const Var& queries, const Var& memory, AttentionMask mask);
  void collect(std::vector<Parameter*>& out);
};

struct FeedForward {
  Linear expand;
  Linear contract;

  FeedForward() = default;
  FeedForward(const std::string& name, Eigen::Index width, Eigen::Index hidden, Rng& rng);
  Var forward(Tape& tape, const Var& x);
  void collect(std::vector<Parameter*>& out);
};

/// Post-norm encoder block: x = LN(x + SelfAttn(x)); x = LN(x + FF(x)).
struct EncoderLayer {
  MultiHeadAttention self_attention;
  LayerNorm norm1;
  FeedForward feed_forward;
  LayerNorm norm2;

  EncoderLayer() = default;
  EncoderLayer(const std::string& name, Eigen::Index width, int heads, Eigen::Index hidden, Rng& rng);
  Var forward(Tape& tape, const Var& x);
  void collect(std::vector<Parameter*>& out);
};

/// Post-norm decoder block: masked self-attention, cross-attention over
/// `memory`, feed-forward; each followed by residual + LayerNorm.
struct DecoderLayer {
  MultiHeadAttention self_attention;
  LayerNorm norm1;
  MultiHeadAttention cross_attention;
  LayerNorm norm2;
  FeedForward feed_forward;
  LayerNorm norm3;

  DecoderLayer() = default;
  DecoderLayer(const std::string& name, Eigen::Index width, int heads, Eigen::Index hidden, Rng& rng);
  Var forward(Tape& tape, const Var& x, const Var& memory, AttentionMask self_mask);
  void collect(std::vector<Parameter*>& out);
};

}  // namespace temadapter::nn
