#include "temadapter/matcher.hpp"

#include <algorithm>
#include <cmath>

#include "temadapter/errors.hpp"

namespace temadapter {
namespace {

void require_candidates(std::size_t k) {
  if (k < 2) throw ContractError("score_candidates: need at least 2 candidates, got " + std::to_string(k));
}

void require_label(const CandidateScores& scores) {
  if (!scores.label) throw ContractError("hinge_loss: scores carry no label");
  if (*scores.label >= scores.raw.size()) {
    throw ContractError("hinge_loss: label " + std::to_string(*scores.label) + " out of range");
  }
}

}  // namespace

double cosine_similarity(const RowVector& video, const RowVector& text) {
  if (video.cols() != text.cols()) {
    throw ContractError("cosine_similarity: widths " + std::to_string(video.cols()) + " and " +
                        std::to_string(text.cols()) + " differ");
  }
  const double nv = video.norm();
  const double nt = text.norm();
  if (nv == 0.0) throw NumericError("cosine_similarity: video representation has zero norm");
  if (nt == 0.0) throw NumericError("cosine_similarity: text embedding has zero norm");
  return video.dot(text) / (nv * nt);
}

std::vector<double> softmax(std::span<const double> scores) {
  if (scores.empty()) return {};
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(scores[i] - top);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

CandidateScores score_candidates(const RowVector& pooled, const Matrix& texts,
                                 std::optional<std::size_t> label) {
  require_candidates(static_cast<std::size_t>(texts.rows()));
  CandidateScores out;
  out.raw.reserve(static_cast<std::size_t>(texts.rows()));
  for (Eigen::Index i = 0; i < texts.rows(); ++i) {
    const RowVector text = texts.row(i);
    if (text.norm() == 0.0) {
      throw NumericError("score_candidates: text embedding of candidate " + std::to_string(i) +
                         " has zero norm");
    }
    out.raw.push_back(cosine_similarity(pooled, text));
  }
  out.probs = softmax(out.raw);
  out.label = label;
  return out;
}

CandidateScores score_candidates(const AlignedVideo& video, std::span<const TextEmbedding> texts,
                                 std::optional<std::size_t> label) {
  require_candidates(texts.size());
  Matrix stacked(static_cast<Eigen::Index>(texts.size()), video.pooled.cols());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (texts[i].dim() != stacked.cols()) {
      throw ContractError("score_candidates: text '" + texts[i].sentence_id + "' has width " +
                          std::to_string(texts[i].dim()) + ", video has " +
                          std::to_string(stacked.cols()));
    }
    stacked.row(static_cast<Eigen::Index>(i)) = texts[i].vector;
  }
  return score_candidates(video.pooled, stacked, label);
}

double hinge_loss(const CandidateScores& scores, double margin) {
  require_label(scores);
  const std::size_t y = *scores.label;
  double loss = 0.0;
  for (std::size_t n = 0; n < scores.raw.size(); ++n) {
    if (n != y) loss += std::max(0.0, margin + scores.raw[n] - scores.raw[y]);
  }
  return loss;
}

double total_loss(double hinge, double mse, double gamma) {
  if (!(gamma >= 0.0)) throw ContractError("total_loss: gamma must be non-negative");
  return hinge + gamma * mse;
}

std::size_t predict(const CandidateScores& scores) {
  require_candidates(scores.raw.size());
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.raw.size(); ++i) {
    if (scores.raw[i] > scores.raw[best]) best = i;
  }
  return best;
}

namespace ad {

Var cosine_scores(const Var& pooled, const Var& texts) {
  if (pooled.rows() != 1) throw ContractError("cosine_scores: pooled must be a single row");
  require_candidates(static_cast<std::size_t>(texts.rows()));
  std::vector<Var> scores;
  scores.reserve(static_cast<std::size_t>(texts.rows()));
  for (Eigen::Index i = 0; i < texts.rows(); ++i) {
    scores.push_back(cosine(pooled, slice_rows(texts, i, 1)));
  }
  return concat_rows(scores);
}

Var hinge(const Var& scores, std::size_t label, double margin) {
  const auto k = static_cast<std::size_t>(scores.rows());
  if (scores.cols() != 1) throw ContractError("hinge: scores must be a k x 1 column");
  if (label >= k) throw ContractError("hinge: label " + std::to_string(label) + " out of range");
  Tape& tape = *scores.tape();
  const Var positive = slice_rows(scores, static_cast<Eigen::Index>(label), 1);
  const Var offset = tape.constant(Matrix::Constant(1, 1, margin));
  Var loss;
  bool first = true;
  for (std::size_t n = 0; n < k; ++n) {
    if (n == label) continue;
    const Var term =
        relu(add(offset, sub(slice_rows(scores, static_cast<Eigen::Index>(n), 1), positive)));
    loss = first ? term : add(loss, term);
    first = false;
  }
  return loss;
}

}  // namespace ad
}  // namespace temadapter
