#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "temadapter/autograd.hpp"
#include "temadapter/embedding.hpp"
#include "temadapter/temporal_aligner.hpp"

namespace temadapter {

/// Scores of k answer candidates for one question.
struct CandidateScores {
  std::vector<double> raw;    // cosine similarities
  std::vector<double> probs;  // softmax(raw), no temperature
  std::optional<std::size_t> label;
};

/// Cosine similarity of two equal-length rows. A zero norm raises
/// NumericError naming the video or text side.
double cosine_similarity(const RowVector& video, const RowVector& text);

std::vector<double> softmax(std::span<const double> scores);

/// raw_i = cos(pooled, text_i); needs k >= 2 and equal widths.
CandidateScores score_candidates(const AlignedVideo& video, std::span<const TextEmbedding> texts,
                                 std::optional<std::size_t> label = std::nullopt);
CandidateScores score_candidates(const RowVector& pooled, const Matrix& texts,
                                 std::optional<std::size_t> label = std::nullopt);

/// Sum over n != label of max(0, margin + raw_n - raw_label).
double hinge_loss(const CandidateScores& scores, double margin = 1.0);

/// hinge + gamma * mse. Throws ContractError on negative gamma.
double total_loss(double hinge, double mse, double gamma);

/// Index of the largest raw score; ties go to the lowest index.
std::size_t predict(const CandidateScores& scores);

namespace ad {

/// k x 1 cosine scores of the 1 x C `pooled` row against each row of `texts`.
Var cosine_scores(const Var& pooled, const Var& texts);

/// Multi-choice hinge over a k x 1 score column.
Var hinge(const Var& scores, std::size_t label, double margin = 1.0);

}  // namespace ad
}  // namespace temadapter
