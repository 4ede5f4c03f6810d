#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace temadapter {

/// `num_anchors` anchors spread uniformly over the video, each contributing
/// `window` consecutive frames centred on it.
struct FrameSamplePlan {
  std::size_t num_anchors = 8;
  std::size_t window = 16;
  std::size_t total = 128;

  static FrameSamplePlan anchored(std::size_t anchors, std::size_t window) {
    return {anchors, window, anchors * window};
  }
  /// One frame per anchor: plain uniform sampling of `frames` frames.
  static FrameSamplePlan uniform(std::size_t frames) { return {frames, 1, frames}; }

  /// Parses "8x16" (anchored) or "uniform:128". Throws ConfigError.
  static FrameSamplePlan parse(std::string_view text);
  std::string to_string() const;

  /// Throws ConfigError unless total == num_anchors * window and all are positive.
  void validate() const;
};

/// Frame indices to decode from a video of `source_frame_count` frames.
/// Anchor a sits at floor((a + 1/2) * N / num_anchors); its window covers
/// [anchor - window/2, anchor + window - window/2) with indices clamped into
/// [0, N-1]. The result has exactly plan.total entries in nondecreasing order.
std::vector<std::size_t> plan_frames(std::size_t source_frame_count, const FrameSamplePlan& plan);

}  // namespace temadapter
