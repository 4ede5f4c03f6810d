#include "temadapter/frame_plan.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>

#include "temadapter/errors.hpp"

namespace temadapter {
namespace {

std::size_t parse_count(std::string_view digits, std::string_view whole) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || value == 0) {
    throw ConfigError("invalid frame plan '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

FrameSamplePlan FrameSamplePlan::parse(std::string_view text) {
  if (text.starts_with("uniform:")) return uniform(parse_count(text.substr(8), text));
  const auto x = text.find('x');
  if (x == std::string_view::npos) throw ConfigError("invalid frame plan '" + std::string(text) + "'");
  return anchored(parse_count(text.substr(0, x), text), parse_count(text.substr(x + 1), text));
}

std::string FrameSamplePlan::to_string() const {
  if (window == 1) return "uniform:" + std::to_string(total);
  return std::to_string(num_anchors) + "x" + std::to_string(window);
}

void FrameSamplePlan::validate() const {
  if (num_anchors == 0 || window == 0 || total == 0) {
    throw ConfigError("frame plan: counts must be positive");
  }
  if (total != num_anchors * window) {
    throw ConfigError("frame plan: total " + std::to_string(total) + " != anchors " +
                      std::to_string(num_anchors) + " x window " + std::to_string(window));
  }
}

std::vector<std::size_t> plan_frames(std::size_t source_frame_count, const FrameSamplePlan& plan) {
  plan.validate();
  if (source_frame_count == 0) throw ContractError("plan_frames: video has no frames");
  const auto n = static_cast<std::int64_t>(source_frame_count);
  const auto anchors = static_cast<std::int64_t>(plan.num_anchors);
  const auto window = static_cast<std::int64_t>(plan.window);
  std::vector<std::size_t> out;
  out.reserve(plan.total);
  for (std::int64_t a = 0; a < anchors; ++a) {
    // floor((a + 0.5) * n / anchors) in integers
    const std::int64_t anchor = ((2 * a + 1) * n) / (2 * anchors);
    const std::int64_t first = anchor - window / 2;
    for (std::int64_t j = 0; j < window; ++j) {
      out.push_back(static_cast<std::size_t>(std::clamp<std::int64_t>(first + j, 0, n - 1)));
    }
  }
  // Windows of short videos overlap after clamping; keep temporal order.
  std::stable_sort(out.begin(), out.end());
  return out;
}

}  // namespace temadapter
