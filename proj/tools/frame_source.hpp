#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "temadapter/embedding.hpp"
#include "temadapter/frame_plan.hpp"

namespace temadapter::tools {

/// Videos under `dir`: every subdirectory of images and every video file,
/// keyed by stem.
std::map<std::string, std::filesystem::path> list_videos(const std::filesystem::path& dir);

/// Decodes the frames selected by `plan` as 8-bit RGB.
std::vector<Frame> sample_frames(const std::filesystem::path& video, const FrameSamplePlan& plan);

}  // namespace temadapter::tools
