#include "frame_source.hpp"

#include <algorithm>
#include <set>

#include "temadapter/errors.hpp"

#ifdef TEMADAPTER_HAVE_OPENCV
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>
#endif

namespace temadapter::tools {
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kImageExtensions{".jpg", ".jpeg", ".png", ".bmp", ".ppm", ".pgm", ".webp"};
const std::set<std::string> kVideoExtensions{".mp4", ".avi", ".mov", ".mkv", ".webm", ".mpg", ".mpeg"};

std::string lower_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::vector<fs::path> image_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && kImageExtensions.contains(lower_extension(entry.path()))) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

#ifdef TEMADAPTER_HAVE_OPENCV
Frame to_frame(const cv::Mat& bgr, const std::string& source) {
  if (bgr.empty()) throw DataError("cannot decode frame from " + source);
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, bgr.channels() == 1 ? cv::COLOR_GRAY2RGB : cv::COLOR_BGR2RGB);
  Frame f;
  f.width = rgb.cols;
  f.height = rgb.rows;
  f.channels = 3;
  f.pixels.resize(static_cast<std::size_t>(rgb.total() * 3));
  for (int r = 0; r < rgb.rows; ++r) {
    std::copy_n(rgb.ptr<std::uint8_t>(r), rgb.cols * 3, f.pixels.begin() + static_cast<std::ptrdiff_t>(r) * rgb.cols * 3);
  }
  return f;
}
#endif

}  // namespace

std::map<std::string, fs::path> list_videos(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw NotFoundError(dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() || (entry.is_regular_file() && kVideoExtensions.contains(lower_extension(entry.path())))) {
      out.emplace(entry.path().stem().string(), entry.path());
    }
  }
  return out;
}

std::vector<Frame> sample_frames(const fs::path& video, const FrameSamplePlan& plan) {
#ifdef TEMADAPTER_HAVE_OPENCV
  std::vector<Frame> frames;
  if (fs::is_directory(video)) {
    const std::vector<fs::path> images = image_files(video);
    if (images.empty()) throw DataError("no image frames in " + video.string());
    for (std::size_t i : plan_frames(images.size(), plan)) {
      frames.push_back(to_frame(cv::imread(images[i].string(), cv::IMREAD_COLOR), images[i].string()));
    }
    return frames;
  }
  cv::VideoCapture capture(video.string());
  if (!capture.isOpened()) throw DataError("cannot open video " + video.string());
  const auto count = static_cast<long>(capture.get(cv::CAP_PROP_FRAME_COUNT));
  if (count <= 0) throw DataError("video " + video.string() + " reports no frames");
  const std::vector<std::size_t> wanted = plan_frames(static_cast<std::size_t>(count), plan);
  std::map<std::size_t, Frame> decoded;
  cv::Mat mat;
  std::size_t index = 0;
  const std::size_t last = wanted.back();
  while (index <= last && capture.read(mat)) {
    if (std::binary_search(wanted.begin(), wanted.end(), index)) decoded.emplace(index, to_frame(mat, video.string()));
    ++index;
  }
  for (std::size_t i : wanted) {
    auto it = decoded.find(i);
    if (it == decoded.end()) {
      // Indices past the last decodable frame reuse it.
      if (decoded.empty()) throw DataError("no decodable frames in " + video.string());
      it = std::prev(decoded.end());
    }
    frames.push_back(it->second);
  }
  return frames;
#else
  (void)plan;
  (void)image_files;
  throw BackendError("cannot decode " + video.string() + ": built without OpenCV");
#endif
}

}  // namespace temadapter::tools
