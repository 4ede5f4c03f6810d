#pragma once

// Reference implementations written independently of the library: plain
// loops over std::vector<double>, no Eigen, no tape.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "temadapter/autograd.hpp"

namespace temadapter::testing {

inline double brute_reconstruction_loss(const Matrix& predicted, const Matrix& target) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < target.rows(); ++i) {
    for (Eigen::Index j = 0; j < target.cols(); ++j) {
      const double d = target(i, j) - predicted(i, j);
      total += d * d;
    }
  }
  return total;
}

inline double brute_hinge(const std::vector<double>& raw, std::size_t label, double margin) {
  double total = 0.0;
  for (std::size_t n = 0; n < raw.size(); ++n) {
    if (n == label) continue;
    const double v = margin + raw[n] - raw[label];
    if (v > 0.0) total += v;
  }
  return total;
}

/// Relative disagreement of two gradient tensors,
/// ||a - n|| / max(||a||, ||n||, floor). The floor keeps tensors whose true
/// gradient is zero (attention key biases) from dividing noise by noise.
inline double gradient_relative_error(const Matrix& analytic, const Matrix& numeric, double floor = 1e-6) {
  const double diff = (analytic - numeric).norm();
  const double scale = std::max({analytic.norm(), numeric.norm(), floor});
  return diff / scale;
}

/// Central differences of `loss` with respect to every entry of `param`.
inline Matrix finite_difference(Matrix& param, const std::function<double()>& loss, double h = 1e-5) {
  Matrix grad(param.rows(), param.cols());
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double saved = param.data()[i];
    param.data()[i] = saved + h;
    const double up = loss();
    param.data()[i] = saved - h;
    const double down = loss();
    param.data()[i] = saved;
    grad.data()[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

/// FNV-1a 64 digest in hex, as used for sentence keys.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Stand-alone zero-shot matcher over a store directory: reads the manifest
/// and blob by hand, embeds "<question without ?> <answer>" keys, scores by
/// cosine of the frame-mean against each candidate and picks the first
/// maximum. Returns the predicted index per question, in file order.
struct ZeroShotResult {
  std::vector<std::size_t> predicted;
  std::vector<std::size_t> labels;
  double accuracy = 0.0;
};

inline ZeroShotResult zero_shot_script(const std::filesystem::path& store, const std::string& split) {
  using nlohmann::json;
  struct Rec { std::int64_t rows, cols; std::uint64_t offset; };
  std::map<std::string, Rec> manifest;
  {
    std::ifstream in(store / (split + ".manifest.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
      const json j = json::parse(line);
      manifest[j["key"].get<std::string>()] = {j["shape"][0].get<std::int64_t>(), j["shape"][1].get<std::int64_t>(),
                                               j["offset"].get<std::uint64_t>()};
    }
  }
  std::ifstream blob(store / (split + ".bin"), std::ios::binary);
  auto load = [&](const std::string& key) {
    const Rec& r = manifest.at(key);
    std::vector<float> f(static_cast<std::size_t>(r.rows * r.cols));
    blob.seekg(static_cast<std::streamoff>(r.offset));
    blob.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(float)));
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(r.rows), std::vector<double>(static_cast<std::size_t>(r.cols)));
    for (std::int64_t i = 0; i < r.rows; ++i) {
      for (std::int64_t j = 0; j < r.cols; ++j) rows[i][j] = f[static_cast<std::size_t>(i * r.cols + j)];
    }
    return rows;
  };

  ZeroShotResult out;
  std::size_t correct = 0;
  std::ifstream qa(store / (split + ".qa.jsonl"));
  std::string line;
  while (std::getline(qa, line)) {
    const json q = json::parse(line);
    const auto frames = load(q["video_id"].get<std::string>());
    std::vector<double> mean(frames[0].size(), 0.0);
    for (const auto& row : frames) {
      for (std::size_t j = 0; j < row.size(); ++j) mean[j] += row[j];
    }
    for (double& m : mean) m /= static_cast<double>(frames.size());

    std::string question = q["question"].get<std::string>();
    while (!question.empty() && (question.back() == '?' || question.back() == ' ')) question.pop_back();
    std::size_t best = 0;
    double best_score = -2.0;
    const auto answers = q["answers"].get<std::vector<std::string>>();
    for (std::size_t a = 0; a < answers.size(); ++a) {
      const auto text = load("text:" + fnv1a_hex(question + " " + answers[a]))[0];
      double dot = 0.0, nv = 0.0, nt = 0.0;
      for (std::size_t j = 0; j < text.size(); ++j) {
        dot += mean[j] * text[j];
        nv += mean[j] * mean[j];
        nt += text[j] * text[j];
      }
      const double score = dot / (std::sqrt(nv) * std::sqrt(nt));
      if (score > best_score) {
        best_score = score;
        best = a;
      }
    }
    out.predicted.push_back(best);
    out.labels.push_back(q["label"].get<std::size_t>());
    correct += best == out.labels.back() ? 1 : 0;
  }
  out.accuracy = out.predicted.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(out.predicted.size());
  return out;
}

}  // namespace temadapter::testing
