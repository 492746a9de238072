#include "dynavo/superpixels.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <thread>

namespace dynavo {

double cluster_distance(const PixelFeature& pixel, const PixelFeature& center,
                        const DistanceNorms& norms, bool eq4_literal) {
  const double dc = std::sqrt((pixel.l - center.l) * (pixel.l - center.l) +
                              (pixel.a - center.a) * (pixel.a - center.a) +
                              (pixel.b - center.b) * (pixel.b - center.b));
  const double de = std::hypot(pixel.x - center.x, pixel.y - center.y);
  double dz = 0.0;
  if (pixel.depth_valid && center.depth_valid) {
    dz = eq4_literal ? std::sqrt(pixel.d * pixel.d + center.d * center.d)
                     : std::abs(pixel.d - center.d);
  }
  return dc / norms.color + de / norms.space + dz / norms.depth;
}

namespace {

// sRGB -> linear lookup, one entry per 8-bit value.
const float* srgb_to_linear_lut() {
  static const auto lut = [] {
    auto table = std::make_unique<float[]>(256);
    for (int i = 0; i < 256; ++i) {
      const double v = i / 255.0;
      table[i] = static_cast<float>(v <= 0.04045 ? v / 12.92
                                                 : std::pow((v + 0.055) / 1.055, 2.4));
    }
    return table;
  }();
  return lut.get();
}

inline float lab_f(float t) {
  return t > 0.008856f ? std::cbrt(t) : 7.787f * t + 16.0f / 116.0f;
}

void run_row_bands(int height, const std::function<void(int, int)>& body) {
  const int n_threads = std::clamp(static_cast<int>(std::thread::hardware_concurrency()), 1, 8);
  if (n_threads == 1 || height < 64) {
    body(0, height);
    return;
  }
  std::vector<std::thread> workers;
  const int band = (height + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const int y0 = t * band;
    const int y1 = std::min(height, y0 + band);
    if (y0 >= y1) break;
    workers.emplace_back(body, y0, y1);
  }
  for (auto& w : workers) w.join();
}

struct Center {
  float x, y, l, a, b, d;
  std::int32_t has_depth;
};

}  // namespace

cv::Mat bgr_to_lab(const cv::Mat& bgr) {
  CV_Assert(bgr.type() == CV_8UC3);
  const float* lut = srgb_to_linear_lut();
  cv::Mat lab(bgr.rows, bgr.cols, CV_32FC3);
  run_row_bands(bgr.rows, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      const cv::Vec3b* src = bgr.ptr<cv::Vec3b>(y);
      cv::Vec3f* dst = lab.ptr<cv::Vec3f>(y);
      for (int x = 0; x < bgr.cols; ++x) {
        const float bl = lut[src[x][0]];
        const float g = lut[src[x][1]];
        const float r = lut[src[x][2]];
        const float fx = lab_f((0.412453f * r + 0.357580f * g + 0.180423f * bl) / 0.950456f);
        const float fy = lab_f(0.212671f * r + 0.715160f * g + 0.072169f * bl);
        const float fz = lab_f((0.019334f * r + 0.119193f * g + 0.950227f * bl) / 1.088754f);
        dst[x] = cv::Vec3f(116.0f * fy - 16.0f, 500.0f * (fx - fy), 200.0f * (fy - fz));
      }
    }
  });
  return lab;
}

SuperPixelMap extract_superpixels(const Frame& frame, const SuperPixelParams& params) {
  const int r = params.grid_spacing;
  const int width = frame.color.cols;
  const int height = frame.color.rows;
  if (width < 2 * r || height < 2 * r)
    throw std::invalid_argument("extract_superpixels: image smaller than one grid cell");
  CV_Assert(frame.depth.type() == CV_32FC1 && frame.depth.size() == frame.color.size());

  const cv::Mat lab = bgr_to_lab(frame.color);
  const float color_norm = static_cast<float>(params.color_norm);
  const float space_norm = static_cast<float>(params.effective_space_norm());
  const float depth_norm = static_cast<float>(params.depth_norm);
  const bool literal = params.eq4_literal;

  // Seed grid, perturbed to the lowest color-gradient pixel in 3x3.
  const int nx = width / r;
  const int ny = height / r;
  std::vector<Center> centers;
  centers.reserve(static_cast<size_t>(nx) * ny);
  const auto gradient_at = [&](int x, int y) {
    const cv::Vec3f& px = lab.at<cv::Vec3f>(y, x + 1);
    const cv::Vec3f& mx = lab.at<cv::Vec3f>(y, x - 1);
    const cv::Vec3f& py = lab.at<cv::Vec3f>(y + 1, x);
    const cv::Vec3f& my = lab.at<cv::Vec3f>(y - 1, x);
    double g = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
      g += (px[ch] - mx[ch]) * (px[ch] - mx[ch]);
      g += (py[ch] - my[ch]) * (py[ch] - my[ch]);
    }
    return g;
  };
  for (int gy = 0; gy < ny; ++gy) {
    for (int gx = 0; gx < nx; ++gx) {
      int sx = gx * r + r / 2;
      int sy = gy * r + r / 2;
      double best = std::numeric_limits<double>::infinity();
      int bx = sx, by = sy;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = sx + dx, y = sy + dy;
          if (x < 1 || y < 1 || x >= width - 1 || y >= height - 1) continue;
          const double g = gradient_at(x, y);
          if (g < best) {
            best = g;
            bx = x;
            by = y;
          }
        }
      }
      const float d = frame.depth.at<float>(by, bx);
      const bool dv = d > 0.0f && std::isfinite(d);
      const cv::Vec3f& c = lab.at<cv::Vec3f>(by, bx);
      centers.push_back({static_cast<float>(bx), static_cast<float>(by), c[0], c[1], c[2],
                         dv ? d : 0.0f, dv ? 1 : 0});
    }
  }
  const int n_centers = static_cast<int>(centers.size());

  // Initial assignment: the seed grid cell of each pixel.
  cv::Mat labels(height, width, CV_32SC1);
  for (int y = 0; y < height; ++y) {
    std::int32_t* row = labels.ptr<std::int32_t>(y);
    const int gy = std::min(y / r, ny - 1);
    for (int x = 0; x < width; ++x) row[x] = gy * nx + std::min(x / r, nx - 1);
  }

  // Iterative assignment within a 2r x 2r window per center. Candidates come
  // from a coarse bucket grid over current center positions; each pixel is
  // handled independently so row bands can run in parallel bit-identically.
  const int bx_cells = (width + r - 1) / r;
  const int by_cells = (height + r - 1) / r;
  std::vector<std::vector<int>> buckets(static_cast<size_t>(bx_cells) * by_cells);
  for (int iter = 0; iter < params.iterations; ++iter) {
    for (auto& b : buckets) b.clear();
    for (int c = 0; c < n_centers; ++c) {
      const int cx = std::clamp(static_cast<int>(centers[c].x) / r, 0, bx_cells - 1);
      const int cy = std::clamp(static_cast<int>(centers[c].y) / r, 0, by_cells - 1);
      buckets[static_cast<size_t>(cy) * bx_cells + cx].push_back(c);
    }

    run_row_bands(height, [&](int y0, int y1) {
      for (int y = y0; y < y1; ++y) {
        const cv::Vec3f* lab_row = lab.ptr<cv::Vec3f>(y);
        const float* depth_row = frame.depth.ptr<float>(y);
        std::int32_t* label_row = labels.ptr<std::int32_t>(y);
        const int cell_y = y / r;
        for (int x = 0; x < width; ++x) {
          const float d = depth_row[x];
          const bool dv = d > 0.0f && std::isfinite(d);
          const int cell_x = x / r;
          float best = std::numeric_limits<float>::infinity();
          int best_id = -1;
          for (int cy = std::max(0, cell_y - 1); cy <= std::min(by_cells - 1, cell_y + 1); ++cy) {
            for (int cx = std::max(0, cell_x - 1); cx <= std::min(bx_cells - 1, cell_x + 1); ++cx) {
              for (int c : buckets[static_cast<size_t>(cy) * bx_cells + cx]) {
                const Center& cc = centers[c];
                const float dx = cc.x - x;
                const float dy = cc.y - y;
                if (dx > r || dx < -r || dy > r || dy < -r) continue;
                const float dl = lab_row[x][0] - cc.l;
                const float da = lab_row[x][1] - cc.a;
                const float db = lab_row[x][2] - cc.b;
                float dist = std::sqrt(dl * dl + da * da + db * db) / color_norm +
                             std::sqrt(dx * dx + dy * dy) / space_norm;
                if (dv && cc.has_depth) {
                  const float dz = literal ? std::sqrt(d * d + cc.d * cc.d)
                                           : std::abs(d - cc.d);
                  dist += dz / depth_norm;
                }
                if (dist < best || (dist == best && c < best_id)) {
                  best = dist;
                  best_id = c;
                }
              }
            }
          }
          if (best_id >= 0) label_row[x] = best_id;
        }
      }
    });

    // Recompute centers in scan order (fixed accumulation order).
    std::vector<double> sx(n_centers, 0.0), sy(n_centers, 0.0), sl(n_centers, 0.0),
        sa(n_centers, 0.0), sb(n_centers, 0.0), sd(n_centers, 0.0);
    std::vector<int> count(n_centers, 0), dcount(n_centers, 0);
    for (int y = 0; y < height; ++y) {
      const cv::Vec3f* lab_row = lab.ptr<cv::Vec3f>(y);
      const float* depth_row = frame.depth.ptr<float>(y);
      const std::int32_t* label_row = labels.ptr<std::int32_t>(y);
      for (int x = 0; x < width; ++x) {
        const int id = label_row[x];
        sx[id] += x;
        sy[id] += y;
        sl[id] += lab_row[x][0];
        sa[id] += lab_row[x][1];
        sb[id] += lab_row[x][2];
        const float d = depth_row[x];
        if (d > 0.0f && std::isfinite(d)) {
          sd[id] += d;
          ++dcount[id];
        }
        ++count[id];
      }
    }
    for (int c = 0; c < n_centers; ++c) {
      if (count[c] == 0) continue;  // dead center keeps its position
      centers[c].x = static_cast<float>(sx[c] / count[c]);
      centers[c].y = static_cast<float>(sy[c] / count[c]);
      centers[c].l = static_cast<float>(sl[c] / count[c]);
      centers[c].a = static_cast<float>(sa[c] / count[c]);
      centers[c].b = static_cast<float>(sb[c] / count[c]);
      centers[c].has_depth = dcount[c] > 0 ? 1 : 0;
      centers[c].d = dcount[c] > 0 ? static_cast<float>(sd[c] / dcount[c]) : 0.0f;
    }
  }

  // Connectivity: find 4-connected components per label, keep the largest as
  // the label's main region, merge every orphan component into the label that
  // dominates its settled 4-neighborhood.
  const int n_pixels = width * height;
  std::vector<std::int32_t> comp_of(n_pixels, -1);
  struct Component {
    int label;
    std::vector<int> pixels;
    bool settled = false;
  };
  std::vector<Component> components;
  {
    std::deque<int> queue;
    for (int start = 0; start < n_pixels; ++start) {
      if (comp_of[start] >= 0) continue;
      const int comp_id = static_cast<int>(components.size());
      const int label = labels.at<std::int32_t>(start / width, start % width);
      components.push_back({label, {}, false});
      comp_of[start] = comp_id;
      queue.push_back(start);
      while (!queue.empty()) {
        const int p = queue.front();
        queue.pop_front();
        components[comp_id].pixels.push_back(p);
        const int px = p % width, py = p / width;
        const int neighbors[4] = {p - width, p - 1, p + 1, p + width};
        const bool ok[4] = {py > 0, px > 0, px < width - 1, py < height - 1};
        for (int k = 0; k < 4; ++k) {
          if (!ok[k] || comp_of[neighbors[k]] >= 0) continue;
          if (labels.at<std::int32_t>(neighbors[k] / width, neighbors[k] % width) != label)
            continue;
          comp_of[neighbors[k]] = comp_id;
          queue.push_back(neighbors[k]);
        }
      }
    }
  }
  {
    // Dominant component per label = most pixels, earliest scan order on ties.
    std::vector<int> dominant(n_centers, -1);
    for (int c = 0; c < static_cast<int>(components.size()); ++c) {
      const int lbl = components[c].label;
      if (dominant[lbl] < 0 ||
          components[c].pixels.size() > components[dominant[lbl]].pixels.size())
        dominant[lbl] = c;
    }
    std::vector<int> orphans;
    for (int c = 0; c < static_cast<int>(components.size()); ++c) {
      if (dominant[components[c].label] == c)
        components[c].settled = true;
      else
        orphans.push_back(c);
    }
    std::vector<char> is_settled_px(n_pixels, 0);
    for (const auto& comp : components)
      if (comp.settled)
        for (int p : comp.pixels) is_settled_px[p] = 1;

    auto* label_data = labels.ptr<std::int32_t>(0);
    while (!orphans.empty()) {
      bool merged_any = false;
      std::vector<int> remaining;
      for (int c : orphans) {
        std::vector<std::pair<int, int>> votes;  // (label, count)
        for (int p : components[c].pixels) {
          const int px = p % width, py = p / width;
          const int neighbors[4] = {p - width, p - 1, p + 1, p + width};
          const bool ok[4] = {py > 0, px > 0, px < width - 1, py < height - 1};
          for (int k = 0; k < 4; ++k) {
            if (!ok[k] || !is_settled_px[neighbors[k]]) continue;
            const int lbl = label_data[neighbors[k]];
            auto it = std::find_if(votes.begin(), votes.end(),
                                   [lbl](const auto& v) { return v.first == lbl; });
            if (it == votes.end())
              votes.emplace_back(lbl, 1);
            else
              ++it->second;
          }
        }
        if (votes.empty()) {
          remaining.push_back(c);
          continue;
        }
        std::sort(votes.begin(), votes.end(), [](const auto& l, const auto& r) {
          return l.second != r.second ? l.second > r.second : l.first < r.first;
        });
        const int target = votes.front().first;
        for (int p : components[c].pixels) {
          label_data[p] = target;
          is_settled_px[p] = 1;
        }
        merged_any = true;
      }
      if (!merged_any) break;  // cannot happen on a connected grid
      orphans = std::move(remaining);
    }
  }

  // Compact ids and rebuild descriptors from the final label map.
  std::vector<int> remap(n_centers, -1);
  int next_id = 0;
  {
    auto* label_data = labels.ptr<std::int32_t>(0);
    for (int p = 0; p < n_pixels; ++p) {
      const int lbl = label_data[p];
      if (remap[lbl] < 0) remap[lbl] = next_id++;
      label_data[p] = remap[lbl];
    }
  }

  SuperPixelMap out;
  out.labels = labels;
  out.grid_spacing = r;
  out.superpixels.assign(next_id, SuperPixel{});
  std::vector<double> sx(next_id, 0.0), sy(next_id, 0.0), sl(next_id, 0.0),
      sa(next_id, 0.0), sb(next_id, 0.0), sd(next_id, 0.0);
  std::vector<int> count(next_id, 0), dcount(next_id, 0), border(next_id, width + height);
  for (int y = 0; y < height; ++y) {
    const cv::Vec3f* lab_row = lab.ptr<cv::Vec3f>(y);
    const float* depth_row = frame.depth.ptr<float>(y);
    const std::int32_t* label_row = labels.ptr<std::int32_t>(y);
    for (int x = 0; x < width; ++x) {
      const int id = label_row[x];
      sx[id] += x;
      sy[id] += y;
      sl[id] += lab_row[x][0];
      sa[id] += lab_row[x][1];
      sb[id] += lab_row[x][2];
      const float d = depth_row[x];
      if (d > 0.0f && std::isfinite(d)) {
        sd[id] += d;
        ++dcount[id];
      }
      ++count[id];
      border[id] = std::min(border[id],
                            std::min(std::min(x, width - 1 - x), std::min(y, height - 1 - y)));
    }
  }
  for (int id = 0; id < next_id; ++id) {
    SuperPixel& sp = out.superpixels[id];
    sp.pixel_count = count[id];
    sp.x = sx[id] / count[id];
    sp.y = sy[id] / count[id];
    sp.l = sl[id] / count[id];
    sp.a = sa[id] / count[id];
    sp.b = sb[id] / count[id];
    sp.depth_valid = dcount[id] > 0;
    sp.d = dcount[id] > 0 ? sd[id] / dcount[id] : 0.0;
    sp.valid_depth_fraction = static_cast<double>(dcount[id]) / count[id];
    sp.border_distance = border[id];
  }
  return out;
}

}  // namespace dynavo
