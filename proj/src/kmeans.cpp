#include "dynavo/kmeans.hpp"

#include <Eigen/Core>
#include <limits>
#include <random>
#include <stdexcept>

namespace dynavo {

namespace {

using Feature = Eigen::Vector3d;

double sq_dist(const Feature& a, const Feature& b) { return (a - b).squaredNorm(); }

int nearest_center(const Feature& f, const std::vector<Feature>& centers) {
  double best = std::numeric_limits<double>::infinity();
  int best_id = 0;
  for (int c = 0; c < static_cast<int>(centers.size()); ++c) {
    const double d = sq_dist(f, centers[c]);
    if (d < best) {
      best = d;
      best_id = c;
    }
  }
  return best_id;
}

}  // namespace

ClusterAssignment kmeans_clusters(std::vector<SuperPixel>& superpixels, int m_clusters,
                                  std::uint64_t seed, const KMeansParams& params) {
  const int n = static_cast<int>(superpixels.size());
  if (m_clusters <= 0) throw std::invalid_argument("kmeans_clusters: m_clusters must be > 0");
  if (m_clusters > n)
    throw std::invalid_argument("kmeans_clusters: more clusters than superpixels");

  // Feature = spatial location plus (weighted) depth; invalid depths take the
  // mean valid depth so they stay neutral in the depth dimension.
  double depth_sum = 0.0;
  int depth_count = 0;
  for (const auto& sp : superpixels) {
    if (sp.depth_valid) {
      depth_sum += sp.d;
      ++depth_count;
    }
  }
  const double imputed = depth_count > 0 ? depth_sum / depth_count : 0.0;
  const double w = params.use_depth ? params.depth_weight : 0.0;
  std::vector<Feature> features(n);
  for (int i = 0; i < n; ++i) {
    const auto& sp = superpixels[i];
    features[i] = Feature(sp.x, sp.y, w * (sp.depth_valid ? sp.d : imputed));
  }

  // k-means++ seeding.
  std::mt19937_64 rng(seed);
  std::vector<Feature> centers;
  centers.reserve(m_clusters);
  {
    std::uniform_int_distribution<int> first(0, n - 1);
    centers.push_back(features[first(rng)]);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < m_clusters) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centers) best = std::min(best, sq_dist(features[i], c));
        d2[i] = best;
        total += best;
      }
      if (total <= 0.0) {
        centers.push_back(features[first(rng)]);
        continue;
      }
      std::uniform_real_distribution<double> pick(0.0, total);
      double target = pick(rng);
      int chosen = n - 1;
      for (int i = 0; i < n; ++i) {
        target -= d2[i];
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
      centers.push_back(features[chosen]);
    }
  }

  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = nearest_center(features[i], centers);

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    // Re-seed empty clusters from the farthest point (one point each).
    std::vector<int> counts(m_clusters, 0);
    for (int lbl : labels) ++counts[lbl];
    std::vector<char> taken(n, 0);
    for (int c = 0; c < m_clusters; ++c) {
      if (counts[c] > 0) continue;
      double far_d = -1.0;
      int far_i = -1;
      for (int i = 0; i < n; ++i) {
        if (taken[i]) continue;
        const double d = sq_dist(features[i], centers[labels[i]]);
        if (d > far_d) {
          far_d = d;
          far_i = i;
        }
      }
      if (far_i < 0 || far_d <= 0.0) continue;  // nothing distinct to split off
      centers[c] = features[far_i];
      taken[far_i] = 1;
      --counts[labels[far_i]];
      labels[far_i] = c;
      ++counts[c];
    }

    // Means, then assignment; stop at the assignment fixpoint.
    std::vector<Feature> sums(m_clusters, Feature::Zero());
    std::vector<int> mcounts(m_clusters, 0);
    for (int i = 0; i < n; ++i) {
      sums[labels[i]] += features[i];
      ++mcounts[labels[i]];
    }
    for (int c = 0; c < m_clusters; ++c)
      if (mcounts[c] > 0) centers[c] = sums[c] / mcounts[c];

    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int nc = nearest_center(features[i], centers);
      if (nc != labels[i]) {
        labels[i] = nc;
        changed = true;
      }
    }
    if (!changed) break;
  }

  // Prune empty clusters and renumber.
  std::vector<int> remap(m_clusters, -1);
  ClusterAssignment out;
  out.imputed_depth = imputed;
  for (int i = 0; i < n; ++i) {
    int& id = remap[labels[i]];
    if (id < 0) {
      id = out.m_clusters++;
      out.members.emplace_back();
      out.centers.emplace_back();
    }
    out.members[id].push_back(i);
  }
  out.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    out.labels[i] = remap[labels[i]];
    superpixels[i].cluster = out.labels[i];
  }
  for (int c = 0; c < out.m_clusters; ++c) {
    Feature mean = Feature::Zero();
    for (int i : out.members[c]) mean += features[i];
    mean /= static_cast<double>(out.members[c].size());
    out.centers[c] = {mean.x(), mean.y(), w > 0.0 ? mean.z() / w : 0.0};
  }
  return out;
}

}  // namespace dynavo
