#pragma once

#include <cstdint>
#include <vector>

#include "dynavo/superpixels.hpp"

namespace dynavo {

struct KMeansParams {
  int max_iterations = 50;
  bool use_depth = true;
  double depth_weight = 100.0;  // px per meter
};

struct ClusterAssignment {
  struct Center {
    double x = 0.0;
    double y = 0.0;
    double d = 0.0;  // mean (imputed) depth of members, meters
  };

  int m_clusters = 0;  // effective count after empty-cluster pruning
  std::vector<Center> centers;
  std::vector<std::vector<int>> members;  // superpixel ids per cluster
  std::vector<int> labels;                // per superpixel
  double imputed_depth = 0.0;  // stand-in used for depth-invalid superpixels
};

// Groups superpixels into at most m_clusters rigid candidates by seeded
// k-means++ over (x, y, weighted depth). Deterministic given the seed; empty
// clusters are re-seeded from the farthest point and pruned from the result.
// Writes the final label into each SuperPixel::cluster.
// Throws std::invalid_argument when m_clusters is 0 or exceeds the input size.
ClusterAssignment kmeans_clusters(std::vector<SuperPixel>& superpixels, int m_clusters,
                                  std::uint64_t seed, const KMeansParams& params = {});

}  // namespace dynavo
