#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "colayout/relations.hpp"

namespace colayout {

inline constexpr double kVarianceFloor = 1e-8;

/// One-dimensional Gaussian mixture.
struct Gmm1D {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
  double log_likelihood = 0.0;
  int iterations = 0;
  /// Log-likelihood after every EM step of the winning restart.
  std::vector<double> trace;

  std::size_t components() const { return means.size(); }
  /// Posterior component probabilities for x; they sum to 1.
  std::vector<double> responsibilities(double x) const;
  double log_density(double x) const;
};

struct GmmOptions {
  int max_iterations = 500;
  double tolerance = 1e-8;
  int restarts = 5;
  std::uint64_t seed = 0;
};

/// EM fit from k-means++ seeds (plus, for k = 2, deterministic starts at
/// splits of the sorted samples); the start with the best likelihood wins.
/// Throws ValidationError when k < 1 or there are fewer samples than k.
Gmm1D fit_gmm_1d(std::span<const double> samples, int k, const GmmOptions& options = {});

struct KeptEdge {
  std::string a;
  std::string b;
  double weight = 0.0;
};

/// Functional groups: connected components of the pruned scene graph.
struct FunctionalGroups {
  std::vector<std::vector<std::string>> groups;  ///< ids in scene order
  std::vector<KeptEdge> kept_edges;

  /// Index of the group holding `id`, or -1.
  int group_of(const std::string& id) const;
};

/// Clusters edge weights with a k-component GMM and keeps only edges of the
/// highest-mean component. If the component means are within 1e-6 of each
/// other every edge is kept.
FunctionalGroups extract_groups(const SceneGraph& graph, int k = 2, std::uint64_t seed = 0);

}  // namespace colayout
