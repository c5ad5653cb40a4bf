#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "colayout/scene.hpp"

namespace colayout {

/// Unordered label pair stored with `first <= second`.
struct LabelPair {
  std::string first;
  std::string second;

  LabelPair(std::string_view a, std::string_view b);
  auto operator<=>(const LabelPair&) const = default;
};

/// Offline stand-in for a knowledge-graph lookup: pairwise relatedness
/// strengths h in [0, 1] plus "is-a" (synonym) flags.
class SemanticTable {
 public:
  void set(std::string_view a, std::string_view b, double h, bool is_a = false);

  bool knows_label(std::string_view label) const;
  /// Raw strength; 0 for an unlisted pair of known labels.
  double strength(std::string_view a, std::string_view b) const;
  /// Listed synonyms, plus any unlisted pair of identical labels.
  bool is_a(std::string_view a, std::string_view b) const;

  static SemanticTable from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static SemanticTable load(const std::filesystem::path& path);

 private:
  std::map<LabelPair, double> strength_;
  std::set<LabelPair> is_a_;
  std::set<std::string, std::less<>> labels_;
};

/// Co-occurrence counts and center-distance histograms mined from a corpus.
class RelationStats {
 public:
  struct PairStats {
    long n = 0;
    std::vector<long> hist;
    long total() const;
    /// count / (total * bin_width) of the bin holding d; 0 past the last bin.
    double density(double d, double bin_width) const;
    double max_density(double bin_width) const;
    /// Center of the most populated bin (lowest index on ties).
    double modal_distance(double bin_width) const;
  };

  explicit RelationStats(double bin_width = 0.25);

  double bin_width() const { return bin_width_; }
  void add_observation(std::string_view a, std::string_view b, double distance);
  /// Adds another set of counts with the same bin width.
  void merge(const RelationStats& other);

  bool knows_label(std::string_view label) const;
  long cooccur(std::string_view a, std::string_view b) const;
  long marginal(std::string_view label) const;
  /// nullptr for an unseen pair.
  const PairStats* pair(std::string_view a, std::string_view b) const;
  const std::map<LabelPair, PairStats>& pairs() const { return pairs_; }

  static RelationStats from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static RelationStats load(const std::filesystem::path& path);

 private:
  double bin_width_;
  std::map<LabelPair, PairStats> pairs_;
  std::map<std::string, long, std::less<>> marginal_;
};

struct Edge {
  std::size_t i = 0;  ///< index into SceneGraph::nodes, i < j
  std::size_t j = 0;
  double weight = 0.0;
};

/// Complete weighted graph over a scene's objects.
struct SceneGraph {
  std::vector<std::string> nodes;  ///< object ids in scene order
  std::vector<Edge> edges;         ///< all pairs, lexicographic in (i, j)
};

/// Normalized semantic probabilities over every object pair of a scene, in
/// the same (i < j) order as SceneGraph::edges. Synonym pairs take the mean
/// strength of all non-synonym pairs before normalization.
std::vector<double> semantic_probabilities(const SemanticTable& table,
                                           const std::vector<std::string>& scene_labels);

/// Semantic probability of one label pair within a scene.
double semantic_rel(const SemanticTable& table, const std::vector<std::string>& scene_labels,
                    std::string_view a, std::string_view b);

/// Bias-corrected co-occurrence: N_ab / min(marginal a, marginal b).
double cooccur_prob(const RelationStats& stats, std::string_view a, std::string_view b);

/// Unnormalized spatial score: distance density times co-occurrence.
double spatial_rel(const RelationStats& stats, std::string_view a, std::string_view b,
                   double distance);

SceneGraph build_graph(const Scene& scene, const SemanticTable& table, const RelationStats& stats);

/// Counts every object pair of every scene. Throws on an empty corpus.
RelationStats stats_build(const std::vector<Scene>& corpus, double bin_width);

}  // namespace colayout
