#include "colayout/relations.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace colayout {

using nlohmann::json;

LabelPair::LabelPair(std::string_view a, std::string_view b)
    : first(std::min(a, b)), second(std::max(a, b)) {}

// --- SemanticTable -----------------------------------------------------------

void SemanticTable::set(std::string_view a, std::string_view b, double h, bool is_a) {
  if (!(h >= 0.0 && h <= 1.0)) {
    throw ValidationError("semantic strength for (" + std::string(a) + ", " + std::string(b) +
                          ") must lie in [0, 1]");
  }
  LabelPair key(a, b);
  strength_[key] = h;
  if (is_a) {
    is_a_.insert(key);
  } else {
    is_a_.erase(key);
  }
  labels_.emplace(a);
  labels_.emplace(b);
}

bool SemanticTable::knows_label(std::string_view label) const { return labels_.contains(label); }

double SemanticTable::strength(std::string_view a, std::string_view b) const {
  auto it = strength_.find(LabelPair(a, b));
  return it == strength_.end() ? 0.0 : it->second;
}

bool SemanticTable::is_a(std::string_view a, std::string_view b) const {
  LabelPair key(a, b);
  if (is_a_.contains(key)) return true;
  return a == b && !strength_.contains(key);
}

SemanticTable SemanticTable::from_json(const json& j) {
  check_format_version(j, "semantic table");
  auto it = j.find("pairs");
  if (it == j.end() || !it->is_array()) throw ParseError("semantic table.pairs: expected an array");
  SemanticTable t;
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& p = (*it)[i];
    const std::string where = "semantic table.pairs[" + std::to_string(i) + "]";
    if (!p.is_object() || !p.contains("a") || !p.contains("b") || !p.contains("h") ||
        !p["a"].is_string() || !p["b"].is_string() || !p["h"].is_number()) {
      throw ParseError(where + ": expected {\"a\": string, \"b\": string, \"h\": number}");
    }
    bool is_a = false;
    if (p.contains("is_a")) {
      if (!p["is_a"].is_boolean()) throw ParseError(where + ".is_a: expected a boolean");
      is_a = p["is_a"].get<bool>();
    }
    t.set(p["a"].get<std::string>(), p["b"].get<std::string>(), p["h"].get<double>(), is_a);
  }
  return t;
}

json SemanticTable::to_json() const {
  json pairs = json::array();
  for (const auto& [key, h] : strength_) {
    pairs.push_back({{"a", key.first}, {"b", key.second}, {"h", h}, {"is_a", is_a_.contains(key)}});
  }
  return {{"format_version", kFormatVersion}, {"pairs", pairs}};
}

SemanticTable SemanticTable::load(const std::filesystem::path& path) {
  try {
    return from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// --- RelationStats -----------------------------------------------------------

long RelationStats::PairStats::total() const { return std::accumulate(hist.begin(), hist.end(), 0L); }

double RelationStats::PairStats::density(double d, double bin_width) const {
  if (!(d >= 0.0)) return 0.0;
  const long t = total();
  if (t == 0) return 0.0;
  const double bin = std::floor(d / bin_width);
  if (bin >= static_cast<double>(hist.size())) return 0.0;
  return static_cast<double>(hist[static_cast<std::size_t>(bin)]) /
         (static_cast<double>(t) * bin_width);
}

double RelationStats::PairStats::max_density(double bin_width) const {
  const long t = total();
  if (t == 0) return 0.0;
  const long peak = *std::max_element(hist.begin(), hist.end());
  return static_cast<double>(peak) / (static_cast<double>(t) * bin_width);
}

double RelationStats::PairStats::modal_distance(double bin_width) const {
  if (hist.empty()) return 0.0;
  const auto peak = std::max_element(hist.begin(), hist.end()) - hist.begin();
  return (static_cast<double>(peak) + 0.5) * bin_width;
}

RelationStats::RelationStats(double bin_width) : bin_width_(bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw ValidationError("bin_width must be finite and > 0");
  }
}

void RelationStats::add_observation(std::string_view a, std::string_view b, double distance) {
  if (!(distance >= 0.0) || !std::isfinite(distance)) {
    throw ValidationError("observed distance must be finite and >= 0");
  }
  PairStats& ps = pairs_[LabelPair(a, b)];
  const auto bin = static_cast<std::size_t>(std::floor(distance / bin_width_));
  if (ps.hist.size() <= bin) ps.hist.resize(bin + 1, 0);
  ++ps.hist[bin];
  ++ps.n;
  // A self pair (a == b) counts once toward its label's marginal.
  marginal_[std::string(a)] += 1;
  if (a != b) marginal_[std::string(b)] += 1;
}

void RelationStats::merge(const RelationStats& other) {
  if (other.bin_width_ != bin_width_) throw ValidationError("cannot merge stats with different bin widths");
  for (const auto& [key, ps] : other.pairs_) {
    PairStats& mine = pairs_[key];
    mine.n += ps.n;
    if (mine.hist.size() < ps.hist.size()) mine.hist.resize(ps.hist.size(), 0);
    for (std::size_t i = 0; i < ps.hist.size(); ++i) mine.hist[i] += ps.hist[i];
  }
  for (const auto& [label, m] : other.marginal_) marginal_[label] += m;
}

bool RelationStats::knows_label(std::string_view label) const {
  return marginal_.find(label) != marginal_.end();
}

long RelationStats::cooccur(std::string_view a, std::string_view b) const {
  const PairStats* ps = pair(a, b);
  return ps == nullptr ? 0 : ps->n;
}

long RelationStats::marginal(std::string_view label) const {
  auto it = marginal_.find(label);
  return it == marginal_.end() ? 0 : it->second;
}

const RelationStats::PairStats* RelationStats::pair(std::string_view a, std::string_view b) const {
  auto it = pairs_.find(LabelPair(a, b));
  return it == pairs_.end() ? nullptr : &it->second;
}

RelationStats RelationStats::from_json(const json& j) {
  check_format_version(j, "stats");
  if (!j.contains("bin_width") || !j["bin_width"].is_number()) {
    throw ParseError("stats.bin_width: expected a number");
  }
  RelationStats s(j["bin_width"].get<double>());
  if (!j.contains("pairs") || !j["pairs"].is_array()) throw ParseError("stats.pairs: expected an array");
  const json& pairs = j["pairs"];
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const json& p = pairs[i];
    const std::string where = "stats.pairs[" + std::to_string(i) + "]";
    if (!p.is_object() || !p.contains("a") || !p.contains("b") || !p.contains("n") ||
        !p.contains("hist") || !p["a"].is_string() || !p["b"].is_string() ||
        !p["n"].is_number_integer() || !p["hist"].is_array()) {
      throw ParseError(where + ": expected {\"a\", \"b\", \"n\": int, \"hist\": [int]}");
    }
    const std::string a = p["a"].get<std::string>();
    const std::string b = p["b"].get<std::string>();
    PairStats ps;
    ps.n = p["n"].get<long>();
    for (const json& c : p["hist"]) {
      if (!c.is_number_integer() || c.get<long>() < 0) throw ParseError(where + ".hist: expected non-negative integers");
      ps.hist.push_back(c.get<long>());
    }
    if (ps.n < 0 || ps.total() != ps.n) {
      throw ValidationError(where + ": histogram total must equal n");
    }
    LabelPair key(a, b);
    if (s.pairs_.contains(key)) throw ValidationError(where + ": duplicate pair");
    s.marginal_[a] += ps.n;
    if (a != b) s.marginal_[b] += ps.n;
    s.pairs_.emplace(std::move(key), std::move(ps));
  }
  return s;
}

json RelationStats::to_json() const {
  json pairs = json::array();
  for (const auto& [key, ps] : pairs_) {
    pairs.push_back({{"a", key.first}, {"b", key.second}, {"n", ps.n}, {"hist", ps.hist}});
  }
  return {{"format_version", kFormatVersion}, {"bin_width", bin_width_}, {"pairs", pairs}};
}

RelationStats RelationStats::load(const std::filesystem::path& path) {
  try {
    return from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// --- relation probabilities ---------------------------------------------------

std::vector<double> semantic_probabilities(const SemanticTable& table,
                                           const std::vector<std::string>& scene_labels) {
  const std::size_t n = scene_labels.size();
  if (n < 2) throw ValidationError("semantic relation needs at least 2 objects");
  for (const auto& l : scene_labels) {
    if (!table.knows_label(l)) throw LookupError("label '" + l + "' is not in the semantic table");
  }

  std::vector<double> h;
  std::vector<bool> synonym;
  h.reserve(n * (n - 1) / 2);
  double plain_sum = 0.0;
  std::size_t plain_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool syn = table.is_a(scene_labels[i], scene_labels[j]);
      const double v = table.strength(scene_labels[i], scene_labels[j]);
      h.push_back(v);
      synonym.push_back(syn);
      if (!syn) {
        plain_sum += v;
        ++plain_count;
      }
    }
  }
  // With no non-synonym pair to average over, synonyms are all equally neutral.
  const double neutral = plain_count > 0 ? plain_sum / static_cast<double>(plain_count) : 1.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (synonym[k]) h[k] = neutral;
  }

  const double z = std::accumulate(h.begin(), h.end(), 0.0);
  if (z <= 0.0) return std::vector<double>(h.size(), 1.0 / static_cast<double>(h.size()));
  for (double& v : h) v /= z;
  return h;
}

double semantic_rel(const SemanticTable& table, const std::vector<std::string>& scene_labels,
                    std::string_view a, std::string_view b) {
  const auto probs = semantic_probabilities(table, scene_labels);
  if (!table.knows_label(a)) throw LookupError("label '" + std::string(a) + "' is not in the semantic table");
  if (!table.knows_label(b)) throw LookupError("label '" + std::string(b) + "' is not in the semantic table");
  const std::size_t n = scene_labels.size();
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      if (LabelPair(scene_labels[i], scene_labels[j]) == LabelPair(a, b)) return probs[k];
    }
  }
  throw LookupError("pair (" + std::string(a) + ", " + std::string(b) + ") does not occur in the scene");
}

double cooccur_prob(const RelationStats& stats, std::string_view a, std::string_view b) {
  for (std::string_view l : {a, b}) {
    if (!stats.knows_label(l)) throw LookupError("label '" + std::string(l) + "' is not in the relation stats");
  }
  const long denom = std::min(stats.marginal(a), stats.marginal(b));
  if (denom <= 0) throw LookupError("zero marginal count for (" + std::string(a) + ", " + std::string(b) + ")");
  return static_cast<double>(stats.cooccur(a, b)) / static_cast<double>(denom);
}

double spatial_rel(const RelationStats& stats, std::string_view a, std::string_view b,
                   double distance) {
  if (!(distance >= 0.0)) throw ValidationError("distance must be >= 0");
  const double pco = cooccur_prob(stats, a, b);
  const auto* ps = stats.pair(a, b);
  if (ps == nullptr) return 0.0;
  return ps->density(distance, stats.bin_width()) * pco;
}

SceneGraph build_graph(const Scene& scene, const SemanticTable& table, const RelationStats& stats) {
  const std::size_t n = scene.objects.size();
  if (n < 2) throw ValidationError("scene graph needs at least 2 objects");
  SceneGraph g;
  for (const auto& o : scene.objects) g.nodes.push_back(o.id);

  const auto sem = semantic_probabilities(table, scene.labels());
  std::size_t k = 0;
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j, ++k) {
      const auto& a = scene.objects[i];
      const auto& b = scene.objects[j];
      const double d = norm(a.footprint.pose.position() - b.footprint.pose.position());
      const double w = sem[k] * spatial_rel(stats, a.label, b.label, d);
      g.edges.push_back({i, j, w});
      z += w;
    }
  }
  const double uniform = 1.0 / static_cast<double>(g.edges.size());
  for (auto& e : g.edges) e.weight = z > 0.0 ? e.weight / z : uniform;
  return g;
}

RelationStats stats_build(const std::vector<Scene>& corpus, double bin_width) {
  if (corpus.empty()) throw ValidationError("stats corpus is empty");
  RelationStats stats(bin_width);
  for (const Scene& s : corpus) {
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
      for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
        const auto& a = s.objects[i];
        const auto& b = s.objects[j];
        stats.add_observation(a.label, b.label,
                              norm(a.footprint.pose.position() - b.footprint.pose.position()));
      }
    }
  }
  return stats;
}

}  // namespace colayout
