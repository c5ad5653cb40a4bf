#include "colayout/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

namespace colayout {

namespace {

double log_normal(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * var) - 0.5 * d * d / var;
}

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

double total_log_likelihood(const Gmm1D& g, std::span<const double> xs) {
  double ll = 0.0;
  for (double x : xs) ll += g.log_density(x);
  return ll;
}

std::vector<double> kmeanspp_centers(std::span<const double> xs, int k, std::mt19937_64& rng) {
  std::vector<double> centers;
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  centers.push_back(xs[pick(rng)]);
  std::vector<double> d2(xs.size());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (xs[i] - c) * (xs[i] - c));
      d2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(xs[pick(rng)]);
      continue;
    }
    std::uniform_real_distribution<double> u(0.0, total);
    const double r = u(rng);
    double acc = 0.0;
    std::size_t chosen = xs.size() - 1;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      acc += d2[i];
      if (acc >= r && d2[i] > 0.0) {
        chosen = i;
        break;
      }
    }
    centers.push_back(xs[chosen]);
  }
  return centers;
}

/// Moment-matched mixture from a nearest-center hard assignment.
Gmm1D mixture_from_centers(std::span<const double> xs, const std::vector<double>& centers) {
  const int k = static_cast<int>(centers.size());
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var = std::max(var / n, kVarianceFloor);

  std::vector<double> sum(k, 0.0), sum2(k, 0.0), count(k, 0.0);
  for (double x : xs) {
    int best = 0;
    for (int c = 1; c < k; ++c) {
      if (std::abs(x - centers[c]) < std::abs(x - centers[best])) best = c;
    }
    sum[best] += x;
    sum2[best] += x * x;
    count[best] += 1.0;
  }
  Gmm1D g;
  for (int c = 0; c < k; ++c) {
    if (count[c] > 0.0) {
      const double m = sum[c] / count[c];
      g.means.push_back(m);
      g.variances.push_back(std::max(sum2[c] / count[c] - m * m, kVarianceFloor));
      g.weights.push_back(count[c] / n);
    } else {
      g.means.push_back(centers[c]);
      g.variances.push_back(var);
      g.weights.push_back(1.0 / n);
    }
  }
  const double wsum = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
  for (double& w : g.weights) w /= wsum;
  return g;
}

/// Two-center starts at the means of each side of a split of the sorted
/// distinct values; at most `limit` evenly spaced split positions.
std::vector<std::vector<double>> split_centers(std::span<const double> xs, std::size_t limit) {
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<std::vector<double>> out;
  if (v.size() < 2) return out;
  const std::size_t splits = v.size() - 1;
  const std::size_t count = std::min(splits, limit);
  std::size_t last = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t s = 1 + (j * splits) / count;
    if (s == last) continue;
    last = s;
    const double lo = std::accumulate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(s), 0.0) / static_cast<double>(s);
    const double hi = std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(s), v.end(), 0.0) /
                      static_cast<double>(v.size() - s);
    out.push_back({lo, hi});
  }
  return out;
}

Gmm1D run_em(std::span<const double> xs, Gmm1D g, const GmmOptions& opt) {
  const std::size_t n = xs.size();
  const std::size_t k = g.components();
  std::vector<double> resp(n * k);
  double ll = total_log_likelihood(g, xs);
  g.trace.assign(1, ll);

  for (int it = 0; it < opt.max_iterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = g.responsibilities(xs[i]);
      std::copy(r.begin(), r.end(), resp.begin() + static_cast<std::ptrdiff_t>(i * k));
    }
    for (std::size_t c = 0; c < k; ++c) {
      double nk = 0.0;
      double sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * k + c];
        sx += resp[i * k + c] * xs[i];
      }
      g.weights[c] = nk / static_cast<double>(n);
      if (nk <= 0.0) continue;
      const double m = sx / nk;
      double sv = 0.0;
      for (std::size_t i = 0; i < n; ++i) sv += resp[i * k + c] * (xs[i] - m) * (xs[i] - m);
      g.means[c] = m;
      g.variances[c] = std::max(sv / nk, kVarianceFloor);
    }
    const double next = total_log_likelihood(g, xs);
    g.trace.push_back(next);
    g.iterations = it + 1;
    const bool converged = next - ll < opt.tolerance;
    ll = next;
    if (converged) break;
  }
  g.log_likelihood = ll;
  return g;
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<double> Gmm1D::responsibilities(double x) const {
  std::vector<double> logp(components());
  for (std::size_t c = 0; c < components(); ++c) {
    logp[c] = weights[c] > 0.0 ? std::log(weights[c]) + log_normal(x, means[c], variances[c])
                               : -std::numeric_limits<double>::infinity();
  }
  const double z = log_sum_exp(logp);
  for (double& v : logp) v = std::exp(v - z);
  return logp;
}

double Gmm1D::log_density(double x) const {
  std::vector<double> logp(components());
  for (std::size_t c = 0; c < components(); ++c) {
    logp[c] = weights[c] > 0.0 ? std::log(weights[c]) + log_normal(x, means[c], variances[c])
                               : -std::numeric_limits<double>::infinity();
  }
  return log_sum_exp(logp);
}

Gmm1D fit_gmm_1d(std::span<const double> samples, int k, const GmmOptions& options) {
  if (k < 1) throw ValidationError("GMM needs at least one component");
  if (samples.size() < static_cast<std::size_t>(k)) {
    throw ValidationError("GMM needs at least as many samples as components");
  }
  for (double x : samples) {
    if (!std::isfinite(x)) throw ValidationError("GMM samples must be finite");
  }
  Gmm1D best;
  bool have_best = false;
  auto consider = [&](Gmm1D g) {
    if (!have_best || g.log_likelihood > best.log_likelihood) {
      best = std::move(g);
      have_best = true;
    }
  };
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(options.seed + static_cast<std::uint64_t>(r) * 0x9E3779B97F4A7C15ULL);
    consider(run_em(samples, mixture_from_centers(samples, kmeanspp_centers(samples, k, rng)), options));
  }
  // k-means++ favors isolated outliers as centers, which tends to end in a
  // collapsed component; sorted splits cover the other two-cluster readings.
  if (k == 2) {
    for (const auto& c : split_centers(samples, 64)) consider(run_em(samples, mixture_from_centers(samples, c), options));
  }
  return best;
}

int FunctionalGroups::group_of(const std::string& id) const {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (std::find(groups[g].begin(), groups[g].end(), id) != groups[g].end()) {
      return static_cast<int>(g);
    }
  }
  return -1;
}

FunctionalGroups extract_groups(const SceneGraph& graph, int k, std::uint64_t seed) {
  if (graph.edges.empty()) throw ValidationError("scene graph has no edges");
  std::vector<double> weights;
  weights.reserve(graph.edges.size());
  for (const Edge& e : graph.edges) weights.push_back(e.weight);

  const int k_eff = std::min<int>(k, static_cast<int>(weights.size()));
  GmmOptions opt;
  opt.seed = seed;
  const Gmm1D gmm = fit_gmm_1d(weights, k_eff, opt);

  std::vector<std::size_t> assigned(weights.size());
  std::vector<int> members(gmm.components(), 0);
  for (std::size_t e = 0; e < weights.size(); ++e) {
    const auto r = gmm.responsibilities(weights[e]);
    assigned[e] = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    ++members[assigned[e]];
  }

  std::vector<bool> keep(weights.size(), true);
  const auto [lo, hi] = std::minmax_element(gmm.means.begin(), gmm.means.end());
  if (*hi - *lo >= 1e-6) {
    std::size_t top = 0;
    bool found = false;
    for (std::size_t c = 0; c < gmm.components(); ++c) {
      if (members[c] == 0) continue;
      if (!found || gmm.means[c] > gmm.means[top]) {
        top = c;
        found = true;
      }
    }
    // Keep the whole upper tail so a wide low component cannot claim an
    // edge heavier than one that survives.
    double threshold = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < weights.size(); ++e) {
      if (assigned[e] == top) threshold = std::min(threshold, weights[e]);
    }
    for (std::size_t e = 0; e < weights.size(); ++e) keep[e] = weights[e] >= threshold;
  }

  FunctionalGroups out;
  DisjointSets sets(graph.nodes.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    if (!keep[e]) continue;
    const Edge& edge = graph.edges[e];
    sets.unite(edge.i, edge.j);
    out.kept_edges.push_back({graph.nodes[edge.i], graph.nodes[edge.j], edge.weight});
  }
  std::vector<int> slot(graph.nodes.size(), -1);
  for (std::size_t v = 0; v < graph.nodes.size(); ++v) {
    const std::size_t root = sets.find(v);
    if (slot[root] < 0) {
      slot[root] = static_cast<int>(out.groups.size());
      out.groups.emplace_back();
    }
    out.groups[static_cast<std::size_t>(slot[root])].push_back(graph.nodes[v]);
  }
  return out;
}

}  // namespace colayout
