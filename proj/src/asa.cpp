#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "colayout/optimize.hpp"

namespace colayout {

Bounds Bounds::unbounded(std::size_t n) {
  return {std::vector<double>(n, -std::numeric_limits<double>::infinity()),
          std::vector<double>(n, std::numeric_limits<double>::infinity())};
}

double Bounds::clamp(std::size_t k, double v) const { return std::clamp(v, lower[k], upper[k]); }

std::vector<double> Bounds::clamp(std::span<const double> x) const {
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = clamp(k, out[k]);
  return out;
}

void AsaConfig::validate(std::size_t n) const {
  if (!(t0 > 0.0)) throw std::invalid_argument("ASA: t0 must be > 0");
  if (!(cooling > 0.0 && cooling < 1.0)) throw std::invalid_argument("ASA: cooling must lie in (0, 1)");
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw std::invalid_argument("ASA: target_accept must lie in (0, 1)");
  }
  if (steps_per_temp < 1 || reanneal_interval < 1 || max_evals < 1) {
    throw std::invalid_argument("ASA: step counts must be positive");
  }
  if (!step_sizes.empty() && step_sizes.size() != n) {
    throw std::invalid_argument("ASA: step_sizes must match the dimension");
  }
}

AsaResult asa_minimize(const ObjectiveFn& f, std::span<const double> x0, const Bounds& bounds,
                       const AsaConfig& config) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("ASA: empty search space");
  if (bounds.size() != n) throw std::invalid_argument("ASA: bounds do not match x0");
  config.validate(n);

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  AsaResult res;
  std::vector<double> x = bounds.clamp(x0);
  double fx = f(x);
  res.evals = 1;
  if (!std::isfinite(fx)) throw std::invalid_argument("ASA: objective is not finite at x0");
  res.x = x;
  res.f = fx;

  std::vector<double> steps(n), max_steps(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double range = bounds.upper[k] - bounds.lower[k];
    const bool finite = std::isfinite(range);
    steps[k] = config.step_sizes.empty() ? (finite ? 0.1 * range : 1.0) : config.step_sizes[k];
    max_steps[k] = finite ? range : std::max(steps[k], std::numbers::pi);
  }
  std::vector<long> proposed(n, 0), accepted(n, 0);

  double temperature = config.t0;
  const double t_min = 1e-8 * config.t0;
  while (res.evals < config.max_evals && temperature >= t_min) {
    long level_props = 0;
    long level_acc = 0;
    for (int sweep = 0; sweep < config.steps_per_temp && res.evals < config.max_evals; ++sweep) {
      for (std::size_t k = 0; k < n && res.evals < config.max_evals; ++k) {
        std::vector<double> y = x;
        y[k] = bounds.clamp(k, y[k] + (2.0 * unit(rng) - 1.0) * steps[k]);
        const double fy = f(y);
        ++res.evals;
        ++res.proposals;
        ++proposed[k];
        ++level_props;

        const double delta = fy - fx;
        bool accept = false;
        if (std::isfinite(fy)) {
          if (delta <= 0.0) {
            accept = true;
            ++res.downhill_proposals;
          } else {
            accept = unit(rng) < std::exp(-delta / temperature);
          }
        }
        if (std::isfinite(fy) && delta <= 0.0 && !accept) ++res.downhill_rejected;
        if (accept) {
          x = std::move(y);
          fx = fy;
          ++accepted[k];
          ++res.accepted;
          ++level_acc;
          if (fx < res.f) {
            res.f = fx;
            res.x = x;
          }
        }

        if (res.evals % config.reanneal_interval == 0) {
          for (std::size_t j = 0; j < n; ++j) {
            if (proposed[j] == 0) continue;
            const double rate = static_cast<double>(accepted[j]) / static_cast<double>(proposed[j]);
            steps[j] *= std::clamp(rate / config.target_accept, 0.5, 2.0);
            steps[j] = std::clamp(steps[j], 1e-12, max_steps[j]);
            proposed[j] = 0;
            accepted[j] = 0;
          }
        }
      }
    }
    res.trace.push_back({res.evals, temperature, fx, res.f,
                         level_props ? static_cast<double>(level_acc) / level_props : 0.0});
    temperature *= config.cooling;
  }
  res.final_steps = steps;
  return res;
}

}  // namespace colayout
