#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "colayout/optimize.hpp"

namespace colayout {

CmaResult cma_minimize(const ObjectiveFn& f, std::span<const double> x0, const CmaConfig& config) {
  using Eigen::MatrixXd;
  using Eigen::VectorXd;

  const int n = static_cast<int>(x0.size());
  if (n < 1) throw std::invalid_argument("CMA-ES: dimension must be >= 1");
  if (!(config.sigma0 > 0.0)) throw std::invalid_argument("CMA-ES: sigma0 must be > 0");

  const int lambda0 = config.lambda > 0 ? config.lambda
                                        : 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
  if (lambda0 < 2 || config.mu < 0 || config.mu > lambda0) {
    throw std::invalid_argument("CMA-ES: need lambda >= 2 and 0 <= mu <= lambda");
  }
  if (config.restarts < 0) throw std::invalid_argument("CMA-ES: restarts must be >= 0");

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  CmaResult res;
  auto eval = [&](const VectorXd& v) {
    const double fv = f(std::span<const double>(v.data(), static_cast<std::size_t>(n)));
    ++res.evals;
    return std::isfinite(fv) ? fv : std::numeric_limits<double>::infinity();
  };

  res.x.assign(x0.begin(), x0.end());
  res.f = eval(Eigen::Map<const VectorXd>(x0.data(), n));
  res.stop_reason = "max_evals";

  // One run from x0; returns false once the budget is exhausted.
  auto run = [&](int lambda, int mu) {
    VectorXd weights(mu);
    for (int i = 0; i < mu; ++i) weights(i) = std::log(mu + 0.5) - std::log(i + 1.0);
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();

    const double dn = n;
    const double cc = (4.0 + mueff / dn) / (dn + 4.0 + 2.0 * mueff / dn);
    const double cs = (mueff + 2.0) / (dn + mueff + 5.0);
    const double c1 = 2.0 / ((dn + 1.3) * (dn + 1.3) + mueff);
    const double cmu = std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((dn + 2.0) * (dn + 2.0) + mueff));
    const double damps = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (dn + 1.0)) - 1.0) + cs;
    const double chi_n = std::sqrt(dn) * (1.0 - 1.0 / (4.0 * dn) + 1.0 / (21.0 * dn * dn));

    VectorXd mean = Eigen::Map<const VectorXd>(x0.data(), n);
    double sigma = config.sigma0;
    MatrixXd cov = MatrixXd::Identity(n, n);
    MatrixXd basis = MatrixXd::Identity(n, n);
    VectorXd scale = VectorXd::Ones(n);  // sqrt of eigenvalues
    VectorXd pc = VectorXd::Zero(n);
    VectorXd ps = VectorXd::Zero(n);

    std::vector<VectorXd> xs(lambda), ys(lambda);
    std::vector<double> fs(lambda);
    std::vector<int> order(lambda);
    long generation = 0;

    while (res.evals + lambda <= config.max_evals) {
      for (int k = 0; k < lambda; ++k) {
        VectorXd z(n);
        for (int i = 0; i < n; ++i) z(i) = gauss(rng);
        ys[k] = basis * scale.cwiseProduct(z);
        xs[k] = mean + sigma * ys[k];
        fs[k] = eval(xs[k]);
      }
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
      if (fs[order[0]] < res.f) {
        res.f = fs[order[0]];
        res.x.assign(xs[order[0]].data(), xs[order[0]].data() + n);
      }

      VectorXd y_w = VectorXd::Zero(n);
      for (int i = 0; i < mu; ++i) y_w += weights(i) * ys[order[i]];
      mean += sigma * y_w;

      // C^{-1/2} y_w via the current eigenbasis.
      const VectorXd inv_sqrt_y = basis * (basis.transpose() * y_w).cwiseQuotient(scale);
      ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * inv_sqrt_y;
      ++generation;
      const double ps_norm = ps.norm();
      const bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * generation)) / chi_n <
                        1.4 + 2.0 / (dn + 1.0);
      pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * y_w;

      MatrixXd rank_mu = MatrixXd::Zero(n, n);
      for (int i = 0; i < mu; ++i) rank_mu += weights(i) * ys[order[i]] * ys[order[i]].transpose();
      const double hsig_fix = hsig ? 0.0 : cc * (2.0 - cc);
      cov = (1.0 - c1 - cmu) * cov + c1 * (pc * pc.transpose() + hsig_fix * cov) + cmu * rank_mu;

      const double asymmetry = (cov - cov.transpose()).cwiseAbs().maxCoeff();
      cov = 0.5 * (cov + cov.transpose());
      sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));

      Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
      const VectorXd evals = eig.eigenvalues();
      const double min_ev = evals.minCoeff();
      const double max_ev = evals.maxCoeff();
      res.trace.push_back({res.evals, res.f, sigma, min_ev, max_ev, asymmetry});

      if (!(min_ev > 0.0) || max_ev / min_ev > config.max_condition) {
        res.stop_reason = "condition";
        return true;
      }
      basis = eig.eigenvectors();
      scale = evals.cwiseSqrt();

      const double spread = fs[order[lambda - 1]] - fs[order[0]];
      if (std::isfinite(spread) && spread < config.tol_f) {
        res.stop_reason = "tol_f";
        return true;
      }
      if (!std::isfinite(sigma) || sigma <= 0.0) {
        res.stop_reason = "sigma";
        return true;
      }
    }
    res.stop_reason = "max_evals";
    return false;
  };

  int lambda = lambda0;
  for (int attempt = 0; attempt <= config.restarts; ++attempt) {
    const int mu = config.mu > 0 && attempt == 0 ? config.mu : lambda / 2;
    if (!run(lambda, mu) || attempt == config.restarts) break;
    lambda *= 2;
    if (res.evals + lambda > config.max_evals) break;
    ++res.restarts;
  }
  return res;
}

}  // namespace colayout
