#include "clonelab/cma_es.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "clonelab/errors.hpp"

namespace clonelab {

namespace {

struct CmaState {
  Eigen::VectorXd mean;
  double sigma;
  Eigen::MatrixXd c;
  Eigen::VectorXd ps;
  Eigen::VectorXd pc;
  long gen = 0;
};

CmaState init_state(const Eigen::VectorXd& mean, double sigma, int n) {
  return CmaState{mean, sigma, Eigen::MatrixXd::Identity(n, n),
                  Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0};
}

}  // namespace

CmaResult cma_minimize(const std::function<double(const Eigen::VectorXd&)>& f, int n,
                       const CmaOptions& opt) {
  if (n < 1) throw DomainError("cma_minimize: dimension must be positive");
  if (opt.population < 4 || opt.population % 2 != 0)
    throw DomainError("cma_minimize: population must be even and >= 4");
  const int lam = opt.population;
  const int mu = lam / 2;

  Eigen::VectorXd w(mu);
  for (int i = 0; i < mu; ++i) w[i] = std::log(mu + 0.5) - std::log(double(i + 1));
  w /= w.sum();
  const double mueff = 1.0 / w.squaredNorm();
  const double cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n);
  const double cs = (mueff + 2.0) / (n + mueff + 5.0);
  const double c1 = 2.0 / ((n + 1.3) * (n + 1.3) + mueff);
  const double cmu =
      std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) * (n + 2.0) + mueff));
  const double damps = 1.0 + cs;
  const double chi_n = std::sqrt(double(n)) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  CmaResult result;
  result.best = Eigen::VectorXd::Zero(n);
  if (opt.budget < 1) {
    result.best_value = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  result.best_value = f(result.best);
  result.evaluations = 1;

  CmaState st = init_state(result.best, opt.sigma0, n);
  int stag = 0;

  std::vector<Eigen::VectorXd> xs(lam), zs(lam);
  std::vector<double> fs(lam);
  std::vector<int> order(lam);

  while (result.evaluations + lam <= opt.budget && result.best_value > opt.target) {
    if (!st.c.allFinite()) {
      ++result.restarts;
      st = init_state(result.best,
                      result.restarts % 2 == 1 ? opt.sigma0 / 10.0 : opt.sigma0 * 1.5, n);
      stag = 0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(st.c);
    Eigen::VectorXd d = eig.eigenvalues().cwiseMax(1e-20).cwiseSqrt();
    const Eigen::MatrixXd& b = eig.eigenvectors();

    for (int i = 0; i < lam; ++i) {
      Eigen::VectorXd z(n);
      for (int j = 0; j < n; ++j) z[j] = gauss(rng);
      zs[i] = z;
      xs[i] = st.mean + st.sigma * (b * d.cwiseProduct(z));
      fs[i] = f(xs[i]);
    }
    result.evaluations += lam;

    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a2, int b2) { return fs[a2] < fs[b2]; });

    if (fs[order[0]] < result.best_value * (1.0 - 1e-8)) {
      result.best_value = fs[order[0]];
      result.best = xs[order[0]];
      stag = 0;
    } else {
      ++stag;
    }

    Eigen::VectorXd old_mean = st.mean;
    Eigen::VectorXd zmean = Eigen::VectorXd::Zero(n);
    st.mean.setZero();
    for (int i = 0; i < mu; ++i) {
      st.mean += w[i] * xs[order[i]];
      zmean += w[i] * zs[order[i]];
    }

    st.ps = (1.0 - cs) * st.ps + std::sqrt(cs * (2.0 - cs) * mueff) * (b * zmean);
    double ps_norm = st.ps.norm();
    bool hsig = ps_norm / std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * double(st.gen + 1))) /
                    chi_n <
                1.4 + 2.0 / (n + 1.0);
    st.pc = (1.0 - cc) * st.pc +
            (hsig ? 1.0 : 0.0) * std::sqrt(cc * (2.0 - cc) * mueff) * (st.mean - old_mean) /
                st.sigma;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu; ++i) {
      Eigen::VectorXd y = (xs[order[i]] - old_mean) / st.sigma;
      rank_mu += w[i] * y * y.transpose();
    }
    st.c = (1.0 - c1 - cmu) * st.c +
           c1 * (st.pc * st.pc.transpose() +
                 (hsig ? 0.0 : 1.0) * cc * (2.0 - cc) * st.c) +
           cmu * rank_mu;
    st.sigma *= std::exp((cs / damps) * (ps_norm / chi_n - 1.0));
    ++st.gen;

    result.trace.push_back(result.best_value);

    if (stag >= opt.stagnation) {
      ++result.restarts;
      st = init_state(result.best,
                      result.restarts % 2 == 1 ? opt.sigma0 / 10.0 : opt.sigma0 * 1.5, n);
      stag = 0;
    }
  }
  return result;
}

}  // namespace clonelab
