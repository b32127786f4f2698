#include "aniso/core.hpp"

#include <cmath>

namespace aniso {

bool matern_half_integer_order(double nu, int& m) {
  const double k = nu - 0.5;
  const double r = std::round(k);
  if (r >= 0.0 && std::abs(k - r) <= 1e-12) {
    m = static_cast<int>(r);
    return true;
  }
  return false;
}

double matern_half_integer(double x, int m) {
  if (x == 0.0) return 1.0;
  if (x > 746.0) return 0.0;  // exp underflows; the polynomial cannot rescue it

  // exp(-x) * m!/(2m)! * sum_i (m+i)!/(i!(m-i)!) (2x)^{m-i}
  double pref = 1.0;
  for (int j = m + 1; j <= 2 * m; ++j) pref /= static_cast<double>(j);

  double coef = 1.0;  // (m+i)!/(i!(m-i)!) built up iteratively
  double sum = coef;  // Horner in (2x), highest power first
  const double two_x = 2.0 * x;
  for (int i = 1; i <= m; ++i) {
    coef *= static_cast<double>((m + i) * (m - i + 1)) / static_cast<double>(i);
    sum = sum * two_x + coef;
  }
  return pref * sum * std::exp(-x);
}

double matern_general(double t, double theta, double nu) {
  if (!(theta > 0.0)) throw std::domain_error("matern: theta must be positive");
  if (!(nu > 0.0)) throw std::domain_error("matern: nu must be positive");
  if (t < 0.0) throw std::domain_error("matern: t must be nonnegative");
  const double x = t / theta;
  if (x == 0.0) return 1.0;
  if (x <= 1e-30) return 1.0;  // below any representable departure from 1
  if (x > 746.0) return 0.0;
  return std::pow(2.0, 1.0 - nu) / std::tgamma(nu) * std::pow(x, nu) *
         std::cyl_bessel_k(nu, x);
}

double matern(double t, double theta, double nu) {
  if (!(theta > 0.0)) throw std::domain_error("matern: theta must be positive");
  if (!(nu > 0.0)) throw std::domain_error("matern: nu must be positive");
  if (t < 0.0) throw std::domain_error("matern: t must be nonnegative");
  if (t == 0.0) return 1.0;
  int m = 0;
  if (matern_half_integer_order(nu, m)) return matern_half_integer(t / theta, m);
  return matern_general(t, theta, nu);
}

double practical_range(double theta, double nu, double cutoff) {
  if (!(cutoff > 0.0) || cutoff >= 1.0)
    throw std::domain_error("practical_range: cutoff must lie in (0, 1)");
  double lo = 0.0;
  double hi = theta;
  while (matern(hi, theta, nu) > cutoff) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (matern(mid, theta, nu) > cutoff ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double covariance(const Eigen::Vector2d& h, const AnisotropyParams& params,
                  const MaternSpec& spec) {
  const Eigen::Matrix2d omega = anisotropy_matrix(params);
  return params.sigma2 * matern(aniso_distance(h, omega), params.theta, spec.nu);
}

Eigen::MatrixXd correlation_matrix(const SiteMatrix& sites,
                                   const AnisotropyParams& params,
                                   const MaternSpec& spec) {
  const Eigen::Index n = sites.rows();
  if (n < 1) throw std::invalid_argument("correlation_matrix: no sites");
  const Eigen::Matrix2d omega = anisotropy_matrix(params);

  Eigen::MatrixXd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const Eigen::Vector2d h = sites.row(i) - sites.row(j);
      const double t = aniso_distance(h, omega);
      if (t == 0.0)
        throw std::invalid_argument("correlation_matrix: duplicate sites");
      const double c = matern(t, params.theta, spec.nu);
      r(i, j) = c;
      r(j, i) = c;
    }
  }
  return r;
}

Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(Eigen::MatrixXd m,
                                                 double jitter,
                                                 bool* jittered) {
  if (jittered) *jittered = false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) return llt;
  m.diagonal().array() += jitter;
  if (jittered) *jittered = true;
  llt.compute(m);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("cholesky_with_jitter: factorization failed after jitter");
  return llt;
}

}  // namespace aniso
