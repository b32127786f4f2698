#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aniso {

/// Sites in the plane, one (x, y) row per site.
using SiteMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Scattered observations: one field value per site row.
struct SiteData {
  SiteMatrix sites;
  Eigen::VectorXd values;
};

/// Reduces an angle into [0, pi). Directions a and a + pi describe the same
/// axis, so this picks the canonical representative.
template <typename Scalar>
Scalar canonical_alpha(Scalar alpha) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar r = std::fmod(alpha, pi);
  if (r < Scalar(0)) r += pi;
  if (r >= pi) r = Scalar(0);  // fmod rounding at the seam
  return r;
}

/// Parameters of the geometrically anisotropic covariance model.
///
/// The angle is canonicalized into [0, pi) at construction; the remaining
/// fields are validated and rejected outside their domains.
struct AnisotropyParams {
  double alpha;   ///< principal-axis angle, [0, pi)
  double lambda;  ///< ratio between ellipse semi-axes, (0, 1]; 1 = isotropic
  double theta;   ///< correlation range in grid-cell units, > 0
  double sigma2;  ///< variance, > 0

  AnisotropyParams(double alpha_, double lambda_, double theta_,
                   double sigma2_ = 1.0)
      : alpha(canonical_alpha(alpha_)),
        lambda(lambda_),
        theta(theta_),
        sigma2(sigma2_) {
    if (!std::isfinite(alpha))
      throw std::domain_error("AnisotropyParams: alpha must be finite");
    if (!(lambda > 0.0) || lambda > 1.0)
      throw std::domain_error("AnisotropyParams: lambda must lie in (0, 1]");
    if (!(theta > 0.0) || !std::isfinite(theta))
      throw std::domain_error("AnisotropyParams: theta must be positive");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
      throw std::domain_error("AnisotropyParams: sigma2 must be positive");
  }
};

/// Smoothness of the Matern correlation family.
struct MaternSpec {
  double nu = 1.5;

  explicit MaternSpec(double nu_ = 1.5) : nu(nu_) {
    if (!(nu > 0.0) || !std::isfinite(nu))
      throw std::domain_error("MaternSpec: nu must be positive");
  }
};

/// Space-deforming matrix P(alpha)^T D(lambda) P(alpha) with
/// P the rotation by alpha and D = diag(1, lambda).
///
/// Symmetric by construction; eigenvalues are {1, lambda}. lambda = 1
/// returns the identity exactly so the isotropic case is alpha-invariant.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> anisotropy_matrix(Scalar alpha, Scalar lambda) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  if (!(alpha >= Scalar(0)) || alpha >= pi)
    throw std::domain_error("anisotropy_matrix: alpha must lie in [0, pi)");
  if (!(lambda > Scalar(0)) || lambda > Scalar(1))
    throw std::domain_error("anisotropy_matrix: lambda must lie in (0, 1]");
  if (lambda == Scalar(1)) return Eigen::Matrix<Scalar, 2, 2>::Identity();

  const Scalar c = std::cos(alpha);
  const Scalar s = std::sin(alpha);
  const Scalar off = (c * s) * (Scalar(1) - lambda);
  Eigen::Matrix<Scalar, 2, 2> omega;
  omega << c * c + lambda * s * s, off, off, s * s + lambda * c * c;
  return omega;
}

inline Eigen::Matrix2d anisotropy_matrix(const AnisotropyParams& p) {
  return anisotropy_matrix(p.alpha, p.lambda);
}

/// Deformed lag length sqrt(h^T Omega h); a norm for fixed SPD Omega.
template <typename DerivedH, typename DerivedOmega>
typename DerivedH::Scalar aniso_distance(
    const Eigen::MatrixBase<DerivedH>& h,
    const Eigen::MatrixBase<DerivedOmega>& omega) {
  using Scalar = typename DerivedH::Scalar;
  const Scalar q = h.dot(omega * h);
  return q > Scalar(0) ? std::sqrt(q) : Scalar(0);
}

/// Matern correlation 2^{1-nu}/Gamma(nu) (t/theta)^nu K_nu(t/theta).
/// Exactly 1 at t = 0; dispatches to the half-integer closed form when
/// nu - 1/2 is a nonnegative integer (within 1e-12).
double matern(double t, double theta, double nu);

/// Closed form for nu = m + 1/2: exp(-x) times a degree-m polynomial.
/// x is the scaled distance t/theta.
double matern_half_integer(double x, int m);

/// General route through the modified Bessel function of the second kind,
/// for any nu > 0. Kept separate so the two evaluations can be checked
/// against each other.
double matern_general(double t, double theta, double nu);

/// True when nu = m + 1/2 for a nonnegative integer m (within 1e-12).
bool matern_half_integer_order(double nu, int& m);

/// Distance at which the correlation drops below `cutoff` (default 0.05).
/// For nu = 3/2 this is about 4.744 * theta.
double practical_range(double theta, double nu, double cutoff = 0.05);

/// Covariance sigma^2 phi(sqrt(h^T Omega h); theta) at lag h.
double covariance(const Eigen::Vector2d& h, const AnisotropyParams& params,
                  const MaternSpec& spec);

/// Correlation matrix over a site list: unit diagonal, symmetric, entry
/// (i, j) the Matern correlation at the deformed distance between sites.
/// Throws on duplicate sites, which would make the matrix singular.
Eigen::MatrixXd correlation_matrix(const SiteMatrix& sites,
                                   const AnisotropyParams& params,
                                   const MaternSpec& spec);

/// Cholesky with the retry policy for near-singular kernels: on failure add
/// `jitter` to the diagonal once and retry; throw if that also fails.
/// `jittered`, when given, reports whether the retry was taken.
Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(Eigen::MatrixXd m,
                                                 double jitter,
                                                 bool* jittered = nullptr);

}  // namespace aniso
