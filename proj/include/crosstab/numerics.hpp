#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace crosstab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Regularized incomplete gamma functions P(s, x) and Q(s, x) = 1 - P(s, x).
// Series expansion for x < s + 1, continued fraction otherwise.
double regularized_gamma_p(double s, double x);
double regularized_gamma_q(double s, double x);

// Upper-tail probability P(X > x) for a central chi-squared variable.
double chi2_sf(double x, int df);

// Lower-tail CDF of the central chi-squared distribution.
double chi2_cdf(double x, int df);

// Critical value x* with chi2_sf(x*, df) == alpha_upper, by bisection.
double chi2_critical(double alpha_upper, int df);

// CDF of the noncentral chi-squared distribution with noncentrality lambda,
// as a Poisson(lambda/2)-weighted mixture of central CDFs. The mixture is
// accumulated outward from the Poisson mode until the residual weight mass
// is below 1e-12, so large lambda does not underflow.
double noncentral_chi2_cdf(double x, int df, double lambda);

// log n! and log C(n, k) via log-gamma.
double log_factorial(std::int64_t n);
double log_choose(std::int64_t n, std::int64_t k);

// Thin singular value decomposition A = U diag(s) V^T with k = min(m, n),
// singular values nonincreasing. Signs are canonical: in each column of U
// the entry of largest magnitude is nonnegative (ties broken by lowest row
// index), with the matching column of V flipped in tandem, so repeated runs
// and downstream coordinates are bit-for-bit reproducible.
struct SvdResult {
  Matrix left_vectors;    // m x k
  Vector singular_values; // k, nonincreasing
  Matrix right_vectors;   // n x k
};

SvdResult svd(const Eigen::Ref<const Matrix>& a);

}  // namespace crosstab
