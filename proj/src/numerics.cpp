#include "crosstab/numerics.hpp"

#include <cmath>
#include <limits>

#include "crosstab/errors.hpp"

namespace crosstab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();

// Lower regularized gamma by power series; valid for x < s + 1.
double gamma_p_series(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  double a = s;
  for (int n = 0; n < 10000; ++n) {
    a += 1.0;
    term *= x / a;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  const double log_prefix = s * std::log(x) - x - std::lgamma(s);
  return sum * std::exp(log_prefix);
}

// Upper regularized gamma by modified Lentz continued fraction; x >= s + 1.
double gamma_q_cf(double s, double x) {
  double b = x + 1.0 - s;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  const double log_prefix = s * std::log(x) - x - std::lgamma(s);
  return h * std::exp(log_prefix);
}

}  // namespace

double regularized_gamma_p(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || !std::isfinite(s) || !std::isfinite(x)) {
    raise(errc::invalid_domain, "regularized_gamma_p requires s > 0 and x >= 0");
  }
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return gamma_p_series(s, x);
  return 1.0 - gamma_q_cf(s, x);
}

double regularized_gamma_q(double s, double x) {
  if (!(s > 0.0) || !(x >= 0.0) || !std::isfinite(s) || !std::isfinite(x)) {
    raise(errc::invalid_domain, "regularized_gamma_q requires s > 0 and x >= 0");
  }
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
  return gamma_q_cf(s, x);
}

double chi2_sf(double x, int df) {
  if (df < 1) raise(errc::invalid_domain, "chi2_sf requires df >= 1");
  if (!(x >= 0.0) || !std::isfinite(x)) {
    raise(errc::invalid_domain, "chi2_sf requires finite x >= 0");
  }
  return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double chi2_cdf(double x, int df) {
  if (df < 1) raise(errc::invalid_domain, "chi2_cdf requires df >= 1");
  if (!(x >= 0.0) || !std::isfinite(x)) {
    raise(errc::invalid_domain, "chi2_cdf requires finite x >= 0");
  }
  return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi2_critical(double alpha_upper, int df) {
  if (df < 1) raise(errc::invalid_domain, "chi2_critical requires df >= 1");
  if (!(alpha_upper > 0.0) || !(alpha_upper < 1.0)) {
    raise(errc::invalid_domain, "chi2_critical requires 0 < alpha < 1");
  }
  double lo = 0.0;
  double hi = df + 10.0 * std::sqrt(2.0 * df) + 10.0;
  while (chi2_sf(hi, df) > alpha_upper) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_sf(mid, df) > alpha_upper) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

double noncentral_chi2_cdf(double x, int df, double lambda) {
  if (df < 1) raise(errc::invalid_domain, "noncentral_chi2_cdf requires df >= 1");
  if (!(x >= 0.0) || !(lambda >= 0.0) || !std::isfinite(x) || !std::isfinite(lambda)) {
    raise(errc::invalid_domain, "noncentral_chi2_cdf requires x >= 0 and lambda >= 0");
  }
  if (lambda == 0.0) return chi2_cdf(x, df);
  if (x == 0.0) return 0.0;

  const double half = 0.5 * lambda;
  const auto central = [&](std::int64_t k) {
    return regularized_gamma_p(0.5 * df + static_cast<double>(k), 0.5 * x);
  };

  // Poisson(half) weights, walked outward from the mode.
  const std::int64_t mode = static_cast<std::int64_t>(half);
  const double log_w_mode =
      mode == 0 ? -half : -half + mode * std::log(half) - log_factorial(mode);
  double acc = std::exp(log_w_mode) * central(mode);
  double mass = std::exp(log_w_mode);

  double w_up = std::exp(log_w_mode);
  double w_down = std::exp(log_w_mode);
  std::int64_t k_up = mode;
  std::int64_t k_down = mode;
  const std::int64_t max_terms = 200000;
  for (std::int64_t step = 0; step < max_terms; ++step) {
    if (1.0 - mass < 1e-12) break;
    bool advanced = false;
    if (w_up > 0.0) {
      ++k_up;
      w_up *= half / static_cast<double>(k_up);
      if (w_up > 0.0) {
        acc += w_up * central(k_up);
        mass += w_up;
        advanced = true;
      }
    }
    if (k_down > 0 && w_down > 0.0) {
      w_down *= static_cast<double>(k_down) / half;
      --k_down;
      if (w_down > 0.0) {
        acc += w_down * central(k_down);
        mass += w_down;
        advanced = true;
      }
    }
    if (!advanced) break;  // both tails underflowed; remaining mass is negligible
  }
  return std::min(acc, 1.0);
}

double log_factorial(std::int64_t n) {
  if (n < 0) raise(errc::invalid_domain, "log_factorial requires n >= 0");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || n < 0 || k > n) {
    raise(errc::invalid_domain, "log_choose requires 0 <= k <= n");
  }
  if (k == 0 || k == n) return 0.0;
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

SvdResult svd(const Eigen::Ref<const Matrix>& a) {
  if (!a.allFinite()) raise(errc::non_finite_input, "svd input has non-finite entries");
  Eigen::JacobiSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult result{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  for (Index j = 0; j < result.left_vectors.cols(); ++j) {
    Index pivot = 0;
    double best = -1.0;
    for (Index i = 0; i < result.left_vectors.rows(); ++i) {
      const double mag = std::abs(result.left_vectors(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (result.left_vectors(pivot, j) < 0.0) {
      result.left_vectors.col(j) = -result.left_vectors.col(j);
      result.right_vectors.col(j) = -result.right_vectors.col(j);
    }
  }
  return result;
}

}  // namespace crosstab
