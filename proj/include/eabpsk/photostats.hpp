#pragma once

// Photodetection probability models: negative-binomial photon counting over
// M thermal modes and its Gaussian approximation.

#include <cmath>
#include <cstdint>
#include <limits>

#include "eabpsk/errors.hpp"
#include "eabpsk/special_functions.hpp"

namespace eabpsk {

using Count = std::int64_t;

// Total photon count over `modes` independent thermal modes with
// `mean_per_mode` photons each.
struct NegBinParams {
  Count modes = 1;
  double mean_per_mode = 0.0;
};

// Mean and standard deviation of a total photocount (or photocurrent).
struct GaussianParams {
  double mean = 0.0;
  double std = 1.0;
};

inline void validate(const NegBinParams& p) {
  detail::require(p.modes >= 1, "modes", "must be >= 1");
  detail::require(std::isfinite(p.mean_per_mode) && p.mean_per_mode >= 0.0, "mean_per_mode",
                  "must be finite and >= 0");
}

inline void validate(const GaussianParams& g) {
  detail::require(std::isfinite(g.mean), "mean", "must be finite");
  detail::require(std::isfinite(g.std) && g.std >= 0.0, "std", "must be finite and >= 0");
}

namespace detail {

// Direct summation is used up to this count; the incomplete-beta identity above.
inline constexpr Count kNbSummationLimit = 64;

inline double log_binomial_nb(Count n, Count modes) {
  // log C(n + M - 1, n)
  if (n == 0) return 0.0;
  if (n <= kNbSummationLimit) {
    double acc = 0.0;
    const double m1 = static_cast<double>(modes - 1);
    for (Count i = 1; i <= n; ++i) {
      acc += std::log1p(m1 / static_cast<double>(i));
    }
    return acc;
  }
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(modes);
  return log_gamma(nd + md) - log_gamma(nd + 1.0) - log_gamma(md);
}

// Requires mean_per_mode > 0.
inline double nb_log_pmf(Count n, const NegBinParams& p) {
  const double nbar = p.mean_per_mode;
  const double log1p_nbar = std::log1p(nbar);
  return log_binomial_nb(n, p.modes) + static_cast<double>(n) * (std::log(nbar) - log1p_nbar) -
         static_cast<double>(p.modes) * log1p_nbar;
}

inline double nb_cdf_by_summation(Count n, const NegBinParams& p) {
  double max_log = -std::numeric_limits<double>::infinity();
  for (Count k = 0; k <= n; ++k) max_log = std::fmax(max_log, nb_log_pmf(k, p));
  if (!std::isfinite(max_log)) return 0.0;
  double acc = 0.0;
  for (Count k = 0; k <= n; ++k) acc += std::exp(nb_log_pmf(k, p) - max_log);
  return std::fmin(1.0, acc * std::exp(max_log));
}

inline double success_probability(const NegBinParams& p) { return 1.0 / (1.0 + p.mean_per_mode); }

}  // namespace detail

/// P(N = n) for the negative-binomial count
///   C(n+M-1, n) (Nbar/(1+Nbar))^n (1/(1+Nbar))^M,
/// evaluated in log space. Nbar = 0 is a point mass at zero.
inline double nb_pmf(Count n, const NegBinParams& p) {
  validate(p);
  if (n < 0) throw InvalidParameter("n", "must be >= 0");
  if (p.mean_per_mode == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(detail::nb_log_pmf(n, p));
}

/// P(N <= n). Summed directly for n <= 64, otherwise I_q(M, n+1) with
/// q = 1/(1+Nbar).
inline double nb_cdf(Count n, const NegBinParams& p) {
  validate(p);
  if (n < 0) throw InvalidParameter("n", "must be >= 0");
  if (p.mean_per_mode == 0.0) return 1.0;
  if (n <= detail::kNbSummationLimit) return detail::nb_cdf_by_summation(n, p);
  return reg_inc_beta(detail::success_probability(p), static_cast<double>(p.modes),
                      static_cast<double>(n) + 1.0);
}

// P(N > n), computed without subtracting from one in the upper tail.
inline double nb_sf(Count n, const NegBinParams& p) {
  validate(p);
  if (n < 0) throw InvalidParameter("n", "must be >= 0");
  if (p.mean_per_mode == 0.0) return 0.0;
  if (n <= detail::kNbSummationLimit) return 1.0 - detail::nb_cdf_by_summation(n, p);
  return reg_inc_beta_complement(detail::success_probability(p), static_cast<double>(p.modes),
                                 static_cast<double>(n) + 1.0);
}

/// Phi((x - mean) / std). A zero std is a step at the mean (0, 1/2, 1).
inline double gaussian_cdf(double x, const GaussianParams& g) {
  validate(g);
  if (g.std == 0.0) return x < g.mean ? 0.0 : (x == g.mean ? 0.5 : 1.0);
  return std_normal_cdf((x - g.mean) / g.std);
}

inline double gaussian_sf(double x, const GaussianParams& g) {
  validate(g);
  if (g.std == 0.0) return x < g.mean ? 1.0 : (x == g.mean ? 0.5 : 0.0);
  return std_normal_sf((x - g.mean) / g.std);
}

}  // namespace eabpsk
