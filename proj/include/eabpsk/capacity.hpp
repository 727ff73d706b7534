#pragma once

// Information-theoretic figures of merit: thermal entropy g(n), reference
// capacities (Holevo, homodyne, entanglement-assisted bound), mutual
// information of the binary channel induced by a threshold receiver, and the
// capacity of that channel maximised over prior and threshold.
//
// All logarithms are base 2. Capacities are per channel use of the whole
// M-mode block.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "eabpsk/detection.hpp"
#include "eabpsk/errors.hpp"
#include "eabpsk/parallel.hpp"
#include "eabpsk/receivers.hpp"

namespace eabpsk {

// -x log2 x with the 0 log 0 = 0 convention.
inline double entropy_term(double x) {
  if (x <= 0.0) return 0.0;
  return -x * std::log2(x);
}

// Binary entropy H2(p) in bits.
inline double binary_entropy(double p) { return entropy_term(p) + entropy_term(1.0 - p); }

/// Entropy of a thermal state with mean photon number n:
/// (n+1) log2(n+1) - n log2(n), with g(0) = 0.
inline double g_thermal(double n) {
  if (!(n >= 0.0)) throw DomainError("g_thermal: mean photon number must be >= 0");
  if (n == 0.0) return 0.0;
  return ((n + 1.0) * std::log1p(n) - n * std::log(n)) / std::numbers::ln2;
}

/// g(eta N_s + N_B) - g(N_B)
inline double holevo_capacity(const ChannelParams& p) {
  validate(p);
  return g_thermal(p.n_return()) - g_thermal(p.n_b);
}

/// 1/2 log2(1 + 4 eta N_s / (2 N_B + 1))
inline double homodyne_capacity(const ChannelParams& p) {
  validate(p);
  return 0.5 * std::log1p(4.0 * p.eta * p.n_s / (2.0 * p.n_b + 1.0)) / std::numbers::ln2;
}

struct SymplecticPair {
  double nu_plus = 1.0;
  double nu_minus = 1.0;
};

// Symplectic eigenvalues of the return-idler covariance.
inline SymplecticPair return_idler_symplectic_eigenvalues(const ChannelParams& p) {
  validate(p);
  const double a = 2.0 * p.n_s + 1.0;
  const double b = 2.0 * p.n_return() + 1.0;
  const double c_eta = 2.0 * p.cross_correlation();
  const double disc = (a + b) * (a + b) - 4.0 * c_eta * c_eta;
  if (disc < 0.0) {
    throw DomainError("ultimate_capacity: (a + b)^2 < 4 C_eta^2, covariance is unphysical");
  }
  const double root = std::sqrt(disc);
  return {0.5 * (root + (b - a)), 0.5 * (root - (b - a))};
}

/// Entanglement-assisted classical capacity bound
///   g(N_s) + g(N_R) - g((nu+ - 1)/2) - g((nu- - 1)/2).
inline double ultimate_capacity(const ChannelParams& p) {
  const SymplecticPair nu = return_idler_symplectic_eigenvalues(p);
  // nu >= 1 physically; clip round-off below the vacuum value.
  const auto occupation = [](double v) { return std::max(0.0, 0.5 * (v - 1.0)); };
  return g_thermal(p.n_s) + g_thermal(p.n_return()) - g_thermal(occupation(nu.nu_plus)) -
         g_thermal(occupation(nu.nu_minus));
}

// Binary input X (prior p0 of symbol 0) and binary decision Y.
struct BinaryChannel {
  double p0 = 0.5;
  double e0 = 0.0;  // P(Y = 1 | X = 0)
  double e1 = 0.0;  // P(Y = 0 | X = 1)
};

inline void validate(const BinaryChannel& ch) {
  detail::require(ch.p0 >= 0.0 && ch.p0 <= 1.0, "p0", "must lie in [0, 1]");
  detail::require(ch.e0 >= 0.0 && ch.e0 <= 1.0, "e0", "must lie in [0, 1]");
  detail::require(ch.e1 >= 0.0 && ch.e1 <= 1.0, "e1", "must lie in [0, 1]");
}

/// I(X;Y) = H(Y) - H(Y|X) in bits, built from the transition probabilities,
/// the output marginals and the conditional entropies.
inline double binary_mutual_information(const BinaryChannel& ch) {
  validate(ch);
  const double p1 = 1.0 - ch.p0;
  const double y0_given_x0 = 1.0 - ch.e0;
  const double y1_given_x0 = ch.e0;
  const double y0_given_x1 = ch.e1;
  const double y1_given_x1 = 1.0 - ch.e1;
  const double y0 = ch.p0 * y0_given_x0 + p1 * y0_given_x1;
  const double y1 = ch.p0 * y1_given_x0 + p1 * y1_given_x1;
  const double h_given_x0 = entropy_term(y0_given_x0) + entropy_term(y1_given_x0);
  const double h_given_x1 = entropy_term(y0_given_x1) + entropy_term(y1_given_x1);
  const double h_y_given_x = ch.p0 * h_given_x0 + p1 * h_given_x1;
  const double h_y = entropy_term(y0) + entropy_term(y1);
  return std::max(0.0, h_y - h_y_given_x);
}

inline BinaryChannel induced_channel(double p0, const ConditionalErrors& e) {
  return {p0, e.given_zero, e.given_pi};
}

struct CapacityResult {
  double capacity = 0.0;
  double best_p0 = 0.5;
  double best_threshold = 0.0;
  DetectionModel model;
};

// Search settings for ea_capacity.
struct CapacitySearch {
  double p0_lo = 0.02;
  double p0_hi = 0.98;
  int p0_seeds = 33;
  int threshold_points = 257;
  double window_stds = 8.0;     // half-width of the threshold grid, in total stds
  double p0_tolerance = 1e-7;
};

namespace detail {

inline constexpr double kInvPhi = 0.6180339887498949;  // 1 / golden ratio

// Maximises f on [lo, hi] by golden-section search; returns (argmax, max).
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct ThresholdOptimum {
  double mi = 0.0;
  double threshold = 0.0;
};

// Best threshold for a fixed prior: grid around the balance root, then local
// refinement (golden section for a continuous threshold, an exhaustive
// integer scan for counts).
inline ThresholdOptimum best_threshold_for_prior(double p0, const DecisionStatistics& ds,
                                                 const CapacitySearch& search) {
  const Priors priors = Priors::from_p0(p0);
  const Bracket bracket = ds.bracket();
  const double start = balance_threshold(priors, ds).threshold;
  double half_width = search.window_stds *
                      std::max(ds.total_std(Phase::zero), ds.total_std(Phase::pi));
  if (!(half_width > 0.0)) half_width = 1.0;
  const double lo = std::max(bracket.lo, start - half_width);
  const double hi = std::min(bracket.hi, start + half_width);
  auto mi_at = [&](double t) {
    return binary_mutual_information(induced_channel(p0, ds.errors(t)));
  };

  ThresholdOptimum best{-1.0, start};
  auto consider = [&](double t) {
    const double v = mi_at(t);
    if (v > best.mi) best = {v, t};
    return v;
  };

  if (ds.counting()) {
    const Count k_lo = static_cast<Count>(std::floor(lo));
    const Count k_hi = static_cast<Count>(std::ceil(hi));
    const Count span = k_hi - k_lo;
    if (span < search.threshold_points) {
      for (Count k = k_lo; k <= k_hi; ++k) consider(static_cast<double>(k));
      return best;
    }
    const int n = search.threshold_points;
    Count best_k = k_lo;
    double best_v = -1.0;
    std::vector<Count> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      grid[static_cast<std::size_t>(i)] = k_lo + (span * i) / (n - 1);
    }
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double v = consider(static_cast<double>(grid[i]));
      if (v > best_v) {
        best_v = v;
        best_k = grid[i];
        best_i = i;
      }
    }
    const Count from = best_i == 0 ? best_k : grid[best_i - 1];
    const Count to = best_i + 1 == grid.size() ? best_k : grid[best_i + 1];
    for (Count k = from; k <= to; ++k) consider(static_cast<double>(k));
    return best;
  }

  const int n = search.threshold_points;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  int best_i = 0;
  double best_v = -1.0;
  for (int i = 0; i < n; ++i) {
    const double v = consider(lo + step * i);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  if (step > 0.0) {
    const double a = lo + step * std::max(0, best_i - 1);
    const double b = lo + step * std::min(n - 1, best_i + 1);
    const auto [t, v] = golden_max(mi_at, a, b, 1e-10 * std::max(1.0, std::fabs(b - a)));
    if (v > best.mi) best = {v, t};
  }
  return best;
}

}  // namespace detail

/// Capacity of the binary channel induced by threshold detection, maximised
/// over the prior p0 and the threshold.
///
/// Outer search: 33-point grid on p0 in [0.02, 0.98], then golden section
/// between the neighbours of the best grid point. Inner search: for each p0,
/// a 257-point threshold grid of half-width 8 total stds centred on the
/// balance root, refined locally (the MI-optimal threshold is generally not
/// the PE-optimal one). Deterministic for fixed settings. Exact ties on the
/// prior are broken towards 1/2.
inline CapacityResult ea_capacity(const DetectionModel& model, const ChannelParams& p,
                                  const CapacitySearch& search = {}) {
  const DecisionStatistics ds(model, p);
  CapacityResult best{-1.0, 0.5, 0.0, model};
  auto consider = [&](double p0) {
    const detail::ThresholdOptimum opt = detail::best_threshold_for_prior(p0, ds, search);
    const bool closer_to_half = std::fabs(p0 - 0.5) < std::fabs(best.best_p0 - 0.5);
    if (opt.mi > best.capacity || (opt.mi == best.capacity && closer_to_half)) {
      best.capacity = opt.mi;
      best.best_p0 = p0;
      best.best_threshold = opt.threshold;
    }
    return opt.mi;
  };

  const int n = search.p0_seeds;
  const double step = (search.p0_hi - search.p0_lo) / static_cast<double>(n - 1);
  int best_i = 0;
  double best_v = -1.0;
  for (int i = 0; i < n; ++i) {
    const double v = consider(search.p0_lo + step * i);
    if (v > best_v || (v == best_v && std::fabs(search.p0_lo + step * i - 0.5) <
                                          std::fabs(search.p0_lo + step * best_i - 0.5))) {
      best_v = v;
      best_i = i;
    }
  }
  const double a = search.p0_lo + step * std::max(0, best_i - 1);
  const double b = search.p0_lo + step * std::min(n - 1, best_i + 1);
  detail::golden_max(consider, a, b, search.p0_tolerance);
  best.capacity = std::max(0.0, best.capacity);
  return best;
}

/// Per-mode information rate of the symmetric binary channel with error
/// probability pe: (1 + pe log2 pe + (1-pe) log2(1-pe)) / M.
inline double information_rate(double pe, Count modes) {
  detail::require(pe >= 0.0 && pe <= 1.0, "pe", "must lie in [0, 1]");
  detail::require(modes >= 1, "modes", "must be >= 1");
  return (1.0 - binary_entropy(pe)) / static_cast<double>(modes);
}

// Speed of light as used for the C-band mode count (not the CODATA value).
inline constexpr double kSpeedOfLight = 3e8;

struct ModeCount {
  double bandwidth_hz = 0.0;
  double modes = 0.0;
};

/// Phase-matching bandwidth B = c d(lambda) / lambda^2 and mode count B T_m.
inline ModeCount mode_count(double center_wavelength_m, double bandwidth_wavelength_m,
                            double measurement_interval_s) {
  if (!(center_wavelength_m > 0.0) || !(bandwidth_wavelength_m > 0.0) ||
      !(measurement_interval_s > 0.0)) {
    throw DomainError("mode_count: wavelength, bandwidth and interval must be positive");
  }
  const double b = kSpeedOfLight / (center_wavelength_m * center_wavelength_m) *
                   bandwidth_wavelength_m;
  return {b, b * measurement_interval_s};
}

struct GaussVsNbRow {
  double n_s = 0.0;
  Count modes = 1;
  double c_gauss = 0.0;
  double c_nb = 0.0;

  double delta() const { return c_gauss - c_nb; }
};

/// Capacity overestimate of the OPA idler-port receiver caused by replacing
/// negative-binomial counting with its Gaussian approximation, per N_s.
inline std::vector<GaussVsNbRow> gaussian_vs_nb_capacity_error(const ChannelParams& p,
                                                               const std::vector<double>& ns_grid,
                                                               unsigned jobs = 1) {
  detail::require(!ns_grid.empty(), "ns", "grid must be nonempty");
  std::vector<GaussVsNbRow> rows(ns_grid.size());
  parallel_for(rows.size(), jobs, [&](std::size_t i) {
    ChannelParams point = p;
    point.n_s = ns_grid[i];
    const double cg =
        ea_capacity({ModelKind::gaussian_approx, Receiver::opa_idler}, point).capacity;
    const double cn =
        ea_capacity({ModelKind::negative_binomial, Receiver::opa_idler}, point).capacity;
    rows[i] = {point.n_s, point.modes, cg, cn};
  });
  return rows;
}

}  // namespace eabpsk
