#pragma once

// Threshold detection for BPSK symbol discrimination. H0 is theta = 0 (the
// larger mean), H1 is theta = pi. Decide H0 iff the total count or
// photocurrent n satisfies n >= N_th; ties therefore go to H0, and
//   PE = p0 P(n < N_th | 0) + p1 [1 - P(n < N_th | pi)].

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "eabpsk/errors.hpp"
#include "eabpsk/parallel.hpp"
#include "eabpsk/photostats.hpp"
#include "eabpsk/receivers.hpp"

namespace eabpsk {

struct Priors {
  double p0 = 0.5;
  double p1 = 0.5;

  static Priors from_p0(double p0) { return {p0, 1.0 - p0}; }
  static Priors equal() { return {0.5, 0.5}; }
  static Priors unequal() { return {0.45, 0.55}; }
};

inline void validate(const Priors& pr) {
  detail::require(pr.p0 > 0.0 && pr.p0 < 1.0, "p0", "must lie in (0, 1)");
  detail::require(pr.p1 > 0.0 && pr.p1 < 1.0, "p1", "must lie in (0, 1)");
  detail::require(std::fabs(pr.p0 + pr.p1 - 1.0) <= 1e-12, "p1", "p0 + p1 must equal 1");
}

enum class Receiver { opa_return, opa_idler, opc, oh };
enum class ModelKind { negative_binomial, gaussian_approx };

struct DetectionModel {
  ModelKind kind = ModelKind::gaussian_approx;
  Receiver receiver = Receiver::opa_idler;

  friend bool operator==(const DetectionModel&, const DetectionModel&) = default;
};

inline bool is_photon_counting(Receiver r) {
  return r == Receiver::opa_return || r == Receiver::opa_idler;
}

inline void validate(const DetectionModel& m) {
  if (m.kind == ModelKind::negative_binomial && !is_photon_counting(m.receiver)) {
    throw InvalidParameter("model",
                           "negative-binomial counting applies only to the OPA receiver ports");
  }
}

inline std::string to_string(Receiver r) {
  switch (r) {
    case Receiver::opa_return: return "opa-return";
    case Receiver::opa_idler: return "opa-idler";
    case Receiver::opc: return "opc";
    case Receiver::oh: return "oh";
  }
  return "?";
}

inline std::string to_string(ModelKind k) {
  return k == ModelKind::negative_binomial ? "nb" : "gauss";
}

// Per-mode statistics under each hypothesis.
struct HypothesisStats {
  ModeStats zero;
  ModeStats pi;
};

inline HypothesisStats hypothesis_stats(Receiver r, const ChannelParams& p) {
  switch (r) {
    case Receiver::opa_return:
      return {opa_mode_stats(p, OpaPort::return_port, Phase::zero),
              opa_mode_stats(p, OpaPort::return_port, Phase::pi)};
    case Receiver::opa_idler:
      return {opa_mode_stats(p, OpaPort::idler_port, Phase::zero),
              opa_mode_stats(p, OpaPort::idler_port, Phase::pi)};
    case Receiver::opc:
      return {opc_mode_stats(p, Phase::zero), opc_mode_stats(p, Phase::pi)};
    case Receiver::oh:
      return {oh_mode_stats(p, Phase::zero), oh_mode_stats(p, Phase::pi)};
  }
  throw InvalidParameter("receiver", "unknown receiver");
}

// Conditional error probabilities of the threshold rule.
struct ConditionalErrors {
  double given_zero = 0.0;  // P(decide H1 | theta = 0) = P(n < N_th | 0)
  double given_pi = 0.0;    // P(decide H0 | theta = pi) = P(n >= N_th | pi)
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

// Total-count (or total-photocurrent) distributions of both hypotheses for
// one (model, params) pair, with M modes aggregated.
class DecisionStatistics {
 public:
  DecisionStatistics(const DetectionModel& model, const ChannelParams& p)
      : model_(model), modes_(p.modes) {
    validate(model);
    validate(p);
    stats_ = hypothesis_stats(model.receiver, p);
  }

  const DetectionModel& model() const { return model_; }
  Count modes() const { return modes_; }
  const HypothesisStats& per_mode() const { return stats_; }
  bool counting() const { return model_.kind == ModelKind::negative_binomial; }

  const ModeStats& stats(Phase theta) const {
    return theta == Phase::zero ? stats_.zero : stats_.pi;
  }
  double total_mean(Phase theta) const { return static_cast<double>(modes_) * stats(theta).mean; }
  double total_std(Phase theta) const {
    return std::sqrt(static_cast<double>(modes_)) * stats(theta).std;
  }

  NegBinParams negbin(Phase theta) const { return {modes_, stats(theta).mean}; }
  GaussianParams gaussian(Phase theta) const { return {total_mean(theta), total_std(theta)}; }

  // P(n < threshold | theta)
  double below(Phase theta, double threshold) const {
    if (counting()) {
      if (threshold <= 0.0) return 0.0;
      return nb_cdf(last_count_below(threshold), negbin(theta));
    }
    return gaussian_cdf(threshold, gaussian(theta));
  }

  // P(n >= threshold | theta)
  double at_or_above(Phase theta, double threshold) const {
    if (counting()) {
      if (threshold <= 0.0) return 1.0;
      return nb_sf(last_count_below(threshold), negbin(theta));
    }
    return gaussian_sf(threshold, gaussian(theta));
  }

  ConditionalErrors errors(double threshold) const {
    return {below(Phase::zero, threshold), at_or_above(Phase::pi, threshold)};
  }

  // Search interval for thresholds. Gaussian: [mean_pi - 10 std_pi,
  // mean_0 + 10 std_0]. Counting: [0, M N0 + 20 sqrt(M N0 (N0+1)) + 50],
  // wide enough that the geometric tail beyond it is negligible.
  Bracket bracket() const {
    if (counting()) {
      const double m = static_cast<double>(modes_);
      const double n0 = stats_.zero.mean;
      return {0.0, std::ceil(m * n0 + 20.0 * std::sqrt(m * n0 * (n0 + 1.0)) + 50.0)};
    }
    Bracket b{total_mean(Phase::pi) - 10.0 * total_std(Phase::pi),
              total_mean(Phase::zero) + 10.0 * total_std(Phase::zero)};
    if (!(b.hi > b.lo)) {
      b.lo -= 1.0;
      b.hi += 1.0;
    }
    return b;
  }

  // Thresholds that put both hypotheses on one side: lo decides H0 always,
  // hi decides H1 always (up to a negligible tail).
  Bracket majority_bracket() const {
    if (counting()) return {0.0, bracket().hi};
    const double m0 = total_mean(Phase::zero);
    const double mp = total_mean(Phase::pi);
    const double s0 = total_std(Phase::zero);
    const double sp = total_std(Phase::pi);
    constexpr double kReach = 40.0;  // Phi(-40) underflows to 0
    Bracket b{std::min(mp - kReach * sp, m0 - kReach * s0),
              std::max(m0 + kReach * s0, mp + kReach * sp)};
    if (!(b.hi > b.lo)) {
      b.lo -= 1.0;
      b.hi += 1.0;
    }
    return b;
  }

  // Largest integer count strictly below a positive threshold.
  static Count last_count_below(double threshold) {
    return static_cast<Count>(std::ceil(threshold)) - 1;
  }

 private:
  DetectionModel model_;
  Count modes_;
  HypothesisStats stats_;
};

inline double error_probability(const Priors& priors, const ConditionalErrors& e) {
  return priors.p0 * e.given_zero + priors.p1 * e.given_pi;
}

// p0 P(n < N | 0) - p1 P(n >= N | pi); nondecreasing in N.
inline double balance_residual(const Priors& priors, const ConditionalErrors& e) {
  return priors.p0 * e.given_zero - priors.p1 * e.given_pi;
}

/// Error probability of the threshold rule at `threshold`.
inline double error_probability(const Priors& priors, double threshold,
                                const DetectionModel& model, const ChannelParams& p) {
  validate(priors);
  const DecisionStatistics ds(model, p);
  return error_probability(priors, ds.errors(threshold));
}

/// Threshold that equalises the two Gaussian error terms for equal priors:
///   M (sigma(pi) N(0) + sigma(0) N(pi)) / (sigma(pi) + sigma(0)).
inline double equal_prior_threshold_gaussian(const ModeStats& stats0, const ModeStats& stats_pi,
                                             Count modes) {
  detail::require(modes >= 1, "modes", "must be >= 1");
  detail::require(stats0.mean >= stats_pi.mean, "stats0",
                  "theta = 0 mean must not be below the theta = pi mean");
  detail::require(stats0.std >= 0.0 && stats_pi.std >= 0.0, "std", "must be >= 0");
  if (stats0.std == 0.0 && stats_pi.std == 0.0) {
    throw DomainError("equal_prior_threshold_gaussian: both standard deviations are zero");
  }
  return static_cast<double>(modes) * (stats_pi.std * stats0.mean + stats0.std * stats_pi.mean) /
         (stats_pi.std + stats0.std);
}

enum class ThresholdKind {
  balance_root,       // root of the error-balance condition
  integer_optimum,    // counting model: integer minimiser of PE
  majority_decision,  // always deciding one symbol beats the balance root
  no_root,            // balance condition has one sign over the bracket
};

inline std::string to_string(ThresholdKind k) {
  switch (k) {
    case ThresholdKind::balance_root: return "balance_root";
    case ThresholdKind::integer_optimum: return "integer_optimum";
    case ThresholdKind::majority_decision: return "majority_decision";
    case ThresholdKind::no_root: return "no_root";
  }
  return "?";
}

struct ThresholdResult {
  double threshold = 0.0;
  double residual = 0.0;  // balance residual at `threshold`
  double pe = 0.0;        // error probability at `threshold`
  ThresholdKind kind = ThresholdKind::balance_root;
};

namespace detail {

inline ThresholdResult evaluate_threshold(const Priors& priors, const DecisionStatistics& ds,
                                          double threshold, ThresholdKind kind) {
  const ConditionalErrors e = ds.errors(threshold);
  return {threshold, balance_residual(priors, e), error_probability(priors, e), kind};
}

inline ThresholdResult better_endpoint(const Priors& priors, const DecisionStatistics& ds,
                                       const Bracket& b, ThresholdKind kind) {
  const ThresholdResult lo = evaluate_threshold(priors, ds, b.lo, kind);
  const ThresholdResult hi = evaluate_threshold(priors, ds, b.hi, kind);
  return hi.pe < lo.pe ? hi : lo;
}

}  // namespace detail

/// Root of the error-balance condition p0 P(n < N | 0) = p1 P(n >= N | pi).
///
/// The residual is nondecreasing in N, so the root is found by bisection over
/// DecisionStatistics::bracket(). Gaussian: bisected until the interval cannot
/// shrink further in double precision. Counting: the smallest integer N with
/// a nonnegative residual. If the residual has one sign over the bracket the
/// endpoint with the lower PE is returned with kind no_root.
inline ThresholdResult balance_threshold(const Priors& priors, const DecisionStatistics& ds) {
  validate(priors);
  const Bracket b = ds.bracket();
  auto residual = [&](double t) { return balance_residual(priors, ds.errors(t)); };
  if (residual(b.lo) > 0.0 || residual(b.hi) < 0.0) {
    return detail::better_endpoint(priors, ds, ds.majority_bracket(), ThresholdKind::no_root);
  }
  if (ds.counting()) {
    Count lo = static_cast<Count>(b.lo);  // residual(lo) < 0 unless lo satisfies it
    Count hi = static_cast<Count>(b.hi);  // residual(hi) >= 0
    if (residual(static_cast<double>(lo)) >= 0.0) hi = lo;
    while (hi - lo > 1) {
      const Count mid = lo + (hi - lo) / 2;
      if (residual(static_cast<double>(mid)) >= 0.0) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return detail::evaluate_threshold(priors, ds, static_cast<double>(hi),
                                      ThresholdKind::balance_root);
  }
  double lo = b.lo;
  double hi = b.hi;
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = std::midpoint(lo, hi);
    if (mid <= lo || mid >= hi) break;
    const double r = residual(mid);
    if (r == 0.0) {
      lo = hi = mid;
      break;
    }
    (r < 0.0 ? lo : hi) = mid;
  }
  const ThresholdResult at_lo = detail::evaluate_threshold(priors, ds, lo, ThresholdKind::balance_root);
  if (lo == hi) return at_lo;
  const ThresholdResult at_hi = detail::evaluate_threshold(priors, ds, hi, ThresholdKind::balance_root);
  return std::fabs(at_hi.residual) < std::fabs(at_lo.residual) ? at_hi : at_lo;
}

inline ThresholdResult balance_threshold(const Priors& priors, const DetectionModel& model,
                                         const ChannelParams& p) {
  return balance_threshold(priors, DecisionStatistics(model, p));
}

namespace detail {

inline double log_pmf_or_floor(Count k, const NegBinParams& nb) {
  if (nb.mean_per_mode == 0.0) {
    return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  return nb_log_pmf(k, nb);
}

// PE(k+1) >= PE(k) for integer thresholds, i.e. p0 pmf0(k) >= p1 pmf_pi(k).
// The NB likelihood ratio is monotone in k, so this flips from false to true
// at most once.
inline bool pe_stops_decreasing(const Priors& priors, const DecisionStatistics& ds, Count k) {
  const double lhs = std::log(priors.p0) + log_pmf_or_floor(k, ds.negbin(Phase::zero));
  const double rhs = std::log(priors.p1) + log_pmf_or_floor(k, ds.negbin(Phase::pi));
  return lhs >= rhs;
}

}  // namespace detail

/// Threshold used for minimum-error detection.
///
/// Gaussian model: the balance root, unless one of the majority decisions
/// (always H0 or always H1, see majority_bracket) has strictly lower PE.
/// With equal priors the balance root is always kept.
/// Counting model: the integer threshold minimising PE over the bracket.
inline ThresholdResult optimal_threshold(const Priors& priors, const DecisionStatistics& ds) {
  validate(priors);
  const Bracket b = ds.bracket();
  if (ds.counting()) {
    Count lo = static_cast<Count>(b.lo);
    Count hi = static_cast<Count>(b.hi);
    if (!detail::pe_stops_decreasing(priors, ds, hi)) {
      return detail::evaluate_threshold(priors, ds, static_cast<double>(hi),
                                        ThresholdKind::integer_optimum);
    }
    if (detail::pe_stops_decreasing(priors, ds, lo)) hi = lo;
    while (hi - lo > 1) {
      const Count mid = lo + (hi - lo) / 2;
      if (detail::pe_stops_decreasing(priors, ds, mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return detail::evaluate_threshold(priors, ds, static_cast<double>(hi),
                                      ThresholdKind::integer_optimum);
  }
  const ThresholdResult root = balance_threshold(priors, ds);
  if (root.kind == ThresholdKind::no_root) return root;
  const ThresholdResult endpoint =
      detail::better_endpoint(priors, ds, ds.majority_bracket(), ThresholdKind::majority_decision);
  return endpoint.pe < root.pe ? endpoint : root;
}

inline ThresholdResult optimal_threshold(const Priors& priors, const DetectionModel& model,
                                         const ChannelParams& p) {
  return optimal_threshold(priors, DecisionStatistics(model, p));
}

struct PeRow {
  Count modes = 1;
  DetectionModel model;
  Priors priors;
  ThresholdResult threshold;

  double pe() const { return threshold.pe; }
};

/// Minimum error probability for every (model, priors, M) combination.
/// Rows are ordered by model, then priors, then M, following input order.
inline std::vector<PeRow> pe_sweep(const ChannelParams& p, const std::vector<Count>& m_values,
                                   const std::vector<Priors>& priors_list,
                                   const std::vector<DetectionModel>& models, unsigned jobs = 1) {
  detail::require(!m_values.empty(), "modes", "grid must be nonempty");
  detail::require(!priors_list.empty(), "p0", "grid must be nonempty");
  detail::require(!models.empty(), "receiver", "model list must be nonempty");
  for (const auto& pr : priors_list) validate(pr);
  for (const auto& m : models) validate(m);
  for (Count m : m_values) detail::require(m >= 1, "modes", "must be >= 1");

  const std::size_t per_model = priors_list.size() * m_values.size();
  std::vector<PeRow> rows(models.size() * per_model);
  parallel_for(rows.size(), jobs, [&](std::size_t idx) {
    const DetectionModel& model = models[idx / per_model];
    const Priors& priors = priors_list[(idx % per_model) / m_values.size()];
    const Count m = m_values[idx % m_values.size()];
    ChannelParams point = p;
    point.modes = m;
    rows[idx] = {m, model, priors, optimal_threshold(priors, DecisionStatistics(model, point))};
  });
  return rows;
}

/// PE on the full (p0, N_th) grid, row-major by p0.
inline std::vector<std::vector<double>> pe_surface(const ChannelParams& p,
                                                   const DetectionModel& model,
                                                   const std::vector<double>& p0_grid,
                                                   const std::vector<double>& nth_grid) {
  detail::require(!p0_grid.empty(), "p0", "grid must be nonempty");
  detail::require(!nth_grid.empty(), "nth", "grid must be nonempty");
  for (double p0 : p0_grid) validate(Priors::from_p0(p0));
  const DecisionStatistics ds(model, p);
  std::vector<ConditionalErrors> errors;
  errors.reserve(nth_grid.size());
  for (double t : nth_grid) errors.push_back(ds.errors(t));
  std::vector<std::vector<double>> surface;
  surface.reserve(p0_grid.size());
  for (double p0 : p0_grid) {
    const Priors pr = Priors::from_p0(p0);
    std::vector<double> row;
    row.reserve(errors.size());
    for (const auto& e : errors) row.push_back(error_probability(pr, e));
    surface.push_back(std::move(row));
  }
  return surface;
}

}  // namespace eabpsk
