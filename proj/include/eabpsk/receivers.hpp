#pragma once

// Per-mode photodetection statistics of the OPA, OPC and 2x2 optical hybrid
// receivers for BPSK over a lossy thermal bosonic channel, plus the
// quadrature covariance matrices of the source and return-idler states.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "eabpsk/errors.hpp"
#include "eabpsk/photostats.hpp"

namespace eabpsk {

// One experiment point. Photon numbers are means per mode.
struct ChannelParams {
  double n_s = 0.01;  // signal
  double n_b = 1.0;   // thermal background
  double eta = 0.01;  // transmittivity
  double gain = 1.1;  // OPA gain
  Count modes = 1;

  double n_return() const { return eta * n_s + n_b; }
  double n_idler() const { return n_s; }
  // sqrt(eta N_s (N_s + 1)), the return-idler phase-sensitive correlation
  double cross_correlation() const { return std::sqrt(eta * n_s * (n_s + 1.0)); }
};

inline ChannelParams default_params() { return {}; }

inline void validate(const ChannelParams& p) {
  detail::require(std::isfinite(p.n_s) && p.n_s >= 0.0, "ns", "must be finite and >= 0");
  detail::require(std::isfinite(p.n_b) && p.n_b >= 0.0, "nb", "must be finite and >= 0");
  detail::require(std::isfinite(p.eta) && p.eta > 0.0 && p.eta <= 1.0, "eta", "must lie in (0, 1]");
  detail::require(std::isfinite(p.gain) && p.gain >= 1.0, "gain", "must be >= 1");
  detail::require(p.modes >= 1, "modes", "must be >= 1");
}

// BPSK symbol phase.
enum class Phase { zero, pi };

inline double radians(Phase phase) { return phase == Phase::zero ? 0.0 : std::numbers::pi; }

enum class OpaPort { return_port, idler_port };

struct OhConfig {
  double phi1 = 0.0;
  double phi2 = std::numbers::pi;
  double kappa = 0.5;

  bool is_bpsk_special_case() const {
    return phi1 == 0.0 && phi2 == std::numbers::pi && kappa == 0.5;
  }
};

// Per-mode statistics for one symbol. For photon counting `mean` is the mean
// photon number per mode; for balanced receivers it is the mean photocurrent.
struct ModeStats {
  double mean = 0.0;
  double std = 0.0;
  Phase theta = Phase::zero;

  double variance() const { return std * std; }
};

// 4x4 quadrature covariance in shot-noise units, ordered (q_R, p_R, q_I, p_I).
struct CovarianceMatrix {
  std::array<std::array<double, 4>, 4> entries{};

  double operator()(std::size_t row, std::size_t col) const { return entries[row][col]; }
  double& operator()(std::size_t row, std::size_t col) { return entries[row][col]; }

  bool is_symmetric(double tol = 0.0) const {
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (std::fabs(entries[i][j] - entries[j][i]) > tol) return false;
    return true;
  }
};

namespace detail {

using Block = std::array<std::array<double, 2>, 2>;

inline CovarianceMatrix assemble(double diag_first, double diag_second, const Block& off) {
  CovarianceMatrix m;
  m(0, 0) = m(1, 1) = diag_first;
  m(2, 2) = m(3, 3) = diag_second;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      m(i, j + 2) = off[i][j];
      m(j + 2, i) = off[i][j];
    }
  }
  return m;
}

}  // namespace detail

/// Covariance of a two-mode squeezed vacuum with N_s photons per arm:
/// diagonal blocks (2N_s+1) I, off-diagonal blocks C Z with C = 2 sqrt(N_s(N_s+1)).
inline CovarianceMatrix tmsv_covariance(double n_s) {
  detail::require(std::isfinite(n_s) && n_s >= 0.0, "ns", "must be finite and >= 0");
  const double c = 2.0 * std::sqrt(n_s * (n_s + 1.0));
  return detail::assemble(2.0 * n_s + 1.0, 2.0 * n_s + 1.0, {{{c, 0.0}, {0.0, -c}}});
}

/// Covariance of the return-idler pair after the channel for symbol phase
/// theta. The off-diagonal block C_eta Re[e^{j theta}(Z - jX)] equals
/// C_eta (cos(theta) Z + sin(theta) X).
inline CovarianceMatrix return_idler_covariance(const ChannelParams& p, double theta) {
  validate(p);
  detail::require(std::isfinite(theta), "theta", "must be finite");
  const double c_eta = 2.0 * p.cross_correlation();
  const std::complex<double> phase = std::polar(1.0, theta);
  // Z - jX = [[1, -j], [-j, -1]]
  const std::complex<double> j{0.0, 1.0};
  const std::array<std::array<std::complex<double>, 2>, 2> z_minus_jx = {{{1.0, -j}, {-j, -1.0}}};
  detail::Block off{};
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c) off[r][c] = c_eta * (phase * z_minus_jx[r][c]).real();
  return detail::assemble(2.0 * p.n_return() + 1.0, 2.0 * p.n_idler() + 1.0, off);
}

namespace detail {

inline double opa_mean(const ChannelParams& p, OpaPort port, double theta) {
  const double g = p.gain;
  const double cross = 2.0 * std::cos(theta) * std::sqrt(g * (g - 1.0)) * p.cross_correlation();
  if (port == OpaPort::return_port) {
    return g * p.n_return() + (g - 1.0) * (1.0 + p.n_idler()) + cross;
  }
  return g * p.n_idler() + (g - 1.0) * (1.0 + p.n_return()) + cross;
}

// The OPC formulas are specialised to conjugator gain G = 2.
inline double opc_mean(const ChannelParams& p, double theta) {
  return 2.0 * std::cos(theta) * p.cross_correlation();
}

inline double opc_variance(const ChannelParams& p, double theta) {
  const double x = p.eta * p.n_s * (p.n_s + 1.0);
  const double c = std::cos(theta);
  const double shared = p.eta * p.n_s + p.n_b + 1.0;
  return p.n_s * shared + (p.n_s + 1.0) * shared - 2.0 * x * std::cos(2.0 * theta) -
         4.0 * x * c * c;
}

inline double oh_mean(const ChannelParams& p, const OhConfig& cfg, double theta) {
  // Sum of a term and its conjugate:
  // 1/2 e^{-j theta} c (e^{-j phi1} - e^{j phi2}) + 1/2 e^{j theta} c (e^{j phi1} - e^{-j phi2})
  const double c = p.cross_correlation();
  const std::complex<double> a =
      0.5 * std::polar(c, -theta) * (std::polar(1.0, -cfg.phi1) - std::polar(1.0, cfg.phi2));
  const std::complex<double> b =
      0.5 * std::polar(c, theta) * (std::polar(1.0, cfg.phi1) - std::polar(1.0, -cfg.phi2));
  return (a + b).real();
}

// phi1 = 0, phi2 = pi, kappa = 1/2 only.
inline double oh_variance_bpsk(const ChannelParams& p, double theta) {
  const double nr = p.n_return();
  const double ni = p.n_idler();
  const double x = p.eta * p.n_s * (p.n_s + 1.0);
  return (2.0 * nr * ni + nr + ni) + 2.0 * x * (1.0 - std::cos(2.0 * theta)) - 2.0 * x;
}

inline double checked_sqrt(double variance, const char* what) {
  // Round-off can leave a tiny negative at exactly-degenerate parameters.
  if (variance < 0.0 && variance > -1e-15) variance = 0.0;
  if (!(variance >= 0.0)) {
    throw NumericalFailure(std::string(what) + ": negative variance " + std::to_string(variance));
  }
  return std::sqrt(variance);
}

}  // namespace detail

/// Per-mode photon-number statistics at one OPA output port. The count is
/// thermal, so std^2 = mean (mean + 1).
inline ModeStats opa_mode_stats(const ChannelParams& p, OpaPort port, Phase theta) {
  validate(p);
  const double mean = detail::opa_mean(p, port, radians(theta));
  return {mean, std::sqrt(mean * (mean + 1.0)), theta};
}

/// Balanced photocurrent statistics of the phase-conjugation receiver.
/// ChannelParams::gain is not used: the conjugator runs at G = 2.
inline ModeStats opc_mode_stats(const ChannelParams& p, Phase theta) {
  validate(p);
  const double th = radians(theta);
  return {detail::opc_mean(p, th), detail::checked_sqrt(detail::opc_variance(p, th), "opc"), theta};
}

/// Balanced photocurrent statistics of the 2x2 optical hybrid receiver.
/// The mean holds for any phases at kappa = 1/2; the variance is only
/// available for phi1 = 0, phi2 = pi, kappa = 1/2.
inline ModeStats oh_mode_stats(const ChannelParams& p, const OhConfig& cfg, Phase theta) {
  validate(p);
  detail::require(cfg.kappa > 0.0 && cfg.kappa < 1.0, "kappa", "must lie in (0, 1)");
  if (cfg.kappa != 0.5) {
    throw UnsupportedConfiguration("oh_mode_stats: only kappa = 0.5 is implemented");
  }
  if (!cfg.is_bpsk_special_case()) {
    throw UnsupportedConfiguration(
        "oh_mode_stats: photocurrent variance requires phi1 = 0, phi2 = pi, kappa = 0.5");
  }
  const double th = radians(theta);
  return {detail::oh_mean(p, cfg, th), detail::checked_sqrt(detail::oh_variance_bpsk(p, th), "oh"),
          theta};
}

inline ModeStats oh_mode_stats(const ChannelParams& p, Phase theta) {
  return oh_mode_stats(p, OhConfig{}, theta);
}

/// Mean photocurrent of the optical hybrid for arbitrary phases (kappa = 1/2).
/// Accepts any real theta; intended for diagnostics outside BPSK.
inline double oh_mean_photocurrent(const ChannelParams& p, const OhConfig& cfg, double theta) {
  validate(p);
  if (cfg.kappa != 0.5) {
    throw UnsupportedConfiguration("oh_mean_photocurrent: only kappa = 0.5 is implemented");
  }
  return detail::oh_mean(p, cfg, theta);
}

// OPC mean at an arbitrary phase (diagnostic path, e.g. theta = pi/2).
inline double opc_mean_photocurrent(const ChannelParams& p, double theta) {
  validate(p);
  return detail::opc_mean(p, theta);
}

}  // namespace eabpsk
