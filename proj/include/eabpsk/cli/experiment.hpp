#pragma once

// Experiment runners behind the sweep CLI. Each experiment turns a validated
// SweepSpec into a Table whose header follows a fixed column contract.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eabpsk/capacity.hpp"
#include "eabpsk/detection.hpp"
#include "eabpsk/errors.hpp"
#include "eabpsk/parallel.hpp"
#include "eabpsk/receivers.hpp"
#include "eabpsk/cli/table.hpp"

namespace eabpsk::cli {

enum class Experiment {
  pe_sweep,
  threshold_sweep,
  pe_surface,
  capacity_m1,
  capacity_multimode,
  info_rate,
  gauss_vs_nb,
  mode_count,
};

inline const std::vector<std::pair<std::string, Experiment>>& experiment_names() {
  static const std::vector<std::pair<std::string, Experiment>> names = {
      {"pe_sweep", Experiment::pe_sweep},
      {"threshold_sweep", Experiment::threshold_sweep},
      {"pe_surface", Experiment::pe_surface},
      {"capacity_m1", Experiment::capacity_m1},
      {"capacity_multimode", Experiment::capacity_multimode},
      {"info_rate", Experiment::info_rate},
      {"gauss_vs_nb", Experiment::gauss_vs_nb},
      {"mode_count", Experiment::mode_count},
  };
  return names;
}

inline std::string to_string(Experiment e) {
  for (const auto& [name, value] : experiment_names())
    if (value == e) return name;
  return "?";
}

inline const std::vector<std::string>& columns_for(Experiment e) {
  static const std::vector<std::string> pe = {"M", "receiver", "model", "p0", "threshold", "pe"};
  static const std::vector<std::string> thr = {"M", "port", "p0", "threshold"};
  static const std::vector<std::string> surf = {"p0", "n_th", "pe"};
  static const std::vector<std::string> cap = {"ns",         "receiver",       "model",
                                               "capacity",   "best_p0",        "best_threshold",
                                               "holevo",     "homodyne",       "ultimate"};
  static const std::vector<std::string> rate = {"M",  "receiver", "p0",
                                                "pe", "rate",     "rate_over_holevo"};
  static const std::vector<std::string> gvn = {"ns", "M", "c_gauss", "c_nb", "delta"};
  static const std::vector<std::string> modes = {"lambda_m", "dlambda_m", "tm_s", "bandwidth_hz",
                                                 "modes"};
  switch (e) {
    case Experiment::pe_sweep: return pe;
    case Experiment::threshold_sweep: return thr;
    case Experiment::pe_surface: return surf;
    case Experiment::capacity_m1:
    case Experiment::capacity_multimode: return cap;
    case Experiment::info_rate: return rate;
    case Experiment::gauss_vs_nb: return gvn;
    case Experiment::mode_count: return modes;
  }
  return pe;
}

// Fully resolved inputs of one run. Grids are already expanded.
struct SweepSpec {
  Experiment experiment = Experiment::pe_sweep;
  ChannelParams params;
  std::vector<double> ns_grid;         // capacity_*, gauss_vs_nb
  std::vector<Count> modes_grid;       // pe_sweep, threshold_sweep, info_rate, gauss_vs_nb
  std::vector<double> p0_grid;         // priors (pe_sweep, threshold_sweep, info_rate, pe_surface)
  std::vector<double> nth_grid;        // pe_surface; empty means derive from the bracket
  std::vector<Receiver> receivers;
  std::vector<ModelKind> models;
  double lambda_m = 1550e-9;
  double dlambda_m = 35e-9;
  double tm_s = 1e-6;
  Meta meta;  // parameter echo written ahead of the rows
  unsigned jobs = 1;
};

namespace detail {

inline void require_nonempty(bool ok, const char* field) {
  if (!ok) throw InvalidParameter(field, "grid must be nonempty");
}

// Models applicable to `receivers`: counting models only pair with OPA ports.
inline std::vector<DetectionModel> expand_models(const std::vector<Receiver>& receivers,
                                                 const std::vector<ModelKind>& kinds) {
  std::vector<DetectionModel> out;
  for (Receiver r : receivers) {
    for (ModelKind k : kinds) {
      if (k == ModelKind::negative_binomial && !is_photon_counting(r)) continue;
      out.push_back({k, r});
    }
    if (!is_photon_counting(r) &&
        std::find(kinds.begin(), kinds.end(), ModelKind::gaussian_approx) == kinds.end()) {
      // opc / oh have no counting model; fall back to the Gaussian one.
      out.push_back({ModelKind::gaussian_approx, r});
    }
  }
  if (out.empty()) throw InvalidParameter("model", "no receiver/model combination selected");
  return out;
}

// Runs fn, prefixing numerical failures with the grid point description.
template <typename Fn>
auto at_point(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalFailure& e) {
    throw NumericalFailure(where + ": " + e.what());
  } catch (const DomainError& e) {
    throw NumericalFailure(where + ": " + e.what());
  }
}

inline std::string point(const char* key, double v) { return std::string(key) + "=" + format_double(v); }

}  // namespace detail

inline void validate(const SweepSpec& spec) {
  validate(spec.params);
  for (double p0 : spec.p0_grid) validate(Priors::from_p0(p0));
  for (double ns : spec.ns_grid) {
    eabpsk::detail::require(std::isfinite(ns) && ns >= 0.0, "ns", "must be finite and >= 0");
  }
  for (Count m : spec.modes_grid) eabpsk::detail::require(m >= 1, "modes", "must be >= 1");
  switch (spec.experiment) {
    case Experiment::pe_sweep:
    case Experiment::info_rate:
      detail::require_nonempty(!spec.modes_grid.empty(), "modes");
      detail::require_nonempty(!spec.p0_grid.empty(), "p0");
      detail::require_nonempty(!spec.receivers.empty(), "receiver");
      detail::require_nonempty(!spec.models.empty(), "model");
      break;
    case Experiment::threshold_sweep:
      detail::require_nonempty(!spec.modes_grid.empty(), "modes");
      detail::require_nonempty(!spec.p0_grid.empty(), "p0");
      for (Receiver r : spec.receivers) {
        eabpsk::detail::require(is_photon_counting(r), "receiver",
                        "threshold_sweep compares OPA ports (opa-return, opa-idler)");
      }
      eabpsk::detail::require(spec.models.size() == 1, "model", "threshold_sweep takes a single model");
      break;
    case Experiment::pe_surface:
      detail::require_nonempty(!spec.p0_grid.empty(), "p0");
      eabpsk::detail::require(spec.receivers.size() == 1, "receiver", "pe_surface takes a single receiver");
      eabpsk::detail::require(spec.models.size() == 1, "model", "pe_surface takes a single model");
      validate(DetectionModel{spec.models.front(), spec.receivers.front()});
      break;
    case Experiment::capacity_m1:
    case Experiment::capacity_multimode:
      detail::require_nonempty(!spec.ns_grid.empty(), "ns");
      detail::require_nonempty(!spec.receivers.empty(), "receiver");
      detail::require_nonempty(!spec.models.empty(), "model");
      break;
    case Experiment::gauss_vs_nb:
      detail::require_nonempty(!spec.ns_grid.empty(), "ns");
      detail::require_nonempty(!spec.modes_grid.empty(), "modes");
      break;
    case Experiment::mode_count:
      eabpsk::detail::require(spec.lambda_m > 0.0, "lambda", "must be positive");
      eabpsk::detail::require(spec.dlambda_m > 0.0, "dlambda", "must be positive");
      eabpsk::detail::require(spec.tm_s > 0.0, "tm", "must be positive");
      break;
  }
}

namespace detail {

inline Table run_pe_sweep(const SweepSpec& spec) {
  std::vector<Priors> priors;
  for (double p0 : spec.p0_grid) priors.push_back(Priors::from_p0(p0));
  const auto models = expand_models(spec.receivers, spec.models);
  const auto rows = at_point("pe_sweep", [&] {
    return pe_sweep(spec.params, spec.modes_grid, priors, models, spec.jobs);
  });
  Table t{columns_for(spec.experiment), {}, spec.meta};
  for (const auto& r : rows) {
    t.rows.push_back({r.modes, to_string(r.model.receiver), to_string(r.model.kind), r.priors.p0,
                      r.threshold.threshold, r.pe()});
  }
  return t;
}

inline Table run_threshold_sweep(const SweepSpec& spec) {
  std::vector<Receiver> ports = spec.receivers;
  if (ports.empty()) ports = {Receiver::opa_return, Receiver::opa_idler};
  struct Point {
    Receiver port;
    double p0;
    Count m;
  };
  std::vector<Point> points;
  for (Receiver r : ports)
    for (double p0 : spec.p0_grid)
      for (Count m : spec.modes_grid) points.push_back({r, p0, m});
  std::vector<double> thresholds(points.size());
  parallel_for(points.size(), spec.jobs, [&](std::size_t i) {
    const Point& pt = points[i];
    ChannelParams p = spec.params;
    p.modes = pt.m;
    thresholds[i] = at_point("threshold_sweep M=" + std::to_string(pt.m) + " " + point("p0", pt.p0), [&] {
      return balance_threshold(Priors::from_p0(pt.p0), {spec.models.front(), pt.port}, p).threshold;
    });
  });
  Table t{columns_for(spec.experiment), {}, spec.meta};
  for (std::size_t i = 0; i < points.size(); ++i) {
    const std::string port = points[i].port == Receiver::opa_return ? "return" : "idler";
    t.rows.push_back({points[i].m, port, points[i].p0, thresholds[i]});
  }
  return t;
}

// 61 thresholds spanning mean_pi - 3 std_pi .. mean_0 + 3 std_0 (integers for counts).
inline std::vector<double> default_nth_grid(const DecisionStatistics& ds) {
  double lo = ds.total_mean(Phase::pi) - 3.0 * ds.total_std(Phase::pi);
  double hi = ds.total_mean(Phase::zero) + 3.0 * ds.total_std(Phase::zero);
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  std::vector<double> grid;
  if (ds.counting()) {
    const double first = std::max(0.0, std::floor(lo));
    const double last = std::ceil(hi);
    const double step = std::max(1.0, std::ceil((last - first) / 60.0));
    for (double k = first; k <= last; k += step) grid.push_back(k);
    return grid;
  }
  for (int i = 0; i <= 60; ++i) grid.push_back(lo + (hi - lo) * i / 60.0);
  return grid;
}

inline Table run_pe_surface(const SweepSpec& spec) {
  const DetectionModel model{spec.models.front(), spec.receivers.front()};
  const DecisionStatistics ds(model, spec.params);
  const std::vector<double> nth = spec.nth_grid.empty() ? default_nth_grid(ds) : spec.nth_grid;
  const auto surface =
      at_point("pe_surface", [&] { return pe_surface(spec.params, model, spec.p0_grid, nth); });
  Table t{columns_for(spec.experiment), {}, spec.meta};
  for (std::size_t i = 0; i < spec.p0_grid.size(); ++i)
    for (std::size_t j = 0; j < nth.size(); ++j)
      t.rows.push_back({spec.p0_grid[i], nth[j], surface[i][j]});
  return t;
}

inline Table run_capacity(const SweepSpec& spec) {
  const auto models = expand_models(spec.receivers, spec.models);
  struct Out {
    CapacityResult cap;
    double holevo = 0.0;
    double homodyne = 0.0;
    double ultimate = 0.0;
  };
  const std::size_t per_ns = models.size();
  std::vector<Out> out(spec.ns_grid.size() * per_ns);
  parallel_for(out.size(), spec.jobs, [&](std::size_t i) {
    ChannelParams p = spec.params;
    p.n_s = spec.ns_grid[i / per_ns];
    const DetectionModel& model = models[i % per_ns];
    out[i] = at_point(point("ns", p.n_s) + " M=" + std::to_string(p.modes) + " receiver=" +
                          to_string(model.receiver) + " model=" + to_string(model.kind),
                      [&] {
                        return Out{ea_capacity(model, p), holevo_capacity(p), homodyne_capacity(p),
                                   ultimate_capacity(p)};
                      });
  });
  Table t{columns_for(spec.experiment), {}, spec.meta};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& o = out[i];
    t.rows.push_back({spec.ns_grid[i / per_ns], to_string(o.cap.model.receiver),
                      to_string(o.cap.model.kind), o.cap.capacity, o.cap.best_p0,
                      o.cap.best_threshold, o.holevo, o.homodyne, o.ultimate});
  }
  return t;
}

inline Table run_info_rate(const SweepSpec& spec) {
  // One model per receiver: the requested kind for OPA, Gaussian otherwise.
  std::vector<DetectionModel> models;
  for (Receiver r : spec.receivers) {
    models.push_back({is_photon_counting(r) ? spec.models.front() : ModelKind::gaussian_approx, r});
  }
  std::vector<Priors> priors;
  for (double p0 : spec.p0_grid) priors.push_back(Priors::from_p0(p0));
  const auto rows = at_point("info_rate", [&] {
    return pe_sweep(spec.params, spec.modes_grid, priors, models, spec.jobs);
  });
  const double holevo = holevo_capacity(spec.params);
  Table t{columns_for(spec.experiment), {}, spec.meta};
  for (const auto& r : rows) {
    const double rate = information_rate(r.pe(), r.modes);
    const double ratio = holevo > 0.0 ? rate / holevo : std::nan("");
    t.rows.push_back({r.modes, to_string(r.model.receiver), r.priors.p0, r.pe(), rate, ratio});
  }
  return t;
}

inline Table run_gauss_vs_nb(const SweepSpec& spec) {
  Table t{columns_for(spec.experiment), {}, spec.meta};
  for (Count m : spec.modes_grid) {
    ChannelParams p = spec.params;
    p.modes = m;
    const auto rows = at_point("gauss_vs_nb M=" + std::to_string(m), [&] {
      return gaussian_vs_nb_capacity_error(p, spec.ns_grid, spec.jobs);
    });
    for (const auto& r : rows) t.rows.push_back({r.n_s, r.modes, r.c_gauss, r.c_nb, r.delta()});
  }
  return t;
}

inline Table run_mode_count(const SweepSpec& spec) {
  const ModeCount mc = mode_count(spec.lambda_m, spec.dlambda_m, spec.tm_s);
  Table t{columns_for(spec.experiment), {}, spec.meta};
  t.rows.push_back({spec.lambda_m, spec.dlambda_m, spec.tm_s, mc.bandwidth_hz, mc.modes});
  return t;
}

}  // namespace detail

/// Runs one experiment. Throws InvalidParameter for specification errors and
/// NumericalFailure (with the failing grid point) for numerical ones.
inline Table run_experiment(const SweepSpec& spec) {
  validate(spec);
  switch (spec.experiment) {
    case Experiment::pe_sweep: return detail::run_pe_sweep(spec);
    case Experiment::threshold_sweep: return detail::run_threshold_sweep(spec);
    case Experiment::pe_surface: return detail::run_pe_surface(spec);
    case Experiment::capacity_m1:
    case Experiment::capacity_multimode: return detail::run_capacity(spec);
    case Experiment::info_rate: return detail::run_info_rate(spec);
    case Experiment::gauss_vs_nb: return detail::run_gauss_vs_nb(spec);
    case Experiment::mode_count: return detail::run_mode_count(spec);
  }
  throw InvalidParameter("experiment", "unknown experiment");
}

}  // namespace eabpsk::cli
