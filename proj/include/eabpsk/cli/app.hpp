#pragma once

// Command-line front end: flag / config-file parsing, per-experiment
// defaults, and the 0 / 1 / 2 exit-code contract.
//
//   0  success
//   1  numerical failure (message names the grid point) or output I/O error
//   2  invalid arguments (message names the field)

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"

#include "eabpsk/cli/experiment.hpp"
#include "eabpsk/cli/grid.hpp"
#include "eabpsk/cli/table.hpp"
#include "eabpsk/errors.hpp"

namespace eabpsk::cli {

// Raw option values as typed; empty means "use the experiment default".
struct CliOptions {
  std::string experiment = "pe_sweep";
  std::string ns;
  double nb = 1.0;
  double eta = 0.01;
  double gain = 1.1;
  std::string modes;
  std::string p0;
  std::string nth;
  std::string receiver;
  std::string model;
  std::string out;
  std::string format = "csv";
  double lambda = 1550e-9;
  double dlambda = 35e-9;
  double tm = 1e-6;
  unsigned jobs = 1;
};

namespace detail {

struct Defaults {
  const char* ns;
  const char* modes;
  const char* p0;
  const char* receiver;
  const char* model;
};

inline Defaults defaults_for(Experiment e) {
  switch (e) {
    case Experiment::pe_sweep:
      return {"0.01", "logspace:1:10000:25", "0.5,0.45", "opa-return,opa-idler,opc,oh", "nb,gauss"};
    case Experiment::threshold_sweep:
      return {"0.01", "logspace:1:10000:25", "0.45", "opa-return,opa-idler", "gauss"};
    case Experiment::pe_surface:
      return {"0.01", "1", "linspace:0.01:0.99:99", "opa-idler", "nb"};
    case Experiment::capacity_m1:
      return {"logspace:0.001:1:13", "1", "0.5", "opa-idler,opc,oh", "nb,gauss"};
    case Experiment::capacity_multimode:
      return {"logspace:0.001:1:13", "100", "0.5", "opa-idler,opc,oh", "nb,gauss"};
    case Experiment::info_rate:
      return {"0.01", "logspace:1:10000:25", "0.5,0.45", "opa-idler,opc,oh", "gauss"};
    case Experiment::gauss_vs_nb:
      return {"logspace:0.001:1:13", "10,100", "0.5", "opa-idler", "nb,gauss"};
    case Experiment::mode_count:
      return {"0.01", "1", "0.5", "opa-idler", "gauss"};
  }
  return {"0.01", "1", "0.5", "opa-idler", "gauss"};
}

inline Experiment parse_experiment(std::string_view name) {
  for (const auto& [key, value] : experiment_names())
    if (key == name) return value;
  throw InvalidParameter("experiment", "unknown experiment '" + std::string(name) + "'");
}

inline Receiver parse_receiver(std::string_view name) {
  for (Receiver r : {Receiver::opa_return, Receiver::opa_idler, Receiver::opc, Receiver::oh})
    if (to_string(r) == name) return r;
  throw InvalidParameter("receiver", "unknown receiver '" + std::string(name) +
                                         "' (expected opa-return, opa-idler, opc, oh)");
}

inline ModelKind parse_model(std::string_view name) {
  if (name == "nb") return ModelKind::negative_binomial;
  if (name == "gauss") return ModelKind::gaussian_approx;
  throw InvalidParameter("model", "unknown model '" + std::string(name) + "' (expected nb, gauss)");
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view text, F&& parse_one) {
  std::vector<T> out;
  for (auto part : split(text, ',')) {
    const T v = parse_one(part);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

inline Format parse_format(std::string_view name) {
  if (name == "csv") return Format::csv;
  if (name == "json") return Format::json;
  throw InvalidParameter("format", "unknown format '" + std::string(name) + "' (expected csv, json)");
}

}  // namespace detail

/// Resolves raw options into a validated SweepSpec, filling per-experiment
/// defaults. Throws InvalidParameter naming the offending field.
inline SweepSpec build_spec(const CliOptions& o) {
  SweepSpec spec;
  spec.experiment = detail::parse_experiment(o.experiment);
  const detail::Defaults d = detail::defaults_for(spec.experiment);
  const std::string ns = o.ns.empty() ? d.ns : o.ns;
  const std::string modes = o.modes.empty() ? d.modes : o.modes;
  const std::string p0 = o.p0.empty() ? d.p0 : o.p0;
  const std::string receiver = o.receiver.empty() ? d.receiver : o.receiver;
  const std::string model = o.model.empty() ? d.model : o.model;

  const bool ns_axis = spec.experiment == Experiment::capacity_m1 ||
                       spec.experiment == Experiment::capacity_multimode ||
                       spec.experiment == Experiment::gauss_vs_nb;
  const bool single_mode = spec.experiment == Experiment::capacity_m1 ||
                           spec.experiment == Experiment::capacity_multimode ||
                           spec.experiment == Experiment::pe_surface;

  spec.params.n_b = o.nb;
  spec.params.eta = o.eta;
  spec.params.gain = o.gain;
  const auto ns_values = parse_grid(ns, "ns");
  if (ns_axis) {
    spec.ns_grid = ns_values;
  } else {
    eabpsk::detail::require(ns_values.size() == 1, "ns", "this experiment takes a single value");
  }
  spec.params.n_s = ns_values.front();

  spec.modes_grid = parse_mode_grid(modes, "modes");
  if (single_mode) {
    eabpsk::detail::require(spec.modes_grid.size() == 1, "modes", "this experiment takes a single value");
  }
  if (spec.experiment == Experiment::capacity_m1) {
    eabpsk::detail::require(spec.modes_grid.front() == 1, "modes", "capacity_m1 is defined at M = 1");
  }
  spec.params.modes = spec.modes_grid.front();

  spec.p0_grid = parse_grid(p0, "p0");
  if (!o.nth.empty()) spec.nth_grid = parse_grid(o.nth, "nth");
  spec.receivers = detail::parse_list<Receiver>(receiver, detail::parse_receiver);
  spec.models = detail::parse_list<ModelKind>(model, detail::parse_model);
  spec.lambda_m = o.lambda;
  spec.dlambda_m = o.dlambda;
  spec.tm_s = o.tm;
  eabpsk::detail::require(o.jobs >= 1, "jobs", "must be >= 1");
  spec.jobs = o.jobs;

  // Parameter echo; jobs is left out because it never changes the output.
  spec.meta = {{"experiment", o.experiment}};
  if (spec.experiment == Experiment::mode_count) {
    spec.meta.emplace_back("lambda", format_double(o.lambda));
    spec.meta.emplace_back("dlambda", format_double(o.dlambda));
    spec.meta.emplace_back("tm", format_double(o.tm));
  } else {
    spec.meta.emplace_back("ns", ns);
    spec.meta.emplace_back("nb", format_double(o.nb));
    spec.meta.emplace_back("eta", format_double(o.eta));
    spec.meta.emplace_back("gain", format_double(o.gain));
    spec.meta.emplace_back("modes", modes);
    spec.meta.emplace_back("p0", p0);
    if (spec.experiment == Experiment::pe_surface) {
      spec.meta.emplace_back("nth", o.nth.empty() ? "auto" : o.nth);
    }
    spec.meta.emplace_back("receiver", receiver);
    spec.meta.emplace_back("model", model);
  }
  validate(spec);
  return spec;
}

// Grid-valued options: CLI11 splits "1,10" from config files into a list,
// so the pieces are joined back into one spec string.
inline CLI::Option* grid_option(CLI::App& app, const std::string& name, std::string& target,
                                const std::string& help) {
  return app.add_option(name, target, help)
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
}

inline void add_options(CLI::App& app, CliOptions& o) {
  app.set_config("--config", "", "INI-style file of key=value lines; flags override it");
  app.add_option("--experiment", o.experiment,
                 "pe_sweep | threshold_sweep | pe_surface | capacity_m1 | capacity_multimode | "
                 "info_rate | gauss_vs_nb | mode_count");
  grid_option(app, "--ns", o.ns, "signal photons per mode: value, list or range");
  app.add_option("--nb", o.nb, "thermal background photons per mode");
  app.add_option("--eta", o.eta, "channel transmittivity in (0, 1]");
  app.add_option("--gain", o.gain, "OPA gain (>= 1)");
  grid_option(app, "-M,--modes", o.modes, "mode count: value, list or logspace:lo:hi:n");
  grid_option(app, "--p0", o.p0, "prior of theta = 0: value, list or range");
  grid_option(app, "--nth", o.nth, "threshold grid for pe_surface");
  grid_option(app, "--receiver", o.receiver, "comma list of opa-return, opa-idler, opc, oh");
  grid_option(app, "--model", o.model, "comma list of nb, gauss");
  app.add_option("--out", o.out, "output path (stdout when absent)");
  app.add_option("--format", o.format, "csv | json");
  app.add_option("--lambda", o.lambda, "centre wavelength in metres (mode_count)");
  app.add_option("--dlambda", o.dlambda, "phase-matching bandwidth in metres (mode_count)");
  app.add_option("--tm", o.tm, "measurement interval in seconds (mode_count)");
  app.add_option("--jobs", o.jobs, "worker threads; output does not depend on it");
}

/// Entry point of the sweep tool; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entanglement-assisted BPSK receiver sweeps"};
  CliOptions opts;
  add_options(app, opts);
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    const Format format = detail::parse_format(opts.format);
    const SweepSpec spec = build_spec(opts);
    const Table table = run_experiment(spec);
    if (opts.out.empty()) {
      out << serialize(table, format);
    } else {
      emit_table(table, format, opts.out);
    }
    return 0;
  } catch (const InvalidParameter& e) {
    err << "error: invalid " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedConfiguration& e) {
    err << "error: unsupported configuration: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    err << "error: numerical failure at " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    err << "error: domain error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace eabpsk::cli
