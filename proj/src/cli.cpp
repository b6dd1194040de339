#include "cramsnn/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cramsnn/config.hpp"
#include "cramsnn/costs.hpp"
#include "cramsnn/error.hpp"
#include "cramsnn/network.hpp"
#include "cramsnn/oracle.hpp"
#include "cramsnn/verify.hpp"

namespace cramsnn {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const CsvTable& t) {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += ',';
      out += cells[k];
    }
    out += '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return out;
}

void emit_csv(const CsvTable& table, const std::string& path, std::ostream& fallback) {
  const std::string text = to_csv(table);
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Output, "cannot write " + path);
  f << text;
  f.flush();
  if (!f) fail(ErrorKind::Output, "failed writing " + path);
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  auto number = [](const std::string& s) {
    double v = 0.0;
    const auto b = s.find_first_not_of(' ');
    const auto e = s.find_last_not_of(' ');
    if (b == std::string::npos) fail(ErrorKind::OutOfRange, "empty sweep value");
    const auto res = std::from_chars(s.data() + b, s.data() + e + 1, v);
    if (res.ec != std::errc() || res.ptr != s.data() + e + 1 || !std::isfinite(v))
      fail(ErrorKind::OutOfRange, "not a number: '" + s + "'");
    return v;
  };
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(number(item));
      continue;
    }
    const double a = number(item.substr(0, dots));
    const double b = number(item.substr(dots + 2));
    if (a != std::floor(a) || b != std::floor(b) || b < a) fail(ErrorKind::OutOfRange, "bad range '" + item + "'");
    if (b - a > 1e6) fail(ErrorKind::OutOfRange, "range too long '" + item + "'");
    for (double v = a; v <= b; v += 1.0) out.push_back(v);
  }
  return out;
}

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Io: return kExitConfig;
    case ErrorKind::OutOfRange: return kExitSweepValues;
    case ErrorKind::Routing: return kExitRouting;
    case ErrorKind::Output: return kExitOutput;
    case ErrorKind::InvalidArgument: return kExitUsage;
    case ErrorKind::Device:
    case ErrorKind::Invariant: return kExitInvariant;
  }
  return kExitInvariant;
}

ExperimentConfig load_or_default(const ExperimentSpec& spec) {
  ExperimentConfig cfg = spec.config.empty() ? default_config() : load_config(spec.config);
  if (spec.seed) cfg.seed = *spec.seed;
  if (spec.noise) cfg.snn.noise_current = true;
  if (spec.noise) cfg.snn.validate();
  return cfg;
}

std::string s(std::size_t v) { return std::to_string(v); }
std::string d(double v) { return format_double(v); }

int cmd_simulate(const ExperimentSpec& spec, std::ostream& out) {
  const ExperimentConfig cfg = load_or_default(spec);
  const DeviceProfile profile = load_profile(spec.profile);
  Network net(cfg, profile, spec.learning, spec.threads);
  CsvTable t{{"step", "neuron", "spike", "membrane", "current"}, {}};
  std::size_t spikes = 0;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    const StepRecord rec = net.step();
    for (std::size_t i = 0; i < net.size(); ++i) {
      t.rows.push_back({s(step), s(i), s(rec.spikes[i]), s(rec.membrane[i]), s(rec.current[i])});
      spikes += rec.spikes[i];
    }
  }
  emit_csv(t, spec.out, out);
  if (!spec.weights_out.empty()) {
    std::ofstream f(spec.weights_out, std::ios::binary);
    if (!f) fail(ErrorKind::Output, "cannot write " + spec.weights_out);
    f << weights_csv(net.weights());
  }
  if (!spec.out.empty()) {
    const CostLedger total = net.compute_ledger() + net.routing_ledger();
    out << "steps " << cfg.steps << " neurons " << net.size() << " spikes " << spikes << " energy "
        << d(total.total_energy()) << " J\n";
  }
  return kExitOk;
}

struct SweepPoint {
  double N;
  std::size_t j;
  unsigned S;
  std::size_t L_f;
};

int cmd_sweep(const ExperimentSpec& spec, std::ostream& out) {
  if (spec.axis != "N" && spec.axis != "S" && spec.axis != "L_f")
    fail(ErrorKind::InvalidArgument, "--axis must be N, S or L_f");
  const std::vector<double> values = spec.values.empty() ? std::vector<double>{} : parse_values(spec.values);
  SweepPoint base{1.0, 1, 1, 32};
  if (!spec.config.empty()) {
    const ExperimentConfig cfg = load_config(spec.config);
    base = {static_cast<double>(cfg.snn.N), cfg.snn.j, cfg.snn.S, cfg.snn.L_f};
  }
  std::vector<SweepPoint> points;
  for (double v : values) {
    if (v != std::floor(v) || v < 1.0) fail(ErrorKind::OutOfRange, "sweep values must be positive integers");
    SweepPoint p = base;
    if (spec.axis == "N") {
      if (v < static_cast<double>(p.j)) fail(ErrorKind::OutOfRange, "N must be at least j");
      p.N = v;
    } else if (spec.axis == "S") {
      if (v > 16) fail(ErrorKind::OutOfRange, "S must be in [1, 16]");
      p.S = static_cast<unsigned>(v);
    } else {
      if (v > 4096) fail(ErrorKind::OutOfRange, "L_f must be in [1, 4096]");
      p.L_f = static_cast<std::size_t>(v);
    }
    try {
      plan_layout(p.S, p.L_f);
    } catch (const Error& e) {
      fail(ErrorKind::OutOfRange, e.what());
    }
    points.push_back(p);
  }
  const DeviceProfile profile = load_profile(spec.profile);
  std::vector<std::vector<std::string>> rows(points.size());
  parallel_for(points.size(), spec.threads, [&](std::size_t k) {
    const SweepPoint& p = points[k];
    const LayoutPlan plan = plan_layout(p.S, p.L_f);
    const CostLedger spike = measure_spike_workload(profile, p.S, p.L_f, p.j);
    const CostLedger stdp = measure_stdp_workload(profile, p.S, p.L_f, p.j, std::max(10u, p.S));
    const MetricsReport r = aggregate_report(spike, p.N, p.j, profile);
    const SpikeMetrics sm = per_spike_metrics(stdp);
    rows[k] = {spec.axis, d(values[k]), d(p.N), s(p.j), s(p.S), s(p.L_f), s(plan.array_size), d(plan.utilization),
               d(r.compute_time), d(r.routing_time), d(r.execution_time), d(r.energy), d(r.edp), d(sm.time),
               d(sm.energy), d(sm.edp)};
  });
  CsvTable t{{"axis", "value", "N", "j", "S", "L_f", "array_size", "utilization", "compute_time", "routing_time",
              "time", "energy", "edp", "stdp_time", "stdp_energy", "stdp_edp"},
             std::move(rows)};
  emit_csv(t, spec.out, out);
  return kExitOk;
}

int cmd_verify(const ExperimentSpec& spec, std::ostream& out) {
  const auto results = run_verification(spec.seed.value_or(1), spec.configs);
  bool ok = true;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitInvariant;
}

int cmd_report(const ExperimentSpec& spec, std::ostream& out) {
  const DeviceProfile profile = load_profile(spec.profile);
  std::size_t j = 1024, L_f = 64;
  unsigned S = 1;
  if (!spec.config.empty()) {
    const ExperimentConfig cfg = load_config(spec.config);
    j = cfg.snn.j;
    L_f = cfg.snn.L_f;
    S = cfg.snn.S;
  }
  if (!(spec.neurons >= static_cast<double>(j))) fail(ErrorKind::InvalidArgument, "--neurons must be at least j");
  const CostLedger spike = measure_spike_workload(profile, S, 32, 1);
  const CostLedger stdp = measure_stdp_workload(profile, S, 32, 1, std::max(10u, S));
  const CostLedger array = measure_spike_workload(profile, S, L_f, j);
  const SpikeMetrics sm = per_spike_metrics(spike);
  const SpikeMetrics tm = per_spike_metrics(stdp);
  const RatioReport ratios = ratio_report(sm, tm);
  const MetricsReport net = aggregate_report(array, spec.neurons, j, profile);
  const Breakdown bs = breakdown_report(spike);
  const Breakdown bt = breakdown_report(stdp);
  CsvTable t{{"metric", "value"}, {}};
  auto add = [&t](const std::string& k, const std::string& v) { t.rows.push_back({k, v}); };
  add("profile", profile.name);
  add("spike_energy_J", d(sm.energy));
  add("spike_time_s", d(sm.time));
  add("spike_edp_Js", d(sm.edp));
  add("stdp_energy_J", d(tm.energy));
  add("stdp_time_s", d(tm.time));
  add("stdp_edp_Js", d(tm.edp));
  add("spike_energy_ratio", d(ratios.spike_energy));
  add("spike_edp_ratio", d(ratios.spike_edp));
  add("stdp_energy_ratio", d(ratios.stdp_energy));
  add("stdp_edp_ratio", d(ratios.stdp_edp));
  add("network_N", d(spec.neurons));
  add("network_j", s(j));
  add("network_S", s(S));
  add("network_L_f", s(L_f));
  add("network_compute_time_s", d(net.compute_time));
  add("network_routing_time_s", d(net.routing_time));
  add("network_time_s", d(net.execution_time));
  add("network_max_rate_Hz", d(net.max_spiking_rate));
  add("network_energy_J", d(net.energy));
  add("network_routing_energy_J", d(net.routing_energy));
  add("network_edp_Js", d(net.edp));
  add("cross_check_NxjxE_spike_J", d(spec.neurons * static_cast<double>(j) * sm.energy));
  for (std::size_t k = 0; k < kBreakdownClassCount; ++k) {
    const std::string name(breakdown_class_name(static_cast<BreakdownClass>(k)));
    add("spike_breakdown_" + name, d(bs.fraction[k]));
  }
  for (std::size_t k = 0; k < kBreakdownClassCount; ++k) {
    const std::string name(breakdown_class_name(static_cast<BreakdownClass>(k)));
    add("stdp_breakdown_" + name, d(bt.fraction[k]));
  }
  emit_csv(t, spec.out, out);
  return kExitOk;
}

int cmd_rmse(const ExperimentSpec& spec, std::ostream& out) {
  RmseStudy study;
  if (spec.seed) study.seed = *spec.seed;
  CsvTable t{{"bit_length", "rmse"}, {}};
  for (const auto& p : rmse_analysis(study)) t.rows.push_back({s(p.bits), d(p.rmse)});
  emit_csv(t, spec.out, out);
  return kExitOk;
}

int cmd_calibrate(const ExperimentSpec& spec, std::ostream& out) {
  const CalibrationResult c = calibrate(spec.profile);
  CsvTable t{{"constant", "value"},
             {{"energy_scale", d(c.energy_scale)},
              {"time_scale", d(c.time_scale)},
              {"controller_energy_J", d(c.controller_overhead.energy)},
              {"controller_time_s", d(c.controller_overhead.time)}}};
  emit_csv(t, spec.out, out);
  return kExitOk;
}

}  // namespace

int run_experiment(const ExperimentSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    if (spec.command == "simulate") return cmd_simulate(spec, out);
    if (spec.command == "sweep") return cmd_sweep(spec, out);
    if (spec.command == "verify") return cmd_verify(spec, out);
    if (spec.command == "report") return cmd_report(spec, out);
    if (spec.command == "rmse") return cmd_rmse(spec, out);
    if (spec.command == "calibrate") return cmd_calibrate(spec, out);
    err << "unknown command '" << spec.command << "'\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
}

int cli_main(int argc, char** argv) {
  CLI::App app{"CRAM spiking neural network simulator"};
  app.require_subcommand(1);
  ExperimentSpec spec;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--profile", spec.profile, "Device profile name or JSON file")->capture_default_str();
    sub->add_option("--out", spec.out, "Output CSV path (default stdout)");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--threads", spec.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  };
  auto* sim = app.add_subcommand("simulate", "Run a gate-level network simulation");
  common(sim);
  sim->add_option("--config", spec.config, "JSON experiment config");
  sim->add_flag("--learning", spec.learning, "Enable STDP");
  sim->add_flag("--noise", spec.noise, "Add LFSR noise to the synaptic current");
  sim->add_option("--weights-out", spec.weights_out, "Write the final weight matrix as CSV");
  auto* sweep = app.add_subcommand("sweep", "Sweep N, S or L_f and report per-point costs");
  common(sweep);
  sweep->add_option("--config", spec.config, "Base JSON config");
  sweep->add_option("--axis", spec.axis, "N, S or L_f")->required();
  sweep->add_option("--values", spec.values, "Comma list, ranges a..b allowed")->required();
  auto* ver = app.add_subcommand("verify", "Run oracle equivalence suites");
  common(ver);
  ver->add_option("--configs", spec.configs, "Random neuron configurations")->check(CLI::PositiveNumber);
  auto* rep = app.add_subcommand("report", "Per-spike, STDP, ratio and network metrics");
  common(rep);
  rep->add_option("--config", spec.config, "JSON config supplying j, S, L_f");
  rep->add_option("--neurons", spec.neurons, "Network size for the aggregate")->capture_default_str();
  auto* rm = app.add_subcommand("rmse", "LUT entry width quantization study");
  common(rm);
  auto* cal = app.add_subcommand("calibrate", "Fit calibration constants for a profile");
  common(cal);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  for (auto* sub : app.get_subcommands()) {
    spec.command = sub->get_name();
    if (sub->count("--seed")) spec.seed = seed;
  }
  return run_experiment(spec, std::cout, std::cerr);
}

}  // namespace cramsnn
