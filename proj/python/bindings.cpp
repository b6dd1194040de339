#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cramsnn/cli.hpp"
#include "cramsnn/config.hpp"
#include "cramsnn/costs.hpp"
#include "cramsnn/error.hpp"
#include "cramsnn/fabric.hpp"
#include "cramsnn/lif.hpp"
#include "cramsnn/network.hpp"
#include "cramsnn/oracle.hpp"
#include "cramsnn/stdp.hpp"
#include "cramsnn/verify.hpp"

namespace py = pybind11;
using namespace cramsnn;

namespace {

py::dict metrics_dict(const SpikeMetrics& m) {
  py::dict d;
  d["energy"] = m.energy;
  d["time"] = m.time;
  d["edp"] = m.edp;
  return d;
}

py::tuple run_cli(const std::vector<std::string>& args) {
  ExperimentSpec spec;
  if (args.empty()) throw py::value_error("need a command");
  spec.command = args[0];
  for (std::size_t k = 1; k < args.size(); ++k) {
    const std::string& a = args[k];
    auto next = [&]() -> const std::string& {
      if (k + 1 >= args.size()) throw py::value_error("missing value for " + a);
      return args[++k];
    };
    if (a == "--profile") spec.profile = next();
    else if (a == "--config") spec.config = next();
    else if (a == "--axis") spec.axis = next();
    else if (a == "--values") spec.values = next();
    else if (a == "--out") spec.out = next();
    else if (a == "--weights-out") spec.weights_out = next();
    else if (a == "--seed") spec.seed = std::stoull(next());
    else if (a == "--threads") spec.threads = static_cast<unsigned>(std::stoul(next()));
    else if (a == "--neurons") spec.neurons = std::stod(next());
    else if (a == "--configs") spec.configs = std::stoul(next());
    else if (a == "--learning") spec.learning = true;
    else if (a == "--noise") spec.noise = true;
    else throw py::value_error("unknown option " + a);
  }
  std::ostringstream out, err;
  const int code = run_experiment(spec, out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gate-level CRAM spiking network simulator";

  static py::exception<Error> error(m, "CramError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::enum_<DecayMode>(m, "DecayMode").value("Leaky", DecayMode::Leaky).value("Literal", DecayMode::Literal);
  py::enum_<FScale>(m, "FScale").value("Tau", FScale::Tau).value("InverseTau", FScale::InverseTau);

  py::class_<DeviceProfile>(m, "DeviceProfile")
      .def_static("builtin", &DeviceProfile::builtin)
      .def_static("builtin_names", &DeviceProfile::builtin_names)
      .def_readonly("name", &DeviceProfile::name)
      .def_readonly("r_parallel", &DeviceProfile::r_parallel)
      .def_readonly("r_antiparallel", &DeviceProfile::r_antiparallel)
      .def_readonly("t_switch", &DeviceProfile::t_switch)
      .def_readonly("i_switch", &DeviceProfile::i_switch)
      .def_readonly("calibration_energy_scale", &DeviceProfile::calibration_energy_scale)
      .def_readonly("calibration_time_scale", &DeviceProfile::calibration_time_scale)
      .def("preset_batch", &DeviceProfile::preset_batch);

  py::class_<StdpParams>(m, "StdpParams")
      .def(py::init<>())
      .def_readwrite("enabled", &StdpParams::enabled)
      .def_readwrite("a_plus", &StdpParams::a_plus)
      .def_readwrite("a_minus", &StdpParams::a_minus)
      .def_readwrite("t_max", &StdpParams::t_max)
      .def_readwrite("precision", &StdpParams::precision)
      .def_readwrite("f_scale", &StdpParams::f_scale);

  py::class_<NeuronParams>(m, "NeuronParams")
      .def(py::init<>())
      .def_readwrite("j", &NeuronParams::j)
      .def_readwrite("S", &NeuronParams::S)
      .def_readwrite("L_f", &NeuronParams::L_f)
      .def_readwrite("tau_u", &NeuronParams::tau_u)
      .def_readwrite("tau_v", &NeuronParams::tau_v)
      .def_readwrite("theta", &NeuronParams::theta)
      .def_readwrite("bias", &NeuronParams::bias)
      .def_readwrite("weights", &NeuronParams::weights)
      .def_readwrite("delays", &NeuronParams::delays)
      .def_readwrite("decay", &NeuronParams::decay)
      .def_readwrite("noise_current", &NeuronParams::noise_current)
      .def_readwrite("noise_membrane", &NeuronParams::noise_membrane)
      .def_readwrite("stdp", &NeuronParams::stdp)
      .def("validate", &NeuronParams::validate);

  py::class_<LayoutPlan>(m, "LayoutPlan")
      .def_readonly("array_size", &LayoutPlan::array_size)
      .def_readonly("static_rows", &LayoutPlan::static_rows)
      .def_readonly("utilization", &LayoutPlan::utilization);
  m.def("plan_layout", &plan_layout, py::arg("S"), py::arg("L_f"));
  m.def("quantize_alpha_lut", &quantize_alpha_lut, py::arg("tau_u"), py::arg("L_f"), py::arg("S"));
  m.def("fixed_round", &fixed_round, py::arg("x"), py::arg("width"), py::arg("bits"));

  py::class_<Neuron>(m, "Neuron")
      .def(py::init([](const NeuronParams& p, const std::string& profile) {
             return std::make_unique<Neuron>(p, DeviceProfile::builtin(profile));
           }),
           py::arg("params"), py::arg("profile") = "SHE-F")
      .def("timestep", &Neuron::timestep)
      .def_property_readonly("membrane", &Neuron::membrane)
      .def_property_readonly("spike", &Neuron::spike)
      .def_property_readonly("last_current", &Neuron::last_current)
      .def("weight", &Neuron::weight)
      .def("metrics", [](const Neuron& n) { return metrics_dict(per_spike_metrics(n.array().ledger())); });

  py::class_<StdpEngine>(m, "StdpEngine")
      .def(py::init<Neuron&>(), py::keep_alive<1, 2>())
      .def("update", &StdpEngine::update)
      .def("dt_pre", &StdpEngine::dt_pre)
      .def_property_readonly("dt_post", &StdpEngine::dt_post)
      .def("accumulator", &StdpEngine::accumulator);

  py::class_<FixedPointNeuron>(m, "FixedPointNeuron")
      .def(py::init<NeuronParams>())
      .def("step", &FixedPointNeuron::step)
      .def_readonly("membrane", &FixedPointNeuron::membrane)
      .def_readonly("current", &FixedPointNeuron::current)
      .def_readonly("weights", &FixedPointNeuron::weights);

  py::class_<GdbgTopology>(m, "GdbgTopology")
      .def_readonly("N", &GdbgTopology::N)
      .def_readonly("out_edges", &GdbgTopology::out_edges)
      .def_readonly("in_edges", &GdbgTopology::in_edges)
      .def("diameter", &GdbgTopology::diameter);
  m.def("build_topology", &build_topology);
  py::class_<RoutingProgram>(m, "RoutingProgram")
      .def("stages", &RoutingProgram::stages)
      .def("address_bits", &RoutingProgram::address_bits)
      .def_readonly("presynaptic", &RoutingProgram::presynaptic);
  m.def("compile_routing", &compile_routing);
  m.def("default_presynaptic", &default_presynaptic);
  m.def(
      "route",
      [](const GdbgTopology& t, const RoutingProgram& p, const std::vector<std::uint8_t>& spikes) {
        std::vector<std::vector<std::uint8_t>> out;
        for (auto& b : route_timestep(t, p, spikes, DeviceProfile::builtin("SHE-F"))) out.push_back(b.spikes);
        return out;
      },
      "Spike trains delivered to each array");

  m.def(
      "spike_metrics",
      [](const std::string& profile, unsigned S, std::size_t L_f, std::size_t j) {
        return metrics_dict(per_spike_metrics(measure_spike_workload(DeviceProfile::builtin(profile), S, L_f, j)));
      },
      py::arg("profile") = "SHE-F", py::arg("S") = 1, py::arg("L_f") = 32, py::arg("j") = 1);
  m.def(
      "stdp_metrics",
      [](const std::string& profile, unsigned S, std::size_t L_f, std::size_t j) {
        return metrics_dict(per_spike_metrics(measure_stdp_workload(DeviceProfile::builtin(profile), S, L_f, j)));
      },
      py::arg("profile") = "SHE-F", py::arg("S") = 1, py::arg("L_f") = 32, py::arg("j") = 1);
  m.def("rmse_curve", []() {
    std::vector<std::pair<unsigned, double>> out;
    for (const auto& p : rmse_analysis(RmseStudy{})) out.emplace_back(p.bits, p.rmse);
    return out;
  });
  m.def("run", &run_cli, py::arg("args"),
        "Runs a command line such as ['sweep', '--axis', 'S', '--values', '1..4']; returns (code, stdout, stderr).");
}
