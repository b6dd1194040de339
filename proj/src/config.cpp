#include "cramsnn/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cramsnn/error.hpp"

namespace cramsnn {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::vector<std::uint32_t> per_neuron(const json& j, const char* key, std::size_t N, std::uint32_t fallback) {
  if (!j.contains(key)) return std::vector<std::uint32_t>(N, fallback);
  const json& v = j.at(key);
  try {
    if (v.is_number()) return std::vector<std::uint32_t>(N, v.get<std::uint32_t>());
    auto out = v.get<std::vector<std::uint32_t>>();
    if (out.size() != N) fail(ErrorKind::Config, std::string("'") + key + "' needs N entries");
    return out;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::vector<std::vector<std::uint32_t>> matrix(const json& j, const char* key, std::size_t N, std::size_t cols,
                                               std::uint32_t fallback) {
  if (!j.contains(key)) return std::vector<std::vector<std::uint32_t>>(N, std::vector<std::uint32_t>(cols, fallback));
  const json& v = j.at(key);
  try {
    if (v.is_number())
      return std::vector<std::vector<std::uint32_t>>(N, std::vector<std::uint32_t>(cols, v.get<std::uint32_t>()));
    auto out = v.get<std::vector<std::vector<std::uint32_t>>>();
    if (out.size() != N) fail(ErrorKind::Config, std::string("'") + key + "' needs N rows");
    for (const auto& row : out)
      if (row.size() != cols) fail(ErrorKind::Config, std::string("'") + key + "' rows need j entries");
    return out;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("bad value for '") + key + "': " + e.what());
  }
}

CopyMode parse_copy_mode(const std::string& s) {
  if (s == "read_write") return CopyMode::ReadWrite;
  if (s == "gate") return CopyMode::Gate;
  fail(ErrorKind::Config, "copy_mode must be 'read_write' or 'gate'");
}

}  // namespace

ExperimentConfig default_config() { return parse_config("{}"); }

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
  ExperimentConfig ex;
  SnnConfig& c = ex.snn;
  c.N = get_or<std::size_t>(j, "N", 1);
  c.j = get_or<std::size_t>(j, "j", 1);
  c.S = get_or<unsigned>(j, "S", 4);
  c.L_f = get_or<std::size_t>(j, "L_f", 32);
  c.tau_u = get_or<double>(j, "tau_u", 4.0);
  c.tau_v = get_or<double>(j, "tau_v", 2.0);
  if (c.S < 1 || c.S > 16) fail(ErrorKind::Config, "S must be in [1, 16]");
  const std::uint32_t half = std::uint32_t{1} << (c.S - 1);
  c.theta = per_neuron(j, "theta", c.N, half);
  c.bias = per_neuron(j, "bias", c.N, 0);
  c.weights = matrix(j, "weights", c.N, c.j, half);
  c.delays = matrix(j, "delays", c.N, c.j, 1);
  if (j.contains("weights_csv")) load_weight_csv(base_dir / get_or<std::string>(j, "weights_csv", ""), c);
  if (j.contains("presynaptic")) {
    try {
      c.presynaptic = j.at("presynaptic").get<std::vector<std::vector<std::size_t>>>();
    } catch (const json::exception& e) {
      fail(ErrorKind::Config, std::string("bad value for 'presynaptic': ") + e.what());
    }
  }
  const std::string decay = get_or<std::string>(j, "decay", "leaky");
  if (decay == "leaky")
    c.decay = DecayMode::Leaky;
  else if (decay == "literal")
    c.decay = DecayMode::Literal;
  else
    fail(ErrorKind::Config, "decay must be 'leaky' or 'literal'");

  if (j.contains("noise")) {
    const json& n = j.at("noise");
    c.noise_current = get_or<bool>(n, "current", false);
    c.noise_membrane = get_or<bool>(n, "membrane", false);
    c.lfsr.seed = get_or<std::uint32_t>(n, "seed", 1);
    c.lfsr.taps = get_or<std::vector<unsigned>>(n, "taps", {9, 5});
    c.lfsr.width = get_or<unsigned>(n, "width", 9);
    c.lfsr.shift = get_or<unsigned>(n, "shift", 0);
  }
  if (j.contains("stdp")) {
    const json& s = j.at("stdp");
    c.stdp.enabled = get_or<bool>(s, "enabled", true);
    c.stdp.a_plus = get_or<std::int32_t>(s, "A_plus", c.stdp.a_plus);
    c.stdp.a_minus = get_or<std::int32_t>(s, "A_minus", c.stdp.a_minus);
    c.stdp.t_max = get_or<std::uint32_t>(s, "t_max", c.stdp.t_max);
    c.stdp.precision = get_or<unsigned>(s, "precision", c.stdp.precision);
    const std::string scale = get_or<std::string>(s, "F_scale", "tau");
    if (scale == "tau")
      c.stdp.f_scale = FScale::Tau;
    else if (scale == "inverse_tau")
      c.stdp.f_scale = FScale::InverseTau;
    else
      fail(ErrorKind::Config, "F_scale must be 'tau' or 'inverse_tau'");
  }
  c.copy_mode = parse_copy_mode(get_or<std::string>(j, "copy_mode", "read_write"));
  ex.steps = get_or<std::size_t>(j, "steps", 100);
  ex.seed = get_or<std::uint64_t>(j, "seed", 1);
  ex.input_rate = get_or<double>(j, "input_rate", 0.0);
  if (!(ex.input_rate >= 0.0 && ex.input_rate <= 1.0)) fail(ErrorKind::Config, "input_rate must be in [0, 1]");
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  return ex;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::vector<std::vector<std::uint64_t>> parse_csv_matrix(const std::string& text) {
  std::vector<std::vector<std::uint64_t>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::uint64_t> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) fail(ErrorKind::Config, "empty CSV cell");
      const std::string tok = cell.substr(b, e - b + 1);
      std::size_t used = 0;
      std::uint64_t v = 0;
      try {
        v = std::stoull(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || tok[0] == '-') fail(ErrorKind::Config, "CSV cell is not an unsigned integer: " + tok);
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void load_weight_csv(const std::filesystem::path& path, SnnConfig& cfg) {
  const auto rows = parse_csv_matrix(read_file(path));
  if (rows.size() != cfg.N) fail(ErrorKind::Config, "weight CSV needs one row per neuron");
  for (std::size_t i = 0; i < cfg.N; ++i) {
    const auto& r = rows[i];
    if (r.size() != cfg.j && r.size() != 2 * cfg.j) fail(ErrorKind::Config, "weight CSV rows need j or 2j values");
    for (std::size_t k = 0; k < cfg.j; ++k) {
      cfg.weights[i][k] = static_cast<std::uint32_t>(r[k]);
      if (r.size() == 2 * cfg.j) cfg.delays[i][k] = static_cast<std::uint32_t>(r[cfg.j + k]);
    }
  }
}

std::string weights_csv(const std::vector<std::vector<std::uint32_t>>& weights) {
  std::string out;
  for (const auto& row : weights) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += std::to_string(row[k]);
    }
    out += '\n';
  }
  return out;
}

DeviceProfile parse_profile(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("profile is not valid JSON: ") + e.what());
  }
  DeviceProfile p = j.contains("base") ? DeviceProfile::builtin(get_or<std::string>(j, "base", "")) : DeviceProfile{};
  p.name = get_or<std::string>(j, "name", p.name.empty() ? std::string("custom") : p.name);
  p.r_parallel = get_or<double>(j, "r_parallel", p.r_parallel);
  p.r_antiparallel = get_or<double>(j, "r_antiparallel", p.r_antiparallel);
  p.t_switch = get_or<double>(j, "t_switch", p.t_switch);
  p.i_switch = get_or<double>(j, "i_switch", p.i_switch);
  p.i_preset_limit = get_or<double>(j, "i_preset_limit", p.i_preset_limit);
  const bool explicit_voltages = j.contains("gate_voltage");
  if (!j.contains("base") || j.contains("r_parallel") || j.contains("r_antiparallel") || j.contains("i_switch")) {
    assign_default_voltages(p);
  }
  if (explicit_voltages) {
    const json& gv = j.at("gate_voltage");
    if (!gv.is_object()) fail(ErrorKind::Config, "gate_voltage must map gate names to volts");
    for (auto it = gv.begin(); it != gv.end(); ++it) {
      GateKind kind{};
      try {
        kind = gate_kind_from_name(it.key());
      } catch (const Error&) {
        fail(ErrorKind::Config, "unknown gate '" + it.key() + "'");
      }
      p.gate_voltage[static_cast<std::size_t>(kind)] = it.value().get<double>();
    }
  }
  p.preset_voltage = get_or<double>(j, "preset_voltage", p.preset_voltage);
  const double default_write = p.i_switch * p.i_switch * p.r_antiparallel * p.t_switch;
  if (p.write_cost.energy == 0.0) p.write_cost = {default_write, p.t_switch};
  if (p.read_cost.energy == 0.0) p.read_cost = {0.1 * default_write, p.t_switch};
  if (j.contains("read_cost")) p.read_cost = {get_or<double>(j.at("read_cost"), "energy", p.read_cost.energy),
                                              get_or<double>(j.at("read_cost"), "time", p.read_cost.time)};
  if (j.contains("write_cost")) p.write_cost = {get_or<double>(j.at("write_cost"), "energy", p.write_cost.energy),
                                                get_or<double>(j.at("write_cost"), "time", p.write_cost.time)};
  p.calibration_energy_scale = get_or<double>(j, "calibration_energy_scale", p.calibration_energy_scale);
  p.calibration_time_scale = get_or<double>(j, "calibration_time_scale", p.calibration_time_scale);
  if (j.contains("controller_overhead"))
    p.controller_overhead = {get_or<double>(j.at("controller_overhead"), "energy", 0.0),
                             get_or<double>(j.at("controller_overhead"), "time", 0.0)};
  try {
    p.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, e.what());
  }
  return p;
}

DeviceProfile load_profile(const std::string& name_or_path) {
  for (const auto& n : DeviceProfile::builtin_names())
    if (n == name_or_path) return DeviceProfile::builtin(n);
  const std::filesystem::path path(name_or_path);
  if (!std::filesystem::exists(path)) fail(ErrorKind::Config, "unknown profile '" + name_or_path + "'");
  return parse_profile(read_file(path));
}

}  // namespace cramsnn
