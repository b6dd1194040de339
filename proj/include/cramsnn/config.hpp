#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cramsnn/device.hpp"
#include "cramsnn/lif.hpp"

namespace cramsnn {

/// A network plus run controls.
struct ExperimentConfig {
  SnnConfig snn;
  std::size_t steps = 100;
  std::uint64_t seed = 1;
  /// Probability of an external spike per synapse per step, OR-ed with routed spikes.
  double input_rate = 0.0;
};

/// Parses the JSON experiment format. Missing tables get defaults: weights
/// 2^(S-1), delays 1, theta 2^(S-1), bias 0. Scalars broadcast to all
/// neurons. Throws ErrorKind::Config on malformed input.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig default_config();

/// Rows of unsigned integers. Blank lines and lines starting with '#' are skipped.
std::vector<std::vector<std::uint64_t>> parse_csv_matrix(const std::string& text);
/// Row i holds neuron i's j weights, optionally followed by its j delays.
void load_weight_csv(const std::filesystem::path& path, SnnConfig& cfg);
std::string weights_csv(const std::vector<std::vector<std::uint32_t>>& weights);

/// Built-in name (STT-M, STT-F, SHE-M, SHE-F) or a JSON profile file whose
/// keys mirror the DeviceProfile fields; unspecified gate voltages default
/// to the midpoint rule.
DeviceProfile load_profile(const std::string& name_or_path);
DeviceProfile parse_profile(const std::string& json_text);

}  // namespace cramsnn
