#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cramsnn/config.hpp"
#include "cramsnn/error.hpp"
#include "cramsnn/network.hpp"
#include "cramsnn/oracle.hpp"

using namespace cramsnn;

TEST_CASE("config defaults and broadcasting") {
  const ExperimentConfig c = parse_config(R"({"N": 4, "j": 2, "S": 5, "L_f": 8, "theta": 9, "steps": 7})");
  CHECK(c.snn.N == 4);
  CHECK(c.steps == 7);
  REQUIRE(c.snn.theta.size() == 4);
  for (auto t : c.snn.theta) CHECK(t == 9);
  for (const auto& row : c.snn.weights) {
    REQUIRE(row.size() == 2);
    CHECK(row[0] == 16);
  }
  for (auto b : c.snn.bias) CHECK(b == 0);
}

TEST_CASE("config options") {
  const ExperimentConfig c = parse_config(R"({
    "N": 2, "j": 1, "S": 4, "L_f": 4, "decay": "literal",
    "weights": [[3], [5]], "delays": [[1], [2]], "bias": [1, 2],
    "noise": {"current": true, "seed": 9},
    "stdp": {"enabled": true, "A_plus": 64, "A_minus": -32, "t_max": 7, "F_scale": "inverse_tau"},
    "copy_mode": "gate", "input_rate": 0.25, "seed": 4})");
  CHECK(c.snn.decay == DecayMode::Literal);
  CHECK(c.snn.weights[1][0] == 5);
  CHECK(c.snn.delays[1][0] == 2);
  CHECK(c.snn.noise_current);
  CHECK(c.snn.lfsr.seed == 9);
  CHECK(c.snn.stdp.enabled);
  CHECK(c.snn.stdp.a_minus == -32);
  CHECK(c.snn.stdp.f_scale == FScale::InverseTau);
  CHECK(c.snn.copy_mode == CopyMode::Gate);
  CHECK(c.input_rate == doctest::Approx(0.25));
  CHECK(c.seed == 4);
}

TEST_CASE("config errors") {
  auto kind = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Invariant;
  };
  CHECK(kind("{") == ErrorKind::Config);
  CHECK(kind(R"({"S": 0})") == ErrorKind::Config);
  CHECK(kind(R"({"j": 2, "weights": [[1]]})") == ErrorKind::Config);
  CHECK(kind(R"({"decay": "fast"})") == ErrorKind::Config);
  CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), Error);
  const ExperimentConfig odd = parse_config(R"({"N": 3, "j": 1})");
  CHECK_THROWS_AS(Network(odd, DeviceProfile::builtin("SHE-F"), false), Error);
}

TEST_CASE("weight CSV") {
  const auto m = parse_csv_matrix("# header\n1,2\n\n3, 4\n");
  REQUIRE(m.size() == 2);
  CHECK(m[1][1] == 4);
  CHECK_THROWS(parse_csv_matrix("1,x\n"));
  CHECK(weights_csv({{1, 2}, {3, 4}}) == "1,2\n3,4\n");

  const auto dir = std::filesystem::temp_directory_path() / "cramsnn_csv_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "w.csv");
    f << "7,8,1,2\n9,10,3,1\n";
  }
  const ExperimentConfig c =
      parse_config(R"({"N": 2, "j": 2, "S": 4, "L_f": 4, "weights_csv": "w.csv"})", dir);
  CHECK(c.snn.weights[1][1] == 10);
  CHECK(c.snn.delays[0][1] == 2);
  std::filesystem::remove_all(dir);
}

TEST_CASE("device profile files") {
  const DeviceProfile p = parse_profile(R"({"base": "SHE-F", "name": "custom", "t_switch": 2e-9})");
  CHECK(p.name == "custom");
  CHECK(p.t_switch == doctest::Approx(2e-9));
  CHECK(p.r_parallel == DeviceProfile::builtin("SHE-F").r_parallel);
  CHECK(load_profile("STT-M").name == "STT-M");
  CHECK_THROWS_AS(parse_profile(R"({"base": "SHE-F", "r_antiparallel": 1.0})"), Error);
}

TEST_CASE("single neuron network matches the fixed-point model") {
  ExperimentConfig c = parse_config(R"({"N": 1, "j": 4, "S": 4, "L_f": 8, "theta": 6, "bias": 3,
                                        "weights": [[15, 3, 7, 11]], "input_rate": 0.5, "seed": 3})");
  Network net(c, DeviceProfile::builtin("SHE-F"), false);
  FixedPointNeuron fixed(c.snn.neuron(0));
  std::size_t spikes = 0;
  for (int t = 0; t < 40; ++t) {
    const StepRecord r = net.step();
    // External inputs are not observable here, so compare against the gate neuron's own history.
    std::vector<std::uint8_t> in(4);
    for (std::size_t k = 0; k < 4; ++k) in[k] = net.neuron(0).history_bit(k, 0);
    CHECK(fixed.step(in) == bool(r.spikes[0]));
    CHECK(fixed.membrane == r.membrane[0]);
    spikes += r.spikes[0];
  }
  CHECK(spikes > 0);
}

TEST_CASE("network runs are deterministic across thread counts") {
  ExperimentConfig c = parse_config(R"({"N": 16, "j": 4, "S": 4, "L_f": 8, "theta": 5, "bias": 2,
                                        "input_rate": 0.3, "seed": 11,
                                        "stdp": {"enabled": true, "t_max": 7}})");
  auto run = [&](unsigned threads) {
    Network net(c, DeviceProfile::builtin("SHE-F"), true, threads);
    std::vector<StepRecord> out;
    for (int t = 0; t < 12; ++t) out.push_back(net.step());
    return std::make_pair(out, net.weights());
  };
  const auto a = run(1), b = run(4);
  REQUIRE(a.first.size() == b.first.size());
  for (std::size_t t = 0; t < a.first.size(); ++t) {
    CHECK(a.first[t].spikes == b.first[t].spikes);
    CHECK(a.first[t].membrane == b.first[t].membrane);
  }
  CHECK(a.second == b.second);
}

TEST_CASE("routed spikes reach listeners on the next step") {
  ExperimentConfig c = parse_config(R"({"N": 4, "j": 2, "S": 4, "L_f": 4, "theta": 1, "bias": 0,
                                        "weights": 0})");
  c.snn.bias[0] = 1;
  c.snn.validate();
  Network net(c, DeviceProfile::builtin("SHE-F"), false);
  const auto lists = net.program()->presynaptic;
  const StepRecord first = net.step();
  CHECK(first.spikes == std::vector<std::uint8_t>{1, 0, 0, 0});
  net.step();
  for (std::size_t v = 0; v < 4; ++v)
    for (std::size_t k = 0; k < 2; ++k)
      CHECK(net.neuron(v).history_bit(k, 0) == (lists[v][k] == 0));
  CHECK(net.routing_ledger().entry(CostClass::Routing).events > 0);
}

TEST_CASE("parallel_for visits each index once") {
  std::vector<int> hits(100, 0);
  parallel_for(hits.size(), 7, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
}
