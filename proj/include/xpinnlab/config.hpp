#pragma once

#include "xpinnlab/toml.hpp"
#include "xpinnlab/trainer.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace xpinnlab::config {

struct NetConfig {
    std::vector<std::size_t> hidden{16, 16, 16, 16};
    ActivationKind activation = ActivationKind::Tanh;
};

struct BoundsConfig {
    double delta = 0.1;
    double c1 = 1.0;
    bool include_bias = true;
};

struct RunConfig {
    std::int64_t schema = 1;
    std::string benchmark;           // kdv | heat | advection | poisson
    std::string model = "pinn";      // pinn | xpinn
    std::string decomposition;       // builtin name; defaults to the benchmark
    std::string out = "runs/run";
    std::vector<std::uint64_t> seeds{0};
    std::string reference_path;      // external solution grid (required for kdv)
    NetConfig net;
    train::TrainConfig train;
    BoundsConfig bounds;
    std::size_t eval_n0 = 0, eval_n1 = 0; // 0 = benchmark default
};

/// Parse + validate; every complaint is a ConfigError naming the key.
RunConfig run_config_from_document(const toml::Document& doc);
RunConfig load_run_config(const std::string& path);

} // namespace xpinnlab::config
