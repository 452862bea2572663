#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "radlearn/diagnostics.hpp"
#include "radlearn/forest.hpp"
#include "radlearn/nn.hpp"
#include "radlearn/rfe.hpp"
#include "radlearn/serialize.hpp"
#include "radlearn/texture.hpp"
#include "radlearn/volume.hpp"

namespace radlearn {

struct Seeds {
    std::uint64_t phantom = 1;
    std::uint64_t forest = 2;
    std::uint64_t cv = 3;
    std::uint64_t net = 4;
    std::uint64_t train = 5;
    std::uint64_t data = 6;
};

struct TrainDataConfig {
    std::size_t n_samples = 200;  // synthetic two-blob set when no manifest is given
    double noise_sigma = 0.1;
    std::size_t validation_folds = 5;  // fold 0 held out; 0 disables validation
};

struct PipelineConfig {
    PhantomSpec phantom;
    ExtractionConfig extraction;
    double filter_alpha = 0.05;
    ForestConfig forest;
    RfeConfig rfe;
    bool rfe_use_significant = true;
    std::size_t cluster_k = 3;
    NetConfig net;
    TrainConfig train;
    TrainDataConfig train_data;
    DiagnoseConfig diagnose;
    Seeds seeds;
};

/// Parses a config document; unknown keys raise ConfigError. Missing keys keep defaults.
PipelineConfig parse_config(const Json& doc);
PipelineConfig load_config(const std::filesystem::path& path);
Json config_to_json(const PipelineConfig& cfg);
/// Replaces every seed with an independent stream derived from `seed`.
void override_seeds(PipelineConfig& cfg, std::uint64_t seed);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point shared by the executable and the tests.
int run_cli(const std::vector<std::string>& args);

}  // namespace radlearn
