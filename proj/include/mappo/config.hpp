#pragma once

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mappo/trainer.hpp"

namespace mappo {

struct PolicyConfig {
    int vocab_size = 12;
    int eos_id = 0;
    int context_order = 1;
    int max_len = 16;
    std::string init = "zeros";  // zeros | random
    double init_scale = 0.5;
    std::uint64_t init_seed = 1;
};

struct DataConfig {
    std::string dataset;        // offline JSONL pairs
    std::string prompts;        // online/iterative JSONL prompts
    std::string oracle = "hash";  // hash | target-match | table
    std::string targets;        // target-match oracle input
    std::string checkpoint_in;  // resume from a serialized policy
};

struct DiagnosticsConfig {
    int probe_size = 4;
    std::string export_csv = "diagnostics.csv";
    std::string export_jsonl;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    PolicyConfig policy;
    DataConfig data;
    DiagnosticsConfig diagnostics;
    TrainerConfig trainer;  // holds loss, optimizer, sampler

    nlohmann::json to_json() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_json(const nlohmann::json& j,
                                      const ExperimentConfig& base);
};

/// "desk" (runnable in seconds) or "paper-llm" (published hyperparameters).
ExperimentConfig preset(const std::string& name);

ExperimentConfig load_config(const std::string& path);

/// Applies a dotted-path override such as "loss.objective=DPO". The value is
/// parsed as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Flattened dotted-path key=value view, ordered; used for manifests.
std::vector<std::pair<std::string, std::string>> flatten_config(
    const nlohmann::json& doc);

struct ManifestInput {
    std::string name;
    std::string path;  // hashed if non-empty
};

void write_manifest(const std::string& path, const nlohmann::json& config,
                    const std::vector<std::string>& overrides,
                    const std::vector<ManifestInput>& inputs,
                    const std::vector<std::string>& artifacts);

std::uint64_t hash_file(const std::string& path);

}  // namespace mappo
