#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mappo/config.hpp"
#include "mappo/dataset.hpp"
#include "mappo/gradcheck.hpp"

namespace mappo {

Policy build_policy(const ExperimentConfig& cfg);
std::unique_ptr<RewardOracle> make_oracle(const DataConfig& data);

/// Held-out probe: the first diagnostics.probe_size records, never trained on.
struct DatasetSplit {
    ProbeSet probe;
    std::vector<PreferencePair> train;
};
DatasetSplit split_probe(const std::vector<PreferencePair>& pairs, int probe_size);

struct TrainArtifacts {
    TrainRun run;
    std::string checkpoint_path;
    std::string manifest_path;
    std::string diagnostics_csv;
};

/// Full `train` command body: runs the configured mode and writes checkpoint,
/// manifest, and diagnostics exports under out_dir.
TrainArtifacts run_train(const ExperimentConfig& cfg, const std::string& out_dir,
                         const nlohmann::json& config_doc,
                         const std::vector<std::string>& overrides);

struct CompareRow {
    Objective objective;
    double final_loss = 0.0;
    double grad_norm = 0.0;
    double d_logp_w = 0.0;
    double d_logp_l = 0.0;
    bool squeezed = false;
};

/// Runs each objective under shared seed and data; offline mode only.
std::vector<CompareRow> run_compare(const ExperimentConfig& cfg,
                                    const std::vector<Objective>& objectives);

void write_compare_csv(const std::vector<CompareRow>& rows,
                       const std::string& path);

}  // namespace mappo
