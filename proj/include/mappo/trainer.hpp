#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mappo/diagnostics.hpp"
#include "mappo/losses.hpp"
#include "mappo/optim.hpp"
#include "mappo/rewards.hpp"

namespace mappo {

enum class TrainerMode { Offline, OnlinePerStep, IterativeK };
enum class RefRefresh { Never, PerIteration };

std::string trainer_mode_name(TrainerMode m);
TrainerMode trainer_mode_from_name(const std::string& name);
std::string ref_refresh_name(RefRefresh r);
RefRefresh ref_refresh_from_name(const std::string& name);

struct TrainerConfig {
    TrainerMode mode = TrainerMode::Offline;
    int iterations = 3;  // K: subsets (IterativeK) or optimizer steps (OnlinePerStep)
    int batch_size = 16;
    int epochs_per_iteration = 1;
    std::uint64_t seed = 0;
    bool shuffle_prompts = false;  // seedable pre-shuffle before the K-way split
    LossConfig loss;
    OptimizerConfig optimizer;
    SamplerConfig sampler;
    RefRefresh ref_refresh = RefRefresh::Never;

    void validate() const;
};

struct TrainRun {
    Policy policy;
    ReferencePolicy reference;
    OptimizerState opt_state;
    std::int64_t steps = 0;
    int iterations_done = 0;
    std::vector<DiagnosticsRecord> diagnostics;
};

/// Fixed dataset, frozen reference taken from p before step 0. One
/// diagnostics record per optimizer step; probe defaults to the training
/// batch when none is supplied.
TrainRun train_offline(const Policy& p, const std::vector<PreferencePair>& dataset,
                       const TrainerConfig& cfg,
                       const std::optional<ProbeSet>& probe = std::nullopt);

/// Algorithm: K times, sample one prompt, draw best/worst-of-n from the
/// current policy, one optimizer step on that pair.
TrainRun train_online(const Policy& p, const std::vector<Tokens>& prompts,
                      const RewardOracle& oracle, const TrainerConfig& cfg,
                      const std::optional<ProbeSet>& probe = std::nullopt);

/// K-way contiguous prompt partition; per iteration: freeze policy, generate
/// pairs on the subset, then run the offline loop on those pairs.
TrainRun train_iterative(const Policy& p, const std::vector<Tokens>& prompts,
                         const RewardOracle& oracle, const TrainerConfig& cfg,
                         const std::optional<ProbeSet>& probe = std::nullopt);

/// Deterministic shuffle order used by the offline loop, exposed for tests.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed);

/// Contiguous equal K-way split; the remainder goes to the last range.
std::vector<std::pair<std::size_t, std::size_t>> partition_ranges(std::size_t n,
                                                                  int k);

}  // namespace mappo
