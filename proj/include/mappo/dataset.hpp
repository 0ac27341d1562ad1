#pragma once

#include <string>
#include <vector>

#include "mappo/rewards.hpp"

namespace mappo {

/// Line-delimited records: prompt (int array), chosen (int array),
/// rejected (int array), reward_chosen (float), reward_rejected (float).
/// delta_r is recomputed and validated on load.
std::vector<PreferencePair> load_dataset(const std::string& path);
void save_dataset(const std::vector<PreferencePair>& pairs,
                  const std::string& path);

struct DatasetIssue {
    std::size_t line = 0;
    std::string message;
};

/// Schema, reward-range, delta_r-consistency, and y_w != y_l checks;
/// returns all problems instead of stopping at the first.
std::vector<DatasetIssue> validate_dataset_file(const std::string& path);

std::vector<Tokens> load_prompts(const std::string& path);
void save_prompts(const std::vector<Tokens>& prompts, const std::string& path);

/// JSONL of {"prompt": [...], "target": [...]} records for TargetMatchOracle.
std::map<Tokens, Tokens> load_targets(const std::string& path);

/// Near-tie synthetic suite: prompts whose rejected response repeats the
/// chosen response's transition pattern, so MLE-style training squeezes
/// both likelihoods. Reward gap is at most `max_gap`.
struct NearTieSuite {
    std::vector<Tokens> prompts;
    std::vector<PreferencePair> pairs;
};
NearTieSuite make_near_tie_suite(int n_prompts, const Vocab& vocab,
                                 double max_gap = 0.03);

}  // namespace mappo
