#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "mappo/policy.hpp"

namespace mappo {

/// Deterministic scorer mapping (prompt, response) to a reward in [0,1].
/// Stands in for the pre-trained reward model; implementations must be pure.
class RewardOracle {
  public:
    virtual ~RewardOracle() = default;
    virtual double reward(std::span<const int> x, std::span<const int> y) const = 0;
};

/// Fraction of positions matching a per-prompt target sequence, penalized
/// by length mismatch: matches / max(|y|, |target|).
class TargetMatchOracle : public RewardOracle {
  public:
    explicit TargetMatchOracle(std::map<Tokens, Tokens> targets)
        : targets_(std::move(targets)) {}
    double reward(std::span<const int> x, std::span<const int> y) const override;

  private:
    std::map<Tokens, Tokens> targets_;
};

/// Explicit (prompt, response) -> reward lookup for enumerable instances.
class TableOracle : public RewardOracle {
  public:
    TableOracle(std::map<std::pair<Tokens, Tokens>, double> table,
                double default_reward = 0.0);
    double reward(std::span<const int> x, std::span<const int> y) const override;

  private:
    std::map<std::pair<Tokens, Tokens>, double> table_;
    double default_reward_;
};

/// Pseudo-random but deterministic reward from a hash of (x, y); handy for
/// smoke runs with no hand-built table.
class HashOracle : public RewardOracle {
  public:
    explicit HashOracle(std::uint64_t salt = 0) : salt_(salt) {}
    double reward(std::span<const int> x, std::span<const int> y) const override;

  private:
    std::uint64_t salt_;
};

struct PreferencePair {
    Tokens x;
    Tokens y_w;
    Tokens y_l;
    double r_w = 0.0;
    double r_l = 0.0;
    double delta_r = 0.0;  // clamp(r_w - r_l, 0, 1)
};

struct SamplerConfig {
    int n_responses = 8;
    double temperature = 1.0;
    std::uint64_t seed = 0;
};

/// Bradley-Terry probability that y_w beats y_l: 1/(1+exp(r_l - r_w)).
double bt_probability(double r_w, double r_l);

/// Prior preference probability
/// (exp(r_w) + exp(delta_r * r_l)) / (exp(r_w) + exp(r_l)).
double prior_probability(double r_w, double r_l, double delta_r);

/// Best-of-n / worst-of-n selection over scored responses. Ties break by
/// first occurrence. Throws DegeneratePairError when all responses compare
/// equal as sequences.
PreferencePair make_pair(const Tokens& x, const std::vector<Tokens>& responses,
                         const RewardOracle& oracle);

/// Per prompt: sample cfg.n_responses from p, deduplicate, rank by reward.
/// Prompts whose samples collapse to one distinct response are dropped.
/// Reproducible under cfg.seed; result order matches prompt order.
std::vector<PreferencePair> generate_pairs(const Policy& p,
                                           const std::vector<Tokens>& prompts,
                                           const RewardOracle& oracle,
                                           const SamplerConfig& cfg);

/// Serial reference for generate_pairs (no OpenMP fan-out); must produce
/// identical output.
std::vector<PreferencePair> generate_pairs_serial(const Policy& p,
                                                  const std::vector<Tokens>& prompts,
                                                  const RewardOracle& oracle,
                                                  const SamplerConfig& cfg);

void validate_pair(const PreferencePair& pair);

}  // namespace mappo
