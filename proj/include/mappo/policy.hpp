#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mappo/numeric.hpp"

namespace mappo {

using Tokens = std::vector<int>;

struct Vocab {
    int size = 2;
    int eos_id = 0;
};

/// Tabular order-n autoregressive softmax policy.
///
/// The context state is the last `context_order` tokens (prompt included),
/// encoded base (vocab+1) with a padding symbol for positions before the
/// start of the cascade. theta is a (num_states x vocab) logit table; all
/// log-probabilities and score functions are exact.
class Policy {
  public:
    Policy(Vocab vocab, int context_order, int max_len);

    const Vocab& vocab() const { return vocab_; }
    int context_order() const { return context_order_; }
    int max_len() const { return max_len_; }
    int num_states() const { return num_states_; }

    Vec& theta() { return theta_; }
    const Vec& theta() const { return theta_; }

    void randomize(double scale, std::uint64_t seed);

    /// Exact sequence log-likelihood sum_t log softmax(theta[s_t])[y_t], nats.
    double log_prob(std::span<const int> x, std::span<const int> y) const;

    /// Closed-form gradient of log_prob w.r.t. theta: for each visited state
    /// the row accumulates onehot(y_t) - softmax(theta[s_t]).
    Vec score(std::span<const int> x, std::span<const int> y) const;

    /// In-place variant: adds `weight * score` into `out` (sized like theta).
    void accumulate_score(std::span<const int> x, std::span<const int> y,
                          double weight, std::span<double> out) const;

    /// Ancestral sampling at the given temperature; stops at eos or max_len.
    /// temperature < 1e-6 decodes greedily.
    Tokens sample(std::span<const int> x, double temperature,
                  std::mt19937_64& rng) const;

    /// State index after consuming prompt x (start state for generation).
    int initial_state(std::span<const int> x) const;
    int advance_state(int state, int token) const;

    /// softmax(theta[state] / temperature), freshly computed.
    Vec state_distribution(int state, double temperature = 1.0) const;

    void save(const std::string& path) const;
    static Policy load(const std::string& path);

  private:
    void check_tokens(std::span<const int> t) const;

    Vocab vocab_;
    int context_order_;
    int max_len_;
    int num_states_;
    Vec theta_;
};

/// Frozen deep copy of a policy; immutable after snapshot.
class ReferencePolicy {
  public:
    explicit ReferencePolicy(const Policy& p) : snapshot_(p) {}

    double log_prob(std::span<const int> x, std::span<const int> y) const {
        return snapshot_.log_prob(x, y);
    }
    const Policy& policy() const { return snapshot_; }

  private:
    Policy snapshot_;
};

inline ReferencePolicy snapshot(const Policy& p) { return ReferencePolicy(p); }

}  // namespace mappo
