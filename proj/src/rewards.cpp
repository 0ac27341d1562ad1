#include "mappo/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mappo/errors.hpp"

namespace mappo {

double TargetMatchOracle::reward(std::span<const int> x,
                                 std::span<const int> y) const {
    Tokens key(x.begin(), x.end());
    auto it = targets_.find(key);
    if (it == targets_.end()) {
        return 0.0;
    }
    const Tokens& target = it->second;
    const std::size_t overlap = std::min(y.size(), target.size());
    std::size_t matches = 0;
    for (std::size_t i = 0; i < overlap; ++i) {
        if (y[i] == target[i]) {
            ++matches;
        }
    }
    const std::size_t denom = std::max(y.size(), target.size());
    return denom == 0 ? 0.0 : static_cast<double>(matches) / static_cast<double>(denom);
}

TableOracle::TableOracle(std::map<std::pair<Tokens, Tokens>, double> table,
                         double default_reward)
    : table_(std::move(table)), default_reward_(default_reward) {
    for (const auto& [key, r] : table_) {
        if (!(r >= 0.0 && r <= 1.0)) {
            throw InvalidInputError("table oracle reward outside [0,1]");
        }
    }
    if (!(default_reward_ >= 0.0 && default_reward_ <= 1.0)) {
        throw InvalidInputError("table oracle default reward outside [0,1]");
    }
}

double TableOracle::reward(std::span<const int> x, std::span<const int> y) const {
    auto it = table_.find({Tokens(x.begin(), x.end()), Tokens(y.begin(), y.end())});
    return it == table_.end() ? default_reward_ : it->second;
}

double HashOracle::reward(std::span<const int> x, std::span<const int> y) const {
    std::uint64_t h = fnv1a64(x.data(), x.size() * sizeof(int), salt_ + 0xcbf29ce484222325ull);
    h = fnv1a64(y.data(), y.size() * sizeof(int), h);
    // Top 53 bits to a double in [0,1).
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double bt_probability(double r_w, double r_l) {
    if (!std::isfinite(r_w) || !std::isfinite(r_l)) {
        throw InvalidInputError("bt_probability: non-finite reward");
    }
    return sigmoid(r_w - r_l);
}

double prior_probability(double r_w, double r_l, double delta_r) {
    if (!std::isfinite(r_w) || !std::isfinite(r_l) || !std::isfinite(delta_r)) {
        throw InvalidInputError("prior_probability: non-finite input");
    }
    if (delta_r < 0.0 || delta_r > 1.0) {
        throw InvalidInputError("prior_probability: delta_r outside [0,1]");
    }
    return (std::exp(r_w) + std::exp(delta_r * r_l)) /
           (std::exp(r_w) + std::exp(r_l));
}

void validate_pair(const PreferencePair& pair) {
    if (pair.y_w.empty() || pair.y_l.empty()) {
        throw InvalidInputError("pair has empty response");
    }
    if (pair.y_w == pair.y_l) {
        throw InvalidInputError("pair has identical responses");
    }
    if (!(pair.r_w >= 0.0 && pair.r_w <= 1.0) ||
        !(pair.r_l >= 0.0 && pair.r_l <= 1.0)) {
        throw InvalidInputError("pair rewards outside [0,1]");
    }
    if (pair.r_w < pair.r_l) {
        throw InvalidInputError("pair has r_w < r_l");
    }
    const double expected = std::clamp(pair.r_w - pair.r_l, 0.0, 1.0);
    if (std::abs(pair.delta_r - expected) > 1e-12) {
        throw InvalidInputError("pair delta_r inconsistent with rewards");
    }
}

PreferencePair make_pair(const Tokens& x, const std::vector<Tokens>& responses,
                         const RewardOracle& oracle) {
    if (responses.size() < 2) {
        throw InvalidInputError("make_pair: need at least 2 responses");
    }
    bool all_identical = true;
    for (std::size_t i = 1; i < responses.size(); ++i) {
        if (responses[i] != responses[0]) {
            all_identical = false;
            break;
        }
    }
    if (all_identical) {
        throw DegeneratePairError("all responses identical");
    }

    std::size_t best = 0, worst = 0;
    std::vector<double> r(responses.size());
    for (std::size_t i = 0; i < responses.size(); ++i) {
        r[i] = oracle.reward(x, responses[i]);
        if (!(r[i] >= 0.0 && r[i] <= 1.0)) {
            throw InvalidInputError("oracle reward outside [0,1]");
        }
        if (r[i] > r[best]) {
            best = i;
        }
        if (r[i] < r[worst]) {
            worst = i;
        }
    }
    if (best == worst) {
        // All rewards tie; keep the first two distinct responses.
        best = 0;
        worst = 1;
        while (responses[worst] == responses[best]) {
            ++worst;
        }
    } else if (responses[best] == responses[worst]) {
        throw DegeneratePairError("best and worst responses identical");
    }

    PreferencePair pair;
    pair.x = x;
    pair.y_w = responses[best];
    pair.y_l = responses[worst];
    pair.r_w = r[best];
    pair.r_l = r[worst];
    pair.delta_r = std::clamp(pair.r_w - pair.r_l, 0.0, 1.0);
    return pair;
}

namespace {

// One prompt's worth of work; seeded independently so the fan-out order
// cannot change results.
bool pairs_for_prompt(const Policy& p, const Tokens& prompt,
                      const RewardOracle& oracle, const SamplerConfig& cfg,
                      std::uint64_t prompt_index, PreferencePair& out) {
    std::mt19937_64 rng(mix_seed(cfg.seed, prompt_index));
    std::vector<Tokens> responses;
    for (int i = 0; i < cfg.n_responses; ++i) {
        Tokens y = p.sample(prompt, cfg.temperature, rng);
        if (std::find(responses.begin(), responses.end(), y) == responses.end()) {
            responses.push_back(std::move(y));
        }
    }
    if (responses.size() < 2) {
        return false;
    }
    out = make_pair(prompt, responses, oracle);
    return true;
}

std::vector<PreferencePair> generate_impl(const Policy& p,
                                          const std::vector<Tokens>& prompts,
                                          const RewardOracle& oracle,
                                          const SamplerConfig& cfg,
                                          bool parallel) {
    if (prompts.empty()) {
        throw InvalidInputError("generate_pairs: empty prompt list");
    }
    if (cfg.n_responses < 2) {
        throw InvalidInputError("generate_pairs: n_responses must be >= 2");
    }
    std::vector<PreferencePair> slots(prompts.size());
    std::vector<char> ok(prompts.size(), 0);

    const auto n = static_cast<std::int64_t>(prompts.size());
    std::exception_ptr error;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            ok[static_cast<std::size_t>(i)] =
                pairs_for_prompt(p, prompts[static_cast<std::size_t>(i)], oracle, cfg,
                                 static_cast<std::uint64_t>(i),
                                 slots[static_cast<std::size_t>(i)])
                    ? 1
                    : 0;
        } catch (const DegeneratePairError&) {
            ok[static_cast<std::size_t>(i)] = 0;
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            error = std::current_exception();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    std::vector<PreferencePair> out;
    out.reserve(prompts.size());
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        if (ok[i]) {
            out.push_back(std::move(slots[i]));
        } else {
            std::cerr << "warning: prompt " << i
                      << " produced no distinct responses; dropped\n";
        }
    }
    return out;
}

}  // namespace

std::vector<PreferencePair> generate_pairs(const Policy& p,
                                           const std::vector<Tokens>& prompts,
                                           const RewardOracle& oracle,
                                           const SamplerConfig& cfg) {
    return generate_impl(p, prompts, oracle, cfg, true);
}

std::vector<PreferencePair> generate_pairs_serial(const Policy& p,
                                                  const std::vector<Tokens>& prompts,
                                                  const RewardOracle& oracle,
                                                  const SamplerConfig& cfg) {
    return generate_impl(p, prompts, oracle, cfg, false);
}

}  // namespace mappo
