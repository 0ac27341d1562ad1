#include "mappo/trainer.hpp"

#include <algorithm>
#include <iostream>
#include <numeric>
#include <sstream>

#include "mappo/errors.hpp"

namespace mappo {

std::string trainer_mode_name(TrainerMode m) {
    switch (m) {
        case TrainerMode::Offline: return "Offline";
        case TrainerMode::OnlinePerStep: return "OnlinePerStep";
        case TrainerMode::IterativeK: return "IterativeK";
    }
    throw InvalidInputError("unknown trainer mode");
}

TrainerMode trainer_mode_from_name(const std::string& name) {
    if (name == "Offline") return TrainerMode::Offline;
    if (name == "OnlinePerStep") return TrainerMode::OnlinePerStep;
    if (name == "IterativeK") return TrainerMode::IterativeK;
    throw InvalidInputError("unknown trainer mode: " + name);
}

std::string ref_refresh_name(RefRefresh r) {
    return r == RefRefresh::Never ? "Never" : "PerIteration";
}

RefRefresh ref_refresh_from_name(const std::string& name) {
    if (name == "Never") return RefRefresh::Never;
    if (name == "PerIteration") return RefRefresh::PerIteration;
    throw InvalidInputError("unknown ref_refresh policy: " + name);
}

void TrainerConfig::validate() const {
    if (iterations < 0 || (mode != TrainerMode::OnlinePerStep && iterations < 1)) {
        throw ConfigError("trainer.iterations must be >= 1");
    }
    if (batch_size < 1) {
        throw ConfigError("trainer.batch_size must be >= 1");
    }
    if (epochs_per_iteration < 1) {
        throw ConfigError("trainer.epochs_per_iteration must be >= 1");
    }
    loss.validate();
    optimizer.validate();
}

std::vector<std::pair<std::size_t, std::size_t>> partition_ranges(std::size_t n,
                                                                  int k) {
    if (k < 1 || n < static_cast<std::size_t>(k)) {
        throw ConfigError("partition_ranges: need 1 <= k <= n");
    }
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    const std::size_t base = n / static_cast<std::size_t>(k);
    for (int i = 0; i < k; ++i) {
        const std::size_t lo = static_cast<std::size_t>(i) * base;
        const std::size_t hi = (i == k - 1) ? n : lo + base;
        ranges.emplace_back(lo, hi);
    }
    return ranges;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

namespace {

void validate_dataset(const std::vector<PreferencePair>& dataset) {
    std::ostringstream bad;
    int n_bad = 0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        try {
            validate_pair(dataset[i]);
        } catch (const InvalidInputError& e) {
            if (n_bad++ > 0) {
                bad << "; ";
            }
            bad << "record " << i << ": " << e.what();
        }
    }
    if (n_bad > 0) {
        throw InvalidInputError("invalid dataset (" + std::to_string(n_bad) +
                                " records): " + bad.str());
    }
}

DiagnosticsRecord probe_record(const Policy& policy, const ReferencePolicy& ref,
                               const std::optional<ProbeSet>& probe,
                               const std::vector<PreferencePair>& fallback,
                               const LossConfig& cfg) {
    return track(policy, ref, probe.has_value() ? *probe : fallback, cfg);
}

// One pass of mini-batch training over `pairs`; shared by the offline and
// iterative modes so K = 1 collapses exactly onto the offline path.
void offline_epochs(TrainRun& run, const std::vector<PreferencePair>& pairs,
                    const TrainerConfig& cfg, int iteration,
                    const std::optional<ProbeSet>& probe) {
    for (int epoch = 0; epoch < cfg.epochs_per_iteration; ++epoch) {
        const std::uint64_t shuffle_seed = mix_seed(
            cfg.seed, static_cast<std::uint64_t>(iteration) *
                              static_cast<std::uint64_t>(cfg.epochs_per_iteration) +
                          static_cast<std::uint64_t>(epoch));
        const std::vector<std::size_t> order =
            shuffled_indices(pairs.size(), shuffle_seed);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::vector<PreferencePair> batch;
            batch.reserve(stop - start);
            for (std::size_t j = start; j < stop; ++j) {
                batch.push_back(pairs[order[j]]);
            }
            const BatchEvaluation ev =
                batch_loss(run.policy, run.reference, batch, cfg.loss);
            step(run.opt_state, run.policy.theta(), ev.mean_grad, cfg.optimizer);
            run.steps = run.opt_state.step;

            DiagnosticsRecord rec =
                probe_record(run.policy, run.reference, probe, batch, cfg.loss);
            rec.step = run.steps;
            rec.iteration = iteration;
            rec.loss = ev.mean_loss;
            rec.grad_norm = l2_norm(ev.mean_grad);
            run.diagnostics.push_back(rec);
        }
    }
}

}  // namespace

TrainRun train_offline(const Policy& p, const std::vector<PreferencePair>& dataset,
                       const TrainerConfig& cfg,
                       const std::optional<ProbeSet>& probe) {
    cfg.validate();
    if (cfg.mode != TrainerMode::Offline) {
        throw ConfigError("train_offline requires mode = Offline");
    }
    if (dataset.empty()) {
        throw InvalidInputError("train_offline: empty dataset");
    }
    validate_dataset(dataset);

    TrainRun run{p, snapshot(p), {}, 0, 0, {}};
    DiagnosticsRecord init =
        probe_record(run.policy, run.reference, probe, dataset, cfg.loss);
    init.step = 0;
    run.diagnostics.push_back(init);

    offline_epochs(run, dataset, cfg, 0, probe);
    run.iterations_done = 1;
    return run;
}

TrainRun train_online(const Policy& p, const std::vector<Tokens>& prompts,
                      const RewardOracle& oracle, const TrainerConfig& cfg,
                      const std::optional<ProbeSet>& probe) {
    cfg.validate();
    if (cfg.mode != TrainerMode::OnlinePerStep) {
        throw ConfigError("train_online requires mode = OnlinePerStep");
    }
    if (prompts.empty()) {
        throw InvalidInputError("train_online: empty prompt list");
    }

    TrainRun run{p, snapshot(p), {}, 0, 0, {}};
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<std::size_t> pick(0, prompts.size() - 1);

    for (int k = 0; k < cfg.iterations; ++k) {
        if (cfg.ref_refresh == RefRefresh::PerIteration) {
            run.reference = snapshot(run.policy);
        }
        const Tokens& prompt = prompts[pick(rng)];

        PreferencePair pair;
        bool have_pair = false;
        for (int attempt = 0; attempt < 2 && !have_pair; ++attempt) {
            std::vector<Tokens> responses;
            for (int i = 0; i < cfg.sampler.n_responses; ++i) {
                Tokens y = run.policy.sample(prompt, cfg.sampler.temperature, rng);
                if (std::find(responses.begin(), responses.end(), y) ==
                    responses.end()) {
                    responses.push_back(std::move(y));
                }
            }
            if (responses.size() >= 2) {
                pair = make_pair(prompt, responses, oracle);
                have_pair = true;
            }
        }
        if (!have_pair) {
            std::cerr << "warning: online step " << k
                      << " produced no distinct responses after resampling; skipped\n";
            continue;
        }

        const PairEvaluation ev =
            evaluate_pair(run.policy, run.reference, pair, cfg.loss);
        step(run.opt_state, run.policy.theta(), ev.grad, cfg.optimizer);
        run.steps = run.opt_state.step;
        run.iterations_done = k + 1;

        DiagnosticsRecord rec = probe_record(run.policy, run.reference, probe,
                                             {pair}, cfg.loss);
        rec.step = run.steps;
        rec.iteration = k;
        rec.loss = ev.loss;
        rec.grad_norm = l2_norm(ev.grad);
        run.diagnostics.push_back(rec);
    }
    return run;
}

TrainRun train_iterative(const Policy& p, const std::vector<Tokens>& prompts,
                         const RewardOracle& oracle, const TrainerConfig& cfg,
                         const std::optional<ProbeSet>& probe) {
    cfg.validate();
    if (cfg.mode != TrainerMode::IterativeK) {
        throw ConfigError("train_iterative requires mode = IterativeK");
    }
    const int k_iters = cfg.iterations;
    if (static_cast<int>(prompts.size()) < k_iters) {
        throw ConfigError("train_iterative: K exceeds prompt count");
    }

    std::vector<Tokens> ordered = prompts;
    if (cfg.shuffle_prompts) {
        const std::vector<std::size_t> order =
            shuffled_indices(prompts.size(), mix_seed(cfg.seed, 0x70726d70ull));
        for (std::size_t i = 0; i < order.size(); ++i) {
            ordered[i] = prompts[order[i]];
        }
    }

    const auto ranges = partition_ranges(prompts.size(), k_iters);
    TrainRun run{p, snapshot(p), {}, 0, 0, {}};
    bool have_init_record = false;

    for (int k = 0; k < k_iters; ++k) {
        if (cfg.ref_refresh == RefRefresh::PerIteration) {
            run.reference = snapshot(run.policy);
        }
        const auto [lo, hi] = ranges[static_cast<std::size_t>(k)];
        const std::vector<Tokens> subset(ordered.begin() + static_cast<std::ptrdiff_t>(lo),
                                         ordered.begin() + static_cast<std::ptrdiff_t>(hi));

        SamplerConfig sampler = cfg.sampler;
        sampler.seed = cfg.sampler.seed + static_cast<std::uint64_t>(k);
        const std::vector<PreferencePair> pairs =
            generate_pairs(run.policy, subset, oracle, sampler);
        if (pairs.empty()) {
            std::cerr << "warning: iteration " << k
                      << " generated no usable pairs; skipped\n";
            continue;
        }

        if (!have_init_record) {
            DiagnosticsRecord init =
                probe_record(run.policy, run.reference, probe, pairs, cfg.loss);
            init.step = 0;
            init.iteration = k;
            run.diagnostics.push_back(init);
            have_init_record = true;
        }

        offline_epochs(run, pairs, cfg, k, probe);
        run.iterations_done = k + 1;
    }
    return run;
}

}  // namespace mappo
