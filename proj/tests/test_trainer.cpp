#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mappo/dataset.hpp"
#include "mappo/errors.hpp"
#include "mappo/trainer.hpp"

using namespace mappo;

namespace {

PreferencePair small_pair(int prompt_token) {
    PreferencePair pair;
    pair.x = {prompt_token};
    pair.y_w = {2, 0};
    pair.y_l = {3, 0};
    pair.r_w = 0.9;
    pair.r_l = 0.4;
    pair.delta_r = pair.r_w - pair.r_l;
    return pair;
}

TrainerConfig offline_config() {
    TrainerConfig cfg;
    cfg.mode = TrainerMode::Offline;
    cfg.iterations = 1;
    cfg.batch_size = 4;
    cfg.epochs_per_iteration = 1;
    cfg.seed = 11;
    cfg.loss.objective = Objective::MaPPO;
    cfg.optimizer.kind = OptimizerKind::SGD;
    cfg.optimizer.eta = 0.05;
    return cfg;
}

}  // namespace

TEST_CASE("single pair, single step moves theta by -eta grad") {
    Policy p({5, 0}, 1, 8);
    p.randomize(0.7, 1);
    const ReferencePolicy ref = snapshot(p);
    const PreferencePair pair = small_pair(1);
    TrainerConfig cfg = offline_config();

    const PairEvaluation ev = evaluate_pair(p, ref, pair, cfg.loss);
    const TrainRun run = train_offline(p, {pair}, cfg);
    CHECK(run.steps == 1);
    for (std::size_t i = 0; i < p.theta().size(); ++i) {
        CHECK(run.policy.theta()[i] == p.theta()[i] - cfg.optimizer.eta * ev.grad[i]);
    }
}

TEST_CASE("offline training is seed-deterministic") {
    Policy p({5, 0}, 1, 8);
    p.randomize(0.9, 2);
    std::vector<PreferencePair> dataset;
    for (int i = 1; i < 5; ++i) {
        dataset.push_back(small_pair(i));
    }
    TrainerConfig cfg = offline_config();
    cfg.epochs_per_iteration = 5;
    cfg.batch_size = 2;
    const TrainRun a = train_offline(p, dataset, cfg);
    const TrainRun b = train_offline(p, dataset, cfg);
    CHECK(a.policy.theta() == b.policy.theta());
    CHECK(a.steps == b.steps);
}

TEST_CASE("delta_r = 1 gives a bit-identical dpo trajectory") {
    Policy p({5, 0}, 1, 8);
    p.randomize(1.0, 3);
    std::vector<PreferencePair> dataset;
    for (int i = 1; i < 5; ++i) {
        PreferencePair pair = small_pair(i);
        pair.r_w = 1.0;
        pair.r_l = 0.0;
        pair.delta_r = 1.0;
        dataset.push_back(pair);
    }
    TrainerConfig cfg = offline_config();
    cfg.epochs_per_iteration = 10;
    cfg.loss.objective = Objective::MaPPO;
    const TrainRun mappo = train_offline(p, dataset, cfg);
    cfg.loss.objective = Objective::DPO;
    const TrainRun dpo = train_offline(p, dataset, cfg);
    CHECK(mappo.policy.theta() == dpo.policy.theta());
}

TEST_CASE("offline reference stays frozen") {
    Policy p({5, 0}, 1, 8);
    p.randomize(0.8, 4);
    const double before = snapshot(p).log_prob(Tokens{1}, Tokens{2, 0});
    TrainerConfig cfg = offline_config();
    cfg.epochs_per_iteration = 20;
    const TrainRun run = train_offline(p, {small_pair(1)}, cfg);
    CHECK(run.reference.log_prob(Tokens{1}, Tokens{2, 0}) == before);
    CHECK(run.policy.log_prob(Tokens{1}, Tokens{2, 0}) != before);
}

TEST_CASE("offline rejects invalid datasets up front") {
    Policy p({5, 0}, 1, 8);
    PreferencePair bad = small_pair(1);
    bad.r_w = 1.4;
    try {
        train_offline(p, {small_pair(1), bad}, offline_config());
        CHECK(false);
    } catch (const InvalidInputError& e) {
        CHECK(std::string(e.what()).find("record 1") != std::string::npos);
    }
}

TEST_CASE("offline emits an init record plus one per step") {
    Policy p({5, 0}, 1, 8);
    p.randomize(0.5, 5);
    std::vector<PreferencePair> dataset;
    for (int i = 1; i < 5; ++i) {
        dataset.push_back(small_pair(i));
    }
    TrainerConfig cfg = offline_config();
    cfg.batch_size = 2;
    cfg.epochs_per_iteration = 3;
    const TrainRun run = train_offline(p, dataset, cfg);
    CHECK(run.steps == 6);
    REQUIRE(run.diagnostics.size() == 7);
    CHECK(run.diagnostics.front().step == 0);
    CHECK(run.diagnostics.back().step == 6);
}

TEST_CASE("online mode with K = 0 is a no-op") {
    Policy p({5, 0}, 1, 6);
    p.randomize(0.8, 6);
    TrainerConfig cfg = offline_config();
    cfg.mode = TrainerMode::OnlinePerStep;
    cfg.iterations = 0;
    HashOracle oracle(3);
    const TrainRun run = train_online(p, {{1}, {2}}, oracle, cfg);
    CHECK(run.steps == 0);
    CHECK(run.diagnostics.empty());
    CHECK(run.policy.theta() == p.theta());
}

TEST_CASE("online mode is seed-deterministic") {
    Policy p({6, 0}, 1, 6);
    p.randomize(1.0, 7);
    TrainerConfig cfg = offline_config();
    cfg.mode = TrainerMode::OnlinePerStep;
    cfg.iterations = 12;
    cfg.sampler = {4, 1.0, 9};
    HashOracle oracle(8);
    const std::vector<Tokens> prompts{{1}, {2}, {3}};
    const TrainRun a = train_online(p, prompts, oracle, cfg);
    const TrainRun b = train_online(p, prompts, oracle, cfg);
    CHECK(a.policy.theta() == b.policy.theta());
    CHECK(a.steps == b.steps);
    CHECK(a.steps > 0);
}

TEST_CASE("partition_ranges splits contiguously with remainder last") {
    CHECK(partition_ranges(9, 3) ==
          std::vector<std::pair<std::size_t, std::size_t>>{{0, 3}, {3, 6}, {6, 9}});
    CHECK(partition_ranges(10, 3) ==
          std::vector<std::pair<std::size_t, std::size_t>>{{0, 3}, {3, 6}, {6, 10}});
    CHECK(partition_ranges(4, 1) ==
          std::vector<std::pair<std::size_t, std::size_t>>{{0, 4}});
    CHECK_THROWS_AS(partition_ranges(2, 3), ConfigError);
    CHECK_THROWS_AS(partition_ranges(2, 0), ConfigError);
}

TEST_CASE("iterative K = 1 equals generate-then-offline") {
    Policy p({6, 0}, 1, 6);
    p.randomize(0.9, 8);
    HashOracle oracle(12);
    const std::vector<Tokens> prompts{{1}, {2}, {3}, {4}, {5}};

    TrainerConfig cfg = offline_config();
    cfg.mode = TrainerMode::IterativeK;
    cfg.iterations = 1;
    cfg.epochs_per_iteration = 3;
    cfg.sampler = {6, 1.0, 21};
    const TrainRun iterative = train_iterative(p, prompts, oracle, cfg);

    SamplerConfig sampler = cfg.sampler;
    sampler.seed = cfg.sampler.seed + 0;  // iteration 0 convention
    const std::vector<PreferencePair> pairs =
        generate_pairs(p, prompts, oracle, sampler);
    TrainerConfig offline = cfg;
    offline.mode = TrainerMode::Offline;
    const TrainRun direct = train_offline(p, pairs, offline);

    CHECK(iterative.policy.theta() == direct.policy.theta());
    CHECK(iterative.steps == direct.steps);
}

TEST_CASE("iterative mode regenerates from the current policy") {
    Policy p({6, 0}, 1, 6);
    p.randomize(0.8, 13);
    HashOracle oracle(5);
    std::vector<Tokens> prompts;
    for (int i = 1; i < 6; ++i) {
        prompts.push_back({i});
    }
    TrainerConfig cfg = offline_config();
    cfg.mode = TrainerMode::IterativeK;
    cfg.iterations = 3;
    cfg.optimizer.eta = 0.5;  // move far enough to change sampling
    cfg.sampler = {6, 1.0, 33};
    const TrainRun run = train_iterative(p, prompts, oracle, cfg);
    CHECK(run.iterations_done == 3);
    CHECK(run.steps > 0);

    // Iteration tags must cover all three rounds.
    int max_iter = 0;
    for (const DiagnosticsRecord& r : run.diagnostics) {
        max_iter = std::max(max_iter, r.iteration);
    }
    CHECK(max_iter == 2);

    CHECK_THROWS_AS(
        [&] {
            TrainerConfig bad = cfg;
            bad.iterations = 10;
            return train_iterative(p, prompts, oracle, bad);
        }(),
        ConfigError);
}

TEST_CASE("mode mismatches are rejected") {
    Policy p({5, 0}, 1, 6);
    TrainerConfig cfg = offline_config();
    cfg.mode = TrainerMode::OnlinePerStep;
    CHECK_THROWS_AS(train_offline(p, {small_pair(1)}, cfg), ConfigError);
    cfg.mode = TrainerMode::Offline;
    HashOracle oracle(1);
    CHECK_THROWS_AS(train_online(p, {{1}}, oracle, cfg), ConfigError);
    CHECK_THROWS_AS(train_iterative(p, {{1}}, oracle, cfg), ConfigError);
    CHECK_THROWS_AS(train_offline(p, {}, cfg), InvalidInputError);
}

TEST_CASE("shuffled_indices is a deterministic permutation") {
    const auto a = shuffled_indices(20, 5);
    const auto b = shuffled_indices(20, 5);
    CHECK(a == b);
    CHECK(a != shuffled_indices(20, 6));
    auto sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        CHECK(sorted[i] == i);
    }
}
