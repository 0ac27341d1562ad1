#include "mappo/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mappo/errors.hpp"

namespace mappo {

Policy build_policy(const ExperimentConfig& cfg) {
    if (!cfg.data.checkpoint_in.empty()) {
        return Policy::load(cfg.data.checkpoint_in);
    }
    Policy p(Vocab{cfg.policy.vocab_size, cfg.policy.eos_id},
             cfg.policy.context_order, cfg.policy.max_len);
    if (cfg.policy.init == "random") {
        p.randomize(cfg.policy.init_scale, cfg.policy.init_seed);
    }
    return p;
}

std::unique_ptr<RewardOracle> make_oracle(const DataConfig& data) {
    if (data.oracle == "hash") {
        return std::make_unique<HashOracle>();
    }
    if (data.oracle == "target-match") {
        if (data.targets.empty()) {
            throw ConfigError("target-match oracle requires data.targets");
        }
        return std::make_unique<TargetMatchOracle>(load_targets(data.targets));
    }
    if (data.oracle == "table") {
        if (data.targets.empty()) {
            throw ConfigError("table oracle requires data.targets (dataset JSONL)");
        }
        // Reuse the pair schema: chosen/rejected rows become table entries.
        std::map<std::pair<Tokens, Tokens>, double> table;
        for (const PreferencePair& p : load_dataset(data.targets)) {
            table[{p.x, p.y_w}] = p.r_w;
            table[{p.x, p.y_l}] = p.r_l;
        }
        return std::make_unique<TableOracle>(std::move(table));
    }
    throw ConfigError("unknown oracle: " + data.oracle);
}

DatasetSplit split_probe(const std::vector<PreferencePair>& pairs, int probe_size) {
    DatasetSplit split;
    const std::size_t n_probe =
        std::min(pairs.size() > 1 ? pairs.size() - 1 : std::size_t{0},
                 static_cast<std::size_t>(std::max(probe_size, 0)));
    split.probe.assign(pairs.begin(),
                       pairs.begin() + static_cast<std::ptrdiff_t>(n_probe));
    split.train.assign(pairs.begin() + static_cast<std::ptrdiff_t>(n_probe),
                       pairs.end());
    return split;
}

namespace {

TrainRun dispatch_train(const ExperimentConfig& cfg,
                        const std::optional<ProbeSet>& probe_override,
                        std::vector<ManifestInput>& inputs) {
    const Policy policy = build_policy(cfg);
    switch (cfg.trainer.mode) {
        case TrainerMode::Offline: {
            if (cfg.data.dataset.empty()) {
                throw ConfigError("offline mode requires data.dataset");
            }
            inputs.push_back({"dataset", cfg.data.dataset});
            const DatasetSplit split = split_probe(load_dataset(cfg.data.dataset),
                                                   cfg.diagnostics.probe_size);
            std::optional<ProbeSet> probe = probe_override;
            if (!probe && !split.probe.empty()) {
                probe = split.probe;
            }
            return train_offline(policy, split.train, cfg.trainer, probe);
        }
        case TrainerMode::OnlinePerStep:
        case TrainerMode::IterativeK: {
            if (cfg.data.prompts.empty()) {
                throw ConfigError("online modes require data.prompts");
            }
            inputs.push_back({"prompts", cfg.data.prompts});
            if (!cfg.data.targets.empty()) {
                inputs.push_back({"targets", cfg.data.targets});
            }
            const std::vector<Tokens> prompts = load_prompts(cfg.data.prompts);
            const auto oracle = make_oracle(cfg.data);
            if (cfg.trainer.mode == TrainerMode::OnlinePerStep) {
                return train_online(policy, prompts, *oracle, cfg.trainer,
                                    probe_override);
            }
            return train_iterative(policy, prompts, *oracle, cfg.trainer,
                                   probe_override);
        }
    }
    throw ConfigError("unknown trainer mode");
}

}  // namespace

TrainArtifacts run_train(const ExperimentConfig& cfg, const std::string& out_dir,
                         const nlohmann::json& config_doc,
                         const std::vector<std::string>& overrides) {
    std::filesystem::create_directories(out_dir);
    std::vector<ManifestInput> inputs;
    if (!cfg.data.checkpoint_in.empty()) {
        inputs.push_back({"checkpoint_in", cfg.data.checkpoint_in});
    }

    TrainArtifacts art{dispatch_train(cfg, std::nullopt, inputs), "", "", ""};

    art.checkpoint_path = out_dir + "/checkpoint.bin";
    art.run.policy.save(art.checkpoint_path);

    std::vector<std::string> artifact_names = {"checkpoint.bin",
                                               "checkpoint.bin.meta.txt"};
    if (!cfg.diagnostics.export_csv.empty()) {
        art.diagnostics_csv = out_dir + "/" + cfg.diagnostics.export_csv;
        export_records(art.run.diagnostics, art.diagnostics_csv, ExportFormat::Csv);
        artifact_names.push_back(cfg.diagnostics.export_csv);
    }
    if (!cfg.diagnostics.export_jsonl.empty()) {
        export_records(art.run.diagnostics, out_dir + "/" + cfg.diagnostics.export_jsonl,
                       ExportFormat::JsonLines);
        artifact_names.push_back(cfg.diagnostics.export_jsonl);
    }

    art.manifest_path = out_dir + "/manifest.txt";
    write_manifest(art.manifest_path, config_doc, overrides, inputs, artifact_names);
    return art;
}

std::vector<CompareRow> run_compare(const ExperimentConfig& cfg,
                                    const std::vector<Objective>& objectives) {
    if (objectives.size() < 2) {
        throw ConfigError("compare requires at least 2 objectives");
    }
    if (cfg.trainer.mode != TrainerMode::Offline || cfg.data.dataset.empty()) {
        throw ConfigError("compare runs offline and requires data.dataset");
    }
    const DatasetSplit split =
        split_probe(load_dataset(cfg.data.dataset), cfg.diagnostics.probe_size);
    const std::optional<ProbeSet> probe =
        split.probe.empty() ? std::nullopt : std::optional<ProbeSet>(split.probe);

    std::vector<CompareRow> rows;
    for (Objective objective : objectives) {
        ExperimentConfig variant = cfg;
        variant.trainer.loss.objective = objective;
        const Policy policy = build_policy(variant);
        const TrainRun run =
            train_offline(policy, split.train, variant.trainer, probe);

        CompareRow row;
        row.objective = objective;
        row.final_loss = run.diagnostics.back().loss;
        row.grad_norm = run.diagnostics.back().grad_norm;
        const SqueezeSummary sq = squeeze_summary(run.diagnostics);
        row.d_logp_w = sq.d_logp_w;
        row.d_logp_l = sq.d_logp_l;
        row.squeezed = sq.squeezed;
        rows.push_back(row);
    }
    return rows;
}

void write_compare_csv(const std::vector<CompareRow>& rows,
                       const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open for writing: " + path);
    }
    f << "objective,final_loss,grad_norm,d_logp_w,d_logp_l,squeezed\n";
    char buf[200];
    for (const CompareRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g,%d\n",
                      objective_name(r.objective).c_str(), r.final_loss,
                      r.grad_norm, r.d_logp_w, r.d_logp_l, r.squeezed ? 1 : 0);
        f << buf;
    }
}

}  // namespace mappo
