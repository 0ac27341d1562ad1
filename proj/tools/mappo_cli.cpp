// Command-line entry point: train / compare / gradcheck / dataset.
// Exit codes: 0 success, 1 check failure, 2 config error, 3 numeric error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "mappo/errors.hpp"
#include "mappo/experiment.hpp"

namespace {

using namespace mappo;
using nlohmann::json;

struct CommonOptions {
    std::string config_path;
    std::string preset_name = "desk";
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::int64_t seed = -1;
    bool show_defaults = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Experiment config (JSON)");
    cmd->add_option("--preset", opts.preset_name, "Config preset")
        ->check(CLI::IsMember({"desk", "paper-llm"}));
    cmd->add_option("--set", opts.overrides,
                    "Dotted-path override, key.path=value (repeatable)");
    cmd->add_option("--out-dir", opts.out_dir, "Artifact output directory");
    cmd->add_option("--seed", opts.seed, "Master seed override");
    cmd->add_flag("--show-defaults", opts.show_defaults,
                  "Print the resolved config and exit");
}

struct Resolved {
    ExperimentConfig cfg;
    json doc;
};

Resolved resolve_config(const CommonOptions& opts) {
    json doc = json::object();
    if (!opts.config_path.empty()) {
        std::ifstream f(opts.config_path);
        if (!f) {
            throw ConfigError("cannot open config: " + opts.config_path);
        }
        try {
            f >> doc;
        } catch (const std::exception& e) {
            throw ConfigError("config parse error: " + std::string(e.what()));
        }
    }
    for (const std::string& o : opts.overrides) {
        apply_override(doc, o);
    }
    if (opts.seed >= 0) {
        apply_override(doc, "seed=" + std::to_string(opts.seed));
    }
    Resolved r;
    r.cfg = ExperimentConfig::from_json(doc, preset(opts.preset_name));
    r.doc = r.cfg.to_json();
    return r;
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidInputError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_train(const CommonOptions& opts) {
    return guarded([&] {
        const Resolved r = resolve_config(opts);
        if (opts.show_defaults) {
            std::cout << r.doc.dump(2) << "\n";
            return 0;
        }
        const TrainArtifacts art =
            run_train(r.cfg, opts.out_dir, r.doc, opts.overrides);
        std::cout << "steps: " << art.run.steps << "\n"
                  << "checkpoint: " << art.checkpoint_path << "\n"
                  << "manifest: " << art.manifest_path << "\n";
        if (!art.diagnostics_csv.empty()) {
            std::cout << "diagnostics: " << art.diagnostics_csv << "\n";
        }
        return 0;
    });
}

int cmd_compare(const CommonOptions& opts,
                const std::vector<std::string>& objective_names) {
    return guarded([&] {
        const Resolved r = resolve_config(opts);
        if (opts.show_defaults) {
            std::cout << r.doc.dump(2) << "\n";
            return 0;
        }
        std::vector<Objective> objectives;
        for (const std::string& name : objective_names) {
            objectives.push_back(objective_from_name(name));
        }
        if (objectives.size() < 2) {
            throw ConfigError("compare needs at least 2 objectives");
        }
        const std::vector<CompareRow> rows = run_compare(r.cfg, objectives);
        std::filesystem::create_directories(opts.out_dir);
        const std::string path = opts.out_dir + "/compare.csv";
        write_compare_csv(rows, path);
        for (const CompareRow& row : rows) {
            std::printf("%-10s loss %.6f  grad %.3e  dlogp_w %+.4f  dlogp_l %+.4f  %s\n",
                        objective_name(row.objective).c_str(), row.final_loss,
                        row.grad_norm, row.d_logp_w, row.d_logp_l,
                        row.squeezed ? "squeeze" : "-");
        }
        std::cout << "table: " << path << "\n";
        return 0;
    });
}

int cmd_gradcheck(const CommonOptions& opts, int n_trials) {
    return guarded([&] {
        if (n_trials < 1) {
            throw ConfigError("gradcheck needs n_trials >= 1");
        }
        const Resolved r = resolve_config(opts);
        if (opts.show_defaults) {
            std::cout << r.doc.dump(2) << "\n";
            return 0;
        }
        const GradCheckReport report =
            run_gradcheck(n_trials, r.cfg.seed);
        const std::string text = format_gradcheck_report(report);
        std::filesystem::create_directories(opts.out_dir);
        std::ofstream(opts.out_dir + "/gradcheck.txt") << text;
        std::cout << text;
        if (!report.passed) {
            for (const GradCheckTrial& t : report.worst_per_objective) {
                if (t.rel_error >= report.tolerance) {
                    std::cerr << "gradcheck failure: " << objective_name(t.objective)
                              << " trial " << t.trial << " rel error " << t.rel_error
                              << "\n";
                }
            }
            return 1;
        }
        return 0;
    });
}

int cmd_dataset_generate(const CommonOptions& opts, const std::string& policy_spec,
                         const std::string& suite, int n_prompts,
                         const std::string& out_path) {
    return guarded([&] {
        const Resolved r = resolve_config(opts);
        std::filesystem::create_directories(
            std::filesystem::path(out_path).parent_path().empty()
                ? "."
                : std::filesystem::path(out_path).parent_path().string());

        std::vector<PreferencePair> pairs;
        if (suite == "near-tie") {
            const Vocab vocab{r.cfg.policy.vocab_size, r.cfg.policy.eos_id};
            pairs = make_near_tie_suite(n_prompts, vocab).pairs;
        } else {
            if (r.cfg.data.prompts.empty()) {
                throw ConfigError("dataset generate requires data.prompts or --suite");
            }
            ExperimentConfig cfg = r.cfg;
            if (policy_spec != "uniform") {
                cfg.data.checkpoint_in = policy_spec;
            }
            const Policy policy = build_policy(cfg);
            const auto oracle = make_oracle(cfg.data);
            pairs = generate_pairs(policy, load_prompts(cfg.data.prompts), *oracle,
                                   cfg.trainer.sampler);
        }
        save_dataset(pairs, out_path);
        std::cout << "wrote " << pairs.size() << " pairs to " << out_path << "\n";
        return 0;
    });
}

int cmd_dataset_validate(const std::string& dataset_path) {
    return guarded([&] {
        const std::vector<DatasetIssue> issues = validate_dataset_file(dataset_path);
        for (const DatasetIssue& issue : issues) {
            std::cerr << dataset_path << ":" << issue.line << ": " << issue.message
                      << "\n";
        }
        if (!issues.empty()) {
            std::cerr << issues.size() << " invalid records\n";
            return 1;
        }
        std::cout << "ok\n";
        return 0;
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale preference optimization engine"};
    app.require_subcommand(1);

    CommonOptions train_opts;
    CLI::App* train = app.add_subcommand("train", "Run a training session");
    add_common(train, train_opts);

    CommonOptions compare_opts;
    std::vector<std::string> compare_objectives;
    CLI::App* compare =
        app.add_subcommand("compare", "Run several objectives side by side");
    add_common(compare, compare_opts);
    compare->add_option("--objectives", compare_objectives,
                        "Objectives to compare (>= 2)");

    CommonOptions gradcheck_opts;
    int gradcheck_trials = 100;
    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "Closed-form vs finite-difference check");
    add_common(gradcheck, gradcheck_opts);
    gradcheck->add_option("--trials", gradcheck_trials, "Trials per objective");

    CLI::App* dataset = app.add_subcommand("dataset", "Generate or validate datasets");
    dataset->require_subcommand(1);

    CommonOptions gen_opts;
    std::string gen_policy = "uniform";
    std::string gen_suite;
    int gen_n_prompts = 40;
    std::string gen_out = "dataset.jsonl";
    CLI::App* generate = dataset->add_subcommand("generate", "Emit a JSONL dataset");
    add_common(generate, gen_opts);
    generate->add_option("--policy", gen_policy,
                         "Policy checkpoint path or 'uniform'");
    generate->add_option("--suite", gen_suite, "Builtin suite")
        ->check(CLI::IsMember({"near-tie"}));
    generate->add_option("--n-prompts", gen_n_prompts, "Suite prompt count");
    generate->add_option("--out", gen_out, "Output JSONL path");

    std::string validate_path;
    CLI::App* validate = dataset->add_subcommand("validate", "Check a JSONL dataset");
    validate->add_option("--dataset", validate_path, "Dataset path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (train->parsed()) {
        return cmd_train(train_opts);
    }
    if (compare->parsed()) {
        return cmd_compare(compare_opts, compare_objectives);
    }
    if (gradcheck->parsed()) {
        return cmd_gradcheck(gradcheck_opts, gradcheck_trials);
    }
    if (generate->parsed()) {
        return cmd_dataset_generate(gen_opts, gen_policy, gen_suite, gen_n_prompts,
                                    gen_out);
    }
    if (validate->parsed()) {
        return cmd_dataset_validate(validate_path);
    }
    return 2;
}
