#include "mappo/config.hpp"

#include <fstream>
#include <set>

#include "mappo/errors.hpp"

namespace mappo {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& section,
                const std::set<std::string>& known) {
    if (!j.is_object()) {
        throw ConfigError("config section '" + section + "' must be an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError("unknown config key: " +
                              (section.empty() ? key : section + "." + key));
        }
    }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) {
        out = j.at(key).get<T>();
    }
}

}  // namespace

json ExperimentConfig::to_json() const {
    return json{
        {"seed", seed},
        {"policy",
         {{"vocab_size", policy.vocab_size},
          {"eos_id", policy.eos_id},
          {"context_order", policy.context_order},
          {"max_len", policy.max_len},
          {"init", policy.init},
          {"init_scale", policy.init_scale},
          {"init_seed", policy.init_seed}}},
        {"sampler",
         {{"n_responses", trainer.sampler.n_responses},
          {"temperature", trainer.sampler.temperature},
          {"seed", trainer.sampler.seed}}},
        {"loss",
         {{"objective", objective_name(trainer.loss.objective)},
          {"beta", trainer.loss.beta},
          {"gamma", trainer.loss.gamma},
          {"lambda", trainer.loss.lambda}}},
        {"optimizer",
         {{"kind", optimizer_kind_name(trainer.optimizer.kind)},
          {"eta", trainer.optimizer.eta},
          {"weight_decay", trainer.optimizer.weight_decay},
          {"beta1", trainer.optimizer.beta1},
          {"beta2", trainer.optimizer.beta2},
          {"epsilon", trainer.optimizer.epsilon},
          {"warmup_steps", trainer.optimizer.warmup_steps}}},
        {"trainer",
         {{"mode", trainer_mode_name(trainer.mode)},
          {"iterations", trainer.iterations},
          {"batch_size", trainer.batch_size},
          {"epochs_per_iteration", trainer.epochs_per_iteration},
          {"seed", trainer.seed},
          {"shuffle_prompts", trainer.shuffle_prompts},
          {"ref_refresh", ref_refresh_name(trainer.ref_refresh)}}},
        {"data",
         {{"dataset", data.dataset},
          {"prompts", data.prompts},
          {"oracle", data.oracle},
          {"targets", data.targets},
          {"checkpoint_in", data.checkpoint_in}}},
        {"diagnostics",
         {{"probe_size", diagnostics.probe_size},
          {"export_csv", diagnostics.export_csv},
          {"export_jsonl", diagnostics.export_jsonl}}},
    };
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    return from_json(j, ExperimentConfig{});
}

ExperimentConfig ExperimentConfig::from_json(const json& j,
                                             const ExperimentConfig& base) {
    check_keys(j, "", {"seed", "policy", "sampler", "loss", "optimizer", "trainer",
                       "data", "diagnostics"});
    ExperimentConfig cfg = base;
    if (j.contains("seed")) {
        read(j, "seed", cfg.seed);
        // Sub-seeds follow the master seed unless given explicitly.
        cfg.trainer.seed = cfg.seed;
        cfg.trainer.sampler.seed = cfg.seed;
    }

    if (j.contains("policy")) {
        const json& p = j.at("policy");
        check_keys(p, "policy", {"vocab_size", "eos_id", "context_order", "max_len",
                                 "init", "init_scale", "init_seed"});
        read(p, "vocab_size", cfg.policy.vocab_size);
        read(p, "eos_id", cfg.policy.eos_id);
        read(p, "context_order", cfg.policy.context_order);
        read(p, "max_len", cfg.policy.max_len);
        read(p, "init", cfg.policy.init);
        read(p, "init_scale", cfg.policy.init_scale);
        read(p, "init_seed", cfg.policy.init_seed);
        if (cfg.policy.init != "zeros" && cfg.policy.init != "random") {
            throw ConfigError("policy.init must be 'zeros' or 'random'");
        }
    }
    if (j.contains("sampler")) {
        const json& s = j.at("sampler");
        check_keys(s, "sampler", {"n_responses", "temperature", "seed"});
        read(s, "n_responses", cfg.trainer.sampler.n_responses);
        read(s, "temperature", cfg.trainer.sampler.temperature);
        read(s, "seed", cfg.trainer.sampler.seed);
        if (cfg.trainer.sampler.n_responses < 2) {
            throw ConfigError("sampler.n_responses must be >= 2");
        }
        if (!(cfg.trainer.sampler.temperature > 0.0)) {
            throw ConfigError("sampler.temperature must be > 0");
        }
    }
    if (j.contains("loss")) {
        const json& l = j.at("loss");
        check_keys(l, "loss", {"objective", "beta", "gamma", "lambda"});
        if (l.contains("objective")) {
            cfg.trainer.loss.objective =
                objective_from_name(l.at("objective").get<std::string>());
        }
        read(l, "beta", cfg.trainer.loss.beta);
        read(l, "gamma", cfg.trainer.loss.gamma);
        read(l, "lambda", cfg.trainer.loss.lambda);
    }
    if (j.contains("optimizer")) {
        const json& o = j.at("optimizer");
        check_keys(o, "optimizer", {"kind", "eta", "weight_decay", "beta1", "beta2",
                                    "epsilon", "warmup_steps"});
        if (o.contains("kind")) {
            cfg.trainer.optimizer.kind =
                optimizer_kind_from_name(o.at("kind").get<std::string>());
        }
        read(o, "eta", cfg.trainer.optimizer.eta);
        read(o, "weight_decay", cfg.trainer.optimizer.weight_decay);
        read(o, "beta1", cfg.trainer.optimizer.beta1);
        read(o, "beta2", cfg.trainer.optimizer.beta2);
        read(o, "epsilon", cfg.trainer.optimizer.epsilon);
        read(o, "warmup_steps", cfg.trainer.optimizer.warmup_steps);
    }
    if (j.contains("trainer")) {
        const json& t = j.at("trainer");
        check_keys(t, "trainer",
                   {"mode", "iterations", "batch_size", "epochs_per_iteration",
                    "seed", "shuffle_prompts", "ref_refresh"});
        if (t.contains("mode")) {
            cfg.trainer.mode = trainer_mode_from_name(t.at("mode").get<std::string>());
        }
        read(t, "iterations", cfg.trainer.iterations);
        read(t, "batch_size", cfg.trainer.batch_size);
        read(t, "epochs_per_iteration", cfg.trainer.epochs_per_iteration);
        read(t, "seed", cfg.trainer.seed);
        read(t, "shuffle_prompts", cfg.trainer.shuffle_prompts);
        if (t.contains("ref_refresh")) {
            cfg.trainer.ref_refresh =
                ref_refresh_from_name(t.at("ref_refresh").get<std::string>());
        }
    }
    if (j.contains("data")) {
        const json& d = j.at("data");
        check_keys(d, "data", {"dataset", "prompts", "oracle", "targets",
                               "checkpoint_in"});
        read(d, "dataset", cfg.data.dataset);
        read(d, "prompts", cfg.data.prompts);
        read(d, "oracle", cfg.data.oracle);
        read(d, "targets", cfg.data.targets);
        read(d, "checkpoint_in", cfg.data.checkpoint_in);
    }
    if (j.contains("diagnostics")) {
        const json& d = j.at("diagnostics");
        check_keys(d, "diagnostics", {"probe_size", "export_csv", "export_jsonl"});
        read(d, "probe_size", cfg.diagnostics.probe_size);
        read(d, "export_csv", cfg.diagnostics.export_csv);
        read(d, "export_jsonl", cfg.diagnostics.export_jsonl);
        if (cfg.diagnostics.probe_size < 0) {
            throw ConfigError("diagnostics.probe_size must be >= 0");
        }
    }
    cfg.trainer.validate();
    return cfg;
}

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig cfg;  // field defaults are the desk preset
    if (name == "desk") {
        cfg.trainer.optimizer.kind = OptimizerKind::SGD;
        cfg.trainer.optimizer.eta = 1e-2;
        cfg.trainer.optimizer.weight_decay = 0.01;
        cfg.trainer.optimizer.warmup_steps = 0;
        cfg.trainer.batch_size = 16;
        cfg.policy.vocab_size = 12;
        cfg.policy.max_len = 16;
        return cfg;
    }
    if (name == "paper-llm") {
        cfg.trainer.optimizer.kind = OptimizerKind::AdamWLike;
        cfg.trainer.optimizer.eta = 5e-7;
        cfg.trainer.optimizer.weight_decay = 0.01;
        cfg.trainer.optimizer.warmup_steps = 100;
        cfg.trainer.batch_size = 128;
        cfg.trainer.loss.beta = 0.1;
        cfg.trainer.loss.gamma = 1.0;
        cfg.trainer.loss.lambda = 0.2;
        cfg.trainer.sampler.n_responses = 8;
        cfg.trainer.sampler.temperature = 1.0;
        return cfg;
    }
    throw ConfigError("unknown preset: " + name);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot open config: " + path);
    }
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return ExperimentConfig::from_json(j);
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override must be key.path=value: " + assignment);
    }
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw);
    } catch (...) {
        value = raw;  // bare strings need no quoting
    }

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) {
            throw ConfigError("bad override path: " + path);
        }
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

namespace {

void flatten_into(const json& j, const std::string& prefix,
                  std::vector<std::pair<std::string, std::string>>& out) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            flatten_into(value, prefix.empty() ? key : prefix + "." + key, out);
        }
    } else {
        out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
    }
}

}  // namespace

std::vector<std::pair<std::string, std::string>> flatten_config(const json& doc) {
    std::vector<std::pair<std::string, std::string>> out;
    flatten_into(doc, "", out);
    return out;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw InvalidInputError("cannot hash missing file: " + path);
    }
    char buf[1 << 16];
    std::uint64_t h = 1469598103934665603ull;
    while (f) {
        f.read(buf, sizeof(buf));
        h = fnv1a64(buf, static_cast<std::size_t>(f.gcount()), h);
    }
    return h;
}

void write_manifest(const std::string& path, const json& config,
                    const std::vector<std::string>& overrides,
                    const std::vector<ManifestInput>& inputs,
                    const std::vector<std::string>& artifacts) {
    std::ofstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open for writing: " + path);
    }
    f << "# mappo run manifest\n";
    for (const auto& [key, value] : flatten_config(config)) {
        f << "config." << key << " = " << value << "\n";
    }
    for (const std::string& o : overrides) {
        f << "override = " << o << "\n";
    }
    for (const ManifestInput& in : inputs) {
        f << "input." << in.name << " = " << in.path;
        if (!in.path.empty()) {
            f << " (fnv1a64 " << hash_file(in.path) << ")";
        }
        f << "\n";
    }
    for (const std::string& a : artifacts) {
        f << "artifact = " << a << "\n";
    }
    if (!f) {
        throw InvalidInputError("write failed: " + path);
    }
}

}  // namespace mappo
