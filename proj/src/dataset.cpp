#include "mappo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "mappo/errors.hpp"

namespace mappo {

namespace {

using nlohmann::json;

Tokens tokens_from_json(const json& j, const char* field) {
    if (!j.is_array()) {
        throw InvalidInputError(std::string(field) + " must be an int array");
    }
    Tokens t;
    t.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number_integer()) {
            throw InvalidInputError(std::string(field) + " must be an int array");
        }
        t.push_back(v.get<int>());
    }
    return t;
}

PreferencePair pair_from_json(const json& j) {
    PreferencePair pair;
    pair.x = tokens_from_json(j.at("prompt"), "prompt");
    pair.y_w = tokens_from_json(j.at("chosen"), "chosen");
    pair.y_l = tokens_from_json(j.at("rejected"), "rejected");
    pair.r_w = j.at("reward_chosen").get<double>();
    pair.r_l = j.at("reward_rejected").get<double>();
    pair.delta_r = std::clamp(pair.r_w - pair.r_l, 0.0, 1.0);
    return pair;
}

}  // namespace

std::vector<PreferencePair> load_dataset(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open dataset: " + path);
    }
    std::vector<PreferencePair> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            PreferencePair pair = pair_from_json(json::parse(line));
            validate_pair(pair);
            pairs.push_back(std::move(pair));
        } catch (const std::exception& e) {
            throw InvalidInputError(path + ":" + std::to_string(lineno) + ": " +
                                    e.what());
        }
    }
    return pairs;
}

void save_dataset(const std::vector<PreferencePair>& pairs,
                  const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open for writing: " + path);
    }
    for (const PreferencePair& p : pairs) {
        json j{{"prompt", p.x},
               {"chosen", p.y_w},
               {"rejected", p.y_l},
               {"reward_chosen", p.r_w},
               {"reward_rejected", p.r_l}};
        f << j.dump() << "\n";
    }
    if (!f) {
        throw InvalidInputError("write failed: " + path);
    }
}

std::vector<DatasetIssue> validate_dataset_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open dataset: " + path);
    }
    std::vector<DatasetIssue> issues;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            validate_pair(pair_from_json(json::parse(line)));
        } catch (const std::exception& e) {
            issues.push_back({lineno, e.what()});
        }
    }
    return issues;
}

std::vector<Tokens> load_prompts(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open prompts: " + path);
    }
    std::vector<Tokens> prompts;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            prompts.push_back(tokens_from_json(json::parse(line).at("prompt"),
                                               "prompt"));
        } catch (const std::exception& e) {
            throw InvalidInputError(path + ":" + std::to_string(lineno) + ": " +
                                    e.what());
        }
    }
    return prompts;
}

void save_prompts(const std::vector<Tokens>& prompts, const std::string& path) {
    std::ofstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open for writing: " + path);
    }
    for (const Tokens& p : prompts) {
        f << json{{"prompt", p}}.dump() << "\n";
    }
}

std::map<Tokens, Tokens> load_targets(const std::string& path) {
    std::ifstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open targets: " + path);
    }
    std::map<Tokens, Tokens> targets;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty()) {
            continue;
        }
        try {
            const json j = json::parse(line);
            targets[tokens_from_json(j.at("prompt"), "prompt")] =
                tokens_from_json(j.at("target"), "target");
        } catch (const std::exception& e) {
            throw InvalidInputError(path + ":" + std::to_string(lineno) + ": " +
                                    e.what());
        }
    }
    return targets;
}

NearTieSuite make_near_tie_suite(int n_prompts, const Vocab& vocab,
                                 double max_gap) {
    if (n_prompts < 1 || vocab.size < 4) {
        throw InvalidInputError("make_near_tie_suite: need >= 1 prompt, vocab >= 4");
    }
    // Two body tokens distinct from eos; every rejected response repeats the
    // chosen bigram pattern, which is what drags logp(y_w) down under DPO.
    const int a = (vocab.eos_id + 1) % vocab.size;
    const int b = (vocab.eos_id + 2) % vocab.size;

    NearTieSuite suite;
    for (int i = 0; i < n_prompts; ++i) {
        int pt = (vocab.eos_id + 3 + i) % vocab.size;
        if (pt == vocab.eos_id) {
            pt = (pt + 1) % vocab.size;
        }
        PreferencePair pair;
        pair.x = {pt};
        pair.y_w = {a, b, vocab.eos_id};
        pair.y_l.clear();
        for (int rep = 0; rep < 6; ++rep) {
            pair.y_l.push_back(a);
            pair.y_l.push_back(b);
        }
        pair.y_l.push_back(vocab.eos_id);
        // Both responses high quality; the gap stays well under max_gap.
        const double wobble = 0.01 * static_cast<double>(i % 5) / 5.0;
        pair.r_w = 0.93 + wobble;
        pair.r_l = pair.r_w - (max_gap - 0.5 * max_gap * ((i % 3) / 3.0));
        pair.delta_r = std::clamp(pair.r_w - pair.r_l, 0.0, 1.0);
        suite.prompts.push_back(pair.x);
        suite.pairs.push_back(std::move(pair));
    }
    return suite;
}

}  // namespace mappo
