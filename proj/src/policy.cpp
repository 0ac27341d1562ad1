#include "mappo/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "mappo/errors.hpp"

namespace mappo {

namespace {

constexpr char kMagic[8] = {'M', 'A', 'P', 'P', 'O', 'P', 'L', '1'};

void log_softmax_row(std::span<const double> logits, std::span<double> out) {
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double v : logits) {
        z += std::exp(v - m);
    }
    const double log_z = m + std::log(z);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = logits[i] - log_z;
    }
}

}  // namespace

Policy::Policy(Vocab vocab, int context_order, int max_len)
    : vocab_(vocab), context_order_(context_order), max_len_(max_len) {
    if (vocab_.size < 2) {
        throw InvalidInputError("vocab size must be >= 2");
    }
    if (vocab_.eos_id < 0 || vocab_.eos_id >= vocab_.size) {
        throw InvalidInputError("eos_id out of range");
    }
    if (context_order_ < 0) {
        throw InvalidInputError("context_order must be >= 0");
    }
    if (max_len_ < 1) {
        throw InvalidInputError("max_len must be >= 1");
    }
    // Base (vocab+1) encoding; the extra symbol pads missing history.
    std::int64_t states = 1;
    for (int i = 0; i < context_order_; ++i) {
        states *= vocab_.size + 1;
        if (states > (1 << 24)) {
            throw InvalidInputError("context_order too large for tabular policy");
        }
    }
    num_states_ = static_cast<int>(states);
    theta_.assign(static_cast<std::size_t>(num_states_) * vocab_.size, 0.0);
}

void Policy::randomize(double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, scale);
    for (double& v : theta_) {
        v = dist(rng);
    }
}

void Policy::check_tokens(std::span<const int> t) const {
    for (int id : t) {
        if (id < 0 || id >= vocab_.size) {
            throw InvalidInputError("token id out of range: " + std::to_string(id));
        }
    }
}

int Policy::initial_state(std::span<const int> x) const {
    const int pad = vocab_.size;
    int state = 0;
    for (int i = 0; i < context_order_; ++i) {
        const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(x.size()) -
                                 context_order_ + i;
        const int sym = (j >= 0) ? x[static_cast<std::size_t>(j)] : pad;
        state = state * (vocab_.size + 1) + sym;
    }
    return state;
}

int Policy::advance_state(int state, int token) const {
    if (context_order_ == 0) {
        return 0;
    }
    const int base = vocab_.size + 1;
    int stride = 1;
    for (int i = 0; i < context_order_ - 1; ++i) {
        stride *= base;
    }
    return (state % stride) * base + token;
}

Vec Policy::state_distribution(int state, double temperature) const {
    Vec out(static_cast<std::size_t>(vocab_.size));
    const double* row = theta_.data() + static_cast<std::size_t>(state) * vocab_.size;
    Vec scaled(static_cast<std::size_t>(vocab_.size));
    for (int v = 0; v < vocab_.size; ++v) {
        scaled[static_cast<std::size_t>(v)] = row[v] / temperature;
    }
    log_softmax_row(scaled, out);
    for (double& v : out) {
        v = std::exp(v);
    }
    return out;
}

double Policy::log_prob(std::span<const int> x, std::span<const int> y) const {
    check_tokens(x);
    check_tokens(y);
    if (y.empty()) {
        throw InvalidInputError("log_prob: empty response");
    }
    if (static_cast<int>(y.size()) > max_len_) {
        throw InvalidInputError("log_prob: response longer than max_len");
    }
    Vec logp(static_cast<std::size_t>(vocab_.size));
    int state = initial_state(x);
    double total = 0.0;
    for (int t = 0; t < static_cast<int>(y.size()); ++t) {
        const double* row =
            theta_.data() + static_cast<std::size_t>(state) * vocab_.size;
        log_softmax_row({row, static_cast<std::size_t>(vocab_.size)}, logp);
        total += logp[static_cast<std::size_t>(y[static_cast<std::size_t>(t)])];
        state = advance_state(state, y[static_cast<std::size_t>(t)]);
    }
    return total;
}

void Policy::accumulate_score(std::span<const int> x, std::span<const int> y,
                              double weight, std::span<double> out) const {
    check_tokens(x);
    check_tokens(y);
    if (y.empty()) {
        throw InvalidInputError("score: empty response");
    }
    if (static_cast<int>(y.size()) > max_len_) {
        throw InvalidInputError("score: response longer than max_len");
    }
    if (out.size() != theta_.size()) {
        throw InvalidInputError("score: output buffer size mismatch");
    }
    Vec logp(static_cast<std::size_t>(vocab_.size));
    int state = initial_state(x);
    for (int t = 0; t < static_cast<int>(y.size()); ++t) {
        const double* row =
            theta_.data() + static_cast<std::size_t>(state) * vocab_.size;
        log_softmax_row({row, static_cast<std::size_t>(vocab_.size)}, logp);
        double* grad_row = out.data() + static_cast<std::size_t>(state) * vocab_.size;
        for (int v = 0; v < vocab_.size; ++v) {
            grad_row[v] -= weight * std::exp(logp[static_cast<std::size_t>(v)]);
        }
        grad_row[y[static_cast<std::size_t>(t)]] += weight;
        state = advance_state(state, y[static_cast<std::size_t>(t)]);
    }
}

Vec Policy::score(std::span<const int> x, std::span<const int> y) const {
    Vec g(theta_.size(), 0.0);
    accumulate_score(x, y, 1.0, g);
    return g;
}

Tokens Policy::sample(std::span<const int> x, double temperature,
                      std::mt19937_64& rng) const {
    check_tokens(x);
    if (!(temperature > 0.0)) {
        throw InvalidInputError("sample: temperature must be positive");
    }
    Tokens y;
    int state = initial_state(x);
    while (static_cast<int>(y.size()) < max_len_) {
        int tok;
        if (temperature < 1e-6) {
            const double* row =
                theta_.data() + static_cast<std::size_t>(state) * vocab_.size;
            tok = static_cast<int>(
                std::max_element(row, row + vocab_.size) - row);
        } else {
            const Vec p = state_distribution(state, temperature);
            std::discrete_distribution<int> dist(p.begin(), p.end());
            tok = dist(rng);
        }
        y.push_back(tok);
        if (tok == vocab_.eos_id) {
            break;
        }
        state = advance_state(state, tok);
    }
    return y;
}

void Policy::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw InvalidInputError("cannot open for writing: " + path);
    }
    f.write(kMagic, sizeof(kMagic));
    const std::int32_t header[4] = {vocab_.size, vocab_.eos_id, context_order_,
                                    max_len_};
    f.write(reinterpret_cast<const char*>(header), sizeof(header));
    const std::int64_t n = static_cast<std::int64_t>(theta_.size());
    f.write(reinterpret_cast<const char*>(&n), sizeof(n));
    f.write(reinterpret_cast<const char*>(theta_.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!f) {
        throw InvalidInputError("write failed: " + path);
    }

    std::ofstream meta(path + ".meta.txt");
    meta << "format: mappo tabular policy v1\n"
         << "vocab_size: " << vocab_.size << "\n"
         << "eos_id: " << vocab_.eos_id << "\n"
         << "context_order: " << context_order_ << "\n"
         << "max_len: " << max_len_ << "\n"
         << "num_states: " << num_states_ << "\n"
         << "theta_entries: " << n << "\n"
         << "theta_hash: " << fnv1a64(theta_.data(), theta_.size() * sizeof(double))
         << "\n";
}

Policy Policy::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw InvalidInputError("cannot open policy file: " + path);
    }
    char magic[8];
    f.read(magic, sizeof(magic));
    if (!f || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw InvalidInputError("not a policy file: " + path);
    }
    std::int32_t header[4];
    f.read(reinterpret_cast<char*>(header), sizeof(header));
    std::int64_t n = 0;
    f.read(reinterpret_cast<char*>(&n), sizeof(n));
    if (!f) {
        throw InvalidInputError("truncated policy file: " + path);
    }
    Policy p(Vocab{header[0], header[1]}, header[2], header[3]);
    if (n != static_cast<std::int64_t>(p.theta_.size())) {
        throw InvalidInputError("theta size mismatch in: " + path);
    }
    f.read(reinterpret_cast<char*>(p.theta_.data()),
           static_cast<std::streamsize>(n * sizeof(double)));
    if (!f) {
        throw InvalidInputError("truncated theta table in: " + path);
    }
    return p;
}

}  // namespace mappo
