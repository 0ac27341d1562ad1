#include "mappo/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mappo/errors.hpp"
#include "mappo/optim.hpp"

namespace mappo {

double gradient_rel_error(const Vec& a, const Vec& b, double floor) {
    Vec diff = a;
    axpy(-1.0, b, diff);
    return l2_norm(diff) / std::max(l2_norm(b), floor);
}

namespace {

Tokens random_tokens(std::mt19937_64& rng, int vocab, int min_len, int max_len) {
    std::uniform_int_distribution<int> len_dist(min_len, max_len);
    std::uniform_int_distribution<int> tok_dist(0, vocab - 1);
    Tokens t(static_cast<std::size_t>(len_dist(rng)));
    for (int& v : t) {
        v = tok_dist(rng);
    }
    return t;
}

PreferencePair random_pair(std::mt19937_64& rng, int vocab) {
    PreferencePair pair;
    pair.x = random_tokens(rng, vocab, 0, 2);
    pair.y_w = random_tokens(rng, vocab, 1, 4);
    do {
        pair.y_l = random_tokens(rng, vocab, 1, 4);
    } while (pair.y_l == pair.y_w);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    pair.delta_r = unit(rng);
    pair.r_l = unit(rng) * (1.0 - pair.delta_r);
    pair.r_w = pair.r_l + pair.delta_r;
    return pair;
}

}  // namespace

GradCheckReport run_gradcheck(int n_trials, std::uint64_t seed, double h,
                              double tolerance, bool corrupt_gradient) {
    if (n_trials < 1) {
        throw InvalidInputError("run_gradcheck: n_trials must be >= 1");
    }
    GradCheckReport report;
    report.tolerance = tolerance;
    report.h = h;

    constexpr int kVocab = 5;
    for (Objective objective : all_objectives()) {
        GradCheckTrial worst{objective, -1, 0.0};
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(objective)));
        for (int trial = 0; trial < n_trials; ++trial) {
            Policy p(Vocab{kVocab, 0}, 1, 8);
            p.randomize(1.0, rng());
            Policy ref_base(Vocab{kVocab, 0}, 1, 8);
            ref_base.randomize(1.0, rng());
            const ReferencePolicy ref = snapshot(ref_base);
            const PreferencePair pair = random_pair(rng, kVocab);

            LossConfig cfg;
            cfg.objective = objective;
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            cfg.beta = 0.05 + unit(rng);
            cfg.gamma = 2.0 * unit(rng) - 1.0;
            cfg.lambda = 0.5 * unit(rng);

            PairEvaluation ev = evaluate_pair(p, ref, pair, cfg);
            if (corrupt_gradient && !ev.grad.empty()) {
                ev.grad[0] += 1e-2;
            }
            const Vec fd = finite_diff_grad(
                [&](const Vec& theta) {
                    Policy probe = p;
                    probe.theta() = theta;
                    return evaluate_pair(probe, ref, pair, cfg).loss;
                },
                p.theta(), h);
            const double err = gradient_rel_error(ev.grad, fd);
            if (err > worst.rel_error) {
                worst.rel_error = err;
                worst.trial = trial;
            }
        }
        report.worst_per_objective.push_back(worst);
    }
    report.passed = std::all_of(
        report.worst_per_objective.begin(), report.worst_per_objective.end(),
        [&](const GradCheckTrial& t) { return t.rel_error < tolerance; });
    return report;
}

std::string format_gradcheck_report(const GradCheckReport& report) {
    std::ostringstream out;
    out << "gradcheck: tolerance " << report.tolerance << ", step " << report.h
        << "\n";
    for (const GradCheckTrial& t : report.worst_per_objective) {
        out << objective_name(t.objective) << ": max rel error " << t.rel_error
            << " (trial " << t.trial << ") "
            << (t.rel_error < report.tolerance ? "ok" : "FAIL") << "\n";
    }
    out << (report.passed ? "PASS" : "FAIL") << "\n";
    return out.str();
}

}  // namespace mappo
