// Serial vs OpenMP timing for the three data-parallel kernels: batch loss
// evaluation, pair generation, and finite-difference probing.

#include <cstdio>
#include <random>

#ifdef _OPENMP
#include <omp.h>
#else
#include <chrono>
#endif

#include "mappo/dataset.hpp"
#include "mappo/losses.hpp"
#include "mappo/optim.hpp"

namespace {

using namespace mappo;

double now() {
#ifdef _OPENMP
    return omp_get_wtime();
#else
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
#endif
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const double t0 = now();
        f();
        best = std::min(best, now() - t0);
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-22s serial %9.4f ms   parallel %9.4f ms   speedup %5.2fx\n",
                name, serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif

    const Vocab vocab{12, 0};
    Policy p(vocab, 1, 16);
    p.randomize(0.5, 7);
    const ReferencePolicy ref = snapshot(p);

    const NearTieSuite suite = make_near_tie_suite(512, vocab);
    LossConfig loss;
    loss.objective = Objective::MaPPO;

    const double batch_serial = time_best_of(
        5, [&] { batch_loss_serial(p, ref, suite.pairs, loss); });
    const double batch_parallel =
        time_best_of(5, [&] { batch_loss(p, ref, suite.pairs, loss); });
    report("batch_loss", batch_serial, batch_parallel);

    HashOracle oracle;
    SamplerConfig sampler;
    sampler.n_responses = 8;
    sampler.seed = 3;
    const double gen_serial = time_best_of(
        3, [&] { generate_pairs_serial(p, suite.prompts, oracle, sampler); });
    const double gen_parallel = time_best_of(
        3, [&] { generate_pairs(p, suite.prompts, oracle, sampler); });
    report("generate_pairs", gen_serial, gen_parallel);

    const auto loss_fn = [&](const Vec& theta) {
        Policy probe = p;
        probe.theta() = theta;
        return batch_loss_serial(probe, ref, suite.pairs, loss).mean_loss;
    };
    // Dense finite differences parallelize per coordinate; use a single run
    // (312 loss sweeps each) and a serial sweep of the same coordinates.
    const double fd_parallel =
        time_best_of(1, [&] { finite_diff_grad(loss_fn, p.theta(), 1e-5); });
    const double fd_serial = time_best_of(1, [&] {
        Vec g(p.theta().size());
        Vec probe = p.theta();
        for (std::size_t i = 0; i < probe.size(); ++i) {
            probe[i] += 1e-5;
            const double up = loss_fn(probe);
            probe[i] -= 2e-5;
            const double down = loss_fn(probe);
            probe[i] = p.theta()[i];
            g[i] = (up - down) / 2e-5;
        }
    });
    report("finite_diff_grad", fd_serial, fd_parallel);
    return 0;
}
