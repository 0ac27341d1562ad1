#include "mappo/optim.hpp"

#include <cmath>

#include "mappo/errors.hpp"

namespace mappo {

std::string optimizer_kind_name(OptimizerKind k) {
    return k == OptimizerKind::SGD ? "SGD" : "AdamWLike";
}

OptimizerKind optimizer_kind_from_name(const std::string& name) {
    if (name == "SGD") {
        return OptimizerKind::SGD;
    }
    if (name == "AdamWLike") {
        return OptimizerKind::AdamWLike;
    }
    throw InvalidInputError("unknown optimizer kind: " + name);
}

void OptimizerConfig::validate() const {
    if (!(eta > 0.0)) {
        throw InvalidInputError("optimizer.eta must be > 0");
    }
    if (!(weight_decay >= 0.0)) {
        throw InvalidInputError("optimizer.weight_decay must be >= 0");
    }
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw InvalidInputError("optimizer betas must be in [0,1)");
    }
    if (!(epsilon > 0.0)) {
        throw InvalidInputError("optimizer.epsilon must be > 0");
    }
    if (warmup_steps < 0) {
        throw InvalidInputError("optimizer.warmup_steps must be >= 0");
    }
}

void step(OptimizerState& state, Vec& theta, const Vec& grad,
          const OptimizerConfig& cfg) {
    cfg.validate();
    if (grad.size() != theta.size()) {
        throw InvalidInputError("optimizer step: gradient shape mismatch");
    }
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!std::isfinite(grad[i])) {
            throw NumericError("non-finite gradient at index " + std::to_string(i));
        }
    }

    const std::int64_t t = state.step + 1;
    double lr = cfg.eta;
    if (cfg.warmup_steps > 0 && t <= cfg.warmup_steps) {
        lr *= static_cast<double>(t) / static_cast<double>(cfg.warmup_steps);
    }

    if (cfg.kind == OptimizerKind::SGD) {
        // Plain gradient descent; weight decay applies to AdamWLike only.
        for (std::size_t i = 0; i < theta.size(); ++i) {
            theta[i] -= lr * grad[i];
        }
    } else {
        if (state.m.empty()) {
            state.m.assign(theta.size(), 0.0);
            state.v.assign(theta.size(), 0.0);
        }
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < theta.size(); ++i) {
            state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grad[i];
            state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            const double m_hat = state.m[i] / bc1;
            const double v_hat = state.v[i] / bc2;
            theta[i] -= lr * (m_hat / (std::sqrt(v_hat) + cfg.epsilon) +
                              cfg.weight_decay * theta[i]);
        }
    }
    state.step = t;
}

Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& theta,
                     double h) {
    std::vector<std::size_t> coords(theta.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        coords[i] = i;
    }
    return finite_diff_grad(f, theta, h, coords);
}

Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& theta,
                     double h, const std::vector<std::size_t>& coords) {
    if (!(h > 0.0)) {
        throw InvalidInputError("finite_diff_grad: h must be > 0");
    }
    Vec g(theta.size(), 0.0);
    const auto n = static_cast<std::int64_t>(coords.size());
    std::int64_t bad_coord = -1;  // throwing across the parallel region is UB
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::int64_t j = 0; j < n; ++j) {
        const std::size_t i = coords[static_cast<std::size_t>(j)];
        Vec probe = theta;
        probe[i] = theta[i] + h;
        const double up = f(probe);
        probe[i] = theta[i] - h;
        const double down = f(probe);
        if (!std::isfinite(up) || !std::isfinite(down)) {
#ifdef _OPENMP
#pragma omp critical
#endif
            bad_coord = static_cast<std::int64_t>(i);
        } else {
            g[i] = (up - down) / (2.0 * h);
        }
    }
    if (bad_coord >= 0) {
        throw NumericError("finite_diff_grad: non-finite loss at coordinate " +
                           std::to_string(bad_coord));
    }
    return g;
}

}  // namespace mappo
