#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mappo/numeric.hpp"

namespace mappo {

enum class OptimizerKind { SGD, AdamWLike };

std::string optimizer_kind_name(OptimizerKind k);
OptimizerKind optimizer_kind_from_name(const std::string& name);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::SGD;
    double eta = 1e-2;
    double weight_decay = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    int warmup_steps = 0;  // linear ramp over the first warmup_steps steps

    void validate() const;
};

struct OptimizerState {
    std::int64_t step = 0;
    Vec m;  // first moment (AdamWLike only)
    Vec v;  // second moment (AdamWLike only)
};

/// One parameter update in place. SGD: theta -= lr * g. AdamWLike:
/// bias-corrected moments with decoupled weight decay,
/// theta -= lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta).
void step(OptimizerState& state, Vec& theta, const Vec& grad,
          const OptimizerConfig& cfg);

/// Central finite differences (f(t+h e_i) - f(t-h e_i)) / 2h over every
/// coordinate. Each probe works on a private copy of theta; probes run
/// concurrently.
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& theta,
                     double h);

/// Sparse mode: only the listed coordinates are probed; the rest stay zero.
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& theta,
                     double h, const std::vector<std::size_t>& coords);

}  // namespace mappo
