#include "mappo/losses.hpp"

#include <cmath>

#include "mappo/errors.hpp"

namespace mappo {

const std::vector<Objective>& all_objectives() {
    static const std::vector<Objective> objectives = {
        Objective::SFT,  Objective::DPO,     Objective::MaPPO,
        Objective::SimPO, Objective::SimPOPlus, Objective::IPO,
        Objective::IPOPlus, Objective::CPO,  Objective::CPOPlus,
    };
    return objectives;
}

std::string objective_name(Objective o) {
    switch (o) {
        case Objective::SFT: return "SFT";
        case Objective::DPO: return "DPO";
        case Objective::MaPPO: return "MaPPO";
        case Objective::SimPO: return "SimPO";
        case Objective::SimPOPlus: return "SimPOPlus";
        case Objective::IPO: return "IPO";
        case Objective::IPOPlus: return "IPOPlus";
        case Objective::CPO: return "CPO";
        case Objective::CPOPlus: return "CPOPlus";
    }
    throw InvalidInputError("unknown objective");
}

Objective objective_from_name(const std::string& name) {
    for (Objective o : all_objectives()) {
        if (objective_name(o) == name) {
            return o;
        }
    }
    throw InvalidInputError("unknown objective name: " + name);
}

void LossConfig::validate() const {
    if (!(beta > 0.0)) {
        throw InvalidInputError("loss.beta must be > 0");
    }
    if (!std::isfinite(gamma)) {
        throw InvalidInputError("loss.gamma must be finite");
    }
    if (!(lambda >= 0.0)) {
        throw InvalidInputError("loss.lambda must be >= 0");
    }
}

namespace {

struct PairLogps {
    double w_theta, l_theta, w_ref, l_ref;
};

PairLogps pair_logps(const Policy& p, const ReferencePolicy& ref,
                     const PreferencePair& pair) {
    return {p.log_prob(pair.x, pair.y_w), p.log_prob(pair.x, pair.y_l),
            ref.log_prob(pair.x, pair.y_w), ref.log_prob(pair.x, pair.y_l)};
}

void fill_logps(PairEvaluation& ev, const PairLogps& lp) {
    ev.logp_w_theta = lp.w_theta;
    ev.logp_l_theta = lp.l_theta;
    ev.logp_w_ref = lp.w_ref;
    ev.logp_l_ref = lp.l_ref;
}

// Shared core of DPO and MaPPO: k = 1 recovers DPO, k = delta_r is MaPPO.
// Identical arithmetic in both paths keeps the degeneracy bit-exact.
PairEvaluation log_ratio_sigmoid_loss(const Policy& p, const ReferencePolicy& ref,
                                      const PreferencePair& pair,
                                      const LossConfig& cfg, double k) {
    const PairLogps lp = pair_logps(p, ref, pair);
    const double u =
        cfg.beta * ((lp.w_theta - lp.w_ref) - k * (lp.l_theta - lp.l_ref));
    PairEvaluation ev;
    fill_logps(ev, lp);
    ev.margin_u = u;
    ev.sigma_u = sigmoid(u);
    ev.loss = -log_sigmoid(u);
    // grad = -beta (1 - sigma(u)) (score_w - k * score_l)
    const double coeff = -cfg.beta * (1.0 - ev.sigma_u);
    ev.grad.assign(p.theta().size(), 0.0);
    p.accumulate_score(pair.x, pair.y_w, coeff, ev.grad);
    p.accumulate_score(pair.x, pair.y_l, -coeff * k, ev.grad);
    return ev;
}

}  // namespace

PairEvaluation sft_loss(const Policy& p, const ReferencePolicy& ref,
                        const PreferencePair& pair) {
    const PairLogps lp = pair_logps(p, ref, pair);
    PairEvaluation ev;
    fill_logps(ev, lp);
    ev.loss = -lp.w_theta;
    ev.margin_u = lp.w_theta;
    ev.sigma_u = sigmoid(ev.margin_u);
    ev.grad.assign(p.theta().size(), 0.0);
    p.accumulate_score(pair.x, pair.y_w, -1.0, ev.grad);
    return ev;
}

PairEvaluation dpo_loss(const Policy& p, const ReferencePolicy& ref,
                        const PreferencePair& pair, const LossConfig& cfg) {
    return log_ratio_sigmoid_loss(p, ref, pair, cfg, 1.0);
}

PairEvaluation mappo_loss(const Policy& p, const ReferencePolicy& ref,
                          const PreferencePair& pair, const LossConfig& cfg) {
    if (!(pair.delta_r >= 0.0 && pair.delta_r <= 1.0)) {
        throw InvalidInputError("mappo_loss: delta_r outside [0,1]");
    }
    return log_ratio_sigmoid_loss(p, ref, pair, cfg, pair.delta_r);
}

PairEvaluation simpo_loss(const Policy& p, const PreferencePair& pair,
                          const LossConfig& cfg, bool plus) {
    if (pair.y_w.empty() || pair.y_l.empty()) {
        throw InvalidInputError("simpo_loss: zero-length response");
    }
    const double k = plus ? pair.delta_r : 1.0;
    const double cw = cfg.beta / static_cast<double>(pair.y_w.size());
    const double cl = cfg.beta / static_cast<double>(pair.y_l.size());
    const double lpw = p.log_prob(pair.x, pair.y_w);
    const double lpl = p.log_prob(pair.x, pair.y_l);
    const double u = cw * lpw - k * cl * lpl - cfg.gamma;
    PairEvaluation ev;
    ev.logp_w_theta = lpw;
    ev.logp_l_theta = lpl;
    ev.margin_u = u;
    ev.sigma_u = sigmoid(u);
    ev.loss = -log_sigmoid(u);
    const double coeff = -(1.0 - ev.sigma_u);
    ev.grad.assign(p.theta().size(), 0.0);
    p.accumulate_score(pair.x, pair.y_w, coeff * cw, ev.grad);
    p.accumulate_score(pair.x, pair.y_l, -coeff * k * cl, ev.grad);
    return ev;
}

PairEvaluation ipo_loss(const Policy& p, const ReferencePolicy& ref,
                        const PreferencePair& pair, const LossConfig& cfg,
                        bool plus) {
    const double k = plus ? pair.delta_r : 1.0;
    const PairLogps lp = pair_logps(p, ref, pair);
    const double h =
        (lp.w_theta - lp.w_ref) - k * (lp.l_theta - lp.l_ref) - 1.0 / (2.0 * cfg.beta);
    PairEvaluation ev;
    fill_logps(ev, lp);
    ev.margin_u = h;
    ev.sigma_u = sigmoid(h);  // logging only; never enters the gradient
    ev.loss = h * h;
    ev.grad.assign(p.theta().size(), 0.0);
    p.accumulate_score(pair.x, pair.y_w, 2.0 * h, ev.grad);
    p.accumulate_score(pair.x, pair.y_l, -2.0 * h * k, ev.grad);
    return ev;
}

PairEvaluation cpo_loss(const Policy& p, const PreferencePair& pair,
                        const LossConfig& cfg, bool plus) {
    const double k = plus ? pair.delta_r : 1.0;
    const double lpw = p.log_prob(pair.x, pair.y_w);
    const double lpl = p.log_prob(pair.x, pair.y_l);
    const double u = cfg.beta * lpw - k * cfg.beta * lpl;
    PairEvaluation ev;
    ev.logp_w_theta = lpw;
    ev.logp_l_theta = lpl;
    ev.margin_u = u;
    ev.sigma_u = sigmoid(u);
    ev.loss = -log_sigmoid(u) - cfg.lambda * lpw;
    const double coeff = -cfg.beta * (1.0 - ev.sigma_u);
    ev.grad.assign(p.theta().size(), 0.0);
    p.accumulate_score(pair.x, pair.y_w, coeff - cfg.lambda, ev.grad);
    p.accumulate_score(pair.x, pair.y_l, -coeff * k, ev.grad);
    return ev;
}

PairEvaluation evaluate_pair(const Policy& p, const ReferencePolicy& ref,
                             const PreferencePair& pair, const LossConfig& cfg) {
    cfg.validate();
    switch (cfg.objective) {
        case Objective::SFT: return sft_loss(p, ref, pair);
        case Objective::DPO: return dpo_loss(p, ref, pair, cfg);
        case Objective::MaPPO: return mappo_loss(p, ref, pair, cfg);
        case Objective::SimPO: return simpo_loss(p, pair, cfg, false);
        case Objective::SimPOPlus: return simpo_loss(p, pair, cfg, true);
        case Objective::IPO: return ipo_loss(p, ref, pair, cfg, false);
        case Objective::IPOPlus: return ipo_loss(p, ref, pair, cfg, true);
        case Objective::CPO: return cpo_loss(p, pair, cfg, false);
        case Objective::CPOPlus: return cpo_loss(p, pair, cfg, true);
    }
    throw InvalidInputError("unknown objective");
}

namespace {

BatchEvaluation batch_impl(const Policy& p, const ReferencePolicy& ref,
                           const std::vector<PreferencePair>& pairs,
                           const LossConfig& cfg, bool parallel) {
    if (pairs.empty()) {
        throw InvalidInputError("batch_loss: empty batch");
    }
    BatchEvaluation batch;
    batch.per_pair.resize(pairs.size());

    const auto n = static_cast<std::int64_t>(pairs.size());
    std::exception_ptr error;  // exceptions must not escape the parallel region
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            batch.per_pair[static_cast<std::size_t>(i)] =
                evaluate_pair(p, ref, pairs[static_cast<std::size_t>(i)], cfg);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            error = std::current_exception();
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }

    // Index-ordered reduction: identical result regardless of thread count.
    batch.mean_grad.assign(p.theta().size(), 0.0);
    double loss_sum = 0.0;
    for (const PairEvaluation& ev : batch.per_pair) {
        loss_sum += ev.loss;
        axpy(1.0, ev.grad, batch.mean_grad);
    }
    const double inv_n = 1.0 / static_cast<double>(pairs.size());
    batch.mean_loss = loss_sum * inv_n;
    for (double& g : batch.mean_grad) {
        g *= inv_n;
    }
    return batch;
}

}  // namespace

BatchEvaluation batch_loss(const Policy& p, const ReferencePolicy& ref,
                           const std::vector<PreferencePair>& pairs,
                           const LossConfig& cfg) {
    return batch_impl(p, ref, pairs, cfg, true);
}

BatchEvaluation batch_loss_serial(const Policy& p, const ReferencePolicy& ref,
                                  const std::vector<PreferencePair>& pairs,
                                  const LossConfig& cfg) {
    return batch_impl(p, ref, pairs, cfg, false);
}

}  // namespace mappo
