#pragma once

#include <string>
#include <vector>

#include "mappo/policy.hpp"
#include "mappo/rewards.hpp"

namespace mappo {

enum class Objective {
    SFT,
    DPO,
    MaPPO,
    SimPO,
    SimPOPlus,
    IPO,
    IPOPlus,
    CPO,
    CPOPlus,
};

const std::vector<Objective>& all_objectives();
std::string objective_name(Objective o);
Objective objective_from_name(const std::string& name);

struct LossConfig {
    Objective objective = Objective::MaPPO;
    double beta = 0.1;    // KL weight
    double gamma = 1.0;   // SimPO margin
    double lambda = 0.2;  // CPO SFT weight

    void validate() const;
};

struct PairEvaluation {
    double loss = 0.0;
    Vec grad;
    double margin_u = 0.0;  // inner margin u; h for the IPO family
    double logp_w_theta = 0.0;
    double logp_l_theta = 0.0;
    double logp_w_ref = 0.0;
    double logp_l_ref = 0.0;
    double sigma_u = 0.5;  // sigmoid(margin_u); diagnostics only for IPO
};

struct BatchEvaluation {
    double mean_loss = 0.0;
    Vec mean_grad;
    std::vector<PairEvaluation> per_pair;
};

PairEvaluation sft_loss(const Policy& p, const ReferencePolicy& ref,
                        const PreferencePair& pair);
PairEvaluation dpo_loss(const Policy& p, const ReferencePolicy& ref,
                        const PreferencePair& pair, const LossConfig& cfg);
PairEvaluation mappo_loss(const Policy& p, const ReferencePolicy& ref,
                          const PreferencePair& pair, const LossConfig& cfg);
PairEvaluation simpo_loss(const Policy& p, const PreferencePair& pair,
                          const LossConfig& cfg, bool plus);
PairEvaluation ipo_loss(const Policy& p, const ReferencePolicy& ref,
                        const PreferencePair& pair, const LossConfig& cfg,
                        bool plus);
PairEvaluation cpo_loss(const Policy& p, const PreferencePair& pair,
                        const LossConfig& cfg, bool plus);

/// Dispatch on cfg.objective.
PairEvaluation evaluate_pair(const Policy& p, const ReferencePolicy& ref,
                             const PreferencePair& pair, const LossConfig& cfg);

/// Unweighted mean over pairs; per-pair evaluations retained. Pairs are
/// evaluated concurrently; the reduction is summed in index order so the
/// result is independent of thread count.
BatchEvaluation batch_loss(const Policy& p, const ReferencePolicy& ref,
                           const std::vector<PreferencePair>& pairs,
                           const LossConfig& cfg);

/// Serial reference for batch_loss; must produce bit-identical output.
BatchEvaluation batch_loss_serial(const Policy& p, const ReferencePolicy& ref,
                                  const std::vector<PreferencePair>& pairs,
                                  const LossConfig& cfg);

}  // namespace mappo
