#pragma once

#include <string>
#include <vector>

#include "mappo/losses.hpp"

namespace mappo {

struct DiagnosticsRecord {
    std::int64_t step = 0;
    int iteration = 0;
    Objective objective = Objective::MaPPO;
    double loss = 0.0;
    double grad_norm = 0.0;
    double mean_logp_w = 0.0;
    double mean_logp_l = 0.0;
    double mean_gap = 0.0;
    double mean_margin_u = 0.0;
    double mean_sigma_u = 0.5;
};

struct SqueezeSummary {
    double d_logp_w = 0.0;
    double d_logp_l = 0.0;
    double d_gap = 0.0;
    bool squeezed = false;  // both likelihoods down while the gap grew
};

struct StationarityReport {
    double gradient_norm = 0.0;
    double max_pair_residual = 0.0;  // max ||score_w - delta_r * score_l||
    double fitted_c = 0.0;  // intercept of logp_w against delta_r * logp_l
};

struct LipschitzReport {
    double m_g_estimate = 0.0;
    double bound_map = 0.0;         // beta (1 + delta_r) M_g, worst pair
    double bound_map_strict = 0.0;  // beta (1 - sigma(u)) (1 + delta_r) M_g
    double bound_dpo = 0.0;         // 2 beta M_g
    double observed_ratio = 0.0;    // max ||tau - tau'|| / ||theta - theta'||
};

using ProbeSet = std::vector<PreferencePair>;

/// Pure read of the probe set under the current policy; means across pairs.
DiagnosticsRecord track(const Policy& p, const ReferencePolicy& ref,
                        const ProbeSet& probe, const LossConfig& cfg);

/// First-to-last deltas over a logp trajectory.
SqueezeSummary squeeze_summary(const std::vector<DiagnosticsRecord>& records);
SqueezeSummary squeeze_summary(double logp_w_first, double logp_l_first,
                               double logp_w_last, double logp_l_last);

StationarityReport stationarity_report(const Policy& p, const ReferencePolicy& ref,
                                       const ProbeSet& probe,
                                       const LossConfig& cfg);

/// Empirical score-function Lipschitz estimate: sup over sampled policy
/// perturbations of ||score - score'|| / ||theta - theta'||, inflated by
/// the given safety factor.
double estimate_score_lipschitz(const Policy& p, const ProbeSet& pairs,
                                int n_samples, double perturb_scale,
                                double safety_factor, std::uint64_t seed);

/// Gradient-operator continuity check between two parameter points.
LipschitzReport lipschitz_check(const Policy& p, const Policy& p_perturbed,
                                const ReferencePolicy& ref, const ProbeSet& pairs,
                                const LossConfig& cfg, double m_g);

enum class ExportFormat { Csv, JsonLines };

/// Column order: step, iteration, objective, loss, grad_norm, mean_logp_w,
/// mean_logp_l, mean_gap, mean_margin_u, mean_sigma_u.
void export_records(const std::vector<DiagnosticsRecord>& records,
                    const std::string& path, ExportFormat format);
std::vector<DiagnosticsRecord> import_records(const std::string& path,
                                              ExportFormat format);

}  // namespace mappo
