#include "mappo/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mappo/errors.hpp"
#include "json.hpp"

namespace mappo {

DiagnosticsRecord track(const Policy& p, const ReferencePolicy& ref,
                        const ProbeSet& probe, const LossConfig& cfg) {
    if (probe.empty()) {
        throw InvalidInputError("track: empty probe set");
    }
    DiagnosticsRecord rec;
    rec.objective = cfg.objective;
    rec.mean_sigma_u = 0.0;  // accumulator; the struct default is 0.5
    double loss_sum = 0.0;
    for (const PreferencePair& pair : probe) {
        const PairEvaluation ev = evaluate_pair(p, ref, pair, cfg);
        rec.mean_logp_w += ev.logp_w_theta;
        rec.mean_logp_l += ev.logp_l_theta;
        rec.mean_margin_u += ev.margin_u;
        rec.mean_sigma_u += ev.sigma_u;
        loss_sum += ev.loss;
    }
    const double inv_n = 1.0 / static_cast<double>(probe.size());
    rec.mean_logp_w *= inv_n;
    rec.mean_logp_l *= inv_n;
    rec.mean_margin_u *= inv_n;
    rec.mean_sigma_u *= inv_n;
    rec.mean_gap = rec.mean_logp_w - rec.mean_logp_l;
    rec.loss = loss_sum * inv_n;
    return rec;
}

SqueezeSummary squeeze_summary(double logp_w_first, double logp_l_first,
                               double logp_w_last, double logp_l_last) {
    SqueezeSummary s;
    s.d_logp_w = logp_w_last - logp_w_first;
    s.d_logp_l = logp_l_last - logp_l_first;
    s.d_gap = (logp_w_last - logp_l_last) - (logp_w_first - logp_l_first);
    s.squeezed = s.d_logp_w < 0.0 && s.d_logp_l < 0.0 && s.d_gap > 0.0;
    return s;
}

SqueezeSummary squeeze_summary(const std::vector<DiagnosticsRecord>& records) {
    if (records.size() < 2) {
        throw InvalidInputError("squeeze_summary: need at least 2 records");
    }
    return squeeze_summary(records.front().mean_logp_w, records.front().mean_logp_l,
                           records.back().mean_logp_w, records.back().mean_logp_l);
}

StationarityReport stationarity_report(const Policy& p, const ReferencePolicy& ref,
                                       const ProbeSet& probe,
                                       const LossConfig& cfg) {
    if (probe.empty()) {
        throw InvalidInputError("stationarity_report: empty probe set");
    }
    StationarityReport rep;
    const BatchEvaluation batch = batch_loss_serial(p, ref, probe, cfg);
    rep.gradient_norm = l2_norm(batch.mean_grad);

    double c_sum = 0.0;
    for (const PreferencePair& pair : probe) {
        Vec residual(p.theta().size(), 0.0);
        p.accumulate_score(pair.x, pair.y_w, 1.0, residual);
        p.accumulate_score(pair.x, pair.y_l, -pair.delta_r, residual);
        rep.max_pair_residual = std::max(rep.max_pair_residual, l2_norm(residual));
        c_sum += p.log_prob(pair.x, pair.y_w) -
                 pair.delta_r * p.log_prob(pair.x, pair.y_l);
    }
    rep.fitted_c = c_sum / static_cast<double>(probe.size());
    return rep;
}

double estimate_score_lipschitz(const Policy& p, const ProbeSet& pairs,
                                int n_samples, double perturb_scale,
                                double safety_factor, std::uint64_t seed) {
    if (pairs.empty() || n_samples < 1) {
        throw InvalidInputError("estimate_score_lipschitz: bad arguments");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, perturb_scale);
    double sup = 0.0;
    Policy a = p;
    Policy b = p;
    for (int s = 0; s < n_samples; ++s) {
        for (std::size_t i = 0; i < p.theta().size(); ++i) {
            a.theta()[i] = p.theta()[i] + dist(rng);
            b.theta()[i] = p.theta()[i] + dist(rng);
        }
        double dtheta = 0.0;
        for (std::size_t i = 0; i < p.theta().size(); ++i) {
            const double d = a.theta()[i] - b.theta()[i];
            dtheta += d * d;
        }
        dtheta = std::sqrt(dtheta);
        if (dtheta == 0.0) {
            continue;
        }
        for (const PreferencePair& pair : pairs) {
            for (const Tokens* y : {&pair.y_w, &pair.y_l}) {
                Vec diff = a.score(pair.x, *y);
                axpy(-1.0, b.score(pair.x, *y), diff);
                sup = std::max(sup, l2_norm(diff) / dtheta);
            }
        }
    }
    return sup * safety_factor;
}

LipschitzReport lipschitz_check(const Policy& p, const Policy& p_perturbed,
                                const ReferencePolicy& ref, const ProbeSet& pairs,
                                const LossConfig& cfg, double m_g) {
    if (p.theta().size() != p_perturbed.theta().size() ||
        p.vocab().size != p_perturbed.vocab().size ||
        p.context_order() != p_perturbed.context_order()) {
        throw InvalidInputError("lipschitz_check: policies differ in structure");
    }
    if (!(m_g > 0.0)) {
        throw InvalidInputError("lipschitz_check: m_g must be > 0");
    }
    if (pairs.empty()) {
        throw InvalidInputError("lipschitz_check: empty pair set");
    }

    LipschitzReport rep;
    rep.m_g_estimate = m_g;
    rep.bound_dpo = 2.0 * cfg.beta * m_g;

    double dtheta = 0.0;
    for (std::size_t i = 0; i < p.theta().size(); ++i) {
        const double d = p.theta()[i] - p_perturbed.theta()[i];
        dtheta += d * d;
    }
    dtheta = std::sqrt(dtheta);

    for (const PreferencePair& pair : pairs) {
        const PairEvaluation ev_a = evaluate_pair(p, ref, pair, cfg);
        const PairEvaluation ev_b = evaluate_pair(p_perturbed, ref, pair, cfg);
        rep.bound_map =
            std::max(rep.bound_map, cfg.beta * (1.0 + pair.delta_r) * m_g);
        rep.bound_map_strict = std::max(
            rep.bound_map_strict,
            cfg.beta * (1.0 - ev_a.sigma_u) * (1.0 + pair.delta_r) * m_g);
        if (dtheta > 0.0) {
            Vec diff = ev_a.grad;
            axpy(-1.0, ev_b.grad, diff);
            rep.observed_ratio = std::max(rep.observed_ratio, l2_norm(diff) / dtheta);
        }
    }
    return rep;
}

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

constexpr const char* kCsvHeader =
    "step,iteration,objective,loss,grad_norm,mean_logp_w,mean_logp_l,"
    "mean_gap,mean_margin_u,mean_sigma_u";

}  // namespace

void export_records(const std::vector<DiagnosticsRecord>& records,
                    const std::string& path, ExportFormat format) {
    std::ofstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open for writing: " + path);
    }
    if (format == ExportFormat::Csv) {
        f << kCsvHeader << "\n";
        for (const DiagnosticsRecord& r : records) {
            f << r.step << ',' << r.iteration << ',' << objective_name(r.objective)
              << ',' << format_double(r.loss) << ',' << format_double(r.grad_norm)
              << ',' << format_double(r.mean_logp_w) << ','
              << format_double(r.mean_logp_l) << ',' << format_double(r.mean_gap)
              << ',' << format_double(r.mean_margin_u) << ','
              << format_double(r.mean_sigma_u) << "\n";
        }
    } else {
        for (const DiagnosticsRecord& r : records) {
            nlohmann::json j{{"step", r.step},
                             {"iteration", r.iteration},
                             {"objective", objective_name(r.objective)},
                             {"loss", r.loss},
                             {"grad_norm", r.grad_norm},
                             {"mean_logp_w", r.mean_logp_w},
                             {"mean_logp_l", r.mean_logp_l},
                             {"mean_gap", r.mean_gap},
                             {"mean_margin_u", r.mean_margin_u},
                             {"mean_sigma_u", r.mean_sigma_u}};
            f << j.dump() << "\n";
        }
    }
    if (!f) {
        throw InvalidInputError("write failed: " + path);
    }
}

std::vector<DiagnosticsRecord> import_records(const std::string& path,
                                              ExportFormat format) {
    std::ifstream f(path);
    if (!f) {
        throw InvalidInputError("cannot open: " + path);
    }
    std::vector<DiagnosticsRecord> out;
    std::string line;
    if (format == ExportFormat::Csv) {
        if (!std::getline(f, line) || line != kCsvHeader) {
            throw InvalidInputError("bad CSV header in: " + path);
        }
        while (std::getline(f, line)) {
            if (line.empty()) {
                continue;
            }
            std::stringstream ss(line);
            std::string field;
            std::vector<std::string> fields;
            while (std::getline(ss, field, ',')) {
                fields.push_back(field);
            }
            if (fields.size() != 10) {
                throw InvalidInputError("bad CSV row in: " + path);
            }
            DiagnosticsRecord r;
            r.step = std::stoll(fields[0]);
            r.iteration = std::stoi(fields[1]);
            r.objective = objective_from_name(fields[2]);
            r.loss = std::stod(fields[3]);
            r.grad_norm = std::stod(fields[4]);
            r.mean_logp_w = std::stod(fields[5]);
            r.mean_logp_l = std::stod(fields[6]);
            r.mean_gap = std::stod(fields[7]);
            r.mean_margin_u = std::stod(fields[8]);
            r.mean_sigma_u = std::stod(fields[9]);
            out.push_back(r);
        }
    } else {
        while (std::getline(f, line)) {
            if (line.empty()) {
                continue;
            }
            const nlohmann::json j = nlohmann::json::parse(line);
            DiagnosticsRecord r;
            r.step = j.at("step").get<std::int64_t>();
            r.iteration = j.at("iteration").get<int>();
            r.objective = objective_from_name(j.at("objective").get<std::string>());
            r.loss = j.at("loss").get<double>();
            r.grad_norm = j.at("grad_norm").get<double>();
            r.mean_logp_w = j.at("mean_logp_w").get<double>();
            r.mean_logp_l = j.at("mean_logp_l").get<double>();
            r.mean_gap = j.at("mean_gap").get<double>();
            r.mean_margin_u = j.at("mean_margin_u").get<double>();
            r.mean_sigma_u = j.at("mean_sigma_u").get<double>();
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace mappo
