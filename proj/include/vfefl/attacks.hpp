#pragma once

// Model-poisoning behaviours for malicious clients. Label flipping is a data
// attack and is applied when shards are built; the other kinds replace the
// submitted model.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vfefl/rng.hpp"
#include "vfefl/train.hpp"

namespace vfefl::fl {

enum class AttackKind : uint8_t { None = 0, Gaussian = 1, Scaling = 2, Adaptive = 3, LabelFlip = 4 };

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

inline AttackKind attack_kind_from_string(const std::string& s) {
    if (s == "none") return AttackKind::None;
    if (s == "gaussian") return AttackKind::Gaussian;
    if (s == "scaling") return AttackKind::Scaling;
    if (s == "adaptive") return AttackKind::Adaptive;
    if (s == "labelflip") return AttackKind::LabelFlip;
    throw ConfigError("unknown attack kind: " + s);
}

struct AttackParams {
    AttackKind kind = AttackKind::None;
    double sigma_scale = 1.0;    // gaussian sigma = sigma_scale * std(honest entries)
    double sigma_abs = 0.0;      // when > 0, overrides the relative sigma
    double lambda_scale = 0.0;   // scaling factor; 0 means use n
    uint32_t adaptive_iters = 100;
    double adaptive_step = 0.5;
    double adaptive_decay = 0.97;
};

struct AttackContext {
    const std::vector<std::vector<double>>* honest_models = nullptr;  // this round
    const std::vector<double>* baseline = nullptr;                    // W_0^t
    uint32_t n = 0;
    // plaintext aggregation closure for the adaptive objective: maps the
    // malicious model to the aggregated global model
    std::function<std::vector<double>(const std::vector<double>&)> aggregate;
};

namespace detail {

inline double pooled_std(const std::vector<std::vector<double>>& models) {
    double mean = 0;
    size_t count = 0;
    for (const auto& mv : models)
        for (double v : mv) {
            mean += v;
            count++;
        }
    if (count == 0) return 1.0;
    mean /= static_cast<double>(count);
    double var = 0;
    for (const auto& mv : models)
        for (double v : mv) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(count));
}

inline std::vector<double> gaussian_model(const AttackParams& p, const AttackContext& ctx, Rng& rng) {
    if (!ctx.honest_models || ctx.honest_models->empty())
        throw ConfigError("gaussian attack needs honest models in context");
    const size_t m = ctx.honest_models->front().size();
    const double sigma = p.sigma_abs > 0 ? p.sigma_abs : p.sigma_scale * pooled_std(*ctx.honest_models);
    std::vector<double> out(m);
    for (auto& v : out) v = rng.gaussian(sigma);
    return out;
}

inline double l2_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); i++) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace detail

inline std::vector<double> apply_attack(const AttackParams& p, const AttackContext& ctx, Rng& rng) {
    switch (p.kind) {
        case AttackKind::Gaussian:
            return detail::gaussian_model(p, ctx, rng);
        case AttackKind::Scaling: {
            double lambda = p.lambda_scale > 0 ? p.lambda_scale : static_cast<double>(ctx.n);
            auto out = detail::gaussian_model(p, ctx, rng);
            for (auto& v : out) v *= lambda;
            return out;
        }
        case AttackKind::Adaptive: {
            if (!ctx.honest_models || !ctx.aggregate)
                throw ConfigError("adaptive attack needs models and an aggregation closure");
            const auto& honest = *ctx.honest_models;
            const size_t m = honest.front().size();
            // initialize at the inverse direction of the average of all models
            std::vector<double> cand(m, 0.0);
            for (const auto& mv : honest)
                for (size_t j = 0; j < m; j++) cand[j] -= mv[j];
            for (auto& v : cand) v /= static_cast<double>(honest.size());
            const std::vector<double> target = ctx.aggregate(std::vector<double>());  // honest-only result
            double best = detail::l2_dist(ctx.aggregate(cand), target);
            double step = p.adaptive_step * detail::pooled_std(honest);
            std::vector<double> trial(m);
            for (uint32_t it = 0; it < p.adaptive_iters; it++) {
                trial = cand;
                for (auto& v : trial) v += rng.gaussian(step);
                double score = detail::l2_dist(ctx.aggregate(trial), target);
                if (score > best) {
                    best = score;
                    cand = trial;
                }
                step *= p.adaptive_decay;
            }
            return cand;
        }
        case AttackKind::LabelFlip:
            throw ConfigError("labelflip is a data attack; shards carry the flipped labels");
        case AttackKind::None:
            throw ConfigError("apply_attack called with kind none");
    }
    throw ConfigError("unknown attack kind");
}

}  // namespace vfefl::fl
