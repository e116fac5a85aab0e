#pragma once

// Local training: softmax logistic regression, a small two-layer MLP, and an
// analytic strongly-convex quadratic task (diagonal Hessian, known optimum at
// the origin) used for the convergence-bound checks. Models are flat double
// vectors so the crypto pipeline sees one layout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "vfefl/dataset.hpp"
#include "vfefl/rng.hpp"

namespace vfefl::fl {

struct ModelSpec {
    enum class Kind : uint8_t { Logreg = 0, Mlp = 1, Quadratic = 2 };
    Kind kind = Kind::Logreg;
    uint32_t dim = 0;      // feature count (logreg/mlp)
    uint32_t classes = 0;  // label count (logreg/mlp)
    uint32_t hidden = 16;  // mlp hidden width
    double quad_mu = 0.5, quad_lipschitz = 2.0;  // quadratic eigenvalue range
    uint32_t quad_dim = 10;

    size_t param_count() const {
        switch (kind) {
            case Kind::Logreg: return size_t(classes) * (dim + 1);
            case Kind::Mlp: return size_t(hidden) * (dim + 1) + size_t(classes) * (hidden + 1);
            case Kind::Quadratic: return quad_dim;
        }
        return 0;
    }

    // diagonal Hessian eigenvalues spread over [mu, L]
    std::vector<double> quad_diag() const {
        std::vector<double> d(quad_dim);
        for (uint32_t i = 0; i < quad_dim; i++)
            d[i] = quad_mu + (quad_lipschitz - quad_mu) * (quad_dim == 1 ? 0.0 : double(i) / (quad_dim - 1));
        return d;
    }
};

inline std::vector<double> init_model(const ModelSpec& spec, Rng& rng) {
    std::vector<double> w(spec.param_count(), 0.0);
    switch (spec.kind) {
        case ModelSpec::Kind::Logreg:
            break;  // zeros
        case ModelSpec::Kind::Mlp: {
            double s = 1.0 / std::sqrt(static_cast<double>(spec.dim + 1));
            for (size_t i = 0; i < size_t(spec.hidden) * (spec.dim + 1); i++) w[i] = rng.gaussian(s);
            break;
        }
        case ModelSpec::Kind::Quadratic:
            for (auto& v : w) v = 1.0;  // nonzero start, norm sqrt(dim)
            break;
    }
    return w;
}

namespace detail {

inline void softmax_inplace(std::vector<double>& z) {
    double mx = *std::max_element(z.begin(), z.end());
    double s = 0;
    for (auto& v : z) {
        v = std::exp(v - mx);
        s += v;
    }
    for (auto& v : z) v /= s;
}

inline void logreg_logits(const ModelSpec& spec, const std::vector<double>& w, const float* x,
                          std::vector<double>& out) {
    out.assign(spec.classes, 0.0);
    for (uint32_t k = 0; k < spec.classes; k++) {
        const double* wk = w.data() + size_t(k) * (spec.dim + 1);
        double z = wk[spec.dim];
        for (uint32_t d = 0; d < spec.dim; d++) z += wk[d] * x[d];
        out[k] = z;
    }
}

inline void mlp_forward(const ModelSpec& spec, const std::vector<double>& w, const float* x,
                        std::vector<double>& hid, std::vector<double>& out) {
    const size_t w1 = size_t(spec.hidden) * (spec.dim + 1);
    hid.assign(spec.hidden, 0.0);
    for (uint32_t hh = 0; hh < spec.hidden; hh++) {
        const double* wh = w.data() + size_t(hh) * (spec.dim + 1);
        double z = wh[spec.dim];
        for (uint32_t d = 0; d < spec.dim; d++) z += wh[d] * x[d];
        hid[hh] = z > 0 ? z : 0;  // relu
    }
    out.assign(spec.classes, 0.0);
    for (uint32_t k = 0; k < spec.classes; k++) {
        const double* wk = w.data() + w1 + size_t(k) * (spec.hidden + 1);
        double z = wk[spec.hidden];
        for (uint32_t hh = 0; hh < spec.hidden; hh++) z += wk[hh] * hid[hh];
        out[k] = z;
    }
}

}  // namespace detail

inline int32_t predict(const ModelSpec& spec, const std::vector<double>& w, const float* x) {
    std::vector<double> logits, hid;
    if (spec.kind == ModelSpec::Kind::Logreg)
        detail::logreg_logits(spec, w, x, logits);
    else if (spec.kind == ModelSpec::Kind::Mlp)
        detail::mlp_forward(spec, w, x, hid, logits);
    else
        throw std::invalid_argument("predict: quadratic task has no predictions");
    return static_cast<int32_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

// mean cross-entropy over the dataset
inline double dataset_loss(const ModelSpec& spec, const std::vector<double>& w, const Dataset& ds) {
    std::vector<double> logits, hid;
    double total = 0;
    for (size_t i = 0; i < ds.size(); i++) {
        if (spec.kind == ModelSpec::Kind::Logreg)
            detail::logreg_logits(spec, w, ds.row(i), logits);
        else
            detail::mlp_forward(spec, w, ds.row(i), hid, logits);
        detail::softmax_inplace(logits);
        total += -std::log(std::max(logits[static_cast<size_t>(ds.y[i])], 1e-12));
    }
    return ds.size() ? total / static_cast<double>(ds.size()) : 0.0;
}

// R_l mini-batch SGD steps (full-gradient descent steps for the quadratic
// task); returns the post-training model.
inline std::vector<double> local_train(const ModelSpec& spec, std::vector<double> w, const Dataset* ds,
                                       double lr, uint32_t steps, uint32_t batch, Rng& rng) {
    if (steps == 0 || lr == 0.0) return w;
    if (spec.kind == ModelSpec::Kind::Quadratic) {
        auto diag = spec.quad_diag();
        for (uint32_t s = 0; s < steps; s++)
            for (size_t j = 0; j < w.size(); j++) w[j] -= lr * diag[j] * w[j];
        return w;
    }
    if (!ds || ds->size() == 0) throw std::invalid_argument("local_train: empty dataset");
    std::vector<double> logits, hid, grad(w.size());
    const uint32_t bs = std::max<uint32_t>(1, std::min<uint32_t>(batch, static_cast<uint32_t>(ds->size())));
    for (uint32_t s = 0; s < steps; s++) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (uint32_t b = 0; b < bs; b++) {
            size_t i = static_cast<size_t>(rng.below(ds->size()));
            const float* x = ds->row(i);
            const auto label = static_cast<size_t>(ds->y[i]);
            if (spec.kind == ModelSpec::Kind::Logreg) {
                detail::logreg_logits(spec, w, x, logits);
                detail::softmax_inplace(logits);
                for (uint32_t k = 0; k < spec.classes; k++) {
                    double delta = logits[k] - (k == label ? 1.0 : 0.0);
                    double* gk = grad.data() + size_t(k) * (spec.dim + 1);
                    for (uint32_t d = 0; d < spec.dim; d++) gk[d] += delta * x[d];
                    gk[spec.dim] += delta;
                }
            } else {
                detail::mlp_forward(spec, w, x, hid, logits);
                detail::softmax_inplace(logits);
                const size_t w1 = size_t(spec.hidden) * (spec.dim + 1);
                std::vector<double> dh(spec.hidden, 0.0);
                for (uint32_t k = 0; k < spec.classes; k++) {
                    double delta = logits[k] - (k == label ? 1.0 : 0.0);
                    double* gk = grad.data() + w1 + size_t(k) * (spec.hidden + 1);
                    const double* wk = w.data() + w1 + size_t(k) * (spec.hidden + 1);
                    for (uint32_t hh = 0; hh < spec.hidden; hh++) {
                        gk[hh] += delta * hid[hh];
                        if (hid[hh] > 0) dh[hh] += delta * wk[hh];
                    }
                    gk[spec.hidden] += delta;
                }
                for (uint32_t hh = 0; hh < spec.hidden; hh++) {
                    double* gh = grad.data() + size_t(hh) * (spec.dim + 1);
                    for (uint32_t d = 0; d < spec.dim; d++) gh[d] += dh[hh] * x[d];
                    gh[spec.dim] += dh[hh];
                }
            }
        }
        for (size_t j = 0; j < w.size(); j++) w[j] -= lr * grad[j] / bs;
    }
    return w;
}

struct EvalResult {
    double accuracy = 0;
    double asr = 0;  // fraction predicted as M - label - 1
};

inline EvalResult evaluate(const ModelSpec& spec, const std::vector<double>& w, const Dataset& ds) {
    if (ds.size() == 0) throw std::invalid_argument("evaluate: empty test set");
    size_t correct = 0, flipped = 0;
    for (size_t i = 0; i < ds.size(); i++) {
        int32_t p = predict(spec, w, ds.row(i));
        if (p == ds.y[i]) correct++;
        if (p == static_cast<int32_t>(ds.classes) - ds.y[i] - 1) flipped++;
    }
    return {static_cast<double>(correct) / ds.size(), static_cast<double>(flipped) / ds.size()};
}

inline double model_norm(const std::vector<double>& w) {
    double s = 0;
    for (double v : w) s += v * v;
    return std::sqrt(s);
}

}  // namespace vfefl::fl
