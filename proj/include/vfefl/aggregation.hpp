#pragma once

// Fixed-point model encoding and the plaintext robust aggregation rule:
// trust scores y_i = ReLU(<W_i,W_0>/<W_i,W_i>) computed in exact integer
// arithmetic, quantized at scale s_y, weighted sum, then norm normalization
// against the baseline. The plaintext path doubles as the decryption oracle
// for the crypto pipeline, so score quantization here and in the ciphertext
// statements must agree bit for bit.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

namespace vfefl::agg {

struct Overflow : std::runtime_error {
    explicit Overflow(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateModel : std::runtime_error {
    explicit DegenerateModel(const std::string& what) : std::runtime_error(what) {}
};

using ModelVector = std::vector<int64_t>;

inline mpq_class relu(const mpq_class& x) { return x > 0 ? x : mpq_class(0); }

struct FixedPointCodec {
    uint32_t scale = 100;   // two decimal digits
    uint32_t q_bits = 31;   // encoded entries satisfy |v| < 2^q

    int64_t encode1(double v) const {
        // round half away from zero
        double scaled = v * static_cast<double>(scale);
        double rounded = scaled >= 0 ? std::floor(scaled + 0.5) : std::ceil(scaled - 0.5);
        if (!(std::fabs(rounded) < std::ldexp(1.0, static_cast<int>(q_bits))))
            throw Overflow("fp_encode: value out of range");
        return static_cast<int64_t>(rounded);
    }
    double decode1(int64_t v) const { return static_cast<double>(v) / static_cast<double>(scale); }

    ModelVector encode(const std::vector<double>& v) const {
        ModelVector out(v.size());
        for (size_t i = 0; i < v.size(); i++) out[i] = encode1(v[i]);
        return out;
    }
    std::vector<double> decode(const ModelVector& v) const {
        std::vector<double> out(v.size());
        for (size_t i = 0; i < v.size(); i++) out[i] = decode1(v[i]);
        return out;
    }
};

inline mpz_class dot(const ModelVector& a, const ModelVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    mpz_class acc = 0;
    for (size_t i = 0; i < a.size(); i++)
        acc += mpz_class(static_cast<long>(a[i])) * static_cast<long>(b[i]);
    return acc;
}

// Exact rational trust score with its quantization. q_signed is the floor
// quotient bound into the ciphertext proof (rho stays in [0, den)); y_hat is
// the ReLU'd aggregation weight.
struct TrustScore {
    mpz_class num;      // <W_i, W_0>
    mpz_class den;      // <W_i, W_i>, positive
    int64_t q_signed;   // floor(s_y * num / den)
    int64_t y_hat;      // max(q_signed, 0)
    mpz_class rho;      // s_y * num - q_signed * den

    mpq_class ratio() const { return mpq_class(num) / mpq_class(den); }
};

inline TrustScore trust_score(const ModelVector& w_i, const ModelVector& w_0, uint32_t s_y = 100) {
    TrustScore ts;
    ts.den = dot(w_i, w_i);
    if (ts.den == 0) throw DegenerateModel("trust_score: zero model vector");
    ts.num = dot(w_i, w_0);
    mpz_class q, r;
    mpz_class scaled = s_y * ts.num;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), scaled.get_mpz_t(), ts.den.get_mpz_t());
    if (!q.fits_slong_p()) throw Overflow("trust_score: quantized score overflow");
    ts.q_signed = mpz_get_si(q.get_mpz_t());
    ts.y_hat = ts.q_signed > 0 ? ts.q_signed : 0;
    ts.rho = r;
    return ts;
}

// W*_j = sum_i y_hat_i * W_{i,j}; exact integers, mirrors what Decrypt returns.
inline ModelVector aggregate_plain(const std::vector<ModelVector>& models,
                                   const std::vector<TrustScore>& scores) {
    if (models.empty() || models.size() != scores.size())
        throw std::invalid_argument("aggregate_plain: count mismatch");
    const size_t m = models[0].size();
    ModelVector out(m, 0);
    for (size_t j = 0; j < m; j++) {
        mpz_class acc = 0;
        for (size_t i = 0; i < models.size(); i++) {
            if (models[i].size() != m) throw std::invalid_argument("aggregate_plain: dimension mismatch");
            acc += mpz_class(static_cast<long>(scores[i].y_hat)) * static_cast<long>(models[i][j]);
        }
        if (!acc.fits_slong_p()) throw Overflow("aggregate_plain: coordinate overflow");
        out[j] = mpz_get_si(acc.get_mpz_t());
    }
    return out;
}

inline double norm_of(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

struct NormalizeResult {
    ModelVector model;  // re-encoded at the codec scale
    bool degenerate = false;
};

// W^t = (||W_0|| / ||W*||) W*, computed in float space and re-encoded.
// W* carries scale codec.scale * s_y from the weighted sum. An all-zero W*
// (all trust scores gated) falls back to the baseline and is flagged.
inline NormalizeResult normalize(const ModelVector& w_star, const ModelVector& w_0,
                                 const FixedPointCodec& codec, uint32_t s_y = 100) {
    if (w_star.size() != w_0.size()) throw std::invalid_argument("normalize: dimension mismatch");
    const double star_scale = static_cast<double>(codec.scale) * static_cast<double>(s_y);
    std::vector<double> star(w_star.size()), base(w_0.size());
    for (size_t j = 0; j < w_star.size(); j++) star[j] = static_cast<double>(w_star[j]) / star_scale;
    for (size_t j = 0; j < w_0.size(); j++) base[j] = codec.decode1(w_0[j]);
    double ns = norm_of(star), n0 = norm_of(base);
    if (ns == 0.0) return {w_0, true};
    double k = n0 / ns;
    std::vector<double> out(star.size());
    for (size_t j = 0; j < star.size(); j++) out[j] = star[j] * k;
    return {codec.encode(out), false};
}

}  // namespace vfefl::agg
