#pragma once

// Per-operation DVFE timing grid. One bench pass runs the full scheme at a
// given dimension with exact-mode instances (x0 = y * x) and records wall
// time per operation; per-client operations are averaged over clients.

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "vfefl/dvfe.hpp"

namespace vfefl::bench {

inline constexpr const char* kOps[] = {
    "Setup",          "KeyGen",           "HashToPoint", "Encryption",
    "CiphertextProof", "VerifyCiphertext", "KeyGenShare", "KeyProof",
    "VerifyFunctionalKey", "KeyCombination", "Decryption"};
inline constexpr size_t kOpCount = 11;

struct Row {
    std::string op;
    uint32_t m = 0;
    std::vector<double> times;

    double mean() const {
        return std::accumulate(times.begin(), times.end(), 0.0) / static_cast<double>(times.size());
    }
    double median() const {
        std::vector<double> s = times;
        std::sort(s.begin(), s.end());
        return s[s.size() / 2];
    }
};

namespace detail {
using Clock = std::chrono::steady_clock;
inline double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}
}  // namespace detail

// Appends one timing sample per operation to rows[base .. base+10].
inline void run_pass(uint32_t m, uint32_t n, cl::Profile profile, uint64_t seed,
                     std::vector<Row>& rows, size_t base) {
    using detail::secs_since;
    auto add = [&](size_t slot, double t) { rows[base + slot].times.push_back(t); };

    Rng rng(seed);
    dvfe::SetupConfig sc;
    sc.profile = profile;
    sc.bsgs_bound = mpz_class(1) << 20;
    sc.session_id = "bench";
    auto t0 = detail::Clock::now();
    dvfe::PublicParams pp = dvfe::setup(n, m, sc, rng);
    add(0, secs_since(t0));  // Setup

    t0 = detail::Clock::now();
    std::vector<dvfe::KeygenDraft> drafts;
    std::vector<std::array<cl::QuadForm, 2>> all_T;
    for (uint32_t i = 0; i < n; i++) {
        drafts.push_back(dvfe::keygen_local(pp, rng));
        all_T.push_back(drafts.back().T);
    }
    std::vector<dvfe::ClientKeyMaterial> keys;
    for (uint32_t i = 0; i < n; i++) keys.push_back(dvfe::keygen_finalize(drafts[i], all_T, i, pp));
    add(1, secs_since(t0) / n);  // KeyGen, per client
    dvfe::VerificationKeys vk = dvfe::assemble_keys(keys);

    uint64_t round = 1;
    Bytes ell = dvfe::round_label(round);
    auto lenc = dvfe::enc_labels(round, m);

    t0 = detail::Clock::now();
    const zkp::EncBases bases = zkp::enc_bases(ell, lenc, pp.ell_d);
    add(2, secs_since(t0));  // HashToPoint

    std::vector<std::vector<int64_t>> xs(n), x0s(n);
    std::vector<int64_t> ys(n);
    for (uint32_t i = 0; i < n; i++) {
        ys[i] = static_cast<int64_t>(rng.below(101));
        xs[i].resize(m);
        x0s[i].resize(m);
        for (uint32_t j = 0; j < m; j++) {
            xs[i][j] = static_cast<int64_t>(rng.below(201)) - 100;
            x0s[i][j] = ys[i] * xs[i][j];
        }
    }

    std::vector<dvfe::LabeledCiphertext> cts(n);
    double t_enc = 0, t_proof = 0;
    for (uint32_t i = 0; i < n; i++) {
        t0 = detail::Clock::now();
        auto [ct, st] = dvfe::encrypt_core(keys[i].s, xs[i], x0s[i], ell, lenc, pp,
                                           zkp::ScoreMode::Exact, Fr::from_i64(ys[i]), &bases);
        t_enc += secs_since(t0);
        t0 = detail::Clock::now();
        ct.proof = zkp::prove_encrypt({keys[i].s, xs[i]}, st, rng, &bases);
        t_proof += secs_since(t0);
        cts[i] = std::move(ct);
    }
    add(3, t_enc / n);    // Encryption
    add(4, t_proof / n);  // CiphertextProof

    t0 = detail::Clock::now();
    auto ctv = dvfe::verify_ct(
        cts, vk.vk_ct, [&](size_t i) -> const std::vector<int64_t>& { return x0s[i]; }, pp);
    add(5, secs_since(t0) / n);  // VerifyCiphertext per client
    if (!ctv.accept) throw std::runtime_error("bench: ciphertext verification failed");

    Bytes elly = dvfe::fn_label(round);
    std::vector<dvfe::KeyShare> shares(n);
    double t_share = 0, t_kproof = 0;
    for (uint32_t i = 0; i < n; i++) {
        t0 = detail::Clock::now();
        auto [ks, st] = dvfe::dkeygen_share_core(keys[i], vk.pk, i, Fr::from_i64(ys[i]), elly, pp);
        t_share += secs_since(t0);
        t0 = detail::Clock::now();
        ks.proof = zkp::prove_dkeyshare({keys[i].s, keys[i].k_hat, keys[i].t}, st, pp.cg, rng);
        t_kproof += secs_since(t0);
        shares[i] = std::move(ks);
    }
    add(6, t_share / n);   // KeyGenShare
    add(7, t_kproof / n);  // KeyProof

    t0 = detail::Clock::now();
    auto dkv = dvfe::verify_dk(shares, vk.pk, vk.vk_ct, pp);
    add(8, secs_since(t0) / n);  // VerifyFunctionalKey per client
    if (!dkv.accept) throw std::runtime_error("bench: key share verification failed");

    t0 = detail::Clock::now();
    dvfe::FunctionalKey fk = dvfe::dkey_comb(shares, elly, vk.pk, pp);
    add(9, secs_since(t0));  // KeyCombination

    std::vector<Fr> yfr;
    for (auto y : ys) yfr.push_back(Fr::from_i64(y));
    BsgsSolver solver;
    t0 = detail::Clock::now();
    auto dec = dvfe::decrypt(cts, fk, yfr, pp, solver);
    add(10, secs_since(t0));  // Decryption

    for (uint32_t j = 0; j < m; j++) {
        int64_t want = 0;
        for (uint32_t i = 0; i < n; i++) want += ys[i] * xs[i][j];
        if (dec[j] != want) throw std::runtime_error("bench: decryption mismatch");
    }
}

inline std::vector<Row> run_grid(const std::vector<uint32_t>& dims, uint32_t clients, uint32_t reps,
                                 cl::Profile profile, uint64_t seed) {
    if (dims.empty() || reps < 1 || clients < 2)
        throw std::invalid_argument("bench: need dims, reps >= 1, clients >= 2");
    std::vector<Row> rows;
    for (uint32_t m : dims)
        for (const char* op : kOps) rows.push_back({op, m, {}});
    for (size_t di = 0; di < dims.size(); di++)
        for (uint32_t r = 0; r < reps; r++) run_pass(dims[di], clients, profile, seed + r, rows, di * kOpCount);
    return rows;
}

inline void write_csv(std::ostream& os, const std::vector<Row>& rows, uint32_t clients, uint32_t reps) {
    os << "operation,m,clients,reps,mean_s,median_s\n";
    for (const auto& row : rows)
        os << row.op << ',' << row.m << ',' << clients << ',' << reps << ',' << row.mean() << ','
           << row.median() << '\n';
}

}  // namespace vfefl::bench
