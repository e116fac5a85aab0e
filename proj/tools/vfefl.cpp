// Command-line driver: DVFE micro-benchmarks, experiment runs, and a demo
// transcript of one honest round.
//
//   vfefl bench-dvfe --dims 10,50,100,500,1000 --clients 5 --reps 1 --profile test
//   vfefl run --config cfg.json [--mode plaintext-oracle|full-crypto] [--out out.csv]
//   vfefl demo [--corrupt-client ID]
//
// Exit codes: 0 success, 1 usage/config error, 2 runtime failure.

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <numeric>

#include <CLI11.hpp>

#include "vfefl/bench.hpp"
#include "vfefl/config.hpp"
#include "vfefl/dvfe.hpp"
#include "vfefl/flsim.hpp"

namespace {

using namespace vfefl;

int cmd_bench(const std::string& dims_csv, uint32_t clients, uint32_t reps,
              const std::string& profile_s, const std::string& out_path, uint64_t seed) {
    cl::Profile profile;
    if (profile_s == "test")
        profile = cl::Profile::Test;
    else if (profile_s == "benchmark")
        profile = cl::Profile::Benchmark;
    else {
        std::cerr << "bad profile: " << profile_s << "\n";
        return 1;
    }
    std::vector<uint32_t> dims;
    std::stringstream ss(dims_csv);
    for (std::string tok; std::getline(ss, tok, ',');) {
        int v = std::stoi(tok);
        if (v <= 0) {
            std::cerr << "dims must be positive\n";
            return 1;
        }
        dims.push_back(static_cast<uint32_t>(v));
    }
    if (dims.empty() || reps < 1 || clients < 2) {
        std::cerr << "need dims, reps >= 1, clients >= 2\n";
        return 1;
    }

    auto rows = bench::run_grid(dims, clients, reps, profile, seed);

    std::ostream* os = &std::cout;
    std::ofstream f;
    if (!out_path.empty()) {
        f.open(out_path);
        if (!f) {
            std::cerr << "cannot open " << out_path << "\n";
            return 2;
        }
        os = &f;
    }
    bench::write_csv(*os, rows, clients, reps);
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& mode_s, const std::string& out_path) {
    fl::ExperimentConfig cfg = fl::config_from_file(config_path);
    if (mode_s == "plaintext-oracle")
        cfg.mode = fl::Mode::PlaintextOracle;
    else if (mode_s == "full-crypto")
        cfg.mode = fl::Mode::FullCrypto;
    else if (!mode_s.empty())
        throw fl::ConfigError("bad mode: " + mode_s);

    fl::ExperimentResult res = fl::run_experiment(cfg);

    std::ostream* os = &std::cout;
    std::ofstream f;
    if (!out_path.empty()) {
        f.open(out_path);
        if (!f) {
            std::cerr << "cannot open " << out_path << "\n";
            return 2;
        }
        os = &f;
    }
    fl::write_round_csv(*os, res.rounds);
    std::cerr << "final accuracy " << res.final_accuracy << " asr " << res.final_asr << " after "
              << res.rounds.size() << " rounds\n";
    return 0;
}

std::string hex_preview(const Bytes& b, size_t n = 8) { return to_hex(b.substr(0, n)); }

int cmd_demo(int corrupt_client, uint64_t seed) {
    const uint32_t n = 3, m = 4;
    Rng rng(seed);
    dvfe::SetupConfig sc;
    sc.bsgs_bound = mpz_class(1) << 20;
    sc.session_id = "demo";
    dvfe::PublicParams pp = dvfe::setup(n, m, sc, rng);
    std::cout << "{\n  \"setup\": {\"n\": " << n << ", \"m\": " << m
              << ", \"companion_prime_bits\": " << mpz_sizeinbase(pp.cg.companion.get_mpz_t(), 2)
              << "},\n";

    std::vector<dvfe::KeygenDraft> drafts;
    std::vector<std::array<cl::QuadForm, 2>> all_T;
    for (uint32_t i = 0; i < n; i++) {
        drafts.push_back(dvfe::keygen_local(pp, rng));
        all_T.push_back(drafts.back().T);
    }
    std::vector<dvfe::ClientKeyMaterial> keys;
    for (uint32_t i = 0; i < n; i++) keys.push_back(dvfe::keygen_finalize(drafts[i], all_T, i, pp));
    dvfe::VerificationKeys vk = dvfe::assemble_keys(keys);

    std::cout << "  \"clients\": [\n";
    for (uint32_t i = 0; i < n; i++) {
        std::cout << "    {\"id\": " << i << ", \"s\": [\"" << keys[i].s[0].v.get_str(16).substr(0, 12)
                  << "...\", \"" << keys[i].s[1].v.get_str(16).substr(0, 12) << "...\"], \"com\": \""
                  << hex_preview(g1_bytes(keys[i].com)) << "...\"}" << (i + 1 < n ? "," : "") << "\n";
    }
    std::cout << "  ],\n";

    std::vector<std::vector<int64_t>> xs = {{12, -7, 3, 40}, {5, 5, -5, 8}, {-20, 1, 0, 6}};
    std::vector<int64_t> ys = {2, 1, 3};
    uint64_t round = 1;
    Bytes ell = dvfe::round_label(round);
    auto lenc = dvfe::enc_labels(round, m);
    std::vector<std::vector<int64_t>> x0s;
    for (uint32_t i = 0; i < n; i++) {
        std::vector<int64_t> x0(m);
        for (uint32_t j = 0; j < m; j++) x0[j] = ys[i] * xs[i][j];
        x0s.push_back(x0);
    }

    std::vector<dvfe::LabeledCiphertext> cts;
    for (uint32_t i = 0; i < n; i++)
        cts.push_back(dvfe::encrypt(keys[i].s, xs[i], x0s[i], ell, lenc, pp, zkp::ScoreMode::Exact,
                                    Fr::from_i64(ys[i]), rng));
    if (corrupt_client >= 0 && corrupt_client < static_cast<int>(n))
        cts[corrupt_client].entries[0] = g1_add(cts[corrupt_client].entries[0], g1_generator());

    std::cout << "  \"ciphertexts\": [\n";
    for (uint32_t i = 0; i < n; i++)
        std::cout << "    {\"id\": " << i << ", \"label\": \"" << cts[i].ell << "\", \"C1\": \""
                  << hex_preview(g1_bytes(cts[i].entries[0])) << "...\", \"proof_bytes\": "
                  << zkp::enc_proof_bytes(cts[i].proof).size() << "}" << (i + 1 < n ? "," : "") << "\n";
    std::cout << "  ],\n";

    auto ctv = dvfe::verify_ct(
        cts, vk.vk_ct, [&](size_t i) -> const std::vector<int64_t>& { return x0s[i]; }, pp);
    std::cout << "  \"verify_ct\": {\"accept\": " << (ctv.accept ? "true" : "false") << ", \"flagged\": [";
    for (size_t k = 0; k < ctv.flagged.size(); k++) std::cout << (k ? "," : "") << ctv.flagged[k];
    std::cout << "]},\n";
    if (!ctv.accept) {
        std::cout << "  \"note\": \"corrupted ciphertexts detected; stopping\"\n}\n";
        return 0;
    }

    Bytes elly = dvfe::fn_label(round);
    std::vector<dvfe::KeyShare> shares;
    for (uint32_t i = 0; i < n; i++)
        shares.push_back(dvfe::dkeygen_share(keys[i], vk.pk, i, Fr::from_i64(ys[i]), elly, pp, rng));
    auto dkv = dvfe::verify_dk(shares, vk.pk, vk.vk_ct, pp);
    std::cout << "  \"verify_dk\": {\"accept\": " << (dkv.accept ? "true" : "false") << "},\n";

    dvfe::FunctionalKey fk = dvfe::dkey_comb(shares, elly, vk.pk, pp);
    std::vector<Fr> yfr;
    for (auto y : ys) yfr.push_back(Fr::from_i64(y));
    BsgsSolver solver;
    auto dec = dvfe::decrypt(cts, fk, yfr, pp, solver);

    std::cout << "  \"functional_key\": \"" << hex_preview(g2_bytes(fk.fk[0])) << "...\",\n";
    std::cout << "  \"decrypted\": [";
    for (uint32_t j = 0; j < m; j++) std::cout << (j ? "," : "") << dec[j];
    std::cout << "],\n  \"plaintext_oracle\": [";
    bool ok = true;
    for (uint32_t j = 0; j < m; j++) {
        int64_t want = 0;
        for (uint32_t i = 0; i < n; i++) want += ys[i] * xs[i][j];
        ok = ok && want == dec[j];
        std::cout << (j ? "," : "") << want;
    }
    std::cout << "],\n  \"match\": " << (ok ? "true" : "false") << "\n}\n";
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VFEFL: verifiable functional encryption federated learning"};
    app.require_subcommand(1);

    auto* bench = app.add_subcommand("bench-dvfe", "DVFE per-operation timing grid");
    std::string dims = "10,50,100,500,1000", profile = "test", bench_out;
    uint32_t clients = 5, reps = 1;
    uint64_t seed = 1;
    bench->add_option("--dims", dims, "comma-separated dimension list");
    bench->add_option("--clients", clients, "client count");
    bench->add_option("--reps", reps, "repetitions per dimension");
    bench->add_option("--profile", profile, "test|benchmark");
    bench->add_option("--out", bench_out, "output CSV path (default stdout)");
    bench->add_option("--seed", seed, "rng seed");

    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    std::string config_path, run_mode, run_out;
    run->add_option("--config", config_path, "config path")->required();
    run->add_option("--mode", run_mode, "plaintext-oracle|full-crypto (overrides config)");
    run->add_option("--out", run_out, "per-round CSV path (default stdout)");

    auto* demo = app.add_subcommand("demo", "structured transcript of one honest round (n=3, m=4)");
    int corrupt = -1;
    uint64_t demo_seed = 42;
    demo->add_option("--corrupt-client", corrupt, "tamper this client's ciphertext");
    demo->add_option("--seed", demo_seed, "rng seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    try {
        if (bench->parsed()) return cmd_bench(dims, clients, reps, profile, bench_out, seed);
        if (run->parsed()) return cmd_run(config_path, run_mode, run_out);
        if (demo->parsed()) return cmd_demo(corrupt, demo_seed);
    } catch (const fl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
