#pragma once

// JSON experiment-config parsing for the CLI. Key set mirrors
// fl::ExperimentConfig; see README for the documented schema. Relative IDX
// paths resolve against VFEFL_DATA_DIR when it is set.

#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

#include "vfefl/flsim.hpp"

namespace vfefl::fl {

namespace detail {

inline std::string resolve_data_path(const std::string& p) {
    if (p.empty() || p.front() == '/') return p;
    const char* root = std::getenv("VFEFL_DATA_DIR");
    if (!root || !*root) return p;
    return std::string(root) + "/" + p;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    cfg.n = j.value("n", cfg.n);
    cfg.malicious_frac = j.value("malicious_frac", cfg.malicious_frac);
    cfg.rounds = j.value("rounds", cfg.rounds);
    cfg.local_iters = j.value("local_iters", cfg.local_iters);
    cfg.batch = j.value("batch", cfg.batch);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.q_bits = j.value("q_bits", cfg.q_bits);
    cfg.root_size = j.value("root_size", cfg.root_size);
    cfg.per_client = j.value("per_client", cfg.per_client);
    cfg.s_y = j.value("s_y", cfg.s_y);
    cfg.fp_scale = j.value("fp_scale", cfg.fp_scale);
    if (j.contains("bsgs_bound_bits")) cfg.bsgs_bound = mpz_class(1) << j["bsgs_bound_bits"].get<unsigned>();

    if (std::string s = j.value("mode", "plaintext-oracle"); s == "plaintext-oracle")
        cfg.mode = Mode::PlaintextOracle;
    else if (s == "full-crypto")
        cfg.mode = Mode::FullCrypto;
    else
        throw ConfigError("bad mode: " + s);

    if (std::string s = j.value("rule", "vfefl"); s == "vfefl")
        cfg.rule = Rule::Vfefl;
    else if (s == "fedavg")
        cfg.rule = Rule::FedAvg;
    else
        throw ConfigError("bad rule: " + s);

    if (std::string s = j.value("profile", "test"); s == "test")
        cfg.profile = cl::Profile::Test;
    else if (s == "benchmark")
        cfg.profile = cl::Profile::Benchmark;
    else
        throw ConfigError("bad profile: " + s);

    if (j.contains("attack")) {
        const auto& a = j["attack"];
        cfg.attack.kind = attack_kind_from_string(a.value("kind", "none"));
        cfg.attack.sigma_scale = a.value("sigma_scale", cfg.attack.sigma_scale);
        cfg.attack.sigma_abs = a.value("sigma_abs", cfg.attack.sigma_abs);
        cfg.attack.lambda_scale = a.value("lambda_scale", cfg.attack.lambda_scale);
        cfg.attack.adaptive_iters = a.value("adaptive_iters", cfg.attack.adaptive_iters);
        cfg.attack.adaptive_step = a.value("adaptive_step", cfg.attack.adaptive_step);
    }

    if (j.contains("model")) {
        const auto& m = j["model"];
        std::string kind = m.value("kind", "logreg");
        if (kind == "logreg")
            cfg.model.kind = ModelSpec::Kind::Logreg;
        else if (kind == "mlp")
            cfg.model.kind = ModelSpec::Kind::Mlp;
        else if (kind == "quadratic")
            cfg.model.kind = ModelSpec::Kind::Quadratic;
        else
            throw ConfigError("bad model kind: " + kind);
        cfg.model.hidden = m.value("hidden", cfg.model.hidden);
        cfg.model.quad_dim = m.value("quad_dim", cfg.model.quad_dim);
        cfg.model.quad_mu = m.value("quad_mu", cfg.model.quad_mu);
        cfg.model.quad_lipschitz = m.value("quad_lipschitz", cfg.model.quad_lipschitz);
    }

    if (j.contains("data")) {
        const auto& d = j["data"];
        std::string kind = d.value("kind", "synth");
        if (kind == "synth")
            cfg.data.kind = DataSpec::Kind::Synth;
        else if (kind == "idx")
            cfg.data.kind = DataSpec::Kind::Idx;
        else if (kind == "none")
            cfg.data.kind = DataSpec::Kind::None;
        else
            throw ConfigError("bad data kind: " + kind);
        cfg.data.samples = d.value("samples", cfg.data.samples);
        cfg.data.dim = d.value("dim", cfg.data.dim);
        cfg.data.classes = d.value("classes", cfg.data.classes);
        cfg.data.spread = d.value("spread", cfg.data.spread);
        cfg.data.train_images = detail::resolve_data_path(d.value("train_images", ""));
        cfg.data.train_labels = detail::resolve_data_path(d.value("train_labels", ""));
        cfg.data.test_images = detail::resolve_data_path(d.value("test_images", ""));
        cfg.data.test_labels = detail::resolve_data_path(d.value("test_labels", ""));
        cfg.data.test_limit = d.value("test_limit", cfg.data.test_limit);
    }

    auto load_bad = [&](const char* key, CryptoBadKind kind) {
        if (!j.contains(key)) return;
        for (const auto& v : j[key]) {
            uint32_t id = v.get<uint32_t>();
            if (cfg.crypto_bad.size() <= id) cfg.crypto_bad.resize(id + 1, CryptoBadKind::None);
            cfg.crypto_bad[id] = kind;
        }
    };
    load_bad("bad_ciphertext_clients", CryptoBadKind::BadCiphertext);
    load_bad("bad_share_clients", CryptoBadKind::BadShare);
    load_bad("persistent_bad_clients", CryptoBadKind::PersistentBadCiphertext);
    return cfg;
}

inline ExperimentConfig config_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace vfefl::fl
