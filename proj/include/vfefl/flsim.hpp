#pragma once

// Round-based federated-learning simulator over in-process clients and one
// server. Each round: baseline training on the root shard, local training or
// attack models, encrypt + prove, key shares + prove, server verification
// with one retransmission for flagged clients, key combination, decryption,
// normalization, broadcast. A plaintext-oracle mode runs the identical
// aggregation arithmetic without the crypto layer; both modes share all
// randomness streams that affect models, so their per-round global models
// match bit for bit.

#include <chrono>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "vfefl/aggregation.hpp"
#include "vfefl/attacks.hpp"
#include "vfefl/dataset.hpp"
#include "vfefl/dvfe.hpp"
#include "vfefl/train.hpp"

namespace vfefl::fl {

enum class Mode : uint8_t { PlaintextOracle = 0, FullCrypto = 1 };
enum class Rule : uint8_t { Vfefl = 0, FedAvg = 1 };
enum class CryptoBadKind : uint8_t { None = 0, BadCiphertext = 1, BadShare = 2, PersistentBadCiphertext = 3 };

struct DataSpec {
    enum class Kind : uint8_t { Synth = 0, Idx = 1, None = 2 };
    Kind kind = Kind::Synth;
    // synth
    size_t samples = 1500;
    uint32_t dim = 12;
    uint32_t classes = 4;
    double spread = 0.5;
    // idx
    std::string train_images, train_labels, test_images, test_labels;
    size_t test_limit = 0;  // 0 = whole test file
};

struct ExperimentConfig {
    uint32_t n = 4;
    double malicious_frac = 0.0;  // first floor(n*frac) clients are malicious
    AttackParams attack;
    ModelSpec model;
    DataSpec data;
    uint32_t rounds = 3;
    uint32_t local_iters = 5;
    uint32_t batch = 32;
    double lr = 0.5;
    uint64_t seed = 1;
    Mode mode = Mode::PlaintextOracle;
    Rule rule = Rule::Vfefl;
    cl::Profile profile = cl::Profile::Test;
    uint32_t q_bits = 31;
    mpz_class bsgs_bound = mpz_class(1) << 24;
    size_t root_size = 120;
    size_t per_client = 120;
    std::vector<CryptoBadKind> crypto_bad;  // per client; empty = all honest crypto
    uint32_t s_y = 100;
    uint32_t fp_scale = 100;

    uint32_t malicious_count() const {
        return static_cast<uint32_t>(static_cast<double>(n) * malicious_frac + 1e-9);
    }
};

struct PhaseTimings {
    double baseline_s = 0, local_train_s = 0, encrypt_s = 0, keyshare_s = 0;
    double verify_ct_s = 0, verify_dk_s = 0, aggregate_s = 0;
};

struct RoundRecord {
    uint32_t round = 0;
    double accuracy = 0, asr = 0;
    std::vector<int64_t> y_hats;          // quantized ReLU'd scores used in aggregation
    std::vector<uint32_t> flagged_ct, flagged_dk;
    uint32_t retransmissions = 0;
    bool degenerate = false;
    bool aborted = false;
    double norm_w = 0;    // ||W^t|| after the round
    double norm_w0t = 0;  // ||W_0^t|| baseline
    uint64_t message_bytes = 0;
    PhaseTimings timings;
    agg::ModelVector global_enc;  // fixed-point W^t
};

struct ExperimentResult {
    std::vector<RoundRecord> rounds;
    std::vector<double> final_model;
    double final_accuracy = 0, final_asr = 0;
    double initial_norm = 0;
};

inline void write_round_csv(std::ostream& os, const std::vector<RoundRecord>& records) {
    os << "round,accuracy,asr,flagged_ids,retransmissions,degenerate,aborted,"
          "baseline_s,local_train_s,encrypt_s,keyshare_s,verify_ct_s,verify_dk_s,aggregate_s,"
          "message_bytes\n";
    for (const auto& r : records) {
        std::vector<uint32_t> ids = r.flagged_ct;
        ids.insert(ids.end(), r.flagged_dk.begin(), r.flagged_dk.end());
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        std::ostringstream fl;
        for (size_t i = 0; i < ids.size(); i++) fl << (i ? "|" : "") << ids[i];
        os << r.round << ',' << r.accuracy << ',' << r.asr << ',' << fl.str() << ','
           << r.retransmissions << ',' << (r.degenerate ? 1 : 0) << ',' << (r.aborted ? 1 : 0) << ','
           << r.timings.baseline_s << ',' << r.timings.local_train_s << ',' << r.timings.encrypt_s
           << ',' << r.timings.keyshare_s << ',' << r.timings.verify_ct_s << ','
           << r.timings.verify_dk_s << ',' << r.timings.aggregate_s << ',' << r.message_bytes
           << '\n';
    }
}

class Simulator {
  public:
    // optional test hook: replaces a client's model for a round
    std::function<std::optional<std::vector<double>>(uint32_t client, uint32_t round)> model_override;

    explicit Simulator(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.n < 2) throw ConfigError("simulator: need n >= 2");
        if (cfg_.malicious_frac < 0 || cfg_.malicious_frac >= 1)
            throw ConfigError("simulator: malicious fraction must be in [0,1)");
        if (cfg_.rule == Rule::FedAvg && cfg_.mode == Mode::FullCrypto)
            throw ConfigError("simulator: fedavg baseline runs plaintext only");
        codec_.scale = cfg_.fp_scale;
        codec_.q_bits = cfg_.q_bits;
        setup_data();
        setup_model();
        if (cfg_.mode == Mode::FullCrypto) setup_crypto();
    }

    const std::vector<double>& initial_model() const { return initial_model_; }
    const dvfe::PublicParams* public_params() const { return pp_ ? &*pp_ : nullptr; }

    ExperimentResult run() {
        ExperimentResult res;
        res.initial_norm = model_norm(initial_model_);
        global_ = initial_model_;
        for (uint32_t t = 1; t <= cfg_.rounds; t++) res.rounds.push_back(run_round(t));
        res.final_model = global_;
        if (!res.rounds.empty()) {
            res.final_accuracy = res.rounds.back().accuracy;
            res.final_asr = res.rounds.back().asr;
        }
        return res;
    }

  private:
    using Clock = std::chrono::steady_clock;
    static double secs(Clock::time_point a, Clock::time_point b) {
        return std::chrono::duration<double>(b - a).count();
    }

    // fixed stream ids keep every randomness source independent of mode
    Rng stream(uint64_t sid) const { return Rng(cfg_.seed, sid); }
    Rng round_stream(uint64_t base, uint32_t t, uint32_t client) const {
        return Rng(cfg_.seed, base + uint64_t(t) * 4096 + client);
    }

    void setup_data() {
        switch (cfg_.data.kind) {
            case DataSpec::Kind::Synth: {
                Rng rng = stream(1);
                Dataset all = synth_blobs(cfg_.data.samples + cfg_.data.samples / 3, cfg_.data.dim,
                                          cfg_.data.classes, cfg_.data.spread, rng);
                Dataset train = subset(all, cfg_.data.samples, rng);
                shards_ = shard_dataset(train, cfg_.n, cfg_.root_size, cfg_.per_client, rng);
                // held-out tail as the test set
                std::vector<uint32_t> idx;
                for (uint32_t i = static_cast<uint32_t>(cfg_.data.samples); i < all.size(); i++)
                    idx.push_back(i);
                test_ = take(all, idx);
                break;
            }
            case DataSpec::Kind::Idx: {
                Rng rng = stream(1);
                Dataset train = load_idx(cfg_.data.train_images, cfg_.data.train_labels);
                shards_ = shard_dataset(train, cfg_.n, cfg_.root_size, cfg_.per_client, rng);
                test_ = load_idx(cfg_.data.test_images, cfg_.data.test_labels);
                if (cfg_.data.test_limit && cfg_.data.test_limit < test_.size()) {
                    Rng r2 = stream(4);
                    test_ = subset(test_, cfg_.data.test_limit, r2);
                }
                break;
            }
            case DataSpec::Kind::None:
                if (cfg_.model.kind != ModelSpec::Kind::Quadratic)
                    throw ConfigError("simulator: dataset required for data-driven models");
                break;
        }
        if (cfg_.data.kind != DataSpec::Kind::None && cfg_.attack.kind == AttackKind::LabelFlip) {
            for (uint32_t i = 0; i < cfg_.malicious_count(); i++)
                shards_.clients[i] = flip_labels(shards_.clients[i]);
        }
    }

    void setup_model() {
        if (cfg_.model.kind != ModelSpec::Kind::Quadratic) {
            cfg_.model.dim = shards_.root.dim;
            cfg_.model.classes = shards_.root.classes;
        }
        Rng rng = stream(2);
        initial_model_ = init_model(cfg_.model, rng);
    }

    void setup_crypto() {
        const uint32_t m = static_cast<uint32_t>(cfg_.model.param_count());
        Rng rng = stream(3);
        dvfe::SetupConfig sc;
        sc.profile = cfg_.profile;
        sc.q_bits = cfg_.q_bits;
        sc.bsgs_bound = cfg_.bsgs_bound;
        sc.s_y = cfg_.s_y;
        sc.session_id = "flsim-" + std::to_string(cfg_.seed);
        pp_ = dvfe::setup(cfg_.n, m, sc, rng);
        std::vector<dvfe::KeygenDraft> drafts;
        std::vector<std::array<cl::QuadForm, 2>> all_T;
        for (uint32_t i = 0; i < cfg_.n; i++) {
            Rng krng = stream(100 + i);
            drafts.push_back(dvfe::keygen_local(*pp_, krng));
            all_T.push_back(drafts.back().T);
        }
        for (uint32_t i = 0; i < cfg_.n; i++)
            keys_.push_back(dvfe::keygen_finalize(drafts[i], all_T, i, *pp_));
        vk_ = dvfe::assemble_keys(keys_);
    }

    CryptoBadKind bad_kind(uint32_t i) const {
        return i < cfg_.crypto_bad.size() ? cfg_.crypto_bad[i] : CryptoBadKind::None;
    }

    bool is_malicious_model(uint32_t i) const {
        return i < cfg_.malicious_count() && cfg_.attack.kind != AttackKind::None &&
               cfg_.attack.kind != AttackKind::LabelFlip;
    }

    std::vector<double> train_client(uint32_t i, uint32_t t) {
        Rng rng = round_stream(10000, t, i);
        const Dataset* ds = cfg_.data.kind == DataSpec::Kind::None ? nullptr : &shards_.clients[i];
        return local_train(cfg_.model, global_, ds, cfg_.lr, cfg_.local_iters, cfg_.batch, rng);
    }

    // plaintext aggregation closure shared by the adaptive attack and the
    // oracle path: encode, score, weighted-sum, normalize, decode
    std::vector<double> aggregate_float(const std::vector<std::vector<double>>& models,
                                        const agg::ModelVector& x0enc) {
        std::vector<agg::ModelVector> enc;
        std::vector<agg::TrustScore> scores;
        for (const auto& mv : models) {
            agg::ModelVector e = codec_.encode(mv);
            if (agg::dot(e, e) == 0) continue;  // zero models carry no weight
            scores.push_back(agg::trust_score(e, x0enc, cfg_.s_y));
            enc.push_back(std::move(e));
        }
        if (enc.empty()) return codec_.decode(x0enc);
        agg::ModelVector star = agg::aggregate_plain(enc, scores);
        auto norm = agg::normalize(star, x0enc, codec_, cfg_.s_y);
        return codec_.decode(norm.model);
    }

    RoundRecord run_round(uint32_t t) {
        RoundRecord rec;
        rec.round = t;
        auto t0 = Clock::now();

        // (1) server baseline on the root shard
        Rng srng = round_stream(1000, t, 0);
        const Dataset* root = cfg_.data.kind == DataSpec::Kind::None ? nullptr : &shards_.root;
        std::vector<double> baseline =
            local_train(cfg_.model, global_, root, cfg_.lr, cfg_.local_iters, cfg_.batch, srng);
        rec.norm_w0t = model_norm(baseline);
        auto t1 = Clock::now();
        rec.timings.baseline_s = secs(t0, t1);

        // (2) local models: honest clients first, then model attackers
        std::vector<std::vector<double>> models(cfg_.n);
        std::vector<std::vector<double>> honest_models;
        for (uint32_t i = 0; i < cfg_.n; i++) {
            if (model_override) {
                if (auto ov = model_override(i, t)) {
                    models[i] = *ov;
                    continue;
                }
            }
            if (!is_malicious_model(i)) {
                models[i] = train_client(i, t);
                honest_models.push_back(models[i]);
            }
        }
        agg::ModelVector x0enc = codec_.encode(baseline);
        for (uint32_t i = 0; i < cfg_.n; i++) {
            if (!models[i].empty()) continue;
            AttackContext ctx;
            ctx.honest_models = &honest_models;
            ctx.baseline = &baseline;
            ctx.n = cfg_.n;
            ctx.aggregate = [&](const std::vector<double>& mal) {
                std::vector<std::vector<double>> view = honest_models;
                if (!mal.empty())
                    for (uint32_t k = 0; k < cfg_.malicious_count(); k++) view.push_back(mal);
                return aggregate_float(view, x0enc);
            };
            Rng arng = round_stream(20000, t, i);
            models[i] = apply_attack(cfg_.attack, ctx, arng);
        }
        auto t2 = Clock::now();
        rec.timings.local_train_s = secs(t1, t2);

        // (3) aggregation
        std::vector<double> next;
        if (cfg_.rule == Rule::FedAvg) {
            std::vector<double> mean(models[0].size(), 0.0);
            for (const auto& mv : models)
                for (size_t j = 0; j < mean.size(); j++) mean[j] += mv[j];
            for (auto& v : mean) v /= static_cast<double>(cfg_.n);
            rec.global_enc = codec_.encode(mean);
            next = codec_.decode(rec.global_enc);
        } else if (cfg_.mode == Mode::PlaintextOracle) {
            std::vector<agg::ModelVector> enc(cfg_.n);
            std::vector<agg::TrustScore> scores;
            for (uint32_t i = 0; i < cfg_.n; i++) {
                enc[i] = codec_.encode(models[i]);
                scores.push_back(agg::trust_score(enc[i], x0enc, cfg_.s_y));
                rec.y_hats.push_back(scores.back().y_hat);
            }
            agg::ModelVector star = agg::aggregate_plain(enc, scores);
            auto norm = agg::normalize(star, x0enc, codec_, cfg_.s_y);
            rec.degenerate = norm.degenerate;
            rec.global_enc = norm.model;
            next = codec_.decode(rec.global_enc);
            auto t3 = Clock::now();
            rec.timings.aggregate_s = secs(t2, t3);
        } else {
            if (!crypto_round(t, models, x0enc, rec)) {
                // aborted: keep the previous global model
                rec.aborted = true;
                rec.global_enc = codec_.encode(global_);
                next = global_;
            } else {
                next = codec_.decode(rec.global_enc);
            }
        }

        global_ = next;
        rec.norm_w = model_norm(global_);
        if (cfg_.data.kind != DataSpec::Kind::None) {
            auto ev = evaluate(cfg_.model, global_, test_);
            rec.accuracy = ev.accuracy;
            rec.asr = ev.asr;
        }
        return rec;
    }

    // Full three-phase secure aggregation. Returns false when the retry
    // budget is exhausted and the round aborts.
    bool crypto_round(uint32_t t, const std::vector<std::vector<double>>& models,
                      const agg::ModelVector& x0enc, RoundRecord& rec) {
        const dvfe::PublicParams& pp = *pp_;
        Bytes ell = dvfe::round_label(t);
        std::vector<Bytes> lenc = dvfe::enc_labels(t, pp.m);
        Bytes elly = dvfe::fn_label(t);

        std::vector<agg::ModelVector> xenc(cfg_.n);
        for (uint32_t i = 0; i < cfg_.n; i++) xenc[i] = codec_.encode(models[i]);

        auto t0 = Clock::now();
        const zkp::EncBases round_bases = zkp::enc_bases(ell, lenc, pp.ell_d);
        auto make_ct = [&](uint32_t i, uint32_t attempt) {
            Rng rng = round_stream(30000 + 1000000 * attempt, t, i);
            dvfe::LabeledCiphertext ct =
                dvfe::encrypt(keys_[i].s, xenc[i], x0enc, ell, lenc, pp, zkp::ScoreMode::Rounded,
                              std::nullopt, rng, &round_bases);
            CryptoBadKind k = bad_kind(i);
            bool tamper = (attempt == 0 && (k == CryptoBadKind::BadCiphertext ||
                                            k == CryptoBadKind::PersistentBadCiphertext)) ||
                          (attempt > 0 && k == CryptoBadKind::PersistentBadCiphertext);
            if (tamper) ct.entries[0] = g1_add(ct.entries[0], g1_generator());
            return ct;
        };
        std::vector<dvfe::LabeledCiphertext> cts;
        for (uint32_t i = 0; i < cfg_.n; i++) cts.push_back(make_ct(i, 0));
        for (const auto& ct : cts) rec.message_bytes += dvfe::ciphertext_bytes(ct).size();
        auto t1 = Clock::now();
        rec.timings.encrypt_s = secs(t0, t1);

        auto x0_for = [&](size_t) -> const std::vector<int64_t>& { return x0enc; };
        auto verdict = dvfe::verify_ct(cts, vk_.vk_ct, x0_for, pp);
        rec.flagged_ct = verdict.flagged;
        if (!verdict.accept) {
            // one retransmission for the flagged set
            for (uint32_t id : verdict.flagged) {
                cts[id] = make_ct(id, 1);
                rec.message_bytes += dvfe::ciphertext_bytes(cts[id]).size();
                rec.retransmissions++;
            }
            std::vector<dvfe::LabeledCiphertext> again;
            std::vector<G1> vks;
            for (uint32_t id : verdict.flagged) {
                again.push_back(cts[id]);
                vks.push_back(vk_.vk_ct[id]);
            }
            auto verdict2 = dvfe::verify_ct(again, vks, x0_for, pp);
            if (!verdict2.accept) return false;
        }
        auto t2 = Clock::now();
        rec.timings.verify_ct_s = secs(t1, t2);

        // shares with y = ReLU(quantized score); the server cross-checks the
        // share weight against the ciphertext statement
        auto make_share = [&](uint32_t i, uint32_t attempt) {
            Rng rng = round_stream(40000 + 1000000 * attempt, t, i);
            int64_t yh = cts[i].y_hat > 0 ? cts[i].y_hat : 0;
            dvfe::KeyShare ks =
                dvfe::dkeygen_share(keys_[i], vk_.pk, i, Fr::from_i64(yh), elly, pp, rng);
            if (attempt == 0 && bad_kind(i) == CryptoBadKind::BadShare)
                ks.dk[0] = g2_add(ks.dk[0], g2_generator());
            return ks;
        };
        std::vector<dvfe::KeyShare> shares;
        for (uint32_t i = 0; i < cfg_.n; i++) shares.push_back(make_share(i, 0));
        for (const auto& s : shares) rec.message_bytes += dvfe::keyshare_bytes(s).size();
        auto t3 = Clock::now();
        rec.timings.keyshare_s = secs(t2, t3);

        auto check_weights = [&](const std::vector<dvfe::KeyShare>& ss) {
            std::vector<uint32_t> bad;
            for (uint32_t i = 0; i < ss.size(); i++) {
                int64_t expect = cts[i].y_hat > 0 ? cts[i].y_hat : 0;
                if (!(ss[i].y == Fr::from_i64(expect))) bad.push_back(i);
            }
            return bad;
        };
        auto dkv = dvfe::verify_dk(shares, vk_.pk, vk_.vk_ct, pp);
        auto wbad = check_weights(shares);
        for (uint32_t id : wbad)
            if (std::find(dkv.flagged.begin(), dkv.flagged.end(), id) == dkv.flagged.end()) {
                dkv.flagged.push_back(id);
                dkv.accept = false;
            }
        rec.flagged_dk = dkv.flagged;
        if (!dkv.accept) {
            for (uint32_t id : dkv.flagged) {
                shares[id] = make_share(id, 1);
                rec.message_bytes += dvfe::keyshare_bytes(shares[id]).size();
                rec.retransmissions++;
            }
            std::vector<dvfe::KeyShare> again;
            std::vector<dvfe::PkEntry> pks;
            std::vector<G1> vks;
            for (uint32_t id : dkv.flagged) {
                again.push_back(shares[id]);
                pks.push_back(vk_.pk[id]);
                vks.push_back(vk_.vk_ct[id]);
            }
            // statements need the full T list; verify individually instead
            bool all_ok = true;
            for (size_t k = 0; k < again.size(); k++) {
                zkp::DkStatement st;
                st.index = dkv.flagged[k];
                st.all_T = dvfe::all_T_of(vk_.pk);
                st.d = vk_.pk[dkv.flagged[k]].d;
                st.dk = again[k].dk;
                st.com = vk_.vk_ct[dkv.flagged[k]];
                st.y = again[k].y;
                st.ell_y = again[k].ell_y;
                st.ell_d = pp.ell_d;
                if (!zkp::verify_dkeyshare(st, again[k].proof, pp.cg).ok) all_ok = false;
            }
            if (!all_ok || !check_weights(shares).empty()) return false;
        }
        auto t4 = Clock::now();
        rec.timings.verify_dk_s = secs(t3, t4);

        // combine, decrypt, normalize
        dvfe::FunctionalKey fk = dvfe::dkey_comb(shares, elly, vk_.pk, pp);
        std::vector<Fr> weights;
        for (uint32_t i = 0; i < cfg_.n; i++) {
            int64_t yh = cts[i].y_hat > 0 ? cts[i].y_hat : 0;
            rec.y_hats.push_back(yh);
            weights.push_back(Fr::from_i64(yh));
        }
        agg::ModelVector star = dvfe::decrypt(cts, fk, weights, pp, solver_);
        auto norm = agg::normalize(star, x0enc, codec_, cfg_.s_y);
        rec.degenerate = norm.degenerate;
        rec.global_enc = norm.model;
        auto t5 = Clock::now();
        rec.timings.aggregate_s = secs(t4, t5);
        return true;
    }

    ExperimentConfig cfg_;
    agg::FixedPointCodec codec_;
    Shards shards_;
    Dataset test_;
    std::vector<double> initial_model_;
    std::vector<double> global_;
    std::optional<dvfe::PublicParams> pp_;
    std::vector<dvfe::ClientKeyMaterial> keys_;
    dvfe::VerificationKeys vk_;
    BsgsSolver solver_;
};

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    Simulator sim(cfg);
    return sim.run();
}

}  // namespace vfefl::fl
