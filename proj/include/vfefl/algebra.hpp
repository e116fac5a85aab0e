#pragma once

// Multi-exponentiation and bounded discrete-log recovery (baby-step/giant-step).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "vfefl/bls381.hpp"

namespace vfefl {

struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// product of bases[i]^exps[i]
inline G1 multi_exp(std::span<const G1> bases, std::span<const Fr> exps) {
    if (bases.size() != exps.size()) throw DimensionError("multi_exp: length mismatch");
    G1 acc = G1::infinity();
    for (size_t i = 0; i < bases.size(); i++) acc = g1_add(acc, g1_mul(bases[i], exps[i]));
    return acc;
}

inline G2 multi_exp(std::span<const G2> bases, std::span<const Fr> exps) {
    if (bases.size() != exps.size()) throw DimensionError("multi_exp: length mismatch");
    G2 acc = G2::infinity();
    for (size_t i = 0; i < bases.size(); i++) acc = g2_add(acc, g2_mul(bases[i], exps[i]));
    return acc;
}

inline Gt multi_exp(std::span<const Gt> bases, std::span<const Fr> exps) {
    if (bases.size() != exps.size()) throw DimensionError("multi_exp: length mismatch");
    Gt acc = Gt::one();
    for (size_t i = 0; i < bases.size(); i++) acc = acc * bases[i].pow(exps[i].v);
    return acc;
}

struct BsgsOutOfRange : std::runtime_error {
    explicit BsgsOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline uint64_t fnv1a64(std::string_view b) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : b) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}
}  // namespace detail

// Baby-step/giant-step over GT with a per-base baby table cache. Not
// thread-safe; use one solver per thread.
class BsgsSolver {
  public:
    // least x in [0, window) with base^x == target, else OutOfRange
    int64_t solve(const Gt& base, const Gt& target, uint64_t window) {
        if (window == 0) throw std::invalid_argument("bsgs: empty window");
        const Table& tab = table_for(base, window);
        Gt cur = target;
        uint64_t giants = (window + tab.baby_count - 1) / tab.baby_count;
        for (uint64_t gstep = 0; gstep < giants; gstep++) {
            auto it = tab.map.find(detail::fnv1a64(gt_bytes(cur)));
            if (it != tab.map.end()) {
                uint64_t cand = gstep * tab.baby_count + it->second;
                if (cand < window && base.pow(mpz_class(static_cast<unsigned long>(cand))) == target)
                    return static_cast<int64_t>(cand);
            }
            cur = cur * tab.giant;
        }
        throw BsgsOutOfRange("bsgs: no exponent in window");
    }

    // x in [-bound, bound) with base^x == target
    int64_t solve_signed(const Gt& base, const Gt& target, uint64_t bound) {
        // shift by +bound and search [0, 2*bound)
        Gt shifted = target * base.pow(mpz_class(static_cast<unsigned long>(bound)));
        int64_t x = solve(base, shifted, 2 * bound);
        return x - static_cast<int64_t>(bound);
    }

    void clear() { cache_.clear(); }

  private:
    struct Table {
        uint64_t baby_count = 0;
        Gt giant;  // base^(-baby_count)
        std::unordered_map<uint64_t, uint32_t> map;
    };

    const Table& table_for(const Gt& base, uint64_t window) {
        uint64_t babies = 1;
        while (babies * babies < window) babies++;
        Bytes key = gt_bytes(base);
        key.push_back(static_cast<char>(babies & 0xff));
        key.push_back(static_cast<char>((babies >> 8) & 0xff));
        key.push_back(static_cast<char>((babies >> 16) & 0xff));
        key.push_back(static_cast<char>((babies >> 24) & 0xff));
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;

        Table tab;
        tab.baby_count = babies;
        tab.map.reserve(babies);
        Gt cur = Gt::one();
        for (uint64_t i = 0; i < babies; i++) {
            tab.map.emplace(detail::fnv1a64(gt_bytes(cur)), static_cast<uint32_t>(i));
            cur = cur * base;
        }
        tab.giant = base.pow(mpz_class(static_cast<unsigned long>(babies))).inv();
        return cache_.emplace(std::move(key), std::move(tab)).first->second;
    }

    std::unordered_map<Bytes, Table> cache_;
};

}  // namespace vfefl
