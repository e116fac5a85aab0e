#pragma once

// The four full-domain hash oracles. Group-valued oracles use
// try-and-increment onto the curve followed by cofactor clearing, so outputs
// are subgroup members with unknown discrete logs. Domain tags keep the
// oracles separated: "H1|", "H1p|", "H2|", "Hs|".

#include <string_view>

#include <openssl/evp.h>

#include "vfefl/bls381.hpp"
#include "vfefl/bytes.hpp"

namespace vfefl {

inline Bytes sha256(std::string_view data) {
    unsigned char out[32];
    unsigned int n = 0;
    if (EVP_Digest(data.data(), data.size(), out, &n, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("EVP_Digest failed");
    return Bytes(reinterpret_cast<char*>(out), n);
}

namespace detail {

inline Bytes tagged_block(std::string_view dst, std::string_view msg, uint32_t ctr, uint8_t slot) {
    ByteWriter w;
    w.raw(dst);
    w.u32(ctr);
    w.u8(slot);
    w.raw(msg);
    return sha256(w.data());
}

// 64 hash bytes -> Fp (negligible bias at 381 bits)
inline Fp fp_from_blocks(std::string_view dst, std::string_view msg, uint32_t ctr, uint8_t base_slot) {
    Bytes b = tagged_block(dst, msg, ctr, base_slot);
    b += tagged_block(dst, msg, ctr, static_cast<uint8_t>(base_slot + 1));
    mpz_class x;
    mpz_import(x.get_mpz_t(), b.size(), 1, 1, 0, 0, b.data());
    return Fp(std::move(x));
}

inline G1 map_to_g1(std::string_view dst, std::string_view msg) {
    for (uint32_t ctr = 0;; ctr++) {
        Fp x = fp_from_blocks(dst, msg, ctr, 0);
        auto y = (x * x * x + Fp(4)).sqrt();
        if (!y) continue;
        uint8_t sign = static_cast<uint8_t>(tagged_block(dst, msg, ctr, 2)[0]) & 1;
        Fp yy = *y;
        if (mpz_tstbit(yy.v.get_mpz_t(), 0) != sign) yy = -yy;
        G1 p = g1_mul(G1::make(x, yy), g1_cofactor());
        if (p.inf) continue;
        return p;
    }
}

inline G2 map_to_g2(std::string_view dst, std::string_view msg) {
    for (uint32_t ctr = 0;; ctr++) {
        Fp2 x{fp_from_blocks(dst, msg, ctr, 0), fp_from_blocks(dst, msg, ctr, 2)};
        auto y = (x.sq() * x + G2::coeff_b()).sqrt();
        if (!y) continue;
        uint8_t sign = static_cast<uint8_t>(tagged_block(dst, msg, ctr, 4)[0]) & 1;
        Fp2 yy = *y;
        const Fp& sel = yy.c0.is_zero() ? yy.c1 : yy.c0;
        if (mpz_tstbit(sel.v.get_mpz_t(), 0) != sign) yy = -yy;
        G2 p = g2_mul(G2::make(x, yy), g2_cofactor());
        if (p.inf) continue;
        return p;
    }
}

}  // namespace detail

// H1 : {0,1}* -> G1^2
inline std::array<G1, 2> hash_to_g1_pair(std::string_view label) {
    return {detail::map_to_g1("H1|0|", label), detail::map_to_g1("H1|1|", label)};
}

// H1' : {0,1}* -> G1
inline G1 hash_to_g1(std::string_view label) { return detail::map_to_g1("H1p|", label); }

// H2 : {0,1}* -> G2^2
inline std::array<G2, 2> hash_to_g2_pair(std::string_view label) {
    return {detail::map_to_g2("H2|0|", label), detail::map_to_g2("H2|1|", label)};
}

// H : {0,1}* -> Zp
inline Fr hash_to_scalar(std::string_view data) {
    Bytes b = detail::tagged_block("Hs|", data, 0, 0);
    b += detail::tagged_block("Hs|", data, 0, 1);
    mpz_class x;
    mpz_import(x.get_mpz_t(), b.size(), 1, 1, 0, 0, b.data());
    return Fr(std::move(x));
}

}  // namespace vfefl
