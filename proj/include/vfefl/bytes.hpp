#pragma once

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

namespace vfefl {

using Bytes = std::string;

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Canonical byte encodings used across the project: all integers little-endian,
// variable-length payloads length-prefixed with u32.
class ByteWriter {
  public:
    void u8(uint8_t x) { buf_.push_back(static_cast<char>(x)); }
    void u32(uint32_t x) {
        for (int i = 0; i < 4; i++) buf_.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
    }
    void u64(uint64_t x) {
        for (int i = 0; i < 8; i++) buf_.push_back(static_cast<char>((x >> (8 * i)) & 0xff));
    }
    void i64(int64_t x) { u64(static_cast<uint64_t>(x)); }
    void raw(std::string_view b) { buf_.append(b.data(), b.size()); }
    void bytes(std::string_view b) {
        u32(static_cast<uint32_t>(b.size()));
        raw(b);
    }
    // Fixed-width little-endian magnitude; v must satisfy 0 <= v < 256^width.
    void mpz_fixed(const mpz_class& v, size_t width) {
        if (sgn(v) < 0) throw std::invalid_argument("mpz_fixed: negative");
        std::vector<uint8_t> tmp(width, 0);
        size_t count = 0;
        mpz_export(tmp.data(), &count, -1, 1, 0, 0, v.get_mpz_t());
        if (count > width) throw std::invalid_argument("mpz_fixed: value too wide");
        buf_.append(reinterpret_cast<const char*>(tmp.data()), width);
    }
    // Sign byte + length-prefixed little-endian magnitude.
    void mpz_signed(const mpz_class& v) {
        u8(sgn(v) < 0 ? 1 : 0);
        size_t nbytes = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
        if (v == 0) nbytes = 0;
        std::vector<uint8_t> tmp(nbytes);
        size_t count = 0;
        if (nbytes) mpz_export(tmp.data(), &count, -1, 1, 0, 0, v.get_mpz_t());
        u32(static_cast<uint32_t>(nbytes));
        buf_.append(reinterpret_cast<const char*>(tmp.data()), nbytes);
    }

    const Bytes& data() const { return buf_; }
    Bytes take() { return std::move(buf_); }

  private:
    Bytes buf_;
};

class ByteReader {
  public:
    explicit ByteReader(std::string_view b) : b_(b) {}

    uint8_t u8() {
        need(1);
        return static_cast<uint8_t>(b_[pos_++]);
    }
    uint32_t u32() {
        need(4);
        uint32_t x = 0;
        for (int i = 0; i < 4; i++) x |= static_cast<uint32_t>(static_cast<uint8_t>(b_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return x;
    }
    uint64_t u64() {
        need(8);
        uint64_t x = 0;
        for (int i = 0; i < 8; i++) x |= static_cast<uint64_t>(static_cast<uint8_t>(b_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return x;
    }
    int64_t i64() { return static_cast<int64_t>(u64()); }
    std::string_view raw(size_t n) {
        need(n);
        auto out = b_.substr(pos_, n);
        pos_ += n;
        return out;
    }
    Bytes bytes() {
        uint32_t n = u32();
        return Bytes(raw(n));
    }
    mpz_class mpz_fixed(size_t width) {
        auto s = raw(width);
        mpz_class v;
        mpz_import(v.get_mpz_t(), width, -1, 1, 0, 0, s.data());
        return v;
    }
    mpz_class mpz_signed() {
        uint8_t neg = u8();
        if (neg > 1) throw ParseError("mpz_signed: bad sign byte");
        uint32_t n = u32();
        auto s = raw(n);
        mpz_class v;
        if (n) mpz_import(v.get_mpz_t(), n, -1, 1, 0, 0, s.data());
        if (neg) v = -v;
        return v;
    }

    bool done() const { return pos_ == b_.size(); }
    size_t remaining() const { return b_.size() - pos_; }
    void expect_done() const {
        if (!done()) throw ParseError("trailing bytes");
    }

  private:
    void need(size_t n) const {
        if (pos_ + n > b_.size()) throw ParseError("unexpected end of input");
    }
    std::string_view b_;
    size_t pos_ = 0;
};

inline std::string to_hex(std::string_view b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (unsigned char c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

inline Bytes from_hex(std::string_view h) {
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw ParseError("bad hex digit");
    };
    if (h.size() % 2) throw ParseError("odd hex length");
    Bytes out;
    out.reserve(h.size() / 2);
    for (size_t i = 0; i < h.size(); i += 2) out.push_back(static_cast<char>(nib(h[i]) * 16 + nib(h[i + 1])));
    return out;
}

}  // namespace vfefl
