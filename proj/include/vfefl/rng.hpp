#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace vfefl {

// Deterministic seeded randomness source. All protocol and simulator randomness
// flows through injected Rng instances so runs are reproducible bit-for-bit.
// Gaussian sampling is hand-rolled (Box-Muller) because std::normal_distribution
// is implementation-defined.
class Rng {
  public:
    explicit Rng(uint64_t seed) : gen_(seed) {}
    Rng(uint64_t seed, uint64_t stream) : gen_(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1))) {}

    uint64_t u64() { return gen_(); }

    uint64_t below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below(0)");
        uint64_t lim = n * (UINT64_MAX / n);
        uint64_t x;
        do { x = u64(); } while (x >= lim);
        return x % n;
    }

    // Uniform integer in [0, bound) by rejection on the top chunk.
    mpz_class mpz_below(const mpz_class& bound) {
        if (bound <= 0) throw std::invalid_argument("Rng::mpz_below: bound <= 0");
        size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
        size_t words = (bits + 63) / 64;
        mpz_class x;
        while (true) {
            x = 0;
            for (size_t i = 0; i < words; i++) {
                mpz_mul_2exp(x.get_mpz_t(), x.get_mpz_t(), 64);
                x += mpz_class(u64());
            }
            mpz_fdiv_r_2exp(x.get_mpz_t(), x.get_mpz_t(), bits);
            if (x < bound) return x;
        }
    }

    // Uniform in [0, bound] inclusive.
    mpz_class mpz_upto(const mpz_class& bound) { return mpz_below(bound + 1); }

    double uniform01() {
        // 53 random bits into [0,1)
        return static_cast<double>(u64() >> 11) * (1.0 / 9007199254740992.0);
    }

    double gaussian(double sigma = 1.0) {
        if (!have_spare_) {
            double u1 = uniform01();
            double u2 = uniform01();
            while (u1 <= 1e-300) u1 = uniform01();
            double m = std::sqrt(-2.0 * std::log(u1));
            spare_ = m * std::sin(6.283185307179586476925287 * u2);
            have_spare_ = true;
            return sigma * m * std::cos(6.283185307179586476925287 * u2);
        }
        have_spare_ = false;
        return sigma * spare_;
    }

    // Fisher-Yates shuffle of an index vector.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; i--) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    Rng fork(uint64_t stream) { return Rng(u64(), stream); }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace vfefl
