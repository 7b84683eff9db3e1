#include "ismp/rng.hpp"

#include <cmath>

namespace ismp {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

inline void one_round(std::array<std::uint32_t, 4>& c,
                      const std::array<std::uint32_t, 2>& k) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM4x32A, c[0], lo0, hi0);
    mulhilo(kPhiloxM4x32B, c[2], lo1, hi1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

std::array<std::uint32_t, 4> CounterRng::block(std::array<std::uint32_t, 2> key,
                                               std::array<std::uint32_t, 4> ctr) {
    for (int r = 0; r < 10; ++r) {
        one_round(ctr, key);
        key[0] += kPhiloxW32A;
        key[1] += kPhiloxW32B;
    }
    return ctr;
}

void CounterRng::refill() {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32),
        static_cast<std::uint32_t>(stream_),
        static_cast<std::uint32_t>(stream_ >> 32)};
    buf_ = block(key_, ctr);
    ++counter_;
    avail_ = 4;
}

double CounterRng::uniform() {
    if (avail_ < 2) refill();
    const std::uint64_t hi = buf_[4 - avail_];
    const std::uint64_t lo = buf_[5 - avail_];
    avail_ -= 2;
    const std::uint64_t bits = (hi << 32) | lo;
    // 53 mantissa bits, offset keeps the value strictly inside (0,1).
    return static_cast<double>(bits >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::normal() {
    if (have_normal_) {
        have_normal_ = false;
        return cached_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    cached_normal_ = r * std::sin(a);
    have_normal_ = true;
    return r * std::cos(a);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace ismp
