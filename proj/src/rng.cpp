#include "qotto/rng.hpp"

#include <cmath>
#include <numbers>

namespace qotto {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(kM0) * ctr[0];
        const std::uint64_t p1 = std::uint64_t(kM1) * ctr[2];
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {}

void RngStream::refill() {
    buffer_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32), std::uint32_t(index_),
                          std::uint32_t(index_ >> 32)},
                         {std::uint32_t(seed_), std::uint32_t(seed_ >> 32)});
    ++block_;
    used_ = 0;
}

std::uint64_t RngStream::next_u64() {
    if (used_ > 2) refill();
    const std::uint64_t v = (std::uint64_t(buffer_[used_]) << 32) | buffer_[used_ + 1];
    used_ += 2;
    return v;
}

double RngStream::uniform() {
    // 53 random bits, offset by half an ulp so 0 and 1 are never returned
    return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

double RngStream::wiener(double dt) { return std::sqrt(dt) * normal(); }

}  // namespace qotto
