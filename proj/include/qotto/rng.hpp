#pragma once

// Counter-based random streams. Every trajectory owns an RngStream keyed by
// (master seed, trajectory index); the numbers it produces do not depend on
// which worker runs it or in what order.

#include <array>
#include <cstdint>

namespace qotto {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal via Box-Muller.
    double normal();
    /// Wiener increment with variance dt.
    double wiener(double dt);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t index() const noexcept { return index_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t index_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qotto
