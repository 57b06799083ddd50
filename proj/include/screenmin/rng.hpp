#pragma once

// Counter-based random streams (Philox-4x32-10). Each (replication, column)
// pair owns an independent substream addressed purely by its coordinates, so
// draws never depend on evaluation order or on which worker produced them.

#include <cstdint>

#include "distributions.hpp"

namespace screenmin {

struct Philox4x32 {
    // Keyed block cipher on a 128-bit counter; 10 rounds of the standard
    // multiply-xor network.
    static void block(const std::uint32_t key_in[2], const std::uint32_t ctr_in[4],
                      std::uint32_t out[4]) {
        std::uint32_t k0 = key_in[0], k1 = key_in[1];
        std::uint32_t c0 = ctr_in[0], c1 = ctr_in[1], c2 = ctr_in[2], c3 = ctr_in[3];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ull * c0;
            const std::uint64_t p1 = 0xCD9E8D57ull * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
    }
};

// Substream of uniforms/normals for one (replication, column) coordinate.
// Consecutive draws walk the 32-bit block index; the remaining counter words
// carry the coordinates, and the key carries the master seed.
class SubStream {
public:
    SubStream(std::uint64_t seed, std::uint64_t replication, std::uint32_t column)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          base_{0u, column, static_cast<std::uint32_t>(replication),
                static_cast<std::uint32_t>(replication >> 32)} {}

    // Uniform on (0,1), strictly inside both endpoints.
    double next_uniform() {
        if (have_ == 0) refill();
        const std::uint32_t lo = buf_[--have_];
        const std::uint32_t hi = buf_[--have_];
        const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via the inverse CDF: one uniform per deviate keeps the
    // draw count predictable, which the substream layout relies on.
    double next_normal() { return std_normal_quantile(next_uniform()); }

private:
    void refill() {
        std::uint32_t ctr[4] = {block_index_++, base_[1], base_[2], base_[3]};
        Philox4x32::block(key_, ctr, buf_);
        have_ = 4;
    }

    std::uint32_t key_[2];
    std::uint32_t base_[4];
    std::uint32_t block_index_ = 0;
    std::uint32_t buf_[4] = {};
    int have_ = 0;
};

} // namespace screenmin
