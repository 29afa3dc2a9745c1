#pragma once

#include <array>
#include <cstdint>

namespace sburgers {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every draw is a pure function of (key, counter), so Monte Carlo workers can
/// reproduce any increment without sharing generator state.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit constexpr Philox4x32(Key key) : key_(key) {}

    Counter operator()(Counter ctr) const;

private:
    Key key_;
};

/// SplitMix64 finaliser; used to fold seed lineage into Philox keys.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Coordinates of a single standard normal draw.
struct DrawIndex {
    std::uint64_t seed = 0;
    std::uint64_t path = 0;
    std::uint64_t stream = 0;  // refinement lineage / purpose tag
    std::uint32_t mode = 0;
    std::uint64_t step = 0;
};

/// Standard normal variate addressed by `idx` (Box-Muller on two 64-bit uniforms).
double counter_normal(const DrawIndex& idx);

/// Uniform on (0, 1] addressed by `idx`.
double counter_uniform(const DrawIndex& idx);

}  // namespace sburgers
