#include "sburgers/rng.hpp"

#include <cmath>
#include <numbers>

namespace sburgers {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53U;
constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

Philox4x32::Counter draw_words(const DrawIndex& idx) {
    const std::uint64_t k = mix64(idx.seed ^ mix64(idx.stream + 0x5851F42D4C957F2DULL));
    const Philox4x32 gen({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)});
    const std::uint64_t p = mix64(idx.path);
    return gen({static_cast<std::uint32_t>(idx.step), static_cast<std::uint32_t>(idx.step >> 32) ^ idx.mode,
                static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(p >> 32) ^ (idx.mode * 0x27D4EB2FU)});
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
    // 53 significant bits, mapped to (0, 1]
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::operator()(Counter ctr) const {
    Key key = key_;
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

double counter_uniform(const DrawIndex& idx) {
    const auto w = draw_words(idx);
    return to_unit(w[0], w[1]);
}

double counter_normal(const DrawIndex& idx) {
    const auto w = draw_words(idx);
    const double u1 = to_unit(w[0], w[1]);
    const double u2 = to_unit(w[2], w[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sburgers
