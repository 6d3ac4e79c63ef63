#include "qnd/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <numbers>

namespace qnd {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Block Philox4x32::operator()(Block ctr) const {
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    }
    return ctr;
}

std::array<double, 2> Philox4x32::uniforms(std::uint64_t index, std::uint32_t stream) const {
    const Block out = (*this)({static_cast<std::uint32_t>(index),
                               static_cast<std::uint32_t>(index >> 32), stream, 0u});
    const std::uint64_t w0 = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    const std::uint64_t w1 = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    return {uniform_open(w0), uniform_open(w1)};
}

double uniform_open(std::uint64_t bits) {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

double standard_normal(double u) {
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
}

}  // namespace qnd
