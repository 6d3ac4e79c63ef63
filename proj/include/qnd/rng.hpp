#pragma once

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3",
// SC'11): a counter-based generator. Output is a pure function of the 64-bit
// key (the run seed) and a 128-bit counter, so record i of a batch can be
// drawn on any thread, in any order, and on any platform with the same bits.

#include <array>
#include <cstdint>

namespace qnd {

class Philox4x32 {
public:
    using Block = std::array<std::uint32_t, 4>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Block operator()(Block counter) const;

    // Two uniforms in (0, 1) with 52 random bits each, for counter
    // {index_lo, index_hi, stream, 0}.
    std::array<double, 2> uniforms(std::uint64_t index, std::uint32_t stream = 0) const;

private:
    std::array<std::uint32_t, 2> key_;
};

// (bits >> 12 + 1/2) * 2^-52: never exactly 0 or 1 (with 53 bits the top
// value would round up to 1).
double uniform_open(std::uint64_t bits);

// Standard normal by inverse CDF.
double standard_normal(double u);

}  // namespace qnd
