#pragma once

#include <array>
#include <cstdint>

namespace vbsar {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// A stream is identified by (seed, stream, substream); draws are a pure
/// function of that triple and the draw index, so any substream can be
/// regenerated independently of scheduling order.
class CounterRng {
public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    CounterRng(std::uint64_t seed, std::uint32_t stream, std::uint32_t substream = 0) noexcept;

    std::uint32_t next_u32() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal via Box-Muller on two uniforms.
    double normal() noexcept;

    static Block philox(Block counter, Key key) noexcept;

private:
    void refill() noexcept;

    Key key_;
    std::uint32_t stream_;
    std::uint32_t substream_;
    std::uint64_t block_index_ = 0;
    Block buffer_{};
    int position_ = 4;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Stream tags; each consumer draws from its own stream.
inline constexpr std::uint32_t kSurfaceStream = 1;
inline constexpr std::uint32_t kNoiseStream = 2;

}  // namespace vbsar
