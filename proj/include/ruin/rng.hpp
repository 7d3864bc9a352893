#ifndef RUIN_RNG_HPP
#define RUIN_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>

namespace ruin {

/// Philox4x32 with 10 rounds (Salmon et al., SC'11): a keyed bijection on
/// 128-bit counters. Output block i of stream s is philox(key, {i, s}), so any
/// (seed, stream, position) triple is addressable without sequential state.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter encrypt(Counter ctr, Key key) noexcept;
};

/// Random stream `stream` of generator `seed`. Models
/// UniformRandomBitGenerator so it can drive <random> if needed, but the
/// library itself only draws through uniform().
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// Uniform on the open interval (0, 1); never returns 0 or 1.
    double uniform() noexcept;

    /// Exponential with the given rate by inversion.
    double exponential(double rate) noexcept;

    std::uint64_t stream() const noexcept { return stream_; }
    std::uint64_t position() const noexcept { return block_ * 2 + used_ - 2; }

private:
    void refill() noexcept;

    Philox4x32::Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    unsigned used_ = 2;
};

}  // namespace ruin

#endif  // RUIN_RNG_HPP
