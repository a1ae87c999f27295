#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace collapse {

/// Philox4x32-10 block function: one 128-bit output block per (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer, used to derive child stream ids.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stable 64-bit hash of a string (FNV-1a followed by a SplitMix64 finalizer).
std::uint64_t stable_hash(std::string_view text) noexcept;

/// Counter-based random stream.
///
/// The key is the seed; the 128-bit counter is (stream_id, position). Two
/// streams with equal (seed, stream_id) produce identical sequences no matter
/// which thread draws them. `split` derives a child stream without touching
/// the parent's position.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : seed_(seed), stream_id_(stream_id) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    RngStream split(std::uint64_t child) const noexcept {
        return RngStream(seed_, mix64(stream_id_ ^ mix64(child + 0x632be59bd9b4e019ULL)));
    }
    RngStream split(std::string_view label) const noexcept { return split(stable_hash(label)); }

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe as a log argument.
    double uniform_open0() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
    std::uint64_t uniform_index(std::uint64_t bound) noexcept;

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() noexcept;

private:
    void refill() noexcept;

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t position_ = 0;
    std::array<std::uint32_t, 4> block_{};
    unsigned used_ = 4;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace collapse
