#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace kanlab {

/// Derives an independent sub-stream seed. splitmix64 finalizer over the
/// (seed, tag) pair; the same pair always yields the same sub-seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

/// Sub-stream tags used across the pipeline.
namespace stream {
inline constexpr std::uint64_t series = 0x5e71e5;
inline constexpr std::uint64_t target_noise = 0x70a15e;
inline constexpr std::uint64_t net_init = 0x1417;
inline constexpr std::uint64_t shuffle = 0x5affe;
inline constexpr std::uint64_t mode_decay = 0xdeca1;
} // namespace stream

/// Deterministic random stream. Uniform and normal draws are derived from raw
/// mt19937_64 output with explicit arithmetic, so sequences are bit-identical
/// across platforms and standard libraries.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller (second value cached).
    double normal();

    /// Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n);

    /// In-place Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace kanlab
