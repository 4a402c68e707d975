#pragma once

#include <cstdint>
#include <limits>

namespace handover {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Child key for stream `index` under `key`. Order-insensitive: the child
// depends only on (key, index).
inline std::uint64_t derive_seed(std::uint64_t key, std::uint64_t index) {
    return mix64(mix64(key ^ 0x6a09e667f3bcc909ULL) + mix64(index + 0x9e3779b97f4a7c15ULL));
}

// Counter-based generator: the n-th output is a keyed hash of n, so a
// stream is fully described by (key, counter). Satisfies
// UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t key = 0) : key_(mix64(key)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1], safe for log().
    double uniform_pos() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

    // Child stream; depends on (key, counter, index) only.
    Rng split(std::uint64_t index) const {
        return Rng(derive_seed(counter_ ? mix64(key_ + counter_) : key_, index));
    }

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace handover
