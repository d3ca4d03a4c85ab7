// rng.hpp - counter-based random streams
//
// Every random object of every trial draws from its own Philox4x32-10
// stream, keyed by (master seed, trial index, object label, object index).
// Streams are independent of execution order and of how many trials a run
// contains, so trial t always sees the same numbers.

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace pnmimo {

/// Object labels for sub-stream derivation. The numeric values are part of
/// the reproducibility contract; do not reorder.
enum class StreamLabel : std::uint64_t {
    Channel = 1,
    UserPhase = 2,
    BsPhase = 3,
    Symbols = 4,
    Noise = 5,
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 33;
    z *= 0xff51afd7ed558ccdULL;
    z ^= z >> 33;
    z *= 0xc4ceb9fe1a85ec53ULL;
    z ^= z >> 33;
    return z;
}

inline std::uint64_t combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

}  // namespace detail

/// Philox4x32-10 block generator with the reference rotation constants.
class Philox4x32 {
  public:
    Philox4x32(std::uint64_t key, std::uint64_t stream) {
        key_ = {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)};
        ctr_ = {0, 0, static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    }

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

  private:
    void refill() {
        std::array<std::uint32_t, 4> c = ctr_;
        std::array<std::uint32_t, 2> k = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * c[0];
            const std::uint64_t p1 = 0xCD9E8D57ULL * c[2];
            c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
                 static_cast<std::uint32_t>(p0)};
            k[0] += 0x9E3779B9u;
            k[1] += 0xBB67AE85u;
        }
        buf_ = c;
        pos_ = 0;
        if (++ctr_[0] == 0) ++ctr_[1];  // 64-bit block counter; [2],[3] hold the stream id
    }

    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

/// One independent random stream: uniforms, Gaussians and proper complex
/// Gaussians. Pure function of its derivation tuple.
class RngStream {
  public:
    RngStream(std::uint64_t key, std::uint64_t stream) : gen_(key, stream) {}

    std::uint64_t next_u64() { return gen_.next_u64(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(gen_.next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe to feed a logarithm.
    double uniform_pos() { return static_cast<double>((gen_.next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; pairs are cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double a = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly symmetric complex Gaussian with E|z|^2 = variance
    /// (real and imaginary parts i.i.d. N(0, variance/2)).
    std::complex<double> cnormal(double variance) {
        const double r = std::sqrt(-variance * std::log(uniform_pos()));
        const double a = 2.0 * std::numbers::pi * uniform();
        return {r * std::cos(a), r * std::sin(a)};
    }

  private:
    Philox4x32 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Derives the stream for (trial, label, index) from one master seed.
inline RngStream substream(std::uint64_t master, std::uint64_t trial, StreamLabel label,
                           std::uint64_t index = 0) {
    std::uint64_t h = detail::combine(0x243f6a8885a308d3ULL, master);
    h = detail::combine(h, trial);
    h = detail::combine(h, static_cast<std::uint64_t>(label));
    h = detail::combine(h, index);
    return RngStream(h, detail::mix64(h ^ 0x452821e638d01377ULL));
}

}  // namespace pnmimo
