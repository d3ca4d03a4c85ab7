// stochastics.hpp - seeded sampling of channels, phase paths and symbols

#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "pnmimo/config.hpp"
#include "pnmimo/rng.hpp"

namespace pnmimo {

using cd = std::complex<double>;

/// Random-walk oscillator phase over the nonnegative timeline, one value
/// per channel use, unwrapped. Only e^{j phase} is ever consumed, so no
/// wrapping is applied anywhere.
struct WienerPath {
    double increment_variance = 0.0;
    std::vector<double> values;  // values[t], t = 0 ... length-1
};

/// Channel taps g[m][k][l] for one coherence block, stored (k, l)-major
/// with the antenna index fastest so per-(k,l) antenna vectors are
/// contiguous for the kernels.
struct ChannelRealization {
    int M = 0, K = 0, L = 0;
    std::vector<cd> taps;

    const cd* at(int k, int l) const { return taps.data() + (static_cast<std::size_t>(k) * L + l) * M; }
    cd* at(int k, int l) { return taps.data() + (static_cast<std::size_t>(k) * L + l) * M; }
    cd tap(int m, int k, int l) const { return at(k, l)[m]; }
};

/// K user paths plus the BS paths. Synchronous operation keeps a single
/// shared BS path that phi(m) aliases for every antenna.
struct PhaseTrajectories {
    OscillatorMode mode = OscillatorMode::Synchronous;
    int M = 0;
    std::vector<WienerPath> theta;  // K entries
    std::vector<WienerPath> bs;     // 1 entry (synchronous) or M entries

    const WienerPath& phi(int m) const {
        return bs[mode == OscillatorMode::Synchronous ? 0 : static_cast<std::size_t>(m)];
    }
};

/// n proper complex Gaussians with per-sample variance `variance`.
std::vector<cd> sample_complex_gaussian(std::size_t n, double variance, RngStream& stream);

/// Phase random walk: values[0] = initial_phase, then Gaussian increments.
WienerPath wiener_path(std::size_t length, double increment_variance, double initial_phase,
                       RngStream& stream);

/// g_{m,k,l} = sqrt(d_{k,l}) h_{m,k,l}, h i.i.d. unit-variance proper
/// complex Gaussian. Zero tap power gives exactly zero taps.
ChannelRealization sample_channel(const ValidatedConfig& vc, RngStream& stream);

/// K user paths (sigma_theta^2) and the BS paths (sigma_phi^2, one shared
/// path in synchronous mode), each with a uniform [0, 2pi) initial phase,
/// covering t = 0 ... layout.timeline_end(). Streams are derived per path
/// from (master, trial) so the paths are mutually independent.
PhaseTrajectories sample_phases(const ValidatedConfig& vc, std::uint64_t master, std::uint64_t trial);

/// Convenience used by the trial runners: channel from its own substream.
ChannelRealization sample_channel(const ValidatedConfig& vc, std::uint64_t master, std::uint64_t trial);

}  // namespace pnmimo
