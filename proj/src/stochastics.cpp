#include "pnmimo/stochastics.hpp"

namespace pnmimo {

std::vector<cd> sample_complex_gaussian(std::size_t n, double variance, RngStream& stream) {
    if (!(variance >= 0.0)) throw std::invalid_argument("sample_complex_gaussian: variance must be >= 0");
    std::vector<cd> out(n);
    if (variance == 0.0) return out;  // exact zeros
    for (auto& z : out) z = stream.cnormal(variance);
    return out;
}

WienerPath wiener_path(std::size_t length, double increment_variance, double initial_phase,
                       RngStream& stream) {
    if (length < 1) throw std::invalid_argument("wiener_path: length must be >= 1");
    WienerPath p;
    p.increment_variance = increment_variance;
    p.values.resize(length);
    p.values[0] = initial_phase;
    if (increment_variance == 0.0) {
        for (std::size_t t = 1; t < length; ++t) p.values[t] = initial_phase;
        return p;
    }
    const double sd = std::sqrt(increment_variance);
    for (std::size_t t = 1; t < length; ++t) p.values[t] = p.values[t - 1] + sd * stream.normal();
    return p;
}

ChannelRealization sample_channel(const ValidatedConfig& vc, RngStream& stream) {
    ChannelRealization ch;
    ch.M = vc->M;
    ch.K = vc->K;
    ch.L = vc->L;
    ch.taps.resize(static_cast<std::size_t>(ch.M) * ch.K * ch.L);
    for (int k = 0; k < ch.K; ++k) {
        for (int l = 0; l < ch.L; ++l) {
            const double d = vc.d(k, l);
            cd* row = ch.at(k, l);
            if (d == 0.0) continue;  // row stays exactly zero
            const double scale = std::sqrt(d);
            for (int m = 0; m < ch.M; ++m) row[m] = scale * stream.cnormal(1.0);
        }
    }
    return ch;
}

ChannelRealization sample_channel(const ValidatedConfig& vc, std::uint64_t master, std::uint64_t trial) {
    RngStream s = substream(master, trial, StreamLabel::Channel);
    return sample_channel(vc, s);
}

PhaseTrajectories sample_phases(const ValidatedConfig& vc, std::uint64_t master, std::uint64_t trial) {
    PhaseTrajectories pt;
    pt.mode = vc->mode;
    pt.M = vc->M;
    const std::size_t len = static_cast<std::size_t>(vc.layout.timeline_end()) + 1;
    const double two_pi = 2.0 * std::numbers::pi;

    pt.theta.reserve(static_cast<std::size_t>(vc->K));
    for (int k = 0; k < vc->K; ++k) {
        RngStream s = substream(master, trial, StreamLabel::UserPhase, static_cast<std::uint64_t>(k));
        const double init = two_pi * s.uniform();
        pt.theta.push_back(wiener_path(len, vc->sigma_theta_sq, init, s));
    }

    const int n_bs = vc->mode == OscillatorMode::Synchronous ? 1 : vc->M;
    pt.bs.reserve(static_cast<std::size_t>(n_bs));
    for (int m = 0; m < n_bs; ++m) {
        RngStream s = substream(master, trial, StreamLabel::BsPhase, static_cast<std::uint64_t>(m));
        const double init = two_pi * s.uniform();
        pt.bs.push_back(wiener_path(len, vc->sigma_phi_sq, init, s));
    }
    return pt;
}

}  // namespace pnmimo
