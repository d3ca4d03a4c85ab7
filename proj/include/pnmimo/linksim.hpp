// linksim.hpp - one coherence block end to end
//
// Timeline convention matches BlockLayout: t = 0 is the first training
// sample, receive-side arrays cover t = 0 ... N_c - L with the antenna
// index fastest. Everything here is pure per trial.

#pragma once

#include <cstdint>
#include <vector>

#include "pnmimo/config.hpp"
#include "pnmimo/stochastics.hpp"

namespace pnmimo {

/// ML estimate of the effective channel, same tap layout as
/// ChannelRealization. With zero AWGN and zero phase noise it equals the
/// true channel up to floating-point rounding.
struct ChannelEstimate {
    int M = 0, K = 0, L = 0;
    std::vector<cd> taps;

    const cd* at(int k, int l) const { return taps.data() + (static_cast<std::size_t>(k) * L + l) * M; }
    cd* at(int k, int l) { return taps.data() + (static_cast<std::size_t>(k) * L + l) * M; }
    cd tap(int m, int k, int l) const { return at(k, l)[m]; }
};

/// Unit phasors e^{j theta_k[t]} and e^{j phi_m[t]} over the receive
/// timeline. BS phasors are stored t-major so one instant's antenna row is
/// contiguous; synchronous mode keeps a single row per instant.
struct PhasorCache {
    int T = 0, M = 0;
    bool synchronous = true;
    std::vector<cd> user;  // [k][t]
    std::vector<cd> bs;    // [t] or [t][m]

    cd user_at(int k, int t) const { return user[static_cast<std::size_t>(k) * T + t]; }
    cd bs_at(int t, int m) const {
        return synchronous ? bs[static_cast<std::size_t>(t)]
                           : bs[static_cast<std::size_t>(t) * M + m];
    }
    const cd* bs_row(int t) const { return bs.data() + static_cast<std::size_t>(t) * M; }
};

PhasorCache make_phasors(const PhaseTrajectories& phases, int T);

/// Per-user transmit sequences and what the antennas saw. `transmit`
/// holds the pilot impulse sqrt(P_p K L) at each user's pilot instant and
/// unit-variance symbols on preamble/data/postamble; the data-phase
/// amplitude sqrt(P_D) is applied inside the channel equation.
struct FrameSignals {
    int K = 0, M = 0, T = 0;
    std::vector<cd> transmit;  // [k][t]
    std::vector<cd> rx;        // [t][m]
    std::vector<cd> noise;     // [t][m]

    cd transmit_at(int k, int t) const { return transmit[static_cast<std::size_t>(k) * T + t]; }
    const cd* rx_row(int t) const { return rx.data() + static_cast<std::size_t>(t) * M; }
    const cd* noise_row(int t) const { return noise.data() + static_cast<std::size_t>(t) * M; }
};

/// All four detector-output components per (k, i in I_d), plus the
/// detected symbol from the receive-side processing chain. The identity
/// xhat = A x + ISI + MUI + AN is an algebraic cross-check between the two
/// computation routes, not a definition.
struct DecompositionTerms {
    int K = 0, N_D = 0;
    std::vector<cd> A, isi, mui, an, xhat;

    std::size_t idx(int k, int n) const { return static_cast<std::size_t>(k) * N_D + n; }
};

/// Unit-variance symbols on preamble, data and postamble, zero elsewhere;
/// [k][t] over the receive timeline.
std::vector<cd> sample_symbols(const ValidatedConfig& vc, std::uint64_t master, std::uint64_t trial);

/// AWGN tensor [t][m] over the receive timeline, drawn in fixed (t, m)
/// order regardless of which samples a caller ends up using.
std::vector<cd> sample_noise(const ValidatedConfig& vc, std::uint64_t master, std::uint64_t trial);

/// Pilot impulses plus the given symbols.
std::vector<cd> build_transmit(const ValidatedConfig& vc, const std::vector<cd>& symbols);

/// ML channel estimate from the training observations:
/// ghat = g e^{-j phi_m[kL+l]} e^{j theta_k[kL]} + n / sqrt(P_p K L).
ChannelEstimate run_training(const ValidatedConfig& vc, const ChannelRealization& ch,
                             const PhasorCache& ph, const std::vector<cd>& noise);

/// Receive samples for t in [t_begin, t_end] (absolute timeline indices,
/// rows relative to t_begin): convolution of the transmit sequences with
/// the phase-rotated channel, plus AWGN.
void synth_rx(const ValidatedConfig& vc, const ChannelRealization& ch, const PhasorCache& ph,
              const std::vector<cd>& transmit, const std::vector<cd>& noise, int t_begin, int t_end,
              std::vector<cd>& rx);

/// Full frame: transmit assembly plus receive samples over the whole
/// timeline. Convolution memory across segment boundaries is implicit in
/// the timeline-wide evaluation.
FrameSignals run_data_phase(const ValidatedConfig& vc, const ChannelRealization& ch,
                            const PhasorCache& ph, const std::vector<cd>& symbols,
                            const std::vector<cd>& noise);

/// TR-MRC: xhat_k[i] = sum_l sum_m conj(ghat_{m,k,l}) y_m[i+l] for i in
/// I_d; `rx` must cover the timeline through data.last + L - 1. Returns
/// [k][i - data.first].
std::vector<cd> tr_mrc_detect(const ValidatedConfig& vc, const ChannelEstimate& est,
                              const std::vector<cd>& rx);

/// Computes A, ISI, MUI and AN from their defining sums (simulation-side:
/// needs every latent variable), and the detected symbol via the
/// run_training -> synth_rx -> tr_mrc_detect route.
DecompositionTerms decompose(const ValidatedConfig& vc, const ChannelRealization& ch,
                             const PhaseTrajectories& phases, const std::vector<cd>& symbols,
                             const std::vector<cd>& noise);

}  // namespace pnmimo
