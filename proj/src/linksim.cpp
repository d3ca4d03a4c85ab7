#include "pnmimo/linksim.hpp"

#include <stdexcept>

#include "pnmimo/kernels.hpp"

namespace pnmimo {

namespace {

std::size_t kt(int k, int t, int T) { return static_cast<std::size_t>(k) * T + t; }

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

PhasorCache make_phasors(const PhaseTrajectories& phases, int T) {
    PhasorCache ph;
    ph.T = T;
    ph.M = phases.M;
    ph.synchronous = phases.mode == OscillatorMode::Synchronous;
    const int K = static_cast<int>(phases.theta.size());
    ph.user.resize(static_cast<std::size_t>(K) * T);
    for (int k = 0; k < K; ++k) {
        const auto& path = phases.theta[static_cast<std::size_t>(k)];
        require(static_cast<int>(path.values.size()) >= T, "make_phasors: user path shorter than timeline");
        for (int t = 0; t < T; ++t)
            ph.user[kt(k, t, T)] = std::polar(1.0, path.values[static_cast<std::size_t>(t)]);
    }
    if (ph.synchronous) {
        const auto& path = phases.bs[0];
        require(static_cast<int>(path.values.size()) >= T, "make_phasors: BS path shorter than timeline");
        ph.bs.resize(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) ph.bs[static_cast<std::size_t>(t)] = std::polar(1.0, path.values[static_cast<std::size_t>(t)]);
    } else {
        ph.bs.resize(static_cast<std::size_t>(T) * ph.M);
        for (int m = 0; m < ph.M; ++m) {
            const auto& path = phases.bs[static_cast<std::size_t>(m)];
            require(static_cast<int>(path.values.size()) >= T, "make_phasors: BS path shorter than timeline");
            for (int t = 0; t < T; ++t)
                ph.bs[static_cast<std::size_t>(t) * ph.M + m] = std::polar(1.0, path.values[static_cast<std::size_t>(t)]);
        }
    }
    return ph;
}

std::vector<cd> sample_symbols(const ValidatedConfig& vc, std::uint64_t master, std::uint64_t trial) {
    const BlockLayout& lay = vc.layout;
    const int T = lay.rx_samples();
    std::vector<cd> x(static_cast<std::size_t>(vc->K) * T);
    // [KL, N_c-L] is exactly preamble + data + postamble, contiguous.
    for (int k = 0; k < vc->K; ++k) {
        RngStream s = substream(master, trial, StreamLabel::Symbols, static_cast<std::uint64_t>(k));
        for (int t = lay.preamble.first; t <= lay.timeline_end(); ++t) x[kt(k, t, T)] = s.cnormal(1.0);
    }
    return x;
}

std::vector<cd> sample_noise(const ValidatedConfig& vc, std::uint64_t master, std::uint64_t trial) {
    const int T = vc.layout.rx_samples();
    RngStream s = substream(master, trial, StreamLabel::Noise);
    return sample_complex_gaussian(static_cast<std::size_t>(T) * vc->M, vc->noise_variance, s);
}

std::vector<cd> build_transmit(const ValidatedConfig& vc, const std::vector<cd>& symbols) {
    const BlockLayout& lay = vc.layout;
    const int T = lay.rx_samples();
    require(symbols.size() == static_cast<std::size_t>(vc->K) * T, "build_transmit: symbol tensor size");
    std::vector<cd> tx = symbols;
    const double pilot_amp = std::sqrt(vc.P_p * vc->K * vc->L);
    for (int k = 0; k < vc->K; ++k) {
        for (int t = lay.training.first; t <= lay.training.last; ++t) tx[kt(k, t, T)] = 0.0;
        tx[kt(k, lay.pilot_time(k), T)] = pilot_amp;
    }
    return tx;
}

ChannelEstimate run_training(const ValidatedConfig& vc, const ChannelRealization& ch,
                             const PhasorCache& ph, const std::vector<cd>& noise) {
    const int M = vc->M, K = vc->K, L = vc->L;
    require(ch.M == M && ch.K == K && ch.L == L, "run_training: channel dimensions");
    require(noise.size() >= static_cast<std::size_t>(K) * L * M, "run_training: noise tensor too small");
    ChannelEstimate est;
    est.M = M;
    est.K = K;
    est.L = L;
    est.taps.resize(static_cast<std::size_t>(M) * K * L);
    const double inv_amp = 1.0 / std::sqrt(vc.P_p * K * L);
    for (int k = 0; k < K; ++k) {
        const cd user_rot = ph.user_at(k, vc.layout.pilot_time(k));  // e^{j theta_k[(k-1)L]}
        for (int l = 0; l < L; ++l) {
            const int t = vc.layout.pilot_time(k) + l;
            const cd* g = ch.at(k, l);
            const cd* n = noise.data() + static_cast<std::size_t>(t) * M;
            cd* out = est.at(k, l);
            for (int m = 0; m < M; ++m)
                out[m] = g[m] * std::conj(ph.bs_at(t, m)) * user_rot + n[m] * inv_amp;
        }
    }
    return est;
}

void synth_rx(const ValidatedConfig& vc, const ChannelRealization& ch, const PhasorCache& ph,
              const std::vector<cd>& transmit, const std::vector<cd>& noise, int t_begin, int t_end,
              std::vector<cd>& rx) {
    const BlockLayout& lay = vc.layout;
    const int M = vc->M, K = vc->K, L = vc->L, T = lay.rx_samples();
    require(t_begin >= 0 && t_end <= lay.timeline_end() && t_begin <= t_end, "synth_rx: range");
    require(transmit.size() == static_cast<std::size_t>(K) * T, "synth_rx: transmit tensor size");
    require(noise.size() == static_cast<std::size_t>(T) * M, "synth_rx: noise tensor size");
    rx.assign(static_cast<std::size_t>(t_end - t_begin + 1) * M, cd{0.0, 0.0});

    const auto& k_ops = kern::ops();
    const double data_amp = std::sqrt(vc->P_D);
    for (int t = t_begin; t <= t_end; ++t) {
        cd* row = rx.data() + static_cast<std::size_t>(t - t_begin) * M;
        for (int k = 0; k < K; ++k) {
            for (int l = 0; l < L; ++l) {
                const int tau = t - l;
                if (tau < 0) break;  // guard and earlier: zero transmit
                const cd x = transmit[kt(k, tau, T)];
                if (x == cd{0.0, 0.0}) continue;
                const double amp = lay.training.contains(tau) ? 1.0 : data_amp;
                const cd coef = amp * x * ph.user_at(k, tau);
                k_ops.caxpy(coef, ch.at(k, l), row, static_cast<std::size_t>(M));
            }
        }
        if (ph.synchronous) {
            k_ops.cscal(std::conj(ph.bs_at(t, 0)), row, static_cast<std::size_t>(M));
        } else {
            k_ops.cmul_conj(ph.bs_row(t), row, row, static_cast<std::size_t>(M));
        }
        k_ops.caxpy(cd{1.0, 0.0}, noise.data() + static_cast<std::size_t>(t) * M, row,
                    static_cast<std::size_t>(M));
    }
}

FrameSignals run_data_phase(const ValidatedConfig& vc, const ChannelRealization& ch,
                            const PhasorCache& ph, const std::vector<cd>& symbols,
                            const std::vector<cd>& noise) {
    FrameSignals fr;
    fr.K = vc->K;
    fr.M = vc->M;
    fr.T = vc.layout.rx_samples();
    fr.transmit = build_transmit(vc, symbols);
    fr.noise = noise;
    synth_rx(vc, ch, ph, fr.transmit, fr.noise, 0, vc.layout.timeline_end(), fr.rx);
    return fr;
}

std::vector<cd> tr_mrc_detect(const ValidatedConfig& vc, const ChannelEstimate& est,
                              const std::vector<cd>& rx) {
    const BlockLayout& lay = vc.layout;
    const int M = vc->M, K = vc->K, L = vc->L;
    require(est.M == M && est.K == K && est.L == L, "tr_mrc_detect: estimate dimensions");
    require(static_cast<int>(rx.size() / M) > lay.data.last + L - 1 - 0,
            "tr_mrc_detect: received samples do not cover I_d + {0..L-1}");
    const auto& k_ops = kern::ops();
    std::vector<cd> xhat(static_cast<std::size_t>(K) * lay.N_D);
    for (int k = 0; k < K; ++k) {
        for (int n = 0; n < lay.N_D; ++n) {
            const int i = lay.data.first + n;
            cd acc{0.0, 0.0};
            for (int l = 0; l < L; ++l)
                acc += k_ops.cdot_conj(est.at(k, l), rx.data() + static_cast<std::size_t>(i + l) * M,
                                       static_cast<std::size_t>(M));
            xhat[static_cast<std::size_t>(k) * lay.N_D + n] = acc;
        }
    }
    return xhat;
}

DecompositionTerms decompose(const ValidatedConfig& vc, const ChannelRealization& ch,
                             const PhaseTrajectories& phases, const std::vector<cd>& symbols,
                             const std::vector<cd>& noise) {
    const BlockLayout& lay = vc.layout;
    const int M = vc->M, K = vc->K, L = vc->L, T = lay.rx_samples();
    require(symbols.size() == static_cast<std::size_t>(K) * T, "decompose: symbol tensor size");
    require(noise.size() == static_cast<std::size_t>(T) * M, "decompose: noise tensor size");

    const PhasorCache ph = make_phasors(phases, T);

    DecompositionTerms out;
    out.K = K;
    out.N_D = lay.N_D;
    const std::size_t cells = static_cast<std::size_t>(K) * lay.N_D;
    out.A.assign(cells, cd{});
    out.isi.assign(cells, cd{});
    out.mui.assign(cells, cd{});
    out.an.assign(cells, cd{});

    // Receive-side route for the detected symbol.
    const ChannelEstimate est = run_training(vc, ch, ph, noise);
    FrameSignals fr = run_data_phase(vc, ch, ph, symbols, noise);
    out.xhat = tr_mrc_detect(vc, est, fr.rx);

    const double sqrt_pd = std::sqrt(vc->P_D);
    const double an_scale = std::sqrt(vc->P_D / (vc.P_p * K * L));

    for (int k = 0; k < K; ++k) {
        const int pilot = lay.pilot_time(k);
        const cd conj_theta_ref = std::conj(ph.user_at(k, pilot));  // e^{-j theta_k[(k-1)L]}
        for (int n = 0; n < lay.N_D; ++n) {
            const int i = lay.data.first + n;
            const std::size_t cell = out.idx(k, n);
            cd a_sum{}, isi_sum{}, mui_sum{}, an_sum{};
            for (int l = 0; l < L; ++l) {
                const int t_rx = i + l;
                const int t_tr = pilot + l;
                const cd* gk = ch.at(k, l);
                const cd* n_tr = noise.data() + static_cast<std::size_t>(t_tr) * M;
                const cd* n_rx = noise.data() + static_cast<std::size_t>(t_rx) * M;
                for (int q = 0; q < K; ++q) {
                    for (int p = 0; p < L; ++p) {
                        const int ts = i + l - p;  // symbol instant, inside preamble..postamble
                        const cd sym = symbols[kt(q, ts, T)];
                        const cd theta_fac = ph.user_at(q, ts) * conj_theta_ref;
                        const cd* gq = ch.at(q, p);
                        // channel-estimate signal part against data signal
                        cd dot{};
                        cd dot_noise{};
                        for (int m = 0; m < M; ++m) {
                            const cd rot = std::conj(ph.bs_at(t_rx, m)) * ph.bs_at(t_tr, m);
                            dot += std::conj(gk[m]) * gq[m] * rot;
                            dot_noise += std::conj(n_tr[m]) * gq[m] * std::conj(ph.bs_at(t_rx, m));
                        }
                        const cd signal_term = sqrt_pd * dot * theta_fac * sym;
                        if (q == k && p == l) {
                            a_sum += sqrt_pd * dot * theta_fac;  // coefficient, symbol excluded
                        } else if (q == k) {
                            isi_sum += signal_term;
                        } else {
                            mui_sum += signal_term;
                        }
                        an_sum += an_scale * dot_noise * ph.user_at(q, ts) * sym;
                    }
                }
                // filtered receiver noise: sum_m conj(ghat) n_m[i+l]
                const cd* ghat = est.at(k, l);
                for (int m = 0; m < M; ++m) an_sum += std::conj(ghat[m]) * n_rx[m];
            }
            out.A[cell] = a_sum;
            out.isi[cell] = isi_sum;
            out.mui[cell] = mui_sum;
            out.an[cell] = an_sum;
        }
    }
    return out;
}

}  // namespace pnmimo
