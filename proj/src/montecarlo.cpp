#include "pnmimo/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "pnmimo/kernels.hpp"
#include "pnmimo/linksim.hpp"

namespace pnmimo::mc {

void ComplexAccum::add(cd x) {
    ++n;
    const double dre = x.real() - mean_re;
    const double dim = x.imag() - mean_im;
    mean_re += dre / n;
    mean_im += dim / n;
    m2_re += dre * (x.real() - mean_re);
    m2_im += dim * (x.imag() - mean_im);
    const double a2 = x.real() * x.real() + x.imag() * x.imag();
    const double y = a2 * a2 - abs4_c;
    const double t = abs4 + y;
    abs4_c = (t - abs4) - y;
    abs4 = t;
}

void ComplexAccum::merge(const ComplexAccum& o) {
    if (o.n == 0) return;
    if (n == 0) {
        *this = o;
        return;
    }
    const long long total = n + o.n;
    const double dre = o.mean_re - mean_re;
    const double dim = o.mean_im - mean_im;
    const double w = static_cast<double>(n) * o.n / total;
    m2_re += o.m2_re + dre * dre * w;
    m2_im += o.m2_im + dim * dim * w;
    mean_re += dre * o.n / total;
    mean_im += dim * o.n / total;
    abs4 += o.abs4;
    n = total;
}

double ComplexAccum::variance() const {
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (m2_re + m2_im) / (n - 1);
}

double ComplexAccum::se_mean_re() const {
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(m2_re / (n - 1) / n);
}

double ComplexAccum::se_mean_im() const {
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return std::sqrt(m2_im / (n - 1) / n);
}

double ComplexAccum::se_variance() const {
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double v = variance();
    const double mu4 = abs4 / n;
    return std::sqrt(std::max(mu4 - v * v, 0.0) / n);
}

double EmpiricalStats::sinr(int k, int n) const {
    const CellStats& c = cell(k, n);
    return std::norm(c.A.mean()) / c.en.variance();
}

namespace {

/// Everything one worker reuses across trials.
struct Workspace {
    std::vector<cd> rx;               // detection-range receive samples
    std::vector<double> sum_abs2_kl;  // [k][l], synchronous A fast path
    TrialValues vals;
};

struct TrialContext {
    ValidatedConfig vc;  // with the requested oscillator mode
    OscillatorMode mode;
    std::uint64_t master = 0;
    std::vector<double> mean_A_analytic;  // [k][n], closed-form per-cell mean
};

void run_one_trial(const TrialContext& ctx, std::uint64_t trial, Workspace& ws) {
    const ValidatedConfig& vc = ctx.vc;
    const BlockLayout& lay = vc.layout;
    const int M = vc->M, K = vc->K, L = vc->L, N_D = vc->N_D;
    const auto& k_ops = kern::ops();

    const ChannelRealization ch = sample_channel(vc, ctx.master, trial);
    const PhaseTrajectories phases = sample_phases(vc, ctx.master, trial);
    const PhasorCache ph = make_phasors(phases, lay.rx_samples());
    const std::vector<cd> symbols = sample_symbols(vc, ctx.master, trial);
    const std::vector<cd> noise = sample_noise(vc, ctx.master, trial);

    const ChannelEstimate est = run_training(vc, ch, ph, noise);
    const std::vector<cd> tx = build_transmit(vc, symbols);
    synth_rx(vc, ch, ph, tx, noise, lay.data.first, lay.timeline_end(), ws.rx);

    auto& vals = ws.vals;
    vals.xhat.assign(static_cast<std::size_t>(K) * N_D, cd{});
    vals.A.assign(static_cast<std::size_t>(K) * N_D, cd{});
    vals.en.assign(static_cast<std::size_t>(K) * N_D, cd{});
    vals.data_sym.assign(static_cast<std::size_t>(K) * N_D, cd{});

    const bool sync = ctx.mode == OscillatorMode::Synchronous;
    if (sync) {
        ws.sum_abs2_kl.assign(static_cast<std::size_t>(K) * L, 0.0);
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l)
                ws.sum_abs2_kl[static_cast<std::size_t>(k) * L + l] =
                    k_ops.sum_abs2(ch.at(k, l), static_cast<std::size_t>(M));
    }

    const double sqrt_pd = std::sqrt(vc->P_D);
    const int T = lay.rx_samples();
    for (int k = 0; k < K; ++k) {
        const int pilot = lay.pilot_time(k);
        const cd conj_theta_ref = std::conj(ph.user_at(k, pilot));
        for (int n = 0; n < N_D; ++n) {
            const int i = lay.data.first + n;
            const std::size_t cell = static_cast<std::size_t>(k) * N_D + n;

            // TR-MRC over the detection-range receive rows.
            cd det{};
            for (int l = 0; l < L; ++l)
                det += k_ops.cdot_conj(est.at(k, l),
                                       ws.rx.data() + static_cast<std::size_t>(i + l - lay.data.first) * M,
                                       static_cast<std::size_t>(M));
            vals.xhat[cell] = det;

            // Desired coefficient A_k[i] from its defining sum.
            cd a_inner{};
            if (sync) {
                for (int l = 0; l < L; ++l) {
                    const cd rot = std::conj(ph.bs_at(i + l, 0)) * ph.bs_at(pilot + l, 0);
                    a_inner += ws.sum_abs2_kl[static_cast<std::size_t>(k) * L + l] * rot;
                }
            } else {
                for (int l = 0; l < L; ++l)
                    a_inner += k_ops.cdot_abs2w(ch.at(k, l), ph.bs_row(i + l), ph.bs_row(pilot + l),
                                                static_cast<std::size_t>(M));
            }
            const cd theta_fac = ph.user_at(k, i) * conj_theta_ref;
            vals.A[cell] = sqrt_pd * theta_fac * a_inner;

            const cd x = symbols[static_cast<std::size_t>(k) * T + i];
            vals.data_sym[cell] = x;
            vals.en[cell] = det - ctx.mean_A_analytic[cell] * x;
        }
    }
}

TrialContext make_context(const ValidatedConfig& vc, OscillatorMode mode) {
    TrialContext ctx;
    SystemConfig cfg = vc.cfg;
    cfg.mode = mode;
    ctx.vc = validate(cfg);
    ctx.mode = mode;
    ctx.mean_A_analytic.resize(static_cast<std::size_t>(vc->K) * vc->N_D);
    const Mode rmode = mode == OscillatorMode::Synchronous ? Mode::Synchronous : Mode::NonSynchronous;
    for (int k = 0; k < vc->K; ++k)
        for (int n = 0; n < vc->N_D; ++n)
            ctx.mean_A_analytic[static_cast<std::size_t>(k) * vc->N_D + n] =
                mean_A(ctx.vc, k, ctx.vc.layout.data.first + n, rmode);
    return ctx;
}

void accumulate_trial(const TrialContext& ctx, const TrialValues& vals,
                      std::vector<CellStats>& cells) {
    const std::size_t total = cells.size();
    for (std::size_t c = 0; c < total; ++c) {
        cells[c].A.add(vals.A[c]);
        cells[c].en.add(vals.en[c]);
        cells[c].cross.add(ctx.mean_A_analytic[c] * vals.data_sym[c] * std::conj(vals.en[c]));
    }
}

}  // namespace

TrialValues trial_values(const ValidatedConfig& vc, OscillatorMode mode, std::uint64_t master_seed,
                         std::uint64_t trial) {
    TrialContext ctx = make_context(vc, mode);
    ctx.master = master_seed;
    Workspace ws;
    run_one_trial(ctx, trial, ws);
    return ws.vals;
}

EmpiricalStats run_trials(const ValidatedConfig& vc, OscillatorMode mode, long long trials,
                          std::uint64_t master_seed, const RunOptions& opts) {
    if (trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    TrialContext ctx = make_context(vc, mode);
    ctx.master = master_seed;

    EmpiricalStats stats;
    stats.mode = mode;
    stats.master_seed = master_seed;
    stats.trials_requested = trials;
    stats.K = vc->K;
    stats.N_D = vc->N_D;
    const std::size_t ncells = static_cast<std::size_t>(vc->K) * vc->N_D;
    stats.cells.assign(ncells, CellStats{});

    const int chunk = std::max(1, opts.chunk_size);
    const long long nchunks = (trials + chunk - 1) / chunk;
    int threads = opts.threads > 0 ? opts.threads
                                   : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, static_cast<int>(std::min<long long>(threads, nchunks)));

    std::vector<std::vector<CellStats>> partials(static_cast<std::size_t>(nchunks));
    std::atomic<long long> next_chunk{0};
    std::atomic<long long> first_failed{nchunks};

    auto worker = [&] {
        Workspace ws;
        for (;;) {
            const long long c = next_chunk.fetch_add(1);
            if (c >= nchunks || c >= first_failed.load()) break;
            try {
                auto& part = partials[static_cast<std::size_t>(c)];
                part.assign(ncells, CellStats{});
                const long long lo = c * chunk;
                const long long hi = std::min<long long>(lo + chunk, trials);
                for (long long t = lo; t < hi; ++t) {
                    run_one_trial(ctx, static_cast<std::uint64_t>(t), ws);
                    accumulate_trial(ctx, ws.vals, part);
                }
            } catch (const std::bad_alloc&) {
                // keep the completed prefix usable; record where we stopped
                long long expected = first_failed.load();
                while (c < expected && !first_failed.compare_exchange_weak(expected, c)) {
                }
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Deterministic merge: chunk index order, independent of worker count.
    const long long usable_chunks = std::min<long long>(nchunks, first_failed.load());
    for (long long c = 0; c < usable_chunks; ++c)
        for (std::size_t j = 0; j < ncells; ++j) {
            stats.cells[j].A.merge(partials[static_cast<std::size_t>(c)][j].A);
            stats.cells[j].en.merge(partials[static_cast<std::size_t>(c)][j].en);
            stats.cells[j].cross.merge(partials[static_cast<std::size_t>(c)][j].cross);
        }
    stats.truncated = usable_chunks < nchunks;
    stats.trials = stats.truncated ? usable_chunks * chunk : trials;
    stats.se_defined = stats.trials >= 2;
    return stats;
}

ComparisonReport compare_with(const EmpiricalStats& stats, const ValidatedConfig& vc,
                              const AnalyticProvider& provider) {
    ComparisonReport rep;
    rep.mode = stats.mode;
    rep.trials = stats.trials;
    rep.se_defined = stats.se_defined;
    rep.enough_trials = stats.trials >= 1000;

    const int i0 = vc.layout.data.first;
    long long within = 0;
    for (int k = 0; k < stats.K; ++k) {
        for (int n = 0; n < stats.N_D; ++n) {
            const auto [a_mean, en_var] = provider(k, i0 + n);
            const CellStats& c = stats.cell(k, n);

            auto push = [&rep, &within](int kk, int ii, Quantity q, double emp, double ana, double se) {
                double z;
                if (se > 0.0 && std::isfinite(se)) {
                    z = (emp - ana) / se;
                } else {
                    z = emp == ana ? 0.0 : std::numeric_limits<double>::infinity();
                }
                rep.rows.push_back({kk, ii, q, emp, ana, se, z});
                rep.max_abs_z = std::max(rep.max_abs_z, std::abs(z));
                if (std::abs(z) < 5.0) ++within;
            };
            push(k, i0 + n, Quantity::MeanA, c.A.mean().real(), a_mean, c.A.se_mean_re());
            push(k, i0 + n, Quantity::VarEN, c.en.variance(), en_var, c.en.se_variance());
        }
    }
    rep.within_5se_fraction = rep.rows.empty() ? 1.0 : static_cast<double>(within) / rep.rows.size();
    rep.pass = rep.se_defined && rep.within_5se_fraction >= 0.99 && rep.max_abs_z < 8.0;
    return rep;
}

ComparisonReport compare(const EmpiricalStats& stats, const ValidatedConfig& vc) {
    const Mode mode =
        stats.mode == OscillatorMode::Synchronous ? Mode::Synchronous : Mode::NonSynchronous;
    SystemConfig cfg = vc.cfg;
    cfg.mode = stats.mode;
    const ValidatedConfig v = validate(cfg);
    return compare_with(stats, vc, [v, mode](int k, int i) {
        return std::make_pair(mean_A(v, k, i, mode), effective_noise_variance(v, k, i, mode));
    });
}

std::string comparison_csv(const ComparisonReport& rep, const ValidatedConfig& vc,
                           std::uint64_t master_seed) {
    std::ostringstream os;
    os << "# mode=" << (rep.mode == OscillatorMode::Synchronous ? "sync" : "nonsync")
       << " trials=" << rep.trials << " seed=" << master_seed << " M=" << vc->M << " K=" << vc->K
       << " L=" << vc->L << " N_D=" << vc->N_D << " P_D=" << vc->P_D << " beta=" << vc->beta
       << " noise_variance=" << vc->noise_variance << " sigma_phi_sq=" << vc->sigma_phi_sq
       << " sigma_theta_sq=" << vc->sigma_theta_sq << "\n";
    os << "k,i,quantity,empirical,analytic,se,z\n";
    char buf[160];
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%d,%d,%s,%.12g,%.12g,%.12g,%.6g\n", r.k, r.i,
                      r.quantity == Quantity::MeanA ? "mean_A" : "var_EN", r.empirical, r.analytic,
                      r.se, r.z);
        os << buf;
    }
    return os.str();
}

}  // namespace pnmimo::mc
