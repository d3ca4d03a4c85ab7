// pnmimo - phase-noise-impaired massive MIMO uplink experiments
//
// Subcommands sweep the closed-form achievable rates (rate-vs-snr,
// min-snr-vs-m, power-gap, rate-vs-nd, max-rate-vs-k), compute the toy
// channel capacities (toy-dmc), or cross-check the closed forms against
// the link-level Monte Carlo simulator (validate). All output is CSV.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pnmimo/experiments.hpp"
#include "pnmimo/kernels.hpp"

namespace ex = pnmimo::experiments;
using pnmimo::Mode;

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::vector<Mode> parse_modes(const std::string& s) {
    if (s == "none") return {Mode::NoPhaseNoise};
    if (s == "sync") return {Mode::Synchronous};
    if (s == "nonsync") return {Mode::NonSynchronous};
    if (s == "all") return {Mode::NoPhaseNoise, Mode::Synchronous, Mode::NonSynchronous};
    throw CLI::ValidationError("--mode", "expected none, sync, nonsync or all");
}

struct GlobalArgs {
    std::string config_path;
    std::string out_path;
    std::string mode = "all";
    std::string kernels = "auto";
    std::uint64_t seed = 1;
    bool renormalize_pdp = false;

    // config overrides
    std::optional<int> M, K, L, N_D;
    std::optional<double> P_D, beta, noise_variance, sigma_phi_sq, sigma_theta_sq;
    std::optional<double> c_phi, c_theta;
    std::optional<double> pdp_decay;
    std::optional<std::string> osc_mode;

    double f_c = 2e9;
    double T_s = 1e-7;

    ex::CommonParams make_params() const {
        ex::CommonParams p;
        p.cfg = config_path.empty() ? ex::default_config()
                                    : ex::load_config_file(config_path, renormalize_pdp);
        p.seed = seed;
        p.modes = parse_modes(mode);
        if (M) p.cfg.M = *M;
        if (K) p.cfg.K = *K;
        if (L) p.cfg.L = *L;
        if (N_D) p.cfg.N_D = *N_D;
        if (P_D) p.cfg.P_D = *P_D;
        if (beta) p.cfg.beta = *beta;
        if (noise_variance) p.cfg.noise_variance = *noise_variance;
        if (sigma_phi_sq) p.cfg.sigma_phi_sq = *sigma_phi_sq;
        if (sigma_theta_sq) p.cfg.sigma_theta_sq = *sigma_theta_sq;
        if (c_phi) p.cfg.sigma_phi_sq = pnmimo::derive_increment_variance(f_c, T_s, *c_phi);
        if (c_theta) p.cfg.sigma_theta_sq = pnmimo::derive_increment_variance(f_c, T_s, *c_theta);
        if (osc_mode) {
            if (*osc_mode == "synchronous" || *osc_mode == "sync")
                p.cfg.mode = pnmimo::OscillatorMode::Synchronous;
            else if (*osc_mode == "non-synchronous" || *osc_mode == "nonsync")
                p.cfg.mode = pnmimo::OscillatorMode::NonSynchronous;
            else
                throw CLI::ValidationError("--osc-mode", "expected synchronous or non-synchronous");
        }
        const int rows = p.cfg.K;
        if (pdp_decay || static_cast<int>(p.cfg.pdp.size()) != rows ||
            (rows > 0 && static_cast<int>(p.cfg.pdp[0].size()) != p.cfg.L)) {
            // dimension overrides invalidate the loaded PDP; rebuild it
            p.cfg.pdp.assign(static_cast<std::size_t>(rows),
                             pnmimo::exponential_pdp(p.cfg.L, pdp_decay.value_or(0.35), 1.0));
        }
        return p;
    }
};

template <typename Fn>
int with_output(const std::string& out_path, Fn&& fn) {
    if (out_path.empty()) return fn(std::cout);
    std::ofstream f(out_path);
    if (!f) {
        std::cerr << "cannot open output file: " << out_path << "\n";
        return ex::kBadArguments;
    }
    return fn(f);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phase-noise massive MIMO uplink: achievable rates and link simulation"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out", g.out_path, "output CSV path (default stdout)");
    app.add_option("--seed", g.seed, "master seed (64-bit)");
    app.add_option("--mode", g.mode, "modes to include: none|sync|nonsync|all");
    app.add_option("--kernels", g.kernels, "kernel backend: auto|scalar|avx2");
    app.add_flag("--renormalize-pdp", g.renormalize_pdp,
                 "rescale PDP rows to a declared alpha instead of rejecting");

    app.add_option("--M", g.M, "antenna count override");
    app.add_option("--K", g.K, "user count override");
    app.add_option("--L", g.L, "tap count override");
    app.add_option("--N_D", g.N_D, "data length override");
    app.add_option("--P_D", g.P_D, "data power override (linear)");
    app.add_option("--beta", g.beta, "training/data power ratio override");
    app.add_option("--noise-variance", g.noise_variance, "noise variance override (linear)");
    app.add_option("--sigma-phi-sq", g.sigma_phi_sq, "BS increment variance override [rad^2]");
    app.add_option("--sigma-theta-sq", g.sigma_theta_sq, "user increment variance override [rad^2]");
    app.add_option("--c-phi", g.c_phi, "BS oscillator constant (implies variance via f_c, T_s)");
    app.add_option("--c-theta", g.c_theta, "user oscillator constant");
    app.add_option("--f-c", g.f_c, "carrier frequency [Hz] for oscillator-constant conversion");
    app.add_option("--T-s", g.T_s, "symbol interval [s] for oscillator-constant conversion");
    app.add_option("--pdp-decay", g.pdp_decay, "rebuild exponential PDP with this decay");
    app.add_option("--osc-mode", g.osc_mode, "config oscillator mode: synchronous|non-synchronous");

    ex::SnrGrid grid;
    app.add_option("--snr-min", grid.min_db, "sweep start [dB]");
    app.add_option("--snr-max", grid.max_db, "sweep end [dB]");
    app.add_option("--snr-step", grid.step_db, "sweep step [dB]");

    auto* snr = app.add_subcommand("rate-vs-snr", "sum rate over an SNR grid, with asymptotes");

    std::string m_list = "64,128,256,512,1024,2048,4096";
    double target = 2.0;
    auto* minsnr = app.add_subcommand("min-snr-vs-m", "required SNR for a per-user rate, vs M");
    minsnr->add_option("--m-list", m_list, "comma-separated antenna counts");
    minsnr->add_option("--target", target, "per-user rate target [bpcu]");

    std::string c_list = "9.4e-19,4.7e-18,2.35e-17";
    std::string target_list = "1";
    std::string gap_m_list = "500,2500";
    auto* gap = app.add_subcommand("power-gap", "required-SNR penalty of phase noise");
    gap->add_option("--c-values", c_list, "comma-separated oscillator constants");
    gap->add_option("--targets", target_list, "comma-separated per-user rate targets [bpcu]");
    gap->add_option("--m-list", gap_m_list, "comma-separated antenna counts");

    std::string nd_list;
    auto* vsnd = app.add_subcommand("rate-vs-nd", "sum rate vs data length");
    int nd_min = 100, nd_max = 20000, nd_step = 100;
    vsnd->add_option("--nd-list", nd_list, "explicit comma-separated N_D grid");
    vsnd->add_option("--nd-min", nd_min, "grid start");
    vsnd->add_option("--nd-max", nd_max, "grid end");
    vsnd->add_option("--nd-step", nd_step, "grid step");

    std::string k_list;
    int k_min = 2, k_max = 30, k_step = 1, nd_bound = 200000;
    auto* vsk = app.add_subcommand("max-rate-vs-k", "best-N_D sum rate vs user count");
    vsk->add_option("--k-list", k_list, "explicit comma-separated K grid");
    vsk->add_option("--k-min", k_min, "grid start");
    vsk->add_option("--k-max", k_max, "grid end");
    vsk->add_option("--k-step", k_step, "grid step");
    vsk->add_option("--nd-bound", nd_bound, "search bound for N_D");

    auto* toy = app.add_subcommand("toy-dmc", "two-branch phase-noise DMC capacities");

    long long trials = 200000;
    int threads = 0;
    auto* val = app.add_subcommand("validate", "Monte Carlo check of the closed forms");
    val->add_option("--trials", trials, "trial count per mode");
    val->add_option("--threads", threads, "worker threads (0 = hardware)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    if (!pnmimo::kern::select_backend(g.kernels)) {
        std::cerr << "unknown or unavailable kernel backend: " << g.kernels << "\n";
        return ex::kBadArguments;
    }

    try {
        if (toy->parsed()) return with_output(g.out_path, [&](std::ostream& o) { return ex::cmd_toy_dmc(o); });

        const ex::CommonParams params = g.make_params();
        if (snr->parsed())
            return with_output(g.out_path,
                               [&](std::ostream& o) { return ex::cmd_rate_vs_snr(params, grid, o); });
        if (minsnr->parsed())
            return with_output(g.out_path, [&](std::ostream& o) {
                return ex::cmd_min_snr_vs_m(params, parse_int_list(m_list), target, o);
            });
        if (gap->parsed())
            return with_output(g.out_path, [&](std::ostream& o) {
                return ex::cmd_power_gap(params, parse_double_list(c_list), parse_double_list(target_list),
                                         parse_int_list(gap_m_list), g.f_c, g.T_s, o);
            });
        if (vsnd->parsed())
            return with_output(g.out_path, [&](std::ostream& o) {
                std::vector<int> gridv;
                if (!nd_list.empty()) {
                    gridv = parse_int_list(nd_list);
                } else {
                    for (int v = nd_min; v <= nd_max; v += std::max(1, nd_step)) gridv.push_back(v);
                }
                return ex::cmd_rate_vs_nd(params, gridv, o);
            });
        if (vsk->parsed())
            return with_output(g.out_path, [&](std::ostream& o) {
                std::vector<int> gridv;
                if (!k_list.empty()) {
                    gridv = parse_int_list(k_list);
                } else {
                    for (int v = k_min; v <= k_max; v += std::max(1, k_step)) gridv.push_back(v);
                }
                return ex::cmd_max_rate_vs_k(params, gridv, nd_bound, o);
            });
        if (val->parsed())
            return with_output(g.out_path, [&](std::ostream& o) {
                ex::CommonParams vp = params;
                // no config and no dimension flags: use the small validation geometry
                if (g.config_path.empty() && !g.M && !g.K && !g.L && !g.N_D) {
                    ex::CommonParams fresh;
                    fresh.cfg = ex::default_validation_config();
                    fresh.seed = vp.seed;
                    fresh.modes = vp.modes;
                    if (g.P_D) fresh.cfg.P_D = *g.P_D;
                    if (g.beta) fresh.cfg.beta = *g.beta;
                    if (g.noise_variance) fresh.cfg.noise_variance = *g.noise_variance;
                    if (g.sigma_phi_sq) fresh.cfg.sigma_phi_sq = *g.sigma_phi_sq;
                    if (g.sigma_theta_sq) fresh.cfg.sigma_theta_sq = *g.sigma_theta_sq;
                    vp = fresh;
                }
                return ex::cmd_validate(vp, trials, threads, o, std::cerr);
            });
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ex::kBadArguments;
    }
    return ex::kBadArguments;
}
