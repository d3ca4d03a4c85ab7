// experiments.hpp - CSV-emitting experiment commands
//
// Each command is a pure function of its parameters writing one CSV
// stream: a manifest comment line, a header row, then data rows in
// deterministic order. dB enters and leaves only here.

#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pnmimo/config.hpp"
#include "pnmimo/rates.hpp"

namespace pnmimo::experiments {

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Shared command inputs: the config template, the modes to include and
/// the master seed (only the validate command consumes randomness).
struct CommonParams {
    SystemConfig cfg;
    std::vector<Mode> modes = {Mode::NoPhaseNoise, Mode::Synchronous, Mode::NonSynchronous};
    std::uint64_t seed = 1;
};

struct SnrGrid {
    double min_db = -20.0;
    double max_db = 30.0;
    double step_db = 2.5;

    std::vector<double> points() const;
};

/// Exit codes shared by the commands.
enum Status : int {
    kOk = 0,
    kComparisonFailed = 1,
    kInsufficientTrials = 2,
    kBadArguments = 3,
};

/// Sum rate versus P_D/sigma^2 plus one trailing asymptote row per mode
/// (snr_db = inf). Columns: snr_db,mode,sum_rate_bpcu.
int cmd_rate_vs_snr(const CommonParams& p, const SnrGrid& grid, std::ostream& out);

/// Minimum required P_D/sigma^2 for an average per-user rate.
/// Columns: M,mode,required_snr_db,status.
int cmd_min_snr_vs_m(const CommonParams& p, const std::vector<int>& m_grid, double target_bpcu,
                     std::ostream& out);

/// Required-SNR penalty of phase noise against the no-phase-noise
/// baseline, per oscillator quality. Oscillator quality is reported as
/// the accumulated drift std sigma * sqrt(N_D + L - 1) in degrees.
/// Columns: sigma_drift_deg,target_bpcu,M,mode,gap_db,status.
int cmd_power_gap(const CommonParams& p, const std::vector<double>& osc_constants,
                  const std::vector<double>& targets, const std::vector<int>& m_grid, double f_c_hz,
                  double T_s_sec, std::ostream& out);

/// Sum rate versus data length. Columns: N_D,mode,sum_rate_bpcu.
int cmd_rate_vs_nd(const CommonParams& p, const std::vector<int>& nd_grid, std::ostream& out);

/// Best data length and resulting sum rate versus user count; the PDP row
/// of user 0 is replicated as K changes.
/// Columns: K,mode,best_N_D,max_sum_rate_bpcu.
int cmd_max_rate_vs_k(const CommonParams& p, const std::vector<int>& k_grid, int nd_bound,
                      std::ostream& out);

/// Toy channel capacities. Columns: mode,capacity_bits,argmax_p.
int cmd_toy_dmc(std::ostream& out);

/// Monte Carlo validation of the closed-form mean and variance for both
/// oscillator modes on one config. Emits the comparison rows (with a
/// leading mode column) and a pass/fail summary on `log`. Exit 0 on pass,
/// 1 on a failed gate, 2 when trials are too few for the gate.
int cmd_validate(const CommonParams& p, long long trials, int threads, std::ostream& out,
                 std::ostream& log);

/// Reads a config file (JSON with exactly the SystemConfig field names;
/// optional f_c/T_s/c_phi/c_theta derive the increment variances; pdp
/// accepts a K x L array or {"exponential": {"decay": d, "alpha": a}}).
SystemConfig load_config_file(const std::string& path, bool renormalize_pdp_rows = false);

/// The hardwired defaults every command starts from: M=200, K=10, L=20,
/// N_D=1000, unit noise, beta=1, exponential PDP (decay 0.35, alpha 1)
/// and both oscillators at c = 4.7e-18 (f_c = 2 GHz, T_s = 0.1 us).
SystemConfig default_config();

/// Small geometry for Monte Carlo validation runs: M=8, K=2, L=4, N_D=16,
/// increment std 0.01 rad on both oscillators, P_D/sigma^2 = 10 dB. The
/// closed forms are exact in M, so a small array keeps 2e5-trial runs in
/// seconds while exercising every term.
SystemConfig default_validation_config();

}  // namespace pnmimo::experiments
