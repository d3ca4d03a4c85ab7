// rates.hpp - closed-form achievable rates and derived searches
//
// Everything here is a pure function of the validated config. Per-index
// rates are exact evaluations of the effective-SINR bound; searches
// (required SNR, best data length) sit on top of them.

#pragma once

#include <limits>
#include <vector>

#include "pnmimo/config.hpp"

namespace pnmimo {

/// Evaluation mode: the two oscillator configurations plus the
/// no-phase-noise baseline (both increment variances treated as zero).
enum class Mode { NoPhaseNoise, Synchronous, NonSynchronous };

std::string to_string(Mode mode);

/// The i-dependent variance kernels and the i-independent constant of the
/// effective-noise variance. kappa/xi/varpi vanish without phase noise.
struct VarianceKernels {
    double kappa = 0.0;
    double xi = 0.0;
    double varpi = 0.0;
    double C = 0.0;
};

/// Per-index, per-user and sum rates for one mode, bits per channel use.
struct RateReport {
    Mode mode = Mode::NoPhaseNoise;
    int K = 0, N_D = 0;
    std::vector<double> per_index;  // [k][i - data.first]
    std::vector<double> per_user;   // (1/N_c) sum_i of per_index
    double sum_rate = 0.0;

    double rate(int k, int n) const { return per_index[static_cast<std::size_t>(k) * N_D + n]; }
};

/// Power scaling P_D = E_u / M^eta for the large-array limits.
struct ArrayGainQuery {
    double E_u = 1.0;
    double eta = 0.5;
};

enum class SpecialCase { UtOnly, BsOnlySync, BsOnlyNonsync };
enum class Regime { Finite, HighSnr, LargeArray };

/// E[A_k[i]]: coherent gain sqrt(P_D) M alpha_k damped by the oscillator
/// drift over i - (k-1)L channel uses. Identical in both modes.
double mean_A(const ValidatedConfig& vc, int k, int i, Mode mode = Mode::Synchronous);

/// kappa, xi, varpi at (k, i) plus C_k, honoring the mode's effective
/// increment variances.
VarianceKernels variance_kernels(const ValidatedConfig& vc, int k, int i,
                                 Mode mode = Mode::Synchronous);

/// Var(EN_k[i]) for the requested mode.
double effective_noise_variance(const ValidatedConfig& vc, int k, int i, Mode mode);

/// Per-index achievable rate, bits per channel use. P_D = 0 returns 0.
double rate_per_index(const ValidatedConfig& vc, int k, int i, Mode mode);

/// (1/N_c) sum over I_d of the per-index rates.
double per_user_rate(const ValidatedConfig& vc, int k, Mode mode);

/// Full report: per-index, per-user, and the sum over users.
RateReport sum_rate(const ValidatedConfig& vc, Mode mode);

/// No-phase-noise sum rate evaluated directly from its closed form
/// (N_D/N_c) sum_k log2(1 + P_D M^2 alpha_k^2 / C_k); equals
/// sum_rate(vc, NoPhaseNoise) to rounding.
double no_phase_noise_sum_rate(const ValidatedConfig& vc);

/// P_D/sigma^2 -> infinity saturation value of the per-user rate.
double high_snr_limit(const ValidatedConfig& vc, int k, Mode mode);

/// Large-array limit of the per-user rate under P_D = E_u / M^eta.
/// eta = 1/2 evaluates the closed-form limit; eta > 1/2 returns 0.
/// The limit does not exist in closed form here for eta < 1/2.
double array_gain_limit(const ValidatedConfig& vc, int k, Mode mode, const ArrayGainQuery& q);

/// Finite-M rate under the scaled power P_D = E_u / M^eta (the SINR
/// scaling expression behind the array-gain law); vc supplies everything
/// except P_D, which is replaced.
double array_gain_rate(const ValidatedConfig& vc, int k, Mode mode, const ArrayGainQuery& q);

/// Per-index rate of the two single-sided phase noise specializations, in
/// the requested regime. The config must have the corresponding increment
/// variance equal to zero. LargeArray uses E_u = cfg.P_D.
double special_case_rate(const ValidatedConfig& vc, int k, int i, SpecialCase sc, Regime regime);

struct RequiredSnr {
    enum class Status { Ok, InfeasibleTarget, DegenerateTarget };
    Status status = Status::Ok;
    double snr_db = std::numeric_limits<double>::quiet_NaN();
    double saturation_bpcu = 0.0;  // per-user high-SNR saturation for the mode
};

/// Minimum P_D/sigma^2 (dB) so the average per-user rate reaches
/// `target_bpcu`. Bisection on log power to |rate - target| < 1e-6 bpcu;
/// the rate is strictly increasing and saturating in P_D. Targets at or
/// above saturation report InfeasibleTarget (with the saturation value);
/// targets <= 0 report DegenerateTarget with a -inf sentinel.
RequiredSnr required_snr_for_rate(const ValidatedConfig& vc, Mode mode, double target_bpcu);

struct BestDataLength {
    int N_D = 0;
    double sum_rate = 0.0;
};

/// Exact maximizer of the sum rate over N_D in [1, bound] by incremental
/// cumulative evaluation. `patience` > 0 allows early exit once the best
/// N_D is that many increments old; the sum rate is unimodal in N_D
/// (monotone without phase noise), so a long patience window is safe.
/// patience = 0 scans the whole range.
BestDataLength optimize_data_length(const ValidatedConfig& vc, Mode mode, int bound,
                                    int patience = 8192);

}  // namespace pnmimo
